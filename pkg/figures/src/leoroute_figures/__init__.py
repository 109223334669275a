"""Figure generation for constellation routing experiment summaries."""

__version__ = "0.1.0"
