"""End-to-end packet routing simulator for LEO constellations.

Library layout follows the pipeline: constellation geometry ->
time-varying topology -> link budget -> traffic -> discrete-event core,
with three routing policies (inverse-rate shortest path, queue-aware
genie shortest path, distributed Q-routing), post-run stability and
latency analysis, and a CLI for experiment sweeps.
"""

__version__ = "0.1.0"
