"""The three experiment figures, rendered from summary CSVs.

Ordering and styling are fixed so repeated runs of the same inputs give
the same image: routers are sorted by name and series colors come from a
fixed map.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .schemas import (LATENCY_COLUMNS, TIMESERIES_COLUMNS,
                      UNSTABLE_RATIO_COLUMNS, read_rows)  # noqa: E402

KINDS = ("unstable-ratio", "latency-decomposition", "time-evolution")

ROUTER_COLORS = {
    "datarate": "tab:blue",
    "genie": "tab:orange",
    "qlearn": "tab:green",
}
ROUTER_LABELS = {
    "datarate": "data rate",
    "genie": "latency genie",
    "qlearn": "q-routing",
}


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    input_csv: Path
    output_path: Path

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; "
                             f"expected one of {', '.join(KINDS)}")


def _color(router: str) -> str:
    return ROUTER_COLORS.get(router, "tab:gray")


def _label(router: str) -> str:
    return ROUTER_LABELS.get(router, router)


def unstable_ratio_figure(csv_path: str | Path) -> plt.Figure:
    """Ratio of unstable source-destination pairs per router vs. active
    gateway count; one line per router."""
    rows = read_rows(csv_path, UNSTABLE_RATIO_COLUMNS)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for router in sorted({r["router"] for r in rows}):
        pts = sorted((int(r["num_gateways"]), float(r["ratio"]))
                     for r in rows if r["router"] == router)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o",
                color=_color(router), label=_label(router))
    ax.set_xlabel("active gateways")
    ax.set_ylabel("ratio of unstable paths")
    ax.set_ylim(bottom=0.0)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return fig


def latency_decomposition_figure(csv_path: str | Path) -> plt.Figure:
    """Mean propagation and queueing latency per router per gateway
    count, as grouped stacked bars. Transmission time is orders of
    magnitude below both and is not drawn."""
    rows = read_rows(csv_path, LATENCY_COLUMNS)
    routers = sorted({r["router"] for r in rows})
    counts = sorted({int(r["num_gateways"]) for r in rows})
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    width = 0.8 / max(len(routers), 1)
    for k, router in enumerate(routers):
        xs, prop, queue = [], [], []
        for i, n in enumerate(counts):
            match = [r for r in rows
                     if r["router"] == router and int(r["num_gateways"]) == n]
            if not match:
                continue
            xs.append(i + (k - (len(routers) - 1) / 2) * width)
            prop.append(float(match[0]["mean_prop_ms"]))
            queue.append(float(match[0]["mean_queue_ms"]))
        ax.bar(xs, prop, width=width, color=_color(router),
               label=f"{_label(router)} propagation")
        ax.bar(xs, queue, width=width, bottom=prop, color=_color(router),
               alpha=0.45, hatch="//", label=f"{_label(router)} queueing")
    ax.set_xticks(range(len(counts)))
    ax.set_xticklabels([str(n) for n in counts])
    ax.set_xlabel("active gateways")
    ax.set_ylabel("mean E2E latency [ms]")
    ax.grid(True, axis="y", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def time_evolution_figure(csv_path: str | Path) -> plt.Figure:
    """Mean end-to-end latency vs. simulation time, one line per
    (router, gateway count) pair."""
    rows = read_rows(csv_path, TIMESERIES_COLUMNS)
    pairs = sorted({(r["router"], int(r["num_gateways"])) for r in rows})
    counts = sorted({n for _, n in pairs})
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    styles = ["-", "--", ":", "-."]
    for router, n in pairs:
        pts = [(float(r["sim_time_s"]), float(r["e2e_ms"])) for r in rows
               if r["router"] == router and int(r["num_gateways"]) == n]
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts],
                linestyle=styles[counts.index(n) % len(styles)],
                color=_color(router),
                label=f"{_label(router)}, {n} gateways")
    ax.set_xlabel("simulation time [s]")
    ax.set_ylabel("mean E2E latency [ms]")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


_BUILDERS = {
    "unstable-ratio": unstable_ratio_figure,
    "latency-decomposition": latency_decomposition_figure,
    "time-evolution": time_evolution_figure,
}


def plot(spec: FigureSpec) -> Path:
    """Render one figure from its CSV and write the image file."""
    fig = _BUILDERS[spec.kind](spec.input_csv)
    out = Path(spec.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
