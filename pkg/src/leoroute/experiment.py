"""Experiment orchestration: run (router, gateway-count, seed) cells,
persist per-cell artifacts and manifests, and aggregate sweep-level
summary CSVs.

Cell outputs land in ``<out>/<router>-g<N>-s<seed>/`` and are never
overwritten by other cells; a manifest records the config hash and seed
so any cell can be reproduced (or reused) exactly.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (DEFAULT_WINDOW, decomposition_of_reports, regress,
                       stability_of_report, timeseries_rows, write_latency_csv,
                       write_stability_csv, write_timeseries_csv,
                       write_unstable_ratio_csv)
from .config import ScenarioSpec, load_scenario
from .simcore import SimReport, Simulation

ROUTERS = ("datarate", "genie", "qlearn")

# Windows for the per-route convergence summary stored in each manifest.
EARLY_WINDOW_S = 0.25
STEADY_TAIL_S = 5.0
EARLY_STABILITY_CUT_S = 0.5


def cell_dir_name(router: str, num_gateways: int, seed: int) -> str:
    return f"{router}-g{num_gateways}-s{seed}"


def _route_dynamics(report: SimReport, window: int = DEFAULT_WINDOW) -> list[dict]:
    """Early vs. steady-state latency and early stability per route."""
    out = []
    horizon = report.horizon_s
    for (src, dst), times in sorted(report.route_times.items()):
        lat = report.route_latency_ms[(src, dst)]
        early = lat[times <= EARLY_WINDOW_S]
        steady = lat[times >= horizon - STEADY_TAIL_S]
        prefix = lat[times <= EARLY_STABILITY_CUT_S]
        res = regress(prefix, window)
        out.append({
            "src": src,
            "dst": dst,
            "delivered": int(len(lat)),
            "early_mean_ms": float(early.mean()) if len(early) else math.nan,
            "steady_mean_ms": float(steady.mean()) if len(steady) else math.nan,
            "early_decision": res.decision,
            "early_n": res.n,
        })
    return out


def run_cell(spec: ScenarioSpec, router: str, num_gateways: int, seed: int,
             out_root: str | Path, horizon_s: float | None = None,
             packets_csv: bool = False, record_hops: bool = False,
             reuse: bool = True) -> dict:
    """Run one cell (or reuse its artifacts) and return its manifest."""
    out_dir = Path(out_root) / cell_dir_name(router, num_gateways, seed)
    manifest_path = out_dir / "manifest.json"
    cfg_hash = spec.config_hash()
    if reuse and manifest_path.exists():
        manifest = json.loads(manifest_path.read_text())
        if (manifest.get("config_hash") == cfg_hash
                and manifest.get("code_version") == __version__
                and manifest.get("horizon_s") == (horizon_s or spec.sim["horizon_s"])
                and (not packets_csv or (out_dir / "packets.csv").exists())):
            return manifest

    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = str(out_dir / "packets.csv") if packets_csv else None
    scenario = spec.build(num_gateways, seed, horizon_s=horizon_s,
                          packet_csv_path=csv_path, record_hops=record_hops)
    report = Simulation(scenario, router).run()

    stability = stability_of_report(report)
    write_stability_csv(out_dir / "stability.csv", stability, scenario.gateway_names)
    decomp = decomposition_of_reports([report])
    write_latency_csv(out_dir / "latency_by_gateways.csv", [decomp])
    write_timeseries_csv(out_dir / "timeseries.csv", timeseries_rows([report]))

    manifest = {
        "scenario": spec.name,
        "config_hash": cfg_hash,
        "code_version": __version__,
        "router": router,
        "num_gateways": num_gateways,
        "seed": seed,
        "horizon_s": report.horizon_s,
        "max_load_bps": report.max_load_bps,
        "uplink_bps": report.uplink_bps,
        "generated": report.generated,
        "delivered": report.delivered,
        "dropped": report.dropped,
        "drop_reasons": report.drop_reasons,
        "in_flight": report.in_flight,
        "sum_queue_s": report.sum_queue_s,
        "sum_tx_s": report.sum_tx_s,
        "sum_prop_s": report.sum_prop_s,
        "max_tx_s": report.max_tx_s,
        "mean_latency_ms": report.mean_latency_ms(),
        "n_unstable": stability.n_unstable,
        "n_tested": stability.n_tested,
        "unstable_routes": [[r.src, r.dst] for r in stability.routes
                            if r.result.decision == "unstable"],
        "snapshots_checked": len(report.snapshots),
        "route_dynamics": _route_dynamics(report),
        "wall_s": report.wall_s,
    }
    manifest_path.write_text(json.dumps(manifest, indent=1))
    return manifest


def _cell_worker(args: dict) -> dict:
    spec = load_scenario(args["scenario_path"])
    return run_cell(spec, args["router"], args["num_gateways"], args["seed"],
                    args["out_root"], horizon_s=args["horizon_s"],
                    packets_csv=args["packets_csv"], reuse=args["reuse"])


@dataclass
class ExperimentResult:
    out_root: Path
    manifests: list[dict]

    def cells(self, router: str | None = None, num_gateways: int | None = None
              ) -> list[dict]:
        out = []
        for m in self.manifests:
            if router is not None and m["router"] != router:
                continue
            if num_gateways is not None and m["num_gateways"] != num_gateways:
                continue
            out.append(m)
        return out

    def unstable_ratio(self, router: str, num_gateways: int) -> float:
        cells = self.cells(router, num_gateways)
        tested = sum(c["n_tested"] for c in cells)
        unstable = sum(c["n_unstable"] for c in cells)
        return unstable / tested if tested else math.nan


def run_experiment(spec: ScenarioSpec, routers, gateway_counts, seeds,
                   out_root: str | Path, horizon_s: float | None = None,
                   jobs: int = 1, packets_csv: bool = False, reuse: bool = True,
                   scenario_path: str | Path | None = None,
                   progress=None) -> ExperimentResult:
    """Run the full sweep and write aggregate CSVs at the output root."""
    out_root = Path(out_root)
    out_root.mkdir(parents=True, exist_ok=True)
    cells = [(router, n, seed)
             for router in routers for n in gateway_counts for seed in seeds]

    manifests = []
    if jobs > 1 and scenario_path is not None:
        payloads = [{"scenario_path": str(scenario_path), "router": r,
                     "num_gateways": n, "seed": s, "out_root": str(out_root),
                     "horizon_s": horizon_s, "packets_csv": packets_csv,
                     "reuse": reuse} for r, n, s in cells]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for k, manifest in enumerate(pool.map(_cell_worker, payloads)):
                manifests.append(manifest)
                if progress:
                    progress(k + 1, len(cells), manifest)
    else:
        for k, (router, n, seed) in enumerate(cells):
            manifest = run_cell(spec, router, n, seed, out_root,
                                horizon_s=horizon_s, packets_csv=packets_csv,
                                reuse=reuse)
            manifests.append(manifest)
            if progress:
                progress(k + 1, len(cells), manifest)

    result = ExperimentResult(out_root, manifests)
    write_aggregates(result)
    return result


def write_aggregates(result: ExperimentResult) -> None:
    """Sweep-level CSVs: unstable ratios, pooled latency decomposition,
    and seed-averaged latency time series. The grid is read off the
    manifests so partial or combined sweeps aggregate correctly."""
    ratio_rows = []
    latency_rows = []
    ts_rows = []
    grid = sorted({(m["router"], m["num_gateways"]) for m in result.manifests})
    for router, n in grid:
        cells = result.cells(router, n)
        tested = sum(c["n_tested"] for c in cells)
        unstable = sum(c["n_unstable"] for c in cells)
        ratio_rows.append((router, n, unstable / tested if tested else math.nan,
                           unstable, tested))
        delivered = sum(c["delivered"] for c in cells)
        if delivered:
            latency_rows.append(_pooled_decomposition(cells, router, n))
        ts_rows.extend(_pooled_timeseries(result.out_root, cells, router, n))
    write_unstable_ratio_csv(result.out_root / "unstable_ratio.csv", ratio_rows)
    from .analysis import LatencyDecomposition
    write_latency_csv(result.out_root / "latency_by_gateways.csv",
                      [LatencyDecomposition(n, r, q, t, p)
                       for (r, n, q, t, p) in latency_rows])
    write_timeseries_csv(result.out_root / "timeseries.csv", ts_rows)


def _pooled_decomposition(cells, router, n):
    delivered = sum(c["delivered"] for c in cells)
    return (router, n,
            1e3 * sum(c["sum_queue_s"] for c in cells) / delivered,
            1e3 * sum(c["sum_tx_s"] for c in cells) / delivered,
            1e3 * sum(c["sum_prop_s"] for c in cells) / delivered)


def _pooled_timeseries(out_root: Path, cells, router, n):
    """Equal-weight average of the per-seed binned latency curves."""
    series: dict[float, list[float]] = {}
    for c in cells:
        path = out_root / cell_dir_name(router, n, c["seed"]) / "timeseries.csv"
        if not path.exists():
            continue
        with open(path) as fh:
            next(fh)
            for line in fh:
                _, _, t_s, ms = line.rstrip("\n").split(",")
                series.setdefault(float(t_s), []).append(float(ms))
    return [(router, n, t, float(np.mean(vals)))
            for t, vals in sorted(series.items())]
