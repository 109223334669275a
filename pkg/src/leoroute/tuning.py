"""Grid-search harness for the learning hyperparameters.

Scores each candidate on a short 3-gateway run by delivery ratio minus
mean end-to-end latency in seconds, which punishes both congestion
collapse and slow detours. The winning block is written as a YAML
fragment; the committed default scenario carries the tuned values.
"""
from __future__ import annotations

import itertools
from dataclasses import asdict, replace
from pathlib import Path

import yaml

from .config import ScenarioSpec
from .qrouting import QLearningParams
from .simcore import Simulation

DEFAULT_GRID = {
    "learning_rate": [0.1, 0.2, 0.3],
    "discount": [0.7, 0.9],
    "eps_decay_steps": [200.0, 500.0],
    "eps_min": [0.0, 0.01],
}


def score_params(spec: ScenarioSpec, params: QLearningParams, num_gateways: int,
                 horizon_s: float, seed: int) -> tuple[float, float, float]:
    scenario = spec.build(num_gateways, seed, horizon_s=horizon_s)
    scenario.qlearning = params
    report = Simulation(scenario, "qlearn").run()
    ratio = report.delivery_ratio()
    mean_ms = report.mean_latency_ms()
    return ratio - mean_ms / 1e3, ratio, mean_ms


def grid_search(spec: ScenarioSpec, num_gateways: int = 3, horizon_s: float = 2.0,
                seed: int = 1, grid: dict | None = None
                ) -> tuple[QLearningParams, list[str]]:
    grid = grid or DEFAULT_GRID
    keys = sorted(grid)
    best_params = spec.qlearning
    best_score = None
    table = []
    for combo in itertools.product(*(grid[k] for k in keys)):
        params = replace(spec.qlearning, **dict(zip(keys, combo)))
        score, ratio, mean_ms = score_params(spec, params, num_gateways,
                                             horizon_s, seed)
        table.append(", ".join(f"{k}={v}" for k, v in zip(keys, combo))
                     + f" -> score={score:.4f} delivery={ratio:.3f} "
                       f"latency={mean_ms:.2f}ms")
        if best_score is None or score > best_score:
            best_score, best_params = score, params
    table.append(f"best: {best_params}")
    return best_params, table


def write_tuned_config(params: QLearningParams, path: str | Path) -> None:
    block = asdict(params)
    block = {
        "learning_rate": block["learning_rate"],
        "discount": block["discount"],
        "eps_initial": block["eps_initial"],
        "eps_min": block["eps_min"],
        "eps_decay_steps": block["eps_decay_steps"],
        "w_queue": block["w_queue"],
        "w_distance": block["w_distance"],
        "r_delivery": block["r_delivery"],
        "r_loop": block["r_loop"],
        "queue_code_threshold": block["queue_code_threshold"],
        "capacity_split_bps": block["capacity_split_bps"],
        "initial_q": block["initial_q"],
    }
    Path(path).write_text(yaml.safe_dump({"qlearning": block}, sort_keys=False))
