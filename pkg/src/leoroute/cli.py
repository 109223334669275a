"""Command-line entry points.

    leoroute run   --config kepler.yaml --router qlearn --gateways 3 --seed 1 --out results/
    leoroute sweep --config kepler.yaml --routers datarate,qlearn --gateways 2..10 --seeds 1,2,3 --out results/
    leoroute tune  --out tuned.yaml

Errors exit nonzero after printing a single machine-readable JSON line
on stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import default_scenario, load_scenario
from .errors import ConfigError, ScenarioInfeasibleError
from .experiment import ROUTERS, run_cell, run_experiment


def _parse_gateways(text: str) -> list[int]:
    text = text.strip()
    for sep in ("..", "-"):
        if sep in text:
            lo, hi = text.split(sep, 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError(f"empty gateway range {text!r}")
            return list(range(lo, hi + 1))
    return [int(text)]


def _parse_ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _load(args) -> tuple:
    if args.config:
        return load_scenario(args.config), Path(args.config)
    return default_scenario(), None


def _progress(done: int, total: int, manifest: dict) -> None:
    print(f"[{done}/{total}] {manifest['router']}-g{manifest['num_gateways']}"
          f"-s{manifest['seed']}: generated={manifest['generated']} "
          f"delivered={manifest['delivered']} dropped={manifest['dropped']} "
          f"unstable={manifest['n_unstable']}/{manifest['n_tested']} "
          f"wall={manifest['wall_s']:.1f}s", flush=True)


def cmd_run(args) -> int:
    spec, _ = _load(args)
    counts = _parse_gateways(args.gateways)
    out = Path(args.out)
    for n in counts:
        manifest = run_cell(spec, args.router, n, args.seed, out,
                            horizon_s=args.horizon,
                            packets_csv=args.packets_csv,
                            record_hops=args.record_hops,
                            reuse=not args.force)
        _progress(1, 1, manifest)
    return 0


def cmd_sweep(args) -> int:
    spec, path = _load(args)
    routers = [r.strip() for r in args.routers.split(",") if r.strip()]
    for r in routers:
        if r not in ROUTERS:
            raise ConfigError("routers", f"unknown router {r!r}")
    counts = _parse_gateways(args.gateways)
    seeds = _parse_ints(args.seeds)
    run_experiment(spec, routers, counts, seeds, Path(args.out),
                   horizon_s=args.horizon, jobs=args.jobs,
                   packets_csv=args.packets_csv, reuse=not args.force,
                   scenario_path=path, progress=_progress)
    print(f"aggregates written under {args.out}", flush=True)
    return 0


def cmd_tune(args) -> int:
    from .tuning import grid_search, write_tuned_config
    spec, _ = _load(args)
    best, table = grid_search(spec, num_gateways=args.gateways,
                              horizon_s=args.horizon, seed=args.seed)
    for row in table:
        print(row, flush=True)
    write_tuned_config(best, args.out)
    print(f"tuned q-learning block written to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="leoroute")
    sub = p.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="simulate one router over one or more "
                                      "gateway counts with a single seed")
    runp.add_argument("--config", help="scenario YAML (default: bundled)")
    runp.add_argument("--router", required=True, choices=ROUTERS)
    runp.add_argument("--gateways", required=True,
                      help="active gateway count n, or range lo..hi")
    runp.add_argument("--seed", type=int, default=1)
    runp.add_argument("--out", required=True)
    runp.add_argument("--horizon", type=float, default=None,
                      help="override the scenario horizon (s)")
    runp.add_argument("--packets-csv", action="store_true",
                      help="stream the per-packet record CSV")
    runp.add_argument("--record-hops", action="store_true",
                      help="keep per-hop audit records in memory")
    runp.add_argument("--force", action="store_true",
                      help="rerun even if matching artifacts exist")
    runp.set_defaults(func=cmd_run)

    sw = sub.add_parser("sweep", help="run a (router, gateways, seed) grid "
                                      "and write aggregate CSVs")
    sw.add_argument("--config", help="scenario YAML (default: bundled)")
    sw.add_argument("--routers", default="datarate,genie,qlearn")
    sw.add_argument("--gateways", default="2..10")
    sw.add_argument("--seeds", default="1,2,3")
    sw.add_argument("--out", required=True)
    sw.add_argument("--horizon", type=float, default=None)
    sw.add_argument("--jobs", type=int, default=1)
    sw.add_argument("--packets-csv", action="store_true")
    sw.add_argument("--force", action="store_true")
    sw.set_defaults(func=cmd_sweep)

    tn = sub.add_parser("tune", help="grid-search q-learning parameters on a "
                                     "small scenario")
    tn.add_argument("--config", help="scenario YAML (default: bundled)")
    tn.add_argument("--gateways", type=int, default=3)
    tn.add_argument("--horizon", type=float, default=2.0)
    tn.add_argument("--seed", type=int, default=1)
    tn.add_argument("--out", required=True)
    tn.set_defaults(func=cmd_tune)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(json.dumps({"error": "config", "field": exc.field,
                          "message": str(exc)}), file=sys.stderr)
        return 2
    except ScenarioInfeasibleError as exc:
        print(json.dumps({"error": "infeasible", "message": str(exc)}),
              file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
