"""Stability and latency analysis of simulation reports.

A route is unstable when the OLS slope of per-packet latency (ms)
against packet index, fitted over the last 200 packets received at the
destination, is significantly positive under a one-sided t-test at the
5% level. Routes delivering fewer than 3 packets in the window are
untested and excluded from ratios.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats

DEFAULT_WINDOW = 200
DEFAULT_SIGNIFICANCE = 0.05

STABLE = "stable"
UNSTABLE = "unstable"
UNTESTED = "untested"


@dataclass(frozen=True)
class RouteSeries:
    """Delivered-packet latency series of one source-destination pair."""

    src: int
    dst: int
    latency_ms: np.ndarray   # ordered by reception at the destination

    def __len__(self) -> int:
        return len(self.latency_ms)


@dataclass(frozen=True)
class RegressionResult:
    intercept_ms: float
    slope_ms_per_packet: float
    slope_se: float
    n: int
    t_stat: float
    decision: str


def t_critical(df: int, significance: float = DEFAULT_SIGNIFICANCE) -> float:
    """Upper-tail Student-t critical value (numerical inverse CDF)."""
    if df < 1:
        raise ValueError("need at least 1 degree of freedom")
    return float(stats.t.ppf(1.0 - significance, df))


def regress(latency_ms, window: int = DEFAULT_WINDOW,
            significance: float = DEFAULT_SIGNIFICANCE) -> RegressionResult:
    """OLS of latency against packet index over the trailing window.

    The slope's standard error uses the classical residual-variance
    formula; a perfectly collinear (constant or exact-line) series gets
    SE = 0 and is decided by the slope's sign alone.
    """
    y = np.asarray(latency_ms, dtype=float)
    if len(y) > window:
        y = y[-window:]
    n = len(y)
    if n < 3:
        return RegressionResult(math.nan, math.nan, math.nan, n, math.nan, UNTESTED)
    x = np.arange(n, dtype=float)
    xm = x.mean()
    ym = y.mean()
    sxx = float(((x - xm) ** 2).sum())
    sxy = float(((x - xm) * (y - ym)).sum())
    syy = float(((y - ym) ** 2).sum())
    slope = sxy / sxx
    intercept = ym - slope * xm
    resid = y - (intercept + slope * x)
    ssr = float((resid ** 2).sum())
    se = math.sqrt(ssr / (n - 2) / sxx)
    # Collapse float dust on exact fits so they are decided by sign.
    if syy == 0.0 or ssr <= syy * 1e-26:
        se = 0.0
    if se == 0.0:
        t_stat = math.inf if slope > 0 else (-math.inf if slope < 0 else 0.0)
        decision = UNSTABLE if slope > 0 else STABLE
    else:
        t_stat = slope / se
        decision = UNSTABLE if t_stat > t_critical(n - 2, significance) else STABLE
    return RegressionResult(intercept, slope, se, n, t_stat, decision)


def stability_test(result: RegressionResult,
                   significance: float = DEFAULT_SIGNIFICANCE) -> str:
    """Decision for an already-fitted regression (kept separate so a fit
    can be re-tested at another significance level)."""
    if result.n < 3:
        return UNTESTED
    if result.slope_se == 0.0 or math.isinf(result.t_stat):
        return UNSTABLE if result.slope_ms_per_packet > 0 else STABLE
    return (UNSTABLE if result.t_stat > t_critical(result.n - 2, significance)
            else STABLE)


@dataclass(frozen=True)
class RouteStability:
    src: int
    dst: int
    result: RegressionResult


@dataclass
class StabilitySummary:
    routes: list[RouteStability]

    @property
    def n_tested(self) -> int:
        return sum(1 for r in self.routes if r.result.decision != UNTESTED)

    @property
    def n_unstable(self) -> int:
        return sum(1 for r in self.routes if r.result.decision == UNSTABLE)

    @property
    def unstable_ratio(self) -> float:
        tested = self.n_tested
        return self.n_unstable / tested if tested else math.nan


def stability_of_report(report, window: int = DEFAULT_WINDOW,
                        significance: float = DEFAULT_SIGNIFICANCE,
                        up_to_s: float | None = None) -> StabilitySummary:
    """Per-route stability decisions for one simulation report.

    ``up_to_s`` restricts each series to packets received before a cut
    time, which lets the same report answer "was the route stable by
    t=0.5 s" style questions.
    """
    routes = []
    for (src, dst), lat in sorted(report.route_latency_ms.items()):
        if up_to_s is not None:
            times = report.route_times[(src, dst)]
            lat = lat[times <= up_to_s]
        routes.append(RouteStability(src, dst, regress(lat, window, significance)))
    return StabilitySummary(routes)


def write_stability_csv(path: str | Path, summary: StabilitySummary,
                        gateway_names: list[str]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["src", "dst", "n", "beta1", "se", "t", "decision"])
        for r in summary.routes:
            res = r.result
            if res.decision == UNTESTED:
                w.writerow([gateway_names[r.src], gateway_names[r.dst], res.n,
                            "", "", "", UNTESTED])
            else:
                w.writerow([gateway_names[r.src], gateway_names[r.dst], res.n,
                            repr(res.slope_ms_per_packet), repr(res.slope_se),
                            repr(res.t_stat), res.decision])


@dataclass(frozen=True)
class LatencyDecomposition:
    num_gateways: int
    router: str
    mean_queue_ms: float
    mean_tx_ms: float
    mean_prop_ms: float


def decomposition_of_reports(reports) -> LatencyDecomposition:
    """Pooled mean latency components over delivered packets of one or
    more reports from the same (router, gateway-count) cell."""
    reports = list(reports)
    delivered = sum(r.delivered for r in reports)
    if delivered == 0:
        return LatencyDecomposition(reports[0].num_gateways, reports[0].router,
                                    math.nan, math.nan, math.nan)
    return LatencyDecomposition(
        num_gateways=reports[0].num_gateways,
        router=reports[0].router,
        mean_queue_ms=1e3 * sum(r.sum_queue_s for r in reports) / delivered,
        mean_tx_ms=1e3 * sum(r.sum_tx_s for r in reports) / delivered,
        mean_prop_ms=1e3 * sum(r.sum_prop_s for r in reports) / delivered,
    )


def write_latency_csv(path: str | Path, rows: list[LatencyDecomposition]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["num_gateways", "router", "mean_queue_ms", "mean_tx_ms",
                    "mean_prop_ms"])
        for r in rows:
            w.writerow([r.num_gateways, r.router, repr(r.mean_queue_ms),
                        repr(r.mean_tx_ms), repr(r.mean_prop_ms)])


def timeseries_rows(reports) -> list[tuple[str, int, float, float]]:
    """(router, num_gateways, sim_time_s, e2e_ms) rows pooled over seeds."""
    reports = list(reports)
    bin_s = reports[0].ts_bin_s
    n = max(len(r.ts_sum_ms) for r in reports)
    sums = np.zeros(n)
    counts = np.zeros(n)
    for r in reports:
        sums[:len(r.ts_sum_ms)] += r.ts_sum_ms
        counts[:len(r.ts_count)] += r.ts_count
    rows = []
    for b in range(n):
        if counts[b] > 0:
            rows.append((reports[0].router, reports[0].num_gateways,
                         (b + 0.5) * bin_s, float(sums[b] / counts[b])))
    return rows


def write_timeseries_csv(path: str | Path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["router", "num_gateways", "sim_time_s", "e2e_ms"])
        for router, n_gws, t, ms in rows:
            w.writerow([router, n_gws, repr(t), repr(ms)])


def write_unstable_ratio_csv(path: str | Path, rows) -> None:
    """rows: (router, num_gateways, ratio, n_unstable, n_tested)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["router", "num_gateways", "ratio", "n_unstable", "n_tested"])
        for router, n_gws, ratio, n_unst, n_test in rows:
            w.writerow([router, n_gws, repr(ratio), n_unst, n_test])
