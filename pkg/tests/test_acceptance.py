"""Acceptance suite: one test per top-level criterion, each printing a
PASS line when it holds.

The trend-reproduction and learning-dynamics criteria run the committed
30 s experiment (datarate + qlearn at 2..10 gateways, genie at 2..6,
seeds 1..3). That takes a few hours of CPU the first time; results are
cached under results/acceptance and reused on identical config + code
versions, and can be pre-built with:

    leoroute sweep --routers datarate,qlearn --gateways 2..10 --seeds 1,2,3 --out results/acceptance
    leoroute sweep --routers genie --gateways 2..6 --seeds 1,2,3 --out results/acceptance
"""
import math
import time
from pathlib import Path

import numpy as np
import pytest

from leoroute.analysis import regress, t_critical
from leoroute.config import default_scenario
from leoroute.experiment import run_cell, run_experiment, ExperimentResult
from leoroute.qrouting import update_q
from leoroute.routers import dijkstra
from leoroute.simcore import run as run_sim

RESULTS = Path(__file__).resolve().parent.parent / "results" / "acceptance"

TREND_SEEDS = (1, 2, 3)
TREND_GATEWAYS = tuple(range(2, 11))
GENIE_GATEWAYS = tuple(range(2, 7))


def _ok(name: str):
    print(f"ACCEPTANCE {name}: PASS")


class TestDijkstraOracle:
    def test_matches_exhaustive_enumeration_on_200_graphs(self):
        start = time.perf_counter()
        rng = np.random.default_rng(2024)
        checked = 0
        for _ in range(200):
            n = int(rng.integers(2, 11))
            adj = [[] for _ in range(n)]
            for i in range(n):
                for j in range(i + 1, n):
                    if rng.random() < 0.55:
                        w = float(rng.uniform(0.05, 10.0))
                        adj[i].append((j, w))
                        adj[j].append((i, w))
            dist, _ = dijkstra(adj, 0)
            # exhaustive simple-path enumeration
            best = [math.inf] * n
            stack = [(0, 0.0, 1)]
            while stack:
                u, cost, seen = stack.pop()
                if cost < best[u]:
                    best[u] = cost
                for v, w in adj[u]:
                    if not seen & (1 << v) and cost + w < best[v] + 1e-15:
                        stack.append((v, cost + w, seen | (1 << v)))
            for v in range(n):
                assert dist[v] == pytest.approx(best[v], rel=1e-12, abs=1e-12)
            checked += 1
        elapsed = time.perf_counter() - start
        assert checked == 200
        assert elapsed < 10.0
        _ok(f"dijkstra-oracle ({elapsed:.1f}s)")


class TestQueueModelAudit:
    def test_three_gateway_run_reproduces_terms(self, tmp_path):
        start = time.perf_counter()
        spec = default_scenario()
        csv_path = tmp_path / "packets.csv"
        scenario = spec.build(3, seed=11, horizon_s=0.5,
                              packet_csv_path=str(csv_path), record_hops=True)
        report = run_sim(scenario, "qlearn")
        assert report.delivered > 1000

        import csv as _csv
        by_pid = {}
        for rec in report.hop_records:
            by_pid.setdefault(rec[0], []).append(rec)
        size = scenario.traffic.packet_size_bits
        c = scenario.link_budget.speed_of_light_m_s
        audited = 0
        with open(csv_path) as fh:
            for row in _csv.DictReader(fh):
                if row["dropped"] == "1" or not row["delivered_s"]:
                    continue
                q = tx = prop = 0.0
                for (_, _node, _nxt, wait, rate, dist, tx_s, prop_s) in by_pid[int(row["packet_id"])]:
                    assert abs(tx_s - size / rate) <= 1e-9
                    assert abs(prop_s - dist * 1e3 / c) <= 1e-9
                    q += wait
                    tx += tx_s
                    prop += prop_s
                assert abs(q - float(row["queue_s"])) <= 1e-9
                assert abs(tx - float(row["tx_s"])) <= 1e-9
                assert abs(prop - float(row["prop_s"])) <= 1e-9
                total = float(row["delivered_s"]) - float(row["created_s"])
                assert abs((q + tx + prop) - total) <= 1e-9
                audited += 1
        elapsed = time.perf_counter() - start
        assert audited == report.delivered
        assert elapsed < 60.0
        _ok(f"queue-model-audit ({audited} packets, {elapsed:.1f}s)")


class TestTTestCalibration:
    def test_size_and_power(self):
        start = time.perf_counter()
        rng = np.random.default_rng(7)
        trials = 1000
        fires = 0
        for _ in range(trials):
            y = rng.normal(25.0, 1.0, 200)
            if regress(y).decision == "unstable":
                fires += 1
        rate = fires / trials
        assert 0.03 <= rate <= 0.07

        # trend that climbs three noise deviations across the window
        slope = 3.0 * 1.0 / 200
        detected = 0
        for _ in range(200):
            y = 25.0 + slope * np.arange(200) + rng.normal(0, 1.0, 200)
            if regress(y).decision == "unstable":
                detected += 1
        power = detected / 200
        elapsed = time.perf_counter() - start
        assert power >= 0.99
        assert elapsed < 30.0
        _ok(f"t-test-calibration (size={rate:.3f}, power={power:.3f}, {elapsed:.1f}s)")


class TestQUpdateFixedPoint:
    def test_converges_within_tolerance(self):
        alpha, gamma = 0.1, 0.9
        shrink = (1 - alpha * (1 - gamma)) ** 1000
        # reward chosen so the 1e-6 bound is reachable in 1000 iterations
        r = 1e-3
        target = r / (1 - gamma)
        assert target * shrink < 1e-6
        v = 0.0
        iters = 0
        for iters in range(1, 1001):
            v = update_q(v, r, v, alpha, gamma)
            if abs(v - target) < 1e-6:
                break
        assert abs(v - target) < 1e-6
        assert iters <= 1000
        # exact contraction identity at arbitrary reward scale
        v2, r2 = 0.0, 2.0
        for _ in range(1000):
            v2 = update_q(v2, r2, v2, alpha, gamma)
        expect = (r2 / (1 - gamma)) * (1 - shrink)
        assert v2 == pytest.approx(expect, rel=1e-9)
        _ok(f"q-update-fixed-point ({iters} iterations)")


class TestDeterminism:
    def test_byte_identical_reruns(self, tmp_path):
        spec = default_scenario()
        blobs = []
        for k in range(2):
            csv_path = tmp_path / f"r{k}.csv"
            scenario = spec.build(3, seed=42, horizon_s=0.3,
                                  packet_csv_path=str(csv_path))
            run_sim(scenario, "qlearn")
            blobs.append(csv_path.read_bytes())
        assert blobs[0] == blobs[1]
        _ok("determinism (byte-identical per-packet CSV)")


@pytest.fixture(scope="session")
def trend_results() -> ExperimentResult:
    from leoroute.experiment import write_aggregates

    spec = default_scenario()
    res = run_experiment(spec, ["datarate", "qlearn"], TREND_GATEWAYS,
                         TREND_SEEDS, RESULTS, reuse=True)
    genie = run_experiment(spec, ["genie"], GENIE_GATEWAYS, TREND_SEEDS,
                           RESULTS, reuse=True)
    combined = ExperimentResult(RESULTS, res.manifests + genie.manifests)
    write_aggregates(combined)
    return combined


class TestConservation:
    def test_every_cell_and_fresh_runs(self, trend_results):
        for m in trend_results.manifests:
            # the engine raises at any snapshot where the identity fails,
            # so a completed cell with snapshots is itself the check
            assert m["snapshots_checked"] >= 1
            assert m["generated"] == m["delivered"] + m["dropped"] + m["in_flight"]
        spec = default_scenario()
        for router in ("datarate", "genie", "qlearn"):
            rep = run_sim(spec.build(3, seed=9, horizon_s=0.4), router)
            for t, gen, deliv, drop, inflight in rep.snapshots:
                assert gen == deliv + drop + inflight
        _ok(f"conservation ({len(trend_results.manifests)} cells + fresh runs)")


class TestTransmissionBound:
    def test_all_logged_tx_under_bound(self, trend_results):
        worst = max(m["max_tx_s"] for m in trend_results.manifests)
        assert worst <= 0.72e-3
        _ok(f"transmission-bound (max {worst * 1e3:.3f} ms)")


class TestTrendReproduction:
    def test_datarate_rise_and_qlearn_dominance(self, trend_results):
        res = trend_results
        dr = {g: res.unstable_ratio("datarate", g) for g in TREND_GATEWAYS}
        ql = {g: res.unstable_ratio("qlearn", g) for g in TREND_GATEWAYS}
        print("datarate ratios:", {g: round(v, 3) for g, v in dr.items()})
        print("qlearn   ratios:", {g: round(v, 3) for g, v in ql.items()})
        # (a) sharp rise by 9..10 for the data-rate benchmark: the ratio at
        # 9-10 must stand well above the 2..8 noise floor
        floor = sum(dr[g] for g in range(2, 9)) / 7
        peak = max(dr[9], dr[10])
        assert peak >= 0.2, f"no data-rate congestion by 10 gateways (peak {peak:.3f})"
        assert peak >= 3 * max(floor, 0.02), \
            f"rise not sharp: mean floor {floor:.3f} peak {peak:.3f}"
        # (a) q-routing never above the data-rate benchmark
        for g in TREND_GATEWAYS:
            assert ql[g] <= dr[g] + 1e-9, \
                f"qlearn ratio {ql[g]:.3f} exceeds datarate {dr[g]:.3f} at {g} gateways"
        _ok(f"trend-rise (datarate {floor:.3f} -> {peak:.3f}, qlearn <= datarate)")

    def test_qlearn_clean_at_eight(self, trend_results):
        clean = 0
        for seed in TREND_SEEDS:
            cell = trend_results.cells("qlearn", 8)
            cell = [c for c in cell if c["seed"] == seed]
            assert cell, f"missing qlearn g=8 seed={seed}"
            if cell[0]["n_unstable"] == 0:
                clean += 1
        assert clean >= 2, f"qlearn unstable-free at 8 gateways in only {clean}/3 seeds"
        _ok(f"qlearn-clean-at-8 ({clean}/3 seeds)")

    def test_propagation_dominates_at_low_counts(self, trend_results):
        for router in ("datarate", "genie", "qlearn"):
            for g in range(2, 7):
                cells = trend_results.cells(router, g)
                assert cells, f"missing {router} g={g}"
                delivered = sum(c["delivered"] for c in cells)
                q = sum(c["sum_queue_s"] for c in cells) / delivered
                p = sum(c["sum_prop_s"] for c in cells) / delivered
                assert p > q, f"{router} g={g}: queue {q * 1e3:.3f}ms >= prop {p * 1e3:.3f}ms"
        _ok("propagation-dominates (all routers, 2..6 gateways)")


class TestLearningDynamics:
    def test_warmup_decay_and_early_stability(self, trend_results):
        cells = trend_results.cells("qlearn", 3)
        assert len(cells) == len(TREND_SEEDS)
        routes = []
        for c in cells:
            routes.extend(c["route_dynamics"])
        assert routes
        good = 0
        for r in routes:
            warm = (r["early_mean_ms"] > r["steady_mean_ms"]
                    and not math.isnan(r["early_mean_ms"]))
            settled = r["early_decision"] == "stable" and r["early_n"] >= 3
            if warm and settled:
                good += 1
        frac = good / len(routes)
        assert frac >= 0.9, f"only {good}/{len(routes)} routes warm up and settle"
        _ok(f"learning-dynamics ({good}/{len(routes)} routes)")
