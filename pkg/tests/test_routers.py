import itertools
import math

import numpy as np
import pytest

from helpers import make_linkstate, simple_gsl
from leoroute.errors import NoRouteError
from leoroute.routers import (dijkstra, extract_route, route_data_rate,
                              route_latency_genie, shortest_route)

C = 299792458.0


def brute_force_cost(adj, src, dst):
    """Cheapest simple path by exhaustive enumeration."""
    n = len(adj)
    best = math.inf
    stack = [(src, 0.0, 1 << src)]
    while stack:
        node, cost, seen = stack.pop()
        if cost >= best:
            continue
        if node == dst:
            best = cost
            continue
        for v, w in adj[node]:
            if not seen & (1 << v):
                stack.append((v, cost + w, seen | (1 << v)))
    return best


def random_graph(rng, n):
    adj = [[] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.5:
                w = float(rng.uniform(0.1, 10.0))
                adj[i].append((j, w))
                adj[j].append((i, w))
    return adj


class TestDijkstra:
    def test_src_is_dst(self):
        adj = [[(1, 1.0)], [(0, 1.0)]]
        assert shortest_route(adj, 0, 0) == (0,)
        dist, _ = dijkstra(adj, 0, 0)
        assert dist[0] == 0.0

    def test_diamond(self):
        # 0 -> {1, 2} -> 3 with branch costs 2 vs 3: cheaper branch wins.
        adj = [[(1, 1.0), (2, 1.0)], [(3, 1.0)], [(3, 2.0)], []]
        assert shortest_route(adj, 0, 3) == (0, 1, 3)

    def test_unreachable_raises(self):
        adj = [[(1, 1.0)], [], []]
        with pytest.raises(NoRouteError):
            shortest_route(adj, 0, 2)

    def test_matches_exhaustive_enumeration(self):
        rng = np.random.default_rng(5)
        for _ in range(60):
            n = int(rng.integers(2, 9))
            adj = random_graph(rng, n)
            dist, _ = dijkstra(adj, 0)
            for dst in range(1, n):
                assert dist[dst] == pytest.approx(brute_force_cost(adj, 0, dst),
                                                  rel=1e-12, abs=1e-12)

    def test_route_cost_consistent_with_dist(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            n = int(rng.integers(3, 9))
            adj = random_graph(rng, n)
            dist, pred = dijkstra(adj, 0)
            for dst in range(1, n):
                if math.isinf(dist[dst]):
                    continue
                route = extract_route(pred, 0, dst)
                cost = 0.0
                for a, b in zip(route, route[1:]):
                    cost += min(w for v, w in adj[a] if v == b)
                assert cost == pytest.approx(dist[dst], rel=1e-9)

    def test_equal_cost_tie_breaks_to_smaller_predecessor(self):
        # Two equal-cost two-hop paths 0-1-3 and 0-2-3.
        adj = [[(1, 1.0), (2, 1.0)], [(3, 1.0)], [(3, 1.0)], []]
        assert shortest_route(adj, 0, 3) == (0, 1, 3)


def two_path_linkstate(fast_rate=1e9, slow_rate=1e8, queue_free_dist=100.0):
    """gw0 -> sat0 -> {sat1 | sat2} -> sat3 -> gw1 with a fast upper branch."""
    edges = [
        (0, 1, 0, 1, fast_rate, queue_free_dist),
        (0, 2, 2, 3, slow_rate, queue_free_dist),
        (1, 3, 0, 1, fast_rate, queue_free_dist),
        (2, 3, 2, 3, slow_rate, queue_free_dist),
    ]
    return make_linkstate(4, [simple_gsl(0), simple_gsl(3)], edges)


class TestDataRateRoute:
    def test_prefers_high_rate_branch(self):
        links = two_path_linkstate()
        route = route_data_rate(links, 0, 1)
        assert route == (4, 0, 1, 3, 5)

    def test_equal_rates_min_hops(self):
        # Add a direct edge 0-3 at the same rate: 3 ISL hops collapse to 1.
        edges = [
            (0, 1, 0, 1, 1e9, 100.0),
            (1, 3, 0, 1, 1e9, 100.0),
            (0, 3, 2, 3, 1e9, 100.0),
        ]
        links = make_linkstate(4, [simple_gsl(0), simple_gsl(3)], edges)
        assert route_data_rate(links, 0, 1) == (4, 0, 3, 5)

    def test_five_node_chain_against_enumeration(self):
        rng = np.random.default_rng(21)
        for _ in range(25):
            rates = rng.uniform(1e8, 2e9, 6)
            edges = [
                (0, 1, 0, 1, float(rates[0]), 500.0),
                (1, 2, 0, 1, float(rates[1]), 500.0),
                (2, 3, 0, 1, float(rates[2]), 500.0),
                (0, 2, 2, 3, float(rates[3]), 500.0),
                (1, 3, 2, 3, float(rates[4]), 500.0),
            ]
            links = make_linkstate(4, [simple_gsl(0, float(rates[5])),
                                       simple_gsl(3)], edges)
            route = route_data_rate(links, 0, 1)
            # enumeration over the same graph
            adj = [[] for _ in range(6)]
            for i, j, si, sj, r, d in edges:
                adj[i].append((j, 1.0 / r))
                adj[j].append((i, 1.0 / r))
            adj[4] = [(0, 1.0 / rates[5])]
            adj[3].append((5, 1.0 / 1e9))
            cost = sum(dict_cost(adj, a, b) for a, b in zip(route, route[1:]))
            assert cost == pytest.approx(brute_force_cost(adj, 4, 5), rel=1e-12)

    def test_loop_free(self):
        links = two_path_linkstate()
        route = route_data_rate(links, 0, 1)
        assert len(set(route)) == len(route)


def dict_cost(adj, a, b):
    return min(w for v, w in adj[a] if v == b)


class TestGenieRoute:
    def test_empty_queues_reduce_to_tx_plus_prop(self):
        links = two_path_linkstate()
        tq = [0.0] * 6
        route = route_latency_genie(links, tq, 0, 1, 64800.0)
        assert route == (4, 0, 1, 3, 5)

    def test_detours_around_injected_queue(self):
        links = two_path_linkstate(fast_rate=1e9, slow_rate=9e8)
        tq = [0.0] * 6
        tq[1] = 0.5  # worse than any branch difference
        route = route_latency_genie(links, tq, 0, 1, 64800.0)
        assert route == (4, 0, 2, 3, 5)

    def test_source_queue_counts_but_cannot_be_avoided(self):
        links = two_path_linkstate()
        free = route_latency_genie(links, [0.0] * 6, 0, 1, 64800.0)
        tq = [0.0] * 6
        tq[4] = 10.0
        assert route_latency_genie(links, tq, 0, 1, 64800.0) == free

    def test_frozen_snapshot_semantics(self):
        # The route minimises latency for the snapshot it saw; evaluating
        # the same pinned route under grown queues only gets worse.
        links = two_path_linkstate()
        tq0 = [0.0] * 6
        route = route_latency_genie(links, tq0, 0, 1, 64800.0)

        def realized(route, tq):
            total = 0.0
            nodes = {4: 0, 5: 1}
            for a, b in zip(route, route[1:]):
                if a >= 4:
                    g = a - 4
                    total += tq[a] + 64800.0 / links.ul_rate[g] \
                        + links.ul_dist[g] * 1000.0 / C
                elif b >= 4:
                    g = b - 4
                    total += tq[a] + 64800.0 / links.dl_rate[g] \
                        + links.dl_dist[g] * 1000.0 / C
                else:
                    slot = links.neighbors[a].index(b)
                    total += tq[a] + 64800.0 / links.nbr_rate[a][slot] \
                        + links.nbr_dist[a][slot] * 1000.0 / C
            return total

        predicted = realized(route, tq0)
        grown = [x + 0.002 for x in tq0]
        assert realized(route, grown) > predicted
