"""Centralized source-routing benchmarks.

Both benchmarks run Dijkstra at the source gateway when a packet is
created and pin the resulting route into the packet. The data-rate
benchmark weights edges by the inverse data rate; the latency-genie
benchmark weights them by queue + transmission + propagation time using
a queue snapshot frozen at route-computation time, so realized latency
can exceed the predicted path weight once queues move.
"""
from __future__ import annotations

import math
from heapq import heappop, heappush
from typing import Callable, Sequence

from .errors import NoRouteError
from .links import LinkState

Adjacency = list[list[tuple[int, float]]]  # adj[u] = [(v, weight), ...]


def dijkstra(adj: Adjacency, src: int, dst: int | None = None,
             node_cost: Sequence[float] | None = None
             ) -> tuple[list[float], list[int]]:
    """Shortest paths from src; returns (dist, pred).

    ``node_cost[u]`` is added once per departure from u (queueing time in
    the genie weighting; omit for plain edge weights). Ties are broken
    toward the lexicographically smallest predecessor so equal-cost
    graphs always produce the same tree.
    """
    n = len(adj)
    dist = [math.inf] * n
    pred = [-1] * n
    done = [False] * n
    dist[src] = 0.0
    heap = [(0.0, src)]
    while heap:
        d, u = heappop(heap)
        if done[u]:
            continue
        done[u] = True
        if u == dst:
            break
        out = d + (node_cost[u] if node_cost is not None else 0.0)
        for v, w in adj[u]:
            if done[v]:
                continue
            nd = out + w
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = u
                heappush(heap, (nd, v))
            elif nd == dist[v] and u < pred[v]:
                pred[v] = u
    return dist, pred


def extract_route(pred: list[int], src: int, dst: int) -> tuple[int, ...]:
    if src == dst:
        return (src,)
    route = [dst]
    node = dst
    while node != src:
        node = pred[node]
        if node < 0:
            raise NoRouteError(f"no route from {src} to {dst}")
        route.append(node)
    return tuple(reversed(route))


def shortest_route(adj: Adjacency, src: int, dst: int) -> tuple[int, ...]:
    dist, pred = dijkstra(adj, src, dst)
    return extract_route(pred, src, dst)


def _base_adjacency(links: LinkState, weight: Callable[[float, float], float]
                    ) -> Adjacency:
    """Adjacency over satellites plus gateway delivery edges.

    ``weight(rate, dist)`` maps a directed edge to its cost. Gateway
    nodes get no outgoing edges here: ground relaying is not allowed, so
    only the querying source's uplink is added per route computation.
    """
    n = links.num_satellites
    adj: Adjacency = [[] for _ in range(n + links.num_gateways)]
    for i in range(n):
        nbr = links.neighbors[i]
        for s in range(4):
            j = nbr[s]
            if j >= 0:
                adj[i].append((j, weight(links.nbr_rate[i][s], links.nbr_dist[i][s])))
    for g in range(links.num_gateways):
        sat = links.sat_of_gw[g]
        adj[sat].append((links.gw_node(g), weight(links.dl_rate[g], links.dl_dist[g])))
    return adj


def data_rate_adjacency(links: LinkState) -> Adjacency:
    return _base_adjacency(links, lambda rate, dist: 1.0 / rate)


def genie_adjacency(links: LinkState, size_bits: float,
                    c_m_s: float = 299792458.0) -> Adjacency:
    return _base_adjacency(
        links, lambda rate, dist: size_bits / rate + dist * 1000.0 / c_m_s)


def _with_uplink(adj: Adjacency, links: LinkState, src_gw: int,
                 weight: Callable[[float, float], float]) -> None:
    node = links.gw_node(src_gw)
    adj[node] = [(links.sat_of_gw[src_gw],
                  weight(links.ul_rate[src_gw], links.ul_dist[src_gw]))]


def route_data_rate(links: LinkState, src_gw: int, dst_gw: int) -> tuple[int, ...]:
    """Minimum sum-of-1/R route from one gateway to another."""
    adj = data_rate_adjacency(links)
    _with_uplink(adj, links, src_gw, lambda rate, dist: 1.0 / rate)
    return shortest_route(adj, links.gw_node(src_gw), links.gw_node(dst_gw))


def route_latency_genie(links: LinkState, queue_delays: Sequence[float],
                        src_gw: int, dst_gw: int, size_bits: float,
                        c_m_s: float = 299792458.0) -> tuple[int, ...]:
    """Minimum-latency route given a frozen snapshot of all queue delays.

    ``queue_delays`` is indexed by node id (satellites then gateways) and
    holds the time a packet arriving now would wait before its own
    transmission starts. The route is not re-evaluated en route.
    """
    adj = genie_adjacency(links, size_bits, c_m_s)
    _with_uplink(adj, links, src_gw,
                 lambda rate, dist: size_bits / rate + dist * 1000.0 / c_m_s)
    dist, pred = dijkstra(adj, links.gw_node(src_gw), links.gw_node(dst_gw),
                          node_cost=queue_delays)
    return extract_route(pred, links.gw_node(src_gw), links.gw_node(dst_gw))


class DataRateRouter:
    """Pins inverse-rate shortest routes, one Dijkstra per (source, epoch)."""

    name = "datarate"
    needs_queue_state = False

    def __init__(self):
        self._cache: dict[tuple[int, int], list[tuple[int, ...] | None]] = {}
        self._adj: Adjacency | None = None
        self._epoch = -1

    def route_for(self, links: LinkState, src_gw: int, dst_gw: int) -> tuple[int, ...]:
        key = (src_gw, links.epoch)
        routes = self._cache.get(key)
        if routes is None:
            if self._epoch != links.epoch:
                self._adj = data_rate_adjacency(links)
                self._epoch = links.epoch
                self._cache.clear()
            adj = self._adj
            _with_uplink(adj, links, src_gw, lambda rate, dist: 1.0 / rate)
            src_node = links.gw_node(src_gw)
            dist, pred = dijkstra(adj, src_node)
            routes = [None] * links.num_gateways
            for g in range(links.num_gateways):
                if g == src_gw:
                    continue
                routes[g] = extract_route(pred, src_node, links.gw_node(g))
            adj[src_node] = []
            self._cache[key] = routes
        route = routes[dst_gw]
        if route is None:
            raise NoRouteError(f"no route from gateway {src_gw} to {dst_gw}")
        return route


class GenieRouter:
    """Recomputes a queue-aware route for every packet at creation time."""

    name = "genie"
    needs_queue_state = True

    def __init__(self, size_bits: float, c_m_s: float = 299792458.0):
        self.size_bits = size_bits
        self.c_m_s = c_m_s
        self._adj: Adjacency | None = None
        self._epoch = -1

    def route_for(self, links: LinkState, queue_delays: Sequence[float],
                  src_gw: int, dst_gw: int) -> tuple[int, ...]:
        if self._epoch != links.epoch:
            self._adj = genie_adjacency(links, self.size_bits, self.c_m_s)
            self._epoch = links.epoch
        adj = self._adj
        src_node = links.gw_node(src_gw)
        _with_uplink(adj, links, src_gw,
                     lambda rate, dist: self.size_bits / rate + dist * 1000.0 / self.c_m_s)
        dist, pred = dijkstra(adj, src_node, links.gw_node(dst_gw),
                              node_cost=queue_delays)
        route = extract_route(pred, src_node, links.gw_node(dst_gw))
        adj[src_node] = []
        return route
