"""Deterministic discrete-event engine for the packet lifecycle.

Every node (satellite or gateway) owns a single FIFO transmit queue and
one transmitter shared across all of its links, so the wait a packet
experiences is the sum of the heterogeneous-rate service times of the
packets ahead of it. Routing decisions happen when a packet reaches the
head of the line; its latency ledger records queue, transmission and
propagation seconds per hop.

Nodes are ints: satellites 0..N-1, gateway g is N+g. The event heap
holds (time, seq, code, payload) tuples; ties resolve by insertion
order, and pre-generated traffic arrivals are merged into the loop
without passing through the heap.
"""
from __future__ import annotations

import csv
import math
import time as _time
from array import array
from collections import deque
from dataclasses import dataclass, field
from heapq import heappop, heappush

import numpy as np

from .constellation import ConstellationConfig, GeoPosition, gateway_positions
from .errors import NoRouteError, RoutingContractError, ScenarioInfeasibleError
from .linkbudget import LinkBudgetParams, McsTable
from .links import LinkState, build_link_state
from .qrouting import (QLearningParams, QTable, decay_epsilon, encode_codes,
                       select_action, update_q)
from .routers import DataRateRouter, GenieRouter
from .topology import build_edge_set
from .traffic import ArrivalStream, FlowRates, TrafficConfig, flow_rates, generate_arrivals

# Event codes (heap dispatch).
EV_ARRIVAL = 0
EV_TX_DONE = 1
EV_FEEDBACK = 2
EV_REFRESH = 3
EV_SNAPSHOT = 4

DROP_BUFFER_FULL = "buffer-full"
DROP_STALE_ROUTE = "stale-route"
DROP_HOP_CAP = "hop-cap"
DROP_NO_ROUTE = "no-route"

_LOG10_CAP = 32.0  # keeps 10**t_q finite for pathological queue states


class Packet:
    """One fixed-size data block in flight."""

    __slots__ = ("pid", "src", "dst", "created", "qsum", "txsum", "propsum",
                 "hops", "route", "ridx", "visited", "enq_t", "est_service",
                 "pend")

    def __init__(self, pid: int, src: int, dst: int, created: float):
        self.pid = pid
        self.src = src
        self.dst = dst
        self.created = created
        self.qsum = 0.0
        self.txsum = 0.0
        self.propsum = 0.0
        self.hops = 0
        self.route = None      # pinned node tuple for source routing
        self.ridx = 0
        self.visited = None    # ordered node list (learning router)
        self.enq_t = 0.0
        self.est_service = 0.0
        self.pend = None       # pending value update awaiting feedback


class TxQueue:
    """FIFO transmit buffer plus the single transmitter it feeds."""

    __slots__ = ("node", "buf", "occ", "capacity", "work", "busy_until",
                 "serving", "parked")

    def __init__(self, node: int, capacity: int):
        self.node = node
        self.buf = deque()
        self.occ = 0
        self.capacity = capacity
        self.work = 0.0          # estimated service seconds queued
        self.busy_until = 0.0
        self.serving = False
        self.parked = False

    def try_enqueue(self, pkt: Packet, est_service: float, now: float) -> bool:
        """Append unless full; full buffers discard the packet."""
        if self.occ >= self.capacity:
            return False
        pkt.enq_t = now
        pkt.est_service = est_service
        self.buf.append(pkt)
        self.occ += 1
        self.work += est_service
        return True

    def delay(self, now: float) -> float:
        """Wait a packet arriving now would see before its own
        transmission starts: queued work plus the in-flight residual."""
        residual = self.busy_until - now
        return self.work + (residual if residual > 0.0 else 0.0)


@dataclass
class Scenario:
    """Fully resolved inputs of one simulation cell."""

    constellation: ConstellationConfig
    gateway_names: list[str]
    gateway_geos: list[GeoPosition]
    link_budget: LinkBudgetParams
    mcs: McsTable
    traffic: TrafficConfig
    qlearning: QLearningParams
    horizon_s: float = 30.0
    refresh_dt_s: float = 1.0
    snapshot_dt_s: float = 1.0
    queue_capacity: int = 1_000_000
    hop_cap: int = 64
    timeseries_bin_s: float = 0.05
    max_isl_range_km: float | None = None
    # Evaluation protocol: the environment is observed at refresh
    # instants starting from epoch_start_s; with freeze_geometry the
    # observation holds exactly (constant distances within an epoch),
    # otherwise distances drift along the orbital velocities between
    # refreshes.
    epoch_start_s: float = 0.0
    freeze_geometry: bool = False
    seed: int = 1
    record_hops: bool = False
    packet_csv_path: str | None = None

    @property
    def num_gateways(self) -> int:
        return len(self.gateway_geos)


@dataclass
class SimReport:
    """Counters, latency decomposition and per-route series of one run."""

    router: str
    num_gateways: int
    seed: int
    horizon_s: float
    max_load_bps: float
    uplink_bps: float
    generated: int = 0
    delivered: int = 0
    dropped: int = 0
    in_flight: int = 0
    drop_reasons: dict = field(default_factory=dict)
    sum_queue_s: float = 0.0
    sum_tx_s: float = 0.0
    sum_prop_s: float = 0.0
    sum_hops: int = 0
    max_tx_s: float = 0.0
    route_times: dict = field(default_factory=dict)    # (src,dst) -> np.ndarray s
    route_latency_ms: dict = field(default_factory=dict)
    ts_bin_s: float = 0.05
    ts_sum_ms: np.ndarray | None = None
    ts_count: np.ndarray | None = None
    snapshots: list = field(default_factory=list)      # (t, gen, del, drop, inflight)
    feedback_count: int = 0
    sat_from_sat_arrivals: int = 0
    hop_records: list = field(default_factory=list)
    wall_s: float = 0.0

    def mean_latency_ms(self) -> float:
        if self.delivered == 0:
            return math.nan
        total = self.sum_queue_s + self.sum_tx_s + self.sum_prop_s
        return 1e3 * total / self.delivered

    def delivery_ratio(self) -> float:
        return self.delivered / self.generated if self.generated else math.nan


def sample_link_states(scenario: Scenario) -> list[LinkState]:
    """Topology snapshots on the refresh cadence across the horizon.

    Each snapshot carries satellite velocities (finite differences) so
    propagation distances can drift smoothly between refreshes instead
    of stepping at snapshot boundaries.
    """
    from .constellation import satellite_positions

    gw_pos = gateway_positions([g for g in scenario.gateway_geos],
                               scenario.constellation.earth_radius_km)
    states = []
    n_steps = int(math.floor(scenario.horizon_s / scenario.refresh_dt_s + 1e-9)) + 1
    h = 0.25
    for k in range(n_steps):
        t = scenario.epoch_start_s + k * scenario.refresh_dt_s
        edges = build_edge_set(scenario.constellation, gw_pos, t,
                               scenario.max_isl_range_km)
        if scenario.freeze_geometry:
            vel = None
        else:
            t_lo = max(t - h, 0.0)
            vel = (satellite_positions(scenario.constellation, t + h)
                   - satellite_positions(scenario.constellation, t_lo)) \
                / (t + h - t_lo)
        state = build_link_state(edges, scenario.link_budget, scenario.mcs,
                                 epoch=k, sat_velocities=vel)
        # simulation clock runs from 0 regardless of the epoch offset
        state.t = k * scenario.refresh_dt_s
        states.append(state)
    return states


def gsl_rate_envelope(states: list[LinkState]) -> list[tuple[float, float]]:
    """Per-gateway worst-case (uplink, downlink) rates over the horizon.

    The supported-load calculation uses these so that the offered load
    never oversubscribes a gateway link at any refresh instant.
    """
    n_gws = states[0].num_gateways
    out = []
    for g in range(n_gws):
        ul = min(s.ul_rate[g] for s in states)
        dl = min(s.dl_rate[g] for s in states)
        out.append((ul, dl))
    return out


class _RandomBlock:
    """Buffered uniforms from a seeded generator (plain floats)."""

    __slots__ = ("_gen", "_buf", "_idx", "_size")

    def __init__(self, rng: np.random.Generator, size: int = 1 << 16):
        self._gen = rng
        self._size = size
        self._buf = rng.random(size).tolist()
        self._idx = 0

    def random(self) -> float:
        i = self._idx
        if i >= self._size:
            self._buf = self._gen.random(self._size).tolist()
            i = 0
        self._idx = i + 1
        return self._buf[i]


class Simulation:
    """Single-threaded event loop for one scenario cell."""

    def __init__(self, scenario: Scenario, router: str,
                 link_states: list[LinkState] | None = None,
                 arrivals: ArrivalStream | None = None):
        if router not in ("datarate", "genie", "qlearn"):
            raise ValueError(f"unknown router {router!r}")
        self.scenario = scenario
        self.router_name = router
        self.states = link_states or sample_link_states(scenario)
        self.links = self.states[0]
        self.n_sats = self.links.num_satellites
        self.n_gws = self.links.num_gateways
        self.n_nodes = self.n_sats + self.n_gws

        envelope = gsl_rate_envelope(self.states)
        self.flows: FlowRates = flow_rates(scenario.traffic, envelope)

        # One cell seed fans out into independent traffic and exploration
        # streams.
        seeds = np.random.SeedSequence(scenario.seed).spawn(2)
        self.arrivals = arrivals if arrivals is not None else generate_arrivals(
            self.flows, scenario.horizon_s, scenario.traffic.packet_size_bits,
            seed=seeds[0])
        self._explore_rng = _RandomBlock(np.random.default_rng(seeds[1]))

        self.size_bits = scenario.traffic.packet_size_bits
        self.c = scenario.link_budget.speed_of_light_m_s
        self.queues = [TxQueue(n, scenario.queue_capacity) for n in range(self.n_nodes)]

        self.qp = scenario.qlearning
        self.capacity_split = (self.qp.capacity_split_bps
                               or scenario.mcs.median_rate_bps(scenario.link_budget.bandwidth_hz))
        self.qtables = [QTable(i, self.qp.initial_q) for i in range(self.n_sats)] \
            if router == "qlearn" else []
        self.decisions = [0] * self.n_sats
        self.occ = [0] * self.n_nodes  # mirrored occupancy for fast state encoding

        self.datarate_router = DataRateRouter() if router == "datarate" else None
        self.genie_router = GenieRouter(self.size_bits, self.c) if router == "genie" else None

        self.heap: list = []
        self._seq = 0
        self.in_transit = 0
        self.now = 0.0
        self._parked: list[int] = []

        self.report = SimReport(
            router=router,
            num_gateways=self.n_gws,
            seed=scenario.seed,
            horizon_s=scenario.horizon_s,
            max_load_bps=self.flows.max_load_bps,
            uplink_bps=self.flows.uplink_bps[0],
            ts_bin_s=scenario.timeseries_bin_s,
        )
        nbins = int(scenario.horizon_s / scenario.timeseries_bin_s) + 2
        self._ts_sum = [0.0] * nbins
        self._ts_cnt = [0] * nbins
        # Compact per-route series; these can reach millions of entries.
        self._route_t: dict[tuple[int, int], array] = {}
        self._route_l: dict[tuple[int, int], array] = {}
        for s in range(self.n_gws):
            for d in range(self.n_gws):
                if s != d:
                    self._route_t[(s, d)] = array("d")
                    self._route_l[(s, d)] = array("d")

        self._csv_file = None
        self._csv = None
        if scenario.packet_csv_path:
            self._csv_file = open(scenario.packet_csv_path, "w", newline="")
            self._csv = csv.writer(self._csv_file)
            self._csv.writerow(["packet_id", "src", "dst", "created_s",
                                "delivered_s", "queue_s", "tx_s", "prop_s",
                                "hops", "dropped"])

    # -- event plumbing -------------------------------------------------

    def _push(self, t: float, code: int, payload) -> None:
        heappush(self.heap, (t, self._seq, code, payload))
        self._seq += 1

    # -- helpers ---------------------------------------------------------

    def _gw_node(self, g: int) -> int:
        return self.n_sats + g

    def _live_dist(self, a: int, b: int, snap_km: float) -> float:
        """Distance between two nodes right now, drifting the snapshot
        positions along the satellite velocities."""
        links = self.links
        vel = links.sat_vel
        if vel is None:
            return snap_km
        dt = self.now - links.t
        n = self.n_sats
        if a < n:
            p, v = links.sat_pos[a], vel[a]
            ax = p[0] + v[0] * dt
            ay = p[1] + v[1] * dt
            az = p[2] + v[2] * dt
        else:
            ax, ay, az = links.gw_pos[a - n]
        if b < n:
            p, v = links.sat_pos[b], vel[b]
            bx = p[0] + v[0] * dt
            by = p[1] + v[1] * dt
            bz = p[2] + v[2] * dt
        else:
            bx, by, bz = links.gw_pos[b - n]
        dx = ax - bx
        dy = ay - by
        dz = az - bz
        return math.sqrt(dx * dx + dy * dy + dz * dz)

    def queue_delay(self, node: int) -> float:
        return self.queues[node].delay(self.now)

    def _all_queue_delays(self) -> list[float]:
        now = self.now
        out = []
        for q in self.queues:
            residual = q.busy_until - now
            out.append(q.work + (residual if residual > 0.0 else 0.0))
        return out

    def _drop(self, pkt: Packet, reason: str) -> None:
        rep = self.report
        rep.dropped += 1
        rep.drop_reasons[reason] = rep.drop_reasons.get(reason, 0) + 1
        if self._csv is not None:
            self._csv.writerow([pkt.pid,
                                self.scenario.gateway_names[pkt.src],
                                self.scenario.gateway_names[pkt.dst],
                                repr(pkt.created), "",
                                repr(pkt.qsum), repr(pkt.txsum), repr(pkt.propsum),
                                pkt.hops, 1])

    def _deliver(self, pkt: Packet, t: float) -> None:
        rep = self.report
        rep.delivered += 1
        rep.sum_queue_s += pkt.qsum
        rep.sum_tx_s += pkt.txsum
        rep.sum_prop_s += pkt.propsum
        rep.sum_hops += pkt.hops
        lat_ms = (t - pkt.created) * 1e3
        key = (pkt.src, pkt.dst)
        self._route_t[key].append(t)
        self._route_l[key].append(lat_ms)
        b = int(t / rep.ts_bin_s)
        self._ts_sum[b] += lat_ms
        self._ts_cnt[b] += 1
        if self._csv is not None:
            self._csv.writerow([pkt.pid,
                                self.scenario.gateway_names[pkt.src],
                                self.scenario.gateway_names[pkt.dst],
                                repr(pkt.created), repr(t),
                                repr(pkt.qsum), repr(pkt.txsum), repr(pkt.propsum),
                                pkt.hops, 0])

    # -- routing decisions at head-of-line -------------------------------

    def _decide_gateway(self, g: int, pkt: Packet):
        links = self.links
        serving_sat = links.sat_of_gw[g]
        if pkt.route is not None:
            nxt = pkt.route[1]
            if nxt != serving_sat:
                return None, DROP_STALE_ROUTE
            pkt.ridx = 1
        else:
            pkt.visited.append(serving_sat)
        dist = self._live_dist(self._gw_node(g), serving_sat, links.ul_dist[g])
        return (serving_sat, links.ul_rate[g], dist), None

    def _decide_satellite(self, i: int, pkt: Packet):
        """Pick (next_node, rate, dist) for the head-of-line packet."""
        links = self.links
        dst = pkt.dst
        if pkt.route is not None:
            nxt = pkt.route[pkt.ridx + 1]
            if nxt >= self.n_sats:
                g = nxt - self.n_sats
                if links.sat_of_gw[g] != i:
                    return None, DROP_STALE_ROUTE
                pkt.ridx += 1
                dist = self._live_dist(i, nxt, links.dl_dist[g])
                return (nxt, links.dl_rate[g], dist), None
            try:
                slot = links.neighbors[i].index(nxt)
            except ValueError:
                return None, DROP_STALE_ROUTE
            pkt.ridx += 1
            dist = self._live_dist(i, nxt, links.nbr_dist[i][slot])
            return (nxt, links.nbr_rate[i][slot], dist), None

        # Learning router: forced delivery when this satellite serves the
        # destination, otherwise epsilon-greedy over the feasible slots.
        gws = links.gateways_of_sat.get(i)
        if gws is not None and dst in gws:
            node = self._gw_node(dst)
            pkt.visited.append(node)
            dist = self._live_dist(i, node, links.dl_dist[dst])
            return (node, links.dl_rate[dst], dist), None

        nbr = links.neighbors[i]
        feasible = [s for s in range(4) if nbr[s] >= 0]
        if not feasible:
            return None, "park"
        qp = self.qp
        codes = encode_codes(i, links, self.occ, qp.queue_code_threshold,
                             self.capacity_split)
        key = ((((dst * 3 + codes[0]) * 3 + codes[1]) * 3 + codes[2]) * 3
               + codes[3])
        vals = self.qtables[i].action_values(key)
        step = self.decisions[i]
        self.decisions[i] = step + 1
        slot = select_action(vals, feasible, decay_epsilon(step, qp),
                             self._explore_rng)
        j = nbr[slot]
        looped = j in pkt.visited
        sd = links.gw_gw_dist[pkt.src][dst]
        progress = links.sat_gw_dist[i][dst] - links.sat_gw_dist[j][dst]
        dist_term = qp.w_distance * (progress + sd) / sd
        pkt.pend = (i, key, slot, looped, dist_term)
        pkt.visited.append(j)
        dist = self._live_dist(i, j, links.nbr_dist[i][slot])
        return (j, links.nbr_rate[i][slot], dist), None

    # -- server ----------------------------------------------------------

    def _kick(self, node: int, t: float) -> None:
        """Start transmitting the head-of-line packet if the transmitter
        is idle; drops decided here consume the queue until a packet can
        actually be sent."""
        q = self.queues[node]
        if q.serving or q.parked:
            return
        links = self.links
        while q.occ:
            pkt = q.buf.popleft()
            q.occ -= 1
            self.occ[node] -= 1
            q.work -= pkt.est_service
            if node >= self.n_sats:
                choice, err = self._decide_gateway(node - self.n_sats, pkt)
            else:
                choice, err = self._decide_satellite(node, pkt)
            if choice is None:
                if err == "park":
                    # Isolated node: put the packet back and wait for the
                    # next topology refresh.
                    q.buf.appendleft(pkt)
                    q.occ += 1
                    self.occ[node] += 1
                    q.work += pkt.est_service
                    q.parked = True
                    self._parked.append(node)
                    return
                self._drop(pkt, err)
                continue
            j, rate, dist = choice
            wait = t - pkt.enq_t
            tx = self.size_bits / rate
            prop = dist * 1000.0 / self.c
            pkt.qsum += wait
            pkt.txsum += tx
            pkt.propsum += prop
            rep = self.report
            if tx > rep.max_tx_s:
                rep.max_tx_s = tx
            if self.scenario.record_hops:
                rep.hop_records.append((pkt.pid, node, j, wait, rate, dist, tx, prop))
            q.serving = True
            q.busy_until = t + tx
            self._push(t + tx, EV_TX_DONE, node)
            self._push(t + tx + prop, EV_ARRIVAL, (j, pkt, node, dist))
            self.in_transit += 1
            return

    # -- event handlers ---------------------------------------------------

    def _on_created(self, t: float, g: int, d: int) -> None:
        rep = self.report
        pid = rep.generated
        rep.generated += 1
        pkt = Packet(pid, g, d, t)
        links = self.links
        node = self._gw_node(g)
        if self.datarate_router is not None:
            try:
                pkt.route = self.datarate_router.route_for(links, g, d)
            except NoRouteError:
                self._drop(pkt, DROP_NO_ROUTE)
                return
        elif self.genie_router is not None:
            try:
                pkt.route = self.genie_router.route_for(
                    links, self._all_queue_delays(), g, d)
            except NoRouteError:
                self._drop(pkt, DROP_NO_ROUTE)
                return
        else:
            pkt.visited = [node]
        q = self.queues[node]
        est = self.size_bits / links.ul_rate[g]
        if not q.try_enqueue(pkt, est, t):
            self._drop(pkt, DROP_BUFFER_FULL)
            return
        self.occ[node] += 1
        if not q.serving:
            self._kick(node, t)

    def _est_service_at_sat(self, i: int, pkt: Packet) -> float:
        links = self.links
        if pkt.route is not None:
            nxt = pkt.route[pkt.ridx + 1] if pkt.ridx + 1 < len(pkt.route) else -1
            if nxt >= self.n_sats:
                return self.size_bits / links.dl_rate[nxt - self.n_sats]
            if nxt >= 0:
                try:
                    slot = links.neighbors[i].index(nxt)
                    return self.size_bits / links.nbr_rate[i][slot]
                except ValueError:
                    pass
            mean = links.mean_isl_rate[i]
            return self.size_bits / mean if mean > 0 else 0.0
        gws = links.gateways_of_sat.get(i)
        if gws is not None and pkt.dst in gws:
            return self.size_bits / links.dl_rate[pkt.dst]
        mean = links.mean_isl_rate[i]
        return self.size_bits / mean if mean > 0 else 0.0

    def _on_arrival(self, t: float, node: int, pkt: Packet, from_node: int,
                    dist: float) -> None:
        self.in_transit -= 1
        pkt.hops += 1
        if node >= self.n_sats:
            self._deliver(pkt, t)
            return
        rep = self.report
        if from_node < self.n_sats:
            rep.sat_from_sat_arrivals += 1
        if pkt.pend is not None:
            # Receiver computes its own best value and queue delay and
            # reports them back over the reverse link.
            i, key, slot, looped, dist_term = pkt.pend
            pkt.pend = None
            links = self.links
            dst = pkt.dst
            codes = encode_codes(node, links, self.occ,
                                 self.qp.queue_code_threshold, self.capacity_split)
            jkey = ((((dst * 3 + codes[0]) * 3 + codes[1]) * 3 + codes[2]) * 3
                    + codes[3])
            nbrj = links.neighbors[node]
            feas = [s for s in range(4) if nbrj[s] >= 0]
            max_q = self.qtables[node].max_over(jkey, feas)
            tq_j = self.queues[node].delay(t)
            gws = links.gateways_of_sat.get(node)
            serves_d = gws is not None and dst in gws
            self._push(t + dist * 1000.0 / self.c, EV_FEEDBACK,
                       (i, key, slot, looped, dist_term, serves_d, max_q, tq_j))
            rep.feedback_count += 1
        if pkt.hops >= self.scenario.hop_cap:
            self._drop(pkt, DROP_HOP_CAP)
            return
        q = self.queues[node]
        est = self._est_service_at_sat(node, pkt)
        if not q.try_enqueue(pkt, est, t):
            self._drop(pkt, DROP_BUFFER_FULL)
            return
        self.occ[node] += 1
        if not q.serving:
            self._kick(node, t)

    def _on_feedback(self, i: int, key: int, slot: int, looped: bool,
                     dist_term: float, serves_d: bool, max_q: float,
                     tq_j: float) -> None:
        qp = self.qp
        if serves_d:
            r = qp.r_delivery
        elif looped:
            r = qp.r_loop
        else:
            e = tq_j if tq_j < _LOG10_CAP else _LOG10_CAP
            r = qp.w_queue * (1.0 - 10.0 ** e) + dist_term
        vals = self.qtables[i].action_values(key)
        vals[slot] = update_q(vals[slot], r, max_q, qp.learning_rate, qp.discount)

    def _on_refresh(self, epoch: int, t: float) -> None:
        if epoch < len(self.states):
            self.links = self.states[epoch]
        if self._parked:
            nodes, self._parked = self._parked, []
            for node in nodes:
                self.queues[node].parked = False
                self._kick(node, t)

    def _on_snapshot(self, t: float) -> None:
        rep = self.report
        # A packet in service is represented by its scheduled arrival
        # event, so live packets are exactly queued + in transit.
        inflight = self.in_transit
        for q in self.queues:
            inflight += q.occ
        if rep.generated != rep.delivered + rep.dropped + inflight:
            raise RuntimeError(
                f"conservation violated at t={t}: generated={rep.generated} "
                f"delivered={rep.delivered} dropped={rep.dropped} inflight={inflight}")
        rep.snapshots.append((t, rep.generated, rep.delivered, rep.dropped, inflight))

    # -- main loop ---------------------------------------------------------

    def run(self) -> SimReport:
        start = _time.perf_counter()
        sc = self.scenario
        horizon = sc.horizon_s
        k = 1
        while True:
            t = k * sc.refresh_dt_s
            if t > horizon:
                break
            self._push(t, EV_REFRESH, k)
            k += 1
        k = 1
        while True:
            t = k * sc.snapshot_dt_s
            if t > horizon:
                break
            self._push(t, EV_SNAPSHOT, None)
            k += 1

        arr_t = self.arrivals.times_s
        arr_s = self.arrivals.src
        arr_d = self.arrivals.dst
        n_arr = len(arr_t)
        arr_t_list = arr_t.tolist()
        arr_s_list = arr_s.tolist()
        arr_d_list = arr_d.tolist()
        ai = 0
        heap = self.heap
        while True:
            heap_t = heap[0][0] if heap else math.inf
            if ai < n_arr and arr_t_list[ai] <= heap_t:
                t = arr_t_list[ai]
                if t > horizon:
                    break
                self.now = t
                self._on_created(t, arr_s_list[ai], arr_d_list[ai])
                ai += 1
                continue
            if not heap or heap_t > horizon:
                break
            t, _seq, code, payload = heappop(heap)
            self.now = t
            if code == EV_ARRIVAL:
                node, pkt, from_node, dist = payload
                self._on_arrival(t, node, pkt, from_node, dist)
            elif code == EV_TX_DONE:
                q = self.queues[payload]
                q.serving = False
                self._kick(payload, t)
            elif code == EV_FEEDBACK:
                self._on_feedback(*payload)
            elif code == EV_REFRESH:
                self._on_refresh(payload, t)
            else:
                self._on_snapshot(t)

        if not self.report.snapshots or self.report.snapshots[-1][0] != horizon:
            self._on_snapshot(horizon)
        rep = self.report
        rep.in_flight = rep.generated - rep.delivered - rep.dropped
        for key in self._route_t:
            rep.route_times[key] = np.array(self._route_t[key])
            rep.route_latency_ms[key] = np.array(self._route_l[key])
        rep.ts_sum_ms = np.array(self._ts_sum)
        rep.ts_count = np.array(self._ts_cnt)
        if self._csv_file is not None:
            self._csv_file.close()
        rep.wall_s = _time.perf_counter() - start
        return rep


def run(scenario: Scenario, router: str,
        link_states: list[LinkState] | None = None) -> SimReport:
    """Simulate one cell and return its report."""
    return Simulation(scenario, router, link_states).run()
