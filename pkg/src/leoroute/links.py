"""Runtime link tables: one immutable snapshot per topology refresh,
with every feasible edge's data rate and distance precomputed as plain
Python lists so the event loop never touches numpy.

Node ids: satellites are 0..N-1, gateway g is N+g.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linkbudget import DOWNLINK, ISL, UPLINK, LinkBudgetParams, McsTable
from .topology import EdgeSet


def _rates_for(params: LinkBudgetParams, mcs: McsTable, link_class: str,
               dist_km: np.ndarray) -> np.ndarray:
    """Vectorised modcod rate selection for an array of distances."""
    p_tx, freq, d_tx, d_rx = params.link_class_params(link_class)
    eta = params.aperture_efficiency
    c = params.speed_of_light_m_s
    g_tx = eta * (math.pi * d_tx * freq / c) ** 2
    g_rx = eta * (math.pi * d_rx * freq / c) ** 2
    k = p_tx * g_tx * g_rx * (c / (4.0 * math.pi * freq * 1000.0)) ** 2
    snr = k / (np.asarray(dist_km, dtype=float) ** 2 * params.noise_power_w)
    idx = np.searchsorted(mcs.snr_min_linear, snr, side="right")
    rho = np.concatenate(([0.0], [e.spectral_efficiency for e in mcs.entries]))
    return params.bandwidth_hz * rho[idx]


@dataclass
class LinkState:
    """Flattened, rate-annotated view of one EdgeSet snapshot."""

    t: float
    epoch: int
    num_satellites: int
    num_gateways: int
    neighbors: list[list[int]]          # N x 4, -1 when absent/infeasible
    nbr_rate: list[list[float]]         # bits/s
    nbr_dist: list[list[float]]         # km
    sat_of_gw: list[int]
    ul_rate: list[float]
    ul_dist: list[float]
    dl_rate: list[float]
    dl_dist: list[float]
    gateways_of_sat: dict[int, list[int]]
    primary_gw_of_sat: list[int]
    sat_gw_dist: list[list[float]]      # N x G km, for reward shaping
    gw_gw_dist: list[list[float]]       # G x G km
    mean_isl_rate: list[float]          # per satellite, over feasible ISLs
    # Satellite kinematics for smooth in-epoch propagation delays; when
    # velocities are absent the snapshot distances are used as-is.
    sat_pos: list[list[float]] | None = None
    sat_vel: list[list[float]] | None = None
    gw_pos: list[list[float]] | None = None

    def gw_node(self, g: int) -> int:
        return self.num_satellites + g

    def is_gateway_node(self, node: int) -> bool:
        return node >= self.num_satellites

    def feasible_slots(self, i: int) -> list[int]:
        nbr = self.neighbors[i]
        return [s for s in range(4) if nbr[s] >= 0]


def build_link_state(edges: EdgeSet, params: LinkBudgetParams, mcs: McsTable,
                     epoch: int = 0,
                     sat_velocities: np.ndarray | None = None) -> LinkState:
    n_sats = edges.num_satellites
    n_gws = edges.num_gateways

    neighbors = [list(row) for row in edges.neighbors]
    nbr_dist = [list(row) for row in edges.isl_distances]
    nbr_rate = [[0.0] * 4 for _ in range(n_sats)]

    flat_i, flat_s, flat_d = [], [], []
    for i in range(n_sats):
        for s in range(4):
            if neighbors[i][s] >= 0:
                flat_i.append(i)
                flat_s.append(s)
                flat_d.append(nbr_dist[i][s])
    if flat_d:
        rates = _rates_for(params, mcs, ISL, np.array(flat_d))
        for i, s, r in zip(flat_i, flat_s, rates):
            if r > 0.0:
                nbr_rate[i][s] = float(r)
            else:
                neighbors[i][s] = -1  # below the lowest modcod: not an edge

    gsl_d = np.array(edges.dist_of_gw, dtype=float)
    ul = _rates_for(params, mcs, UPLINK, gsl_d) if n_gws else np.empty(0)
    dl = _rates_for(params, mcs, DOWNLINK, gsl_d) if n_gws else np.empty(0)

    diff = edges.sat_positions[:, None, :] - edges.gw_positions[None, :, :]
    sat_gw = np.linalg.norm(diff, axis=2)
    gw_diff = edges.gw_positions[:, None, :] - edges.gw_positions[None, :, :]
    gw_gw = np.linalg.norm(gw_diff, axis=2)

    mean_isl = []
    for i in range(n_sats):
        feas = [nbr_rate[i][s] for s in range(4) if neighbors[i][s] >= 0]
        mean_isl.append(sum(feas) / len(feas) if feas else 0.0)

    return LinkState(
        t=edges.t,
        epoch=epoch,
        num_satellites=n_sats,
        num_gateways=n_gws,
        neighbors=neighbors,
        nbr_rate=nbr_rate,
        nbr_dist=nbr_dist,
        sat_of_gw=list(edges.sat_of_gw),
        ul_rate=[float(x) for x in ul],
        ul_dist=list(edges.dist_of_gw),
        dl_rate=[float(x) for x in dl],
        dl_dist=list(edges.dist_of_gw),
        gateways_of_sat={s: list(g) for s, g in edges.gateways_of_sat.items()},
        primary_gw_of_sat=list(edges.primary_gw_of_sat),
        sat_gw_dist=sat_gw.tolist(),
        gw_gw_dist=gw_gw.tolist(),
        mean_isl_rate=mean_isl,
        sat_pos=edges.sat_positions.tolist(),
        sat_vel=sat_velocities.tolist() if sat_velocities is not None else None,
        gw_pos=edges.gw_positions.tolist(),
    )
