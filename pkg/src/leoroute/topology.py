"""Time-varying network topology: intra-plane rings, greedy inter-plane
matching, and nearest-satellite gateway links.

Satellites are flat indices 0..N-1 (plane-major). Each satellite has at
most four ISL neighbour slots: intra-plane front/back and inter-plane
left/right. A snapshot is immutable once built; the simulator rebuilds
snapshots on its refresh cadence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constellation import ConstellationConfig, satellite_positions

# Neighbour slot indices.
INTRA_FRONT = 0
INTRA_BACK = 1
INTER_LEFT = 2
INTER_RIGHT = 3
SLOT_NAMES = ("intra-front", "intra-back", "inter-left", "inter-right")


@dataclass
class EdgeSet:
    """Snapshot of all feasible edges at one instant.

    ``neighbors[i][slot]`` is the flat index of i's neighbour in that
    slot, or -1. ``sat_of_gw[g]`` is the serving satellite of gateway g
    (every gateway always has exactly one). ``gateways_of_sat`` is the
    full reverse map used for delivery checks; ``primary_gw_of_sat``
    keeps only the nearest gateway when a satellite serves several.
    """

    t: float
    sat_positions: np.ndarray
    gw_positions: np.ndarray
    neighbors: list[list[int]]
    isl_distances: list[list[float]]
    sat_of_gw: list[int]
    dist_of_gw: list[float]
    gateways_of_sat: dict[int, list[int]] = field(default_factory=dict)
    primary_gw_of_sat: list[int] = field(default_factory=list)

    @property
    def num_satellites(self) -> int:
        return len(self.neighbors)

    @property
    def num_gateways(self) -> int:
        return len(self.sat_of_gw)

    def degree(self, i: int) -> int:
        return sum(1 for n in self.neighbors[i] if n >= 0)

    def has_isl(self, i: int, j: int) -> bool:
        return j in self.neighbors[i] and j >= 0

    def isl_pairs(self) -> set[tuple[int, int]]:
        """Unordered ISL pairs (i < j)."""
        pairs = set()
        for i, slots in enumerate(self.neighbors):
            for j in slots:
                if j >= 0:
                    pairs.add((i, j) if i < j else (j, i))
        return pairs


def build_intra_plane_isls(cfg: ConstellationConfig) -> list[tuple[int, int, int, int]]:
    """Ring links inside every plane.

    Returns (i, j, slot_of_i, slot_of_j) with j the in-plane successor of
    i (front of i, back of j). The ring is static: membership does not
    depend on time, only the distances do.
    """
    links = []
    n = cfg.sats_per_plane
    for m in range(cfg.num_planes):
        base = m * n
        if n == 1:
            continue
        for k in range(n):
            j = (k + 1) % n
            if n == 2 and k == 1:
                break  # two-satellite plane: one edge, not two
            links.append((base + k, base + j, INTRA_FRONT, INTRA_BACK))
    return links


def _adjacent_plane_pairs(num_planes: int) -> list[tuple[int, int]]:
    if num_planes < 2:
        return []
    if num_planes == 2:
        return [(0, 1)]
    return [(m, (m + 1) % num_planes) for m in range(num_planes)]


def line_of_sight_range_km(orbit_radius_km: float, earth_radius_km: float) -> float:
    """Longest chord between two satellites at one altitude that still
    clears the Earth's surface."""
    return 2.0 * math.sqrt(max(orbit_radius_km ** 2 - earth_radius_km ** 2, 0.0))


def build_inter_plane_isls(cfg: ConstellationConfig, positions: np.ndarray,
                           max_range_km: float | None = None
                           ) -> list[tuple[int, int, int, int]]:
    """Greedy mutual matching between adjacent planes.

    For each adjacent plane pair, candidate links are taken in ascending
    slant-range order; a pair is matched when both ends are still free on
    the facing antenna. Candidates whose chord would pass through the
    Earth are never feasible. Each satellite ends up with at most one
    left and one right neighbour, and matches are mutual by construction.
    """
    n = cfg.sats_per_plane
    los_km = line_of_sight_range_km(cfg.orbit_radius_km, cfg.earth_radius_km)
    if max_range_km is None or max_range_km > los_km:
        max_range_km = los_km
    links = []
    for m_a, m_b in _adjacent_plane_pairs(cfg.num_planes):
        a0, b0 = m_a * n, m_b * n
        pa = positions[a0:a0 + n]
        pb = positions[b0:b0 + n]
        d = np.linalg.norm(pa[:, None, :] - pb[None, :, :], axis=2)
        order = np.dstack(np.unravel_index(np.argsort(d, axis=None, kind="stable"),
                                           d.shape))[0]
        a_free = [True] * n
        b_free = [True] * n
        for ia, ib in order:
            if not (a_free[ia] and b_free[ib]):
                continue
            dist = d[ia, ib]
            if dist > max_range_km:
                break
            a_free[ia] = b_free[ib] = False
            links.append((a0 + int(ia), b0 + int(ib), INTER_RIGHT, INTER_LEFT))
    return links


def build_gsls(gw_positions: np.ndarray, sat_positions: np.ndarray
               ) -> tuple[list[int], list[float]]:
    """Nearest serving satellite per gateway (ties to lowest index)."""
    if len(sat_positions) == 0:
        raise ValueError("constellation has no satellites")
    diff = gw_positions[:, None, :] - sat_positions[None, :, :]
    d = np.linalg.norm(diff, axis=2)
    sat_of_gw = np.argmin(d, axis=1)
    dist_of_gw = d[np.arange(len(gw_positions)), sat_of_gw]
    return [int(s) for s in sat_of_gw], [float(x) for x in dist_of_gw]


def build_edge_set(cfg: ConstellationConfig, gw_positions: np.ndarray, t: float,
                   max_isl_range_km: float | None = None) -> EdgeSet:
    """Full topology snapshot at time t."""
    pos = satellite_positions(cfg, t)
    n_sats = cfg.num_satellites
    neighbors = [[-1, -1, -1, -1] for _ in range(n_sats)]
    distances = [[0.0, 0.0, 0.0, 0.0] for _ in range(n_sats)]

    all_links = build_intra_plane_isls(cfg)
    all_links += build_inter_plane_isls(cfg, pos, max_isl_range_km)
    for i, j, slot_i, slot_j in all_links:
        dist = float(np.linalg.norm(pos[i] - pos[j]))
        neighbors[i][slot_i] = j
        neighbors[j][slot_j] = i
        distances[i][slot_i] = dist
        distances[j][slot_j] = dist

    sat_of_gw, dist_of_gw = build_gsls(gw_positions, pos)
    gateways_of_sat: dict[int, list[int]] = {}
    for g, s in enumerate(sat_of_gw):
        gateways_of_sat.setdefault(s, []).append(g)
    primary = [-1] * n_sats
    for s, gws in gateways_of_sat.items():
        primary[s] = min(gws, key=lambda g: (dist_of_gw[g], g))

    return EdgeSet(
        t=t,
        sat_positions=pos,
        gw_positions=gw_positions,
        neighbors=neighbors,
        isl_distances=distances,
        sat_of_gw=sat_of_gw,
        dist_of_gw=dist_of_gw,
        gateways_of_sat=gateways_of_sat,
        primary_gw_of_sat=primary,
    )
