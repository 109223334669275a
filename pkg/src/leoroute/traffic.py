"""Poisson uplink traffic with destinations balanced across the other
gateways, sized against the maximum load the feeder/service links can
carry.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ScenarioInfeasibleError


@dataclass(frozen=True)
class TrafficConfig:
    load_fraction: float = 0.85      # offered fraction of the max supported load
    packet_size_bits: float = 64.8e3
    # When set, caps the supported load at |G| times this value instead of
    # deriving it from the GSL rates (which ignore ISL bottlenecks).
    max_load_per_gateway_bps: float | None = None

    def __post_init__(self):
        if self.load_fraction <= 0:
            raise ValueError("load_fraction must be > 0")
        if self.packet_size_bits <= 0:
            raise ValueError("packet_size_bits must be > 0")
        if self.max_load_per_gateway_bps is not None and self.max_load_per_gateway_bps <= 0:
            raise ValueError("max_load_per_gateway_bps must be > 0")


@dataclass(frozen=True)
class FlowRates:
    """Per-gateway offered rates in bits/s and the network-wide cap."""

    uplink_bps: tuple[float, ...]
    downlink_bps: tuple[float, ...]
    max_load_bps: float

    @property
    def num_gateways(self) -> int:
        return len(self.uplink_bps)

    @property
    def total_offered_bps(self) -> float:
        return sum(self.uplink_bps)


def max_supported_load(gsl_rates: list[tuple[float, float]]) -> float:
    """Maximum aggregate load the gateway links support, bits/s.

    ``gsl_rates`` holds one (uplink, downlink) rate pair per active
    gateway. The cap is |G| times the tightest of all those rates: with
    the uplink evenly split across gateways, offering exactly this load
    saturates the tightest link and no other link is oversubscribed.
    """
    if len(gsl_rates) < 2:
        raise ScenarioInfeasibleError("need at least 2 active gateways")
    for g, (ul, dl) in enumerate(gsl_rates):
        if ul <= 0 or dl <= 0:
            raise ScenarioInfeasibleError(
                f"gateway {g} has an infeasible GSL (ul={ul}, dl={dl} bits/s)")
    return len(gsl_rates) * min(min(ul, dl) for ul, dl in gsl_rates)


def flow_rates(cfg: TrafficConfig, gsl_rates: list[tuple[float, float]]) -> FlowRates:
    """Equal-uplink flow allocation at the configured load fraction."""
    n = len(gsl_rates)
    lam_star = max_supported_load(gsl_rates)
    if cfg.max_load_per_gateway_bps is not None:
        lam_star = min(lam_star, n * cfg.max_load_per_gateway_bps)
    lam_ul = cfg.load_fraction * lam_star / n
    lam_dl = (cfg.load_fraction * lam_star - lam_ul) / (n - 1)
    return FlowRates(
        uplink_bps=(lam_ul,) * n,
        downlink_bps=(lam_dl,) * n,
        max_load_bps=lam_star,
    )


@dataclass(frozen=True)
class ArrivalStream:
    """Time-sorted packet arrivals; parallel arrays."""

    times_s: np.ndarray   # float64
    src: np.ndarray       # int32 gateway index
    dst: np.ndarray       # int32 gateway index

    def __len__(self) -> int:
        return len(self.times_s)


def generate_arrivals(rates: FlowRates, horizon_s: float, packet_size_bits: float,
                      seed) -> ArrivalStream:
    """Poisson packet arrivals for every ordered gateway pair.

    Each gateway emits packets to each other gateway as an independent
    Poisson process of rate lambda_ul / ((|G|-1) * B) packets/s. The
    stream is deterministic for a given seed (int or SeedSequence).
    """
    if horizon_s <= 0:
        raise ValueError("horizon must be > 0")
    n = rates.num_gateways
    rng = np.random.default_rng(seed)
    all_t, all_s, all_d = [], [], []
    for src in range(n):
        pair_rate = rates.uplink_bps[src] / ((n - 1) * packet_size_bits)
        if pair_rate <= 0:
            continue
        for dst in range(n):
            if dst == src:
                continue
            # Draw exponential gaps in chunks until the horizon is passed.
            times = []
            t = 0.0
            chunk = max(16, int(pair_rate * horizon_s * 1.1) + 4)
            while True:
                gaps = rng.exponential(1.0 / pair_rate, size=chunk)
                cum = t + np.cumsum(gaps)
                inside = cum[cum < horizon_s]
                times.append(inside)
                if len(inside) < len(cum):
                    break
                t = float(cum[-1])
                chunk = max(16, chunk // 4)
            arr = np.concatenate(times) if times else np.empty(0)
            all_t.append(arr)
            all_s.append(np.full(len(arr), src, dtype=np.int32))
            all_d.append(np.full(len(arr), dst, dtype=np.int32))
    times = np.concatenate(all_t) if all_t else np.empty(0)
    srcs = np.concatenate(all_s) if all_s else np.empty(0, dtype=np.int32)
    dsts = np.concatenate(all_d) if all_d else np.empty(0, dtype=np.int32)
    order = np.argsort(times, kind="stable")
    return ArrivalStream(times[order], srcs[order], dsts[order])
