"""Radio link budget: free-space received power, SNR, modcod-limited
data rates, and the queue/transmission/propagation split of a hop's
latency.

Every link is one of three classes with fixed carrier frequencies:
satellite-to-satellite ("isl"), gateway-to-satellite ("uplink") and
satellite-to-gateway ("downlink").
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import NamedTuple

from .errors import LinkInfeasibleError

BOLTZMANN_J_K = 1.380649e-23
SPEED_OF_LIGHT_M_S = 299792458.0

ISL = "isl"
UPLINK = "uplink"
DOWNLINK = "downlink"


@dataclass(frozen=True)
class LinkBudgetParams:
    sat_tx_power_w: float = 10.0
    gw_tx_power_w: float = 20.0
    freq_isl_hz: float = 26e9
    freq_uplink_hz: float = 30e9
    freq_downlink_hz: float = 20e9
    sat_dish_diameter_m: float = 0.26
    gw_dish_diameter_m: float = 0.33
    aperture_efficiency: float = 0.6
    bandwidth_hz: float = 500e6
    noise_temperature_k: float = 290.0
    boltzmann_j_k: float = BOLTZMANN_J_K
    speed_of_light_m_s: float = SPEED_OF_LIGHT_M_S

    def __post_init__(self):
        for name in ("sat_tx_power_w", "gw_tx_power_w", "freq_isl_hz",
                     "freq_uplink_hz", "freq_downlink_hz", "sat_dish_diameter_m",
                     "gw_dish_diameter_m", "aperture_efficiency", "bandwidth_hz",
                     "noise_temperature_k"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")

    def link_class_params(self, link_class: str) -> tuple[float, float, float, float]:
        """(tx power W, frequency Hz, tx dish m, rx dish m) for a link class."""
        if link_class == ISL:
            return (self.sat_tx_power_w, self.freq_isl_hz,
                    self.sat_dish_diameter_m, self.sat_dish_diameter_m)
        if link_class == UPLINK:
            return (self.gw_tx_power_w, self.freq_uplink_hz,
                    self.gw_dish_diameter_m, self.sat_dish_diameter_m)
        if link_class == DOWNLINK:
            return (self.sat_tx_power_w, self.freq_downlink_hz,
                    self.sat_dish_diameter_m, self.gw_dish_diameter_m)
        raise ValueError(f"unknown link class {link_class!r}")

    @property
    def noise_power_w(self) -> float:
        return self.boltzmann_j_k * self.noise_temperature_k * self.bandwidth_hz


def parabolic_gain(diameter_m: float, freq_hz: float,
                   efficiency: float = 0.6,
                   c_m_s: float = SPEED_OF_LIGHT_M_S) -> float:
    """Linear boresight gain of a parabolic dish: eta * (pi D / lambda)^2."""
    return efficiency * (math.pi * diameter_m * freq_hz / c_m_s) ** 2


def received_power(params: LinkBudgetParams, link_class: str, distance_km: float) -> float:
    """Received power in W under free-space path loss."""
    if distance_km <= 0:
        raise ValueError(f"distance must be > 0 km, got {distance_km}")
    p_tx, freq, d_tx, d_rx = params.link_class_params(link_class)
    eta = params.aperture_efficiency
    c = params.speed_of_light_m_s
    g_tx = parabolic_gain(d_tx, freq, eta, c)
    g_rx = parabolic_gain(d_rx, freq, eta, c)
    spreading = (c / (4.0 * math.pi * distance_km * 1000.0 * freq)) ** 2
    return p_tx * g_tx * g_rx * spreading


def snr(params: LinkBudgetParams, link_class: str, distance_km: float) -> float:
    """Linear SNR over the full system bandwidth."""
    return received_power(params, link_class, distance_km) / params.noise_power_w


class McsEntry(NamedTuple):
    spectral_efficiency: float   # bits/s/Hz
    snr_min_db: float


@dataclass(frozen=True)
class McsTable:
    """Ordered modcod operating points; rate selection picks the highest
    spectral efficiency whose SNR threshold is met."""

    entries: tuple[McsEntry, ...]
    _snr_min_linear: tuple[float, ...] = field(init=False, repr=False)

    def __post_init__(self):
        if not self.entries:
            raise ValueError("modcod table is empty")
        for a, b in zip(self.entries, self.entries[1:]):
            if not (a.spectral_efficiency < b.spectral_efficiency
                    and a.snr_min_db < b.snr_min_db):
                raise ValueError(
                    "modcod table must be strictly ascending in efficiency "
                    f"and min SNR: {a} !< {b}"
                )
        object.__setattr__(
            self, "_snr_min_linear",
            tuple(10.0 ** (e.snr_min_db / 10.0) for e in self.entries),
        )

    @staticmethod
    def from_file(path: str | Path) -> "McsTable":
        entries = []
        for line in Path(path).read_text().splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rho_s, snr_s = line.split(",")
            entries.append(McsEntry(float(rho_s), float(snr_s)))
        return McsTable(tuple(entries))

    @staticmethod
    def bundled() -> "McsTable":
        """The DVB-S2 table shipped with the package."""
        ref = resources.files("leoroute.data") / "modcod_dvbs2.txt"
        with resources.as_file(ref) as path:
            return McsTable.from_file(path)

    @property
    def snr_min_linear(self) -> tuple[float, ...]:
        return self._snr_min_linear

    def best_efficiency(self, snr_linear: float) -> float:
        """Highest spectral efficiency decodable at the given SNR; 0.0 if
        the SNR is below the lowest entry (link infeasible)."""
        idx = bisect_right(self._snr_min_linear, snr_linear)
        if idx == 0:
            return 0.0
        return self.entries[idx - 1].spectral_efficiency

    def median_rate_bps(self, bandwidth_hz: float) -> float:
        """Rate of the median table entry at a given bandwidth; used as the
        default split between "high" and "low" capacity links."""
        mid = self.entries[(len(self.entries) - 1) // 2]
        return mid.spectral_efficiency * bandwidth_hz


def link_rate(params: LinkBudgetParams, mcs: McsTable, link_class: str,
              distance_km: float) -> float:
    """Achievable data rate in bits/s; 0.0 means the link is infeasible."""
    return params.bandwidth_hz * mcs.best_efficiency(snr(params, link_class, distance_km))


class HopLatency(NamedTuple):
    queue_s: float
    tx_s: float
    prop_s: float

    @property
    def total_s(self) -> float:
        return self.queue_s + self.tx_s + self.prop_s


def hop_latency(queue_delay_s: float, size_bits: float, rate_bps: float,
                distance_km: float,
                c_m_s: float = SPEED_OF_LIGHT_M_S) -> HopLatency:
    """Split one hop's latency into queueing, transmission and propagation."""
    if rate_bps <= 0:
        raise LinkInfeasibleError(
            f"cannot transmit over a zero-rate link (distance {distance_km} km)")
    return HopLatency(queue_delay_s, size_bits / rate_bps,
                      distance_km * 1000.0 / c_m_s)
