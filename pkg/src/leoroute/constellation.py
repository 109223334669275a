"""Orbit propagation and ground-station geometry.

Satellites fly circular Keplerian orbits (spherical Earth, no
perturbations), propagated in an inertial frame and rotated into ECEF so
that satellites and gateways share one coordinate frame. All distances
are in km, angles in radians unless a name says otherwise, times in
seconds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Physical constants (km, s, rad).
MU_EARTH = 3.986004418e5        # km^3/s^2
EARTH_RADIUS_KM = 6371.0
EARTH_ROTATION_RAD_S = 7.2921159e-5


@dataclass(frozen=True)
class ConstellationConfig:
    """Shell of evenly spaced circular orbits.

    ``plane_raans_rad`` gives the ascending-node longitude of each plane;
    when omitted, planes are spread uniformly over the full circle.
    ``phasing_rad`` shifts the in-plane anomaly of consecutive planes.
    """

    num_planes: int
    sats_per_plane: int
    altitude_km: float = 600.0
    inclination_rad: float = math.radians(98.6)
    phasing_rad: float = 0.0
    plane_raans_rad: tuple[float, ...] | None = None
    earth_radius_km: float = EARTH_RADIUS_KM
    earth_rotation_rad_s: float = EARTH_ROTATION_RAD_S
    mu_km3_s2: float = MU_EARTH

    def __post_init__(self):
        if self.num_planes < 1:
            raise ValueError(f"num_planes must be >= 1, got {self.num_planes}")
        if self.sats_per_plane < 1:
            raise ValueError(f"sats_per_plane must be >= 1, got {self.sats_per_plane}")
        if self.altitude_km <= 0:
            raise ValueError(f"altitude_km must be > 0, got {self.altitude_km}")
        if self.plane_raans_rad is not None and len(self.plane_raans_rad) != self.num_planes:
            raise ValueError(
                f"plane_raans_rad has {len(self.plane_raans_rad)} entries "
                f"for {self.num_planes} planes"
            )

    @property
    def num_satellites(self) -> int:
        return self.num_planes * self.sats_per_plane

    @property
    def orbit_radius_km(self) -> float:
        return self.earth_radius_km + self.altitude_km

    @property
    def orbital_rate_rad_s(self) -> float:
        return math.sqrt(self.mu_km3_s2 / self.orbit_radius_km**3)

    @property
    def orbital_period_s(self) -> float:
        return 2.0 * math.pi / self.orbital_rate_rad_s

    def raan_of_plane(self, plane: int) -> float:
        if self.plane_raans_rad is not None:
            return self.plane_raans_rad[plane]
        return 2.0 * math.pi * plane / self.num_planes


@dataclass(frozen=True)
class SatelliteId:
    """(plane, slot) pair, bijective with flat index plane*N_m + slot."""

    plane: int
    slot: int

    def flat(self, cfg: ConstellationConfig) -> int:
        return self.plane * cfg.sats_per_plane + self.slot

    @staticmethod
    def from_flat(index: int, cfg: ConstellationConfig) -> "SatelliteId":
        return SatelliteId(index // cfg.sats_per_plane, index % cfg.sats_per_plane)


@dataclass(frozen=True)
class GeoPosition:
    """Geodetic point on a spherical Earth (degrees, km)."""

    lat_deg: float
    lon_deg: float
    alt_km: float = 0.0

    def __post_init__(self):
        if not -90.0 <= self.lat_deg <= 90.0:
            raise ValueError(f"latitude out of range: {self.lat_deg}")
        if not -180.0 < self.lon_deg <= 180.0:
            raise ValueError(f"longitude out of range: {self.lon_deg}")


@dataclass(frozen=True)
class EcefVector:
    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)


def _check_sat(cfg: ConstellationConfig, sat: SatelliteId) -> None:
    if not (0 <= sat.plane < cfg.num_planes and 0 <= sat.slot < cfg.sats_per_plane):
        raise IndexError(
            f"satellite ({sat.plane},{sat.slot}) outside "
            f"{cfg.num_planes}x{cfg.sats_per_plane} constellation"
        )


def satellite_position(cfg: ConstellationConfig, sat: SatelliteId, t: float) -> EcefVector:
    """ECEF position of one satellite at time t."""
    _check_sat(cfg, sat)
    r = cfg.orbit_radius_km
    # Argument of latitude: even in-plane spacing, inter-plane phasing, mean motion.
    u = (
        2.0 * math.pi * sat.slot / cfg.sats_per_plane
        + cfg.phasing_rad * sat.plane
        + cfg.orbital_rate_rad_s * t
    )
    raan = cfg.raan_of_plane(sat.plane)
    inc = cfg.inclination_rad
    cos_u, sin_u = math.cos(u), math.sin(u)
    cos_o, sin_o = math.cos(raan), math.sin(raan)
    cos_i, sin_i = math.cos(inc), math.sin(inc)
    # Orbital plane -> inertial.
    xi = r * (cos_o * cos_u - sin_o * sin_u * cos_i)
    yi = r * (sin_o * cos_u + cos_o * sin_u * cos_i)
    zi = r * (sin_u * sin_i)
    # Inertial -> ECEF (rotate by -omega_E * t about z).
    theta = cfg.earth_rotation_rad_s * t
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    return EcefVector(cos_t * xi + sin_t * yi, -sin_t * xi + cos_t * yi, zi)


def satellite_positions(cfg: ConstellationConfig, t: float) -> np.ndarray:
    """ECEF positions of the whole shell at time t, shape (N, 3), flat order."""
    planes = np.repeat(np.arange(cfg.num_planes), cfg.sats_per_plane)
    slots = np.tile(np.arange(cfg.sats_per_plane), cfg.num_planes)
    r = cfg.orbit_radius_km
    u = (
        2.0 * np.pi * slots / cfg.sats_per_plane
        + cfg.phasing_rad * planes
        + cfg.orbital_rate_rad_s * t
    )
    if cfg.plane_raans_rad is not None:
        raan = np.asarray(cfg.plane_raans_rad)[planes]
    else:
        raan = 2.0 * np.pi * planes / cfg.num_planes
    inc = cfg.inclination_rad
    cos_u, sin_u = np.cos(u), np.sin(u)
    cos_o, sin_o = np.cos(raan), np.sin(raan)
    xi = r * (cos_o * cos_u - sin_o * sin_u * math.cos(inc))
    yi = r * (sin_o * cos_u + cos_o * sin_u * math.cos(inc))
    zi = r * sin_u * math.sin(inc)
    theta = cfg.earth_rotation_rad_s * t
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    out = np.empty((cfg.num_satellites, 3))
    out[:, 0] = cos_t * xi + sin_t * yi
    out[:, 1] = -sin_t * xi + cos_t * yi
    out[:, 2] = zi
    return out


def gateway_position(geo: GeoPosition, t: float = 0.0,
                     earth_radius_km: float = EARTH_RADIUS_KM) -> EcefVector:
    """ECEF position of a ground station.

    Gateways are fixed in ECEF; Earth rotation is absorbed by expressing
    the satellites in ECEF, so ``t`` is accepted but has no effect.
    """
    lat = math.radians(geo.lat_deg)
    lon = math.radians(geo.lon_deg)
    r = earth_radius_km + geo.alt_km
    return EcefVector(
        r * math.cos(lat) * math.cos(lon),
        r * math.cos(lat) * math.sin(lon),
        r * math.sin(lat),
    )


def gateway_positions(geos: list[GeoPosition],
                      earth_radius_km: float = EARTH_RADIUS_KM) -> np.ndarray:
    """ECEF positions for a list of gateways, shape (G, 3)."""
    out = np.empty((len(geos), 3))
    for k, geo in enumerate(geos):
        p = gateway_position(geo, earth_radius_km=earth_radius_km)
        out[k] = (p.x, p.y, p.z)
    return out


def slant_range(a: EcefVector | np.ndarray, b: EcefVector | np.ndarray) -> float:
    """Euclidean distance between two ECEF points, km."""
    ax, ay, az = (a.x, a.y, a.z) if isinstance(a, EcefVector) else (a[0], a[1], a[2])
    bx, by, bz = (b.x, b.y, b.z) if isinstance(b, EcefVector) else (b[0], b[1], b[2])
    return math.sqrt((ax - bx) ** 2 + (ay - by) ** 2 + (az - bz) ** 2)
