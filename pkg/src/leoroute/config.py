"""Scenario files: a single YAML document describing the constellation,
gateways, radio parameters, traffic and learning settings.

Parsing is strict: unknown keys are rejected with the offending field
named, so typos fail loudly before any simulation starts.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import yaml

from .constellation import ConstellationConfig, GeoPosition
from .errors import ConfigError
from .linkbudget import LinkBudgetParams, McsTable
from .qrouting import QLearningParams
from .simcore import Scenario
from .traffic import TrafficConfig

_CONSTELLATION_KEYS = {"planes", "sats_per_plane", "altitude_km",
                       "inclination_deg", "phasing_deg"}
_GATEWAY_KEYS = {"name", "lat", "lon"}
_LINK_KEYS = {"sat_tx_power_w", "gw_tx_power_w", "freq_downlink_ghz",
              "freq_uplink_ghz", "freq_isl_ghz", "sat_dish_m", "gw_dish_m",
              "aperture_efficiency", "bandwidth_mhz", "noise_temperature_k",
              "modcod_table"}
_TRAFFIC_KEYS = {"load_fraction", "packet_size_bits", "max_load_per_gateway_bps"}
_QLEARN_KEYS = {"learning_rate", "discount", "eps_initial", "eps_min",
                "eps_decay_steps", "w_queue", "w_distance", "r_delivery",
                "r_loop", "queue_code_threshold", "capacity_split_bps",
                "initial_q"}
_SIM_KEYS = {"horizon_s", "refresh_dt_s", "snapshot_dt_s", "queue_capacity",
             "hop_cap", "timeseries_bin_s", "freeze_geometry", "epoch_start_s"}
_TOP_KEYS = {"name", "constellation", "gateways", "link_budget", "traffic",
             "qlearning", "sim"}


def _reject_unknown(section: dict, allowed: set, where: str) -> None:
    for key in section:
        if key not in allowed:
            raise ConfigError(f"{where}.{key}", "unknown key")


def _require(section: dict, key: str, where: str):
    if key not in section:
        raise ConfigError(f"{where}.{key}", "missing required key")
    return section[key]


@dataclass
class ScenarioSpec:
    """Parsed scenario file, before selecting an active gateway subset."""

    name: str
    constellation: ConstellationConfig
    gateway_names: list[str]
    gateway_geos: list[GeoPosition]
    link_budget: LinkBudgetParams
    mcs: McsTable
    traffic: TrafficConfig
    qlearning: QLearningParams
    sim: dict
    raw: dict

    @property
    def max_gateways(self) -> int:
        return len(self.gateway_names)

    def build(self, num_gateways: int, seed: int,
              horizon_s: float | None = None,
              packet_csv_path: str | None = None,
              record_hops: bool = False) -> Scenario:
        """Scenario for one simulation cell: the first ``num_gateways``
        entries of the sorted gateway list are active."""
        if not 2 <= num_gateways <= self.max_gateways:
            raise ConfigError("gateways", f"need 2..{self.max_gateways} active "
                                          f"gateways, got {num_gateways}")
        return Scenario(
            constellation=self.constellation,
            gateway_names=self.gateway_names[:num_gateways],
            gateway_geos=self.gateway_geos[:num_gateways],
            link_budget=self.link_budget,
            mcs=self.mcs,
            traffic=self.traffic,
            qlearning=self.qlearning,
            horizon_s=horizon_s if horizon_s is not None else self.sim["horizon_s"],
            refresh_dt_s=self.sim["refresh_dt_s"],
            snapshot_dt_s=self.sim["snapshot_dt_s"],
            queue_capacity=self.sim["queue_capacity"],
            hop_cap=self.sim["hop_cap"],
            timeseries_bin_s=self.sim["timeseries_bin_s"],
            freeze_geometry=self.sim["freeze_geometry"],
            epoch_start_s=self.sim["epoch_start_s"],
            seed=seed,
            packet_csv_path=packet_csv_path,
            record_hops=record_hops,
        )

    def config_hash(self) -> str:
        return hashlib.sha256(
            json.dumps(self.raw, sort_keys=True).encode()).hexdigest()[:16]


def parse_scenario(doc: dict, base_dir: Path | None = None) -> ScenarioSpec:
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "scenario file must be a mapping")
    _reject_unknown(doc, _TOP_KEYS, "<root>")

    cons = _require(doc, "constellation", "<root>")
    _reject_unknown(cons, _CONSTELLATION_KEYS, "constellation")
    try:
        constellation = ConstellationConfig(
            num_planes=int(_require(cons, "planes", "constellation")),
            sats_per_plane=int(_require(cons, "sats_per_plane", "constellation")),
            altitude_km=float(cons.get("altitude_km", 600.0)),
            inclination_rad=math.radians(float(cons.get("inclination_deg", 98.6))),
            phasing_rad=math.radians(float(cons.get("phasing_deg", 0.0))),
        )
    except ValueError as exc:
        raise ConfigError("constellation", str(exc)) from exc

    gws = _require(doc, "gateways", "<root>")
    if not isinstance(gws, list) or len(gws) < 2:
        raise ConfigError("gateways", "need a list of at least 2 gateways")
    names, geos = [], []
    for k, entry in enumerate(gws):
        where = f"gateways[{k}]"
        _reject_unknown(entry, _GATEWAY_KEYS, where)
        names.append(str(_require(entry, "name", where)))
        try:
            geos.append(GeoPosition(float(_require(entry, "lat", where)),
                                    float(_require(entry, "lon", where))))
        except ValueError as exc:
            raise ConfigError(where, str(exc)) from exc

    lb = doc.get("link_budget", {})
    _reject_unknown(lb, _LINK_KEYS, "link_budget")
    try:
        link_budget = LinkBudgetParams(
            sat_tx_power_w=float(lb.get("sat_tx_power_w", 10.0)),
            gw_tx_power_w=float(lb.get("gw_tx_power_w", 20.0)),
            freq_isl_hz=float(lb.get("freq_isl_ghz", 26.0)) * 1e9,
            freq_uplink_hz=float(lb.get("freq_uplink_ghz", 30.0)) * 1e9,
            freq_downlink_hz=float(lb.get("freq_downlink_ghz", 20.0)) * 1e9,
            sat_dish_diameter_m=float(lb.get("sat_dish_m", 0.26)),
            gw_dish_diameter_m=float(lb.get("gw_dish_m", 0.33)),
            aperture_efficiency=float(lb.get("aperture_efficiency", 0.6)),
            bandwidth_hz=float(lb.get("bandwidth_mhz", 500.0)) * 1e6,
            noise_temperature_k=float(lb.get("noise_temperature_k", 290.0)),
        )
    except ValueError as exc:
        raise ConfigError("link_budget", str(exc)) from exc
    table = lb.get("modcod_table")
    if table:
        path = Path(table)
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
        try:
            mcs = McsTable.from_file(path)
        except (OSError, ValueError) as exc:
            raise ConfigError("link_budget.modcod_table", str(exc)) from exc
    else:
        mcs = McsTable.bundled()

    tr = doc.get("traffic", {})
    _reject_unknown(tr, _TRAFFIC_KEYS, "traffic")
    override = tr.get("max_load_per_gateway_bps")
    try:
        traffic = TrafficConfig(
            load_fraction=float(tr.get("load_fraction", 0.85)),
            packet_size_bits=float(tr.get("packet_size_bits", 64800.0)),
            max_load_per_gateway_bps=None if override is None else float(override),
        )
    except ValueError as exc:
        raise ConfigError("traffic", str(exc)) from exc

    ql = doc.get("qlearning", {})
    _reject_unknown(ql, _QLEARN_KEYS, "qlearning")
    split = ql.get("capacity_split_bps")
    try:
        qlearning = QLearningParams(
            learning_rate=float(ql.get("learning_rate", 0.1)),
            discount=float(ql.get("discount", 0.9)),
            eps_initial=float(ql.get("eps_initial", 1.0)),
            eps_min=float(ql.get("eps_min", 0.01)),
            eps_decay_steps=float(ql.get("eps_decay_steps", 500.0)),
            w_queue=float(ql.get("w_queue", 1.0)),
            w_distance=float(ql.get("w_distance", 1.0)),
            r_delivery=float(ql.get("r_delivery", 10.0)),
            r_loop=float(ql.get("r_loop", -10.0)),
            queue_code_threshold=int(ql.get("queue_code_threshold", 25)),
            capacity_split_bps=None if split is None else float(split),
            initial_q=float(ql.get("initial_q", 0.0)),
        )
    except ValueError as exc:
        raise ConfigError("qlearning", str(exc)) from exc

    sim = dict(doc.get("sim", {}))
    _reject_unknown(sim, _SIM_KEYS, "sim")
    sim_resolved = {
        "horizon_s": float(sim.get("horizon_s", 30.0)),
        "refresh_dt_s": float(sim.get("refresh_dt_s", 1.0)),
        "snapshot_dt_s": float(sim.get("snapshot_dt_s", 1.0)),
        "queue_capacity": int(sim.get("queue_capacity", 1_000_000)),
        "hop_cap": int(sim.get("hop_cap", 64)),
        "timeseries_bin_s": float(sim.get("timeseries_bin_s", 0.05)),
        "freeze_geometry": bool(sim.get("freeze_geometry", False)),
        "epoch_start_s": float(sim.get("epoch_start_s", 0.0)),
    }
    for key in ("horizon_s", "refresh_dt_s", "snapshot_dt_s", "timeseries_bin_s"):
        if sim_resolved[key] <= 0:
            raise ConfigError(f"sim.{key}", "must be > 0")
    if sim_resolved["queue_capacity"] < 1:
        raise ConfigError("sim.queue_capacity", "must be >= 1")
    if sim_resolved["hop_cap"] < 2:
        raise ConfigError("sim.hop_cap", "must be >= 2")

    return ScenarioSpec(
        name=str(doc.get("name", "scenario")),
        constellation=constellation,
        gateway_names=names,
        gateway_geos=geos,
        link_budget=link_budget,
        mcs=mcs,
        traffic=traffic,
        qlearning=qlearning,
        sim=sim_resolved,
        raw=doc,
    )


def load_scenario(path: str | Path) -> ScenarioSpec:
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"not valid YAML: {exc}") from exc
    return parse_scenario(doc, base_dir=path.parent)


def default_scenario() -> ScenarioSpec:
    """The committed experiment scenario shipped with the package."""
    ref = resources.files("leoroute.data") / "kepler.yaml"
    with resources.as_file(ref) as path:
        return load_scenario(path)
