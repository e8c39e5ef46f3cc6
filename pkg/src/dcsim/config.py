"""Scenario configuration: dataclasses, YAML parsing and canonical serialization.

The on-disk format is YAML (comments and nesting allowed).  ``dump_config``
emits a canonical form, so ``dump(parse(dump(c))) == dump(c)`` byte for byte.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import yaml


class ConfigError(ValueError):
    """Invalid scenario configuration; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)


@dataclass
class NodeConfig:
    id: str
    role: str
    radio: Optional[str] = None
    multihoming: bool = False
    multi_carrier_api: bool = True
    standby: bool = False


@dataclass
class LinkConfig:
    id: str
    a: str
    b: str
    capacity_mbps: float
    delay_ms: float = 10.0
    loss: float = 0.0
    psi_s: float = 1.0e9
    gamma_s: float = 0.0
    distribution: str = "exponential"
    initially_up: bool = True
    cost_per_byte: float = 0.0


@dataclass
class WlanConfig:
    node: str
    variant: str = "WlanViaCoreTrusted"
    extra_delay_ms: float = 0.0
    overhead_bytes: int = 0


@dataclass
class BearerConfig:
    id: str
    kind: str
    split_point: str = "None"
    qos_class: int = 9


@dataclass
class MptcpConfig:
    bearer: str
    mode: str = "Aggregate"
    termination: str = "EndToEnd_IPv6MultiHoming"
    detection_latency_ms: float = 200.0
    t_interrupt_ms: float = 50.0
    segment_bytes: int = 1500
    buffer_segments: int = 1024
    queue_limit_ms: float = 50.0
    demand_mbps: Optional[float] = None
    subflows: Optional[list] = None
    backup: list = field(default_factory=list)


@dataclass
class ScriptedEvent:
    t_s: float
    action: str
    link: Optional[str] = None
    target_link: Optional[str] = None


@dataclass
class SweepConfig:
    points: list = field(default_factory=list)


@dataclass
class ScenarioConfig:
    name: str
    arch_option: str
    nodes: list
    links: list
    bearers: list
    mptcp: MptcpConfig
    seed: int = 1
    duration_s: float = 30.0
    sample_interval_s: float = 0.5
    description: str = ""
    core_delay_ms: float = 0.0
    backhaul_delay_ms: float = 5.0
    wlan: list = field(default_factory=list)
    events: list = field(default_factory=list)
    sweep: Optional[SweepConfig] = None

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def link(self, link_id: str) -> LinkConfig:
        for ln in self.links:
            if ln.id == link_id:
                return ln
        raise KeyError(link_id)


_SCALAR_FLOAT = {
    "capacity_mbps", "delay_ms", "loss", "psi_s", "gamma_s", "cost_per_byte", "extra_delay_ms",
    "detection_latency_ms", "t_interrupt_ms", "queue_limit_ms", "demand_mbps", "t_s",
    "duration_s", "sample_interval_s", "core_delay_ms", "backhaul_delay_ms",
}
_SCALAR_INT = {"overhead_bytes", "qos_class", "segment_bytes", "buffer_segments", "seed"}


def _coerce(path: str, name: str, value: Any) -> Any:
    if value is None:
        return None
    try:
        if name in _SCALAR_FLOAT:
            if isinstance(value, bool):
                raise TypeError
            return float(value)
        if name in _SCALAR_INT:
            if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                raise TypeError
            return int(value)
    except (TypeError, ValueError):
        raise ConfigError(path, f"expected a number, got {value!r}") from None
    return value


def _build(cls, data: Any, path: str):
    if not isinstance(data, dict):
        raise ConfigError(path, f"expected a mapping, got {type(data).__name__}")
    fields = {f.name: f for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - set(fields))
    if unknown:
        raise ConfigError(f"{path}.{unknown[0]}" if path else unknown[0], "unknown field")
    kwargs = {}
    for name, f in fields.items():
        sub = f"{path}.{name}" if path else name
        if name not in data:
            if f.default is dataclasses.MISSING and f.default_factory is dataclasses.MISSING:
                raise ConfigError(sub, "required field missing")
            continue
        kwargs[name] = _coerce(sub, name, data[name])
    return cls(**kwargs)


def _build_list(cls, data: Any, path: str) -> list:
    if data is None:
        return []
    if not isinstance(data, list):
        raise ConfigError(path, "expected a list")
    return [_build(cls, item, f"{path}[{i}]") for i, item in enumerate(data)]


def config_from_dict(data: dict) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError("", "configuration must be a mapping")
    data = dict(data)
    nested = {
        "nodes": _build_list(NodeConfig, data.pop("nodes", None), "nodes"),
        "links": _build_list(LinkConfig, data.pop("links", None), "links"),
        "bearers": _build_list(BearerConfig, data.pop("bearers", None), "bearers"),
        "wlan": _build_list(WlanConfig, data.pop("wlan", None), "wlan"),
        "events": _build_list(ScriptedEvent, data.pop("events", None), "events"),
    }
    if "mptcp" not in data:
        raise ConfigError("mptcp", "required field missing")
    nested["mptcp"] = _build(MptcpConfig, data.pop("mptcp"), "mptcp")
    sweep = data.pop("sweep", None)
    nested["sweep"] = None if sweep is None else _build(SweepConfig, sweep, "sweep")
    for key in nested:
        data[key] = None
    cfg = _build(ScenarioConfig, data, "")
    for key, value in nested.items():
        setattr(cfg, key, value)
    return cfg


def config_to_dict(cfg: ScenarioConfig) -> dict:
    return dataclasses.asdict(cfg)


def dump_config(cfg: ScenarioConfig) -> str:
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=False, default_flow_style=False, width=100)


def parse_config(text: str) -> ScenarioConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("", f"not valid YAML: {exc}") from None
    return config_from_dict(data)


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    return parse_config(Path(path).read_text())


def save_config(cfg: ScenarioConfig, path: Union[str, Path]) -> None:
    Path(path).write_text(dump_config(cfg))
