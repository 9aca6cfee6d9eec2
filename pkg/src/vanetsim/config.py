"""Scenario configuration: validated dataclass, flat ``key = value`` files, presets."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, fields
from pathlib import Path

PROTOCOLS = ("AODV", "DSR", "GPSR")


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    protocol: str = "AODV"
    nodes: int = 200
    connections: int = 100
    area_width: float = 500.0
    area_height: float = 500.0
    range: float = 250.0
    speed_min: float = 10.0
    speed_max: float = 10.0
    pause: float = 50.0
    sim_time: float = 600.0
    packet_size: int = 512
    queue_length: int = 50
    cbr_rate: float = 4.0
    planarization: str = "GG"
    # GPSR: re-forward a packet whose unicast failed instead of dropping it
    gpsr_reroute: bool = False
    seed: int = 1
    bitrate: float = 2e6
    jitter: float = 1e-3
    out_dir: str = ""
    trace: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for f in fields(self):
            if f.type == "float":
                setattr(self, f.name, float(getattr(self, f.name)))
            elif f.type == "int" and not isinstance(getattr(self, f.name), bool):
                setattr(self, f.name, int(getattr(self, f.name)))
        self.protocol = str(self.protocol).upper()
        self.planarization = str(self.planarization).upper()
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"protocol: expected one of {PROTOCOLS}, got {self.protocol!r}")
        if self.planarization not in ("GG", "RNG"):
            raise ConfigError(f"planarization: expected GG or RNG, got {self.planarization!r}")
        for name in ("nodes", "connections", "area_width", "area_height", "range", "sim_time",
                     "packet_size", "cbr_rate", "bitrate"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name}: must be > 0, got {getattr(self, name)!r}")
        for name in ("speed_min", "speed_max", "pause", "queue_length", "jitter"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name}: must be >= 0, got {getattr(self, name)!r}")
        if self.speed_min > self.speed_max:
            raise ConfigError(f"speed_min: {self.speed_min} exceeds speed_max {self.speed_max}")
        if self.nodes < 2:
            raise ConfigError("nodes: need at least 2")
        if self.connections > self.nodes * (self.nodes - 1):
            raise ConfigError(f"connections: {self.connections} exceeds nodes*(nodes-1) = "
                              f"{self.nodes * (self.nodes - 1)}")

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    @property
    def speed(self) -> float:
        return self.speed_max


@dataclass
class Preset:
    name: str
    config: ScenarioConfig
    param: str
    values: list = field(default_factory=list)


def _set_param(cfg: ScenarioConfig, param: str, value) -> ScenarioConfig:
    if param == "speed":
        return cfg.replace(speed_min=value, speed_max=value)
    return cfg.replace(**{param: value})


PRESETS: dict[str, Preset] = {
    # varied connection count on a 300-node field
    "scenario1": Preset("scenario1", ScenarioConfig(
        nodes=300, connections=30, speed_min=20.0, speed_max=20.0, pause=0.0, queue_length=50),
        "connections", [30, 50, 150, 300]),
    "scenario2": Preset("scenario2", ScenarioConfig(
        nodes=200, connections=100, speed_min=10.0, speed_max=10.0, pause=50.0, queue_length=64),
        "pause", [50.0, 100.0, 150.0, 200.0, 250.0]),
    "scenario3": Preset("scenario3", ScenarioConfig(
        nodes=200, connections=100, speed_min=10.0, speed_max=10.0, pause=10.0, queue_length=50),
        "speed", [10.0, 30.0, 50.0, 70.0, 90.0]),
}


def preset(name: str) -> Preset:
    try:
        p = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}") from None
    return Preset(p.name, p.config.replace(), p.param, list(p.values))


def with_param(cfg: ScenarioConfig, param: str, value) -> ScenarioConfig:
    """Copy of ``cfg`` with a sweep parameter set (``speed`` sets min and max)."""
    if param != "speed" and param not in {f.name for f in fields(ScenarioConfig)}:
        raise ConfigError(f"unknown sweep parameter {param!r}")
    return _set_param(cfg, param, value)


def param_value(cfg: ScenarioConfig, param: str):
    return cfg.speed_max if param == "speed" else getattr(cfg, param)


# -- text format -------------------------------------------------------------

_FIELD_TYPES = {f.name: f.type for f in fields(ScenarioConfig)}


def _parse_value(key: str, raw: str, lineno: int | None):
    where = f" (line {lineno})" if lineno is not None else ""
    typ = _FIELD_TYPES[key]
    try:
        if typ == "bool":
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if typ == "int":
            return int(raw)
        if typ == "float":
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"{key}{where}: cannot parse {raw!r} as {typ}") from None


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def parse_config(text: str, base: ScenarioConfig | None = None) -> ScenarioConfig:
    values = dataclasses.asdict(base) if base is not None else {}
    key_line: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{key} (line {lineno}): unknown key")
        values[key] = _parse_value(key, raw.strip(), lineno)
        key_line[key] = lineno
    if base is None:
        missing = [k for k in ("protocol", "nodes", "connections") if k not in values]
        if missing:
            raise ConfigError(f"missing required field(s): {', '.join(missing)}")
    try:
        return ScenarioConfig(**values)
    except ConfigError as exc:
        key = str(exc).split(":", 1)[0]
        if key in key_line:
            raise ConfigError(f"{exc} (line {key_line[key]})") from None
        raise


def dump_config(cfg: ScenarioConfig) -> str:
    return "".join(f"{f.name} = {_format_value(getattr(cfg, f.name))}\n" for f in fields(cfg))


def load_config(source: str | Path) -> ScenarioConfig:
    """A preset name or the path of a ``key = value`` file (keys layered on defaults)."""
    if str(source) in PRESETS:
        return preset(str(source)).config
    path = Path(source)
    if not path.exists():
        raise ConfigError(f"no preset or config file named {str(source)!r}")
    return parse_config(path.read_text(), ScenarioConfig())
