"""Single runs, seed sweeps, CSV rows, plot-data files and re-aggregation.

Every run writes its packet ledger (with the full config in ``#!`` metadata
lines), so ``rebuild_from_ledgers`` can recompute all rows and aggregates
without re-simulating.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path

from .config import (PROTOCOLS, ConfigError, ScenarioConfig, dump_config, param_value,
                     parse_config, preset, with_param)
from .metrics import MetricsReport, PacketLedger, compute_report
from .network import Network
from .packets import DropReason

REPORT_FIELDS = ("sent", "received", "in_flight", "pdr", "avg_e2e_delay", "packet_loss_count",
                 "packet_loss", "packet_loss_ratio", "avg_throughput")
DROP_COLUMNS = tuple(f"drop_{r.value.lower()}" for r in DropReason)
CONFIG_COLUMNS = ("protocol", "param", "value", "seed", "nodes", "connections", "speed_min",
                  "speed_max", "pause", "sim_time", "queue_length", "cbr_rate", "planarization")
CSV_COLUMNS = CONFIG_COLUMNS + REPORT_FIELDS + DROP_COLUMNS

# metrics that get a plot-data file
PLOT_METRICS = ("pdr", "avg_e2e_delay", "packet_loss_count", "packet_loss_ratio",
                "avg_throughput")

NA = "NA"


class SweepError(RuntimeError):
    pass


def fmt(value) -> str:
    """CSV cell: NA for missing, six decimals for reals, plain ints/strings."""
    if value is None:
        return NA
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _num(raw: str):
    if raw == NA:
        return None
    try:
        return int(raw)
    except ValueError:
        return float(raw)


# -- rows --------------------------------------------------------------------

def make_row(cfg: ScenarioConfig, report: MetricsReport, param: str = "", value=None) -> dict:
    row = {
        "protocol": cfg.protocol, "param": param or "-",
        "value": "-" if value is None else value, "seed": cfg.seed,
        "nodes": cfg.nodes, "connections": cfg.connections, "speed_min": cfg.speed_min,
        "speed_max": cfg.speed_max, "pause": cfg.pause, "sim_time": cfg.sim_time,
        "queue_length": cfg.queue_length, "cbr_rate": cfg.cbr_rate,
        "planarization": cfg.planarization,
    }
    for name in REPORT_FIELDS:
        row[name] = getattr(report, name)
    for r, col in zip(DropReason, DROP_COLUMNS):
        row[col] = report.drops.get(r.value, 0)
    return row


def format_rows(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow([fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def read_rows(path: str | Path) -> list[dict]:
    """Parse a runs CSV; numeric cells come back as int/float, NA as None."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected CSV header")
        rows = []
        for cells in reader:
            row = {}
            for col, raw in zip(header, cells):
                if col in ("protocol", "param", "planarization"):
                    row[col] = raw
                elif col == "value" and raw == "-":
                    row[col] = None
                else:
                    row[col] = _num(raw)
            rows.append(row)
    return rows


def row_report(row: dict) -> MetricsReport:
    drops = {r.value: row[c] for r, c in zip(DropReason, DROP_COLUMNS)}
    return MetricsReport(**{k: row[k] for k in REPORT_FIELDS}, drops=drops)


# -- single runs --------------------------------------------------------------

@dataclass
class RunResult:
    cfg: ScenarioConfig
    report: MetricsReport
    row: dict
    wall: float
    ledger_path: Path | None = None
    trace_path: Path | None = None


def run_tag(cfg: ScenarioConfig, param: str = "", value=None) -> str:
    point = f"_{param}-{fmt(value)}" if param else ""
    return f"{cfg.protocol.lower()}{point}_s{cfg.seed}"


def run_one(cfg: ScenarioConfig, out_dir: str | Path | None = None, param: str = "",
            value=None) -> RunResult:
    """Simulate one config; with ``out_dir`` also persist ledger, row and trace."""
    out = Path(out_dir or cfg.out_dir) if (out_dir or cfg.out_dir) else None
    tag = run_tag(cfg, param, value)
    trace_fh = None
    trace_path = None
    if cfg.trace:
        if out is None:
            raise ConfigError("trace: requires an output directory")
        out.mkdir(parents=True, exist_ok=True)
        trace_path = out / f"trace_{tag}.txt"
        trace_fh = open(trace_path, "w")
    t0 = time.perf_counter()
    try:
        net = Network(cfg, trace=trace_fh)
        report = net.run()
    finally:
        if trace_fh is not None:
            trace_fh.close()
    wall = time.perf_counter() - t0
    row = make_row(cfg, report, param, value)
    ledger_path = None
    if out is not None:
        ledger_dir = out / "ledgers"
        ledger_dir.mkdir(parents=True, exist_ok=True)
        ledger_path = ledger_dir / f"ledger_{tag}.txt"
        meta = {"param": param or "-", "value": fmt(value) if value is not None else "-"}
        meta.update({f.name: getattr(cfg, f.name) for f in dataclasses.fields(cfg)})
        net.ledger.dump(ledger_path, meta)
    return RunResult(cfg, report, row, wall, ledger_path, trace_path)


# -- sweeps -------------------------------------------------------------------

@dataclass
class SweepSpec:
    base: ScenarioConfig
    param: str
    values: list
    seeds: int = 10
    protocols: tuple[str, ...] = PROTOCOLS
    first_seed: int = 1
    name: str = ""

    def __post_init__(self):
        with_param(self.base, self.param, self.values[0] if self.values else 0)
        if not self.values:
            raise ConfigError("values: sweep needs at least one parameter value")
        if self.seeds < 1:
            raise ConfigError("seeds: must be >= 1")
        self.protocols = tuple(p.upper() for p in self.protocols)
        for p in self.protocols:
            if p not in PROTOCOLS:
                raise ConfigError(f"protocol: unknown protocol {p!r}")

    @classmethod
    def from_preset(cls, name: str, seeds: int = 10, **kw) -> "SweepSpec":
        p = preset(name)
        return cls(p.config, p.param, list(p.values), seeds, name=name, **kw)

    def points(self):
        """(protocol, value, cfg) in deterministic order: value, protocol, seed."""
        for value in self.values:
            for proto in self.protocols:
                for k in range(self.seeds):
                    cfg = with_param(self.base, self.param, value).replace(
                        protocol=proto, seed=self.first_seed + k)
                    yield proto, value, cfg

    def describe(self) -> str:
        lines = [f"# sweep {self.name or '-'}", f"param = {self.param}",
                 f"values = {' '.join(fmt(v) for v in self.values)}",
                 f"seeds = {self.seeds}", f"first_seed = {self.first_seed}",
                 f"protocols = {' '.join(self.protocols)}", "# base config"]
        return "\n".join(lines) + "\n" + dump_config(self.base)


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: list[dict] = field(default_factory=list)
    wall: dict[str, float] = field(default_factory=dict)


def run_sweep(spec: SweepSpec, out_dir: str | Path | None = None, progress=None) -> SweepResult:
    """Run every (value, protocol, seed); aggregates are written once at the end."""
    result = SweepResult(spec)
    for proto, value, cfg in spec.points():
        try:
            r = run_one(cfg, out_dir, spec.param, value)
        except Exception as exc:
            raise SweepError(f"sweep failed at {spec.param}={fmt(value)} protocol={proto} "
                             f"seed={cfg.seed}: {exc}") from exc
        result.rows.append(r.row)
        result.wall[run_tag(cfg, spec.param, value)] = r.wall
        if progress is not None:
            progress(r)
    if out_dir is not None:
        write_outputs(Path(out_dir), spec, result.rows)
    return result


def write_outputs(out: Path, spec: SweepSpec, rows: list[dict]) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "sweep.txt").write_text(spec.describe())
    (out / "runs.csv").write_text(format_rows(rows))
    # aggregates come from the rounded CSV values so they can be recomputed from runs.csv
    parsed = read_rows(out / "runs.csv")
    for metric in PLOT_METRICS:
        (out / f"plot_{metric}.csv").write_text(format_plot(parsed, metric, spec.protocols))


# -- aggregation --------------------------------------------------------------

def summarize(values: list[float]) -> tuple[float, float, float] | None:
    """(median, q1, q3); None when no value is defined."""
    xs = sorted(v for v in values if v is not None)
    if not xs:
        return None
    if len(xs) == 1:
        return xs[0], xs[0], xs[0]
    q1, _, q3 = statistics.quantiles(xs, n=4, method="inclusive")
    return statistics.median(xs), q1, q3


def aggregate(rows: list[dict], metric: str, protocols=None) -> dict:
    """``{value: {protocol: (median, q1, q3) | None}}`` in first-seen value order."""
    protocols = protocols or sorted({r["protocol"] for r in rows})
    groups: dict = {}
    for r in rows:
        groups.setdefault(r["value"], {}).setdefault(r["protocol"], []).append(r[metric])
    return {v: {p: summarize(g.get(p, [])) for p in protocols} for v, g in groups.items()}


def format_plot(rows: list[dict], metric: str, protocols) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["value"] + [f"{p}_{s}" for p in protocols for s in ("median", "q1", "q3")])
    for value, per in aggregate(rows, metric, protocols).items():
        cells = [fmt(value)]
        for p in protocols:
            stats = per[p]
            cells += [NA] * 3 if stats is None else [fmt(float(x)) for x in stats]
        w.writerow(cells)
    return buf.getvalue()


# -- report from ledgers ------------------------------------------------------

def _parse_sweep_description(text: str) -> SweepSpec:
    head, _, cfg_text = text.partition("# base config\n")
    kv = {}
    name = ""
    for line in head.splitlines():
        if line.startswith("# sweep"):
            name = line.split(None, 2)[2].strip()
            name = "" if name == "-" else name
        elif "=" in line:
            k, _, v = line.partition("=")
            kv[k.strip()] = v.strip()
    base = parse_config(cfg_text, ScenarioConfig())
    param = kv["param"]
    kind = type(param_value(base, param))
    values = [kind(_num(v)) for v in kv["values"].split()]
    return SweepSpec(base, param, values, int(kv["seeds"]), tuple(kv["protocols"].split()),
                     int(kv["first_seed"]), name)


def config_from_meta(meta: dict[str, str]) -> ScenarioConfig:
    keys = {f.name for f in dataclasses.fields(ScenarioConfig)}
    text = "".join(f"{k} = {v}\n" for k, v in meta.items() if k in keys)
    return parse_config(text, ScenarioConfig())


def rebuild_from_ledgers(src: str | Path, out: str | Path | None = None) -> list[dict]:
    """Recompute every row and aggregate of a sweep directory from its ledgers."""
    src = Path(src)
    desc = src / "sweep.txt"
    if not desc.exists():
        raise FileNotFoundError(f"{desc} not found; not a sweep output directory")
    spec = _parse_sweep_description(desc.read_text())
    rows = []
    for proto, value, cfg in spec.points():
        path = src / "ledgers" / f"ledger_{run_tag(cfg, spec.param, value)}.txt"
        if not path.exists():
            raise FileNotFoundError(f"missing ledger {path}")
        ledger, meta = PacketLedger.load(path)
        cfg = config_from_meta(meta)
        report = compute_report(ledger, 0.0, cfg.sim_time)
        rows.append(make_row(cfg, report, spec.param, value))
    write_outputs(Path(out) if out is not None else src, spec, rows)
    return rows
