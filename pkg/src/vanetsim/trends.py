"""Directional trend checks over seed sweeps of the three scenario presets.

Each check compares per-point medians across seeds and passes when the
expected ordering holds at enough sweep points. Magnitudes are not gated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .experiments import SweepSpec, aggregate, fmt, read_rows, run_sweep

# shortened simulated time per preset so the whole suite fits on one desk CPU;
# scenario 2 keeps a horizon past its largest pause (nodes start paused)
DESK_SIM_TIME = {"scenario1": 100.0, "scenario2": 300.0, "scenario3": 100.0}
FULL_SIM_TIME = {"scenario1": 600.0, "scenario2": 600.0, "scenario3": 600.0}


@dataclass(frozen=True)
class TrendCheck:
    name: str
    preset: str
    values: tuple | None      # None: every preset value
    protocols: tuple[str, ...]
    metric: str
    winner: str               # protocol expected to be better
    losers: tuple[str, ...]
    lower_is_better: bool
    required: int             # points that must hold; None-equivalent is "all"


CHECKS = (
    TrendCheck("scenario2 GPSR loss < AODV loss", "scenario2", None, ("AODV", "GPSR"),
               "packet_loss_count", "GPSR", ("AODV",), True, 4),
    TrendCheck("scenario1 AODV PDR > DSR, GPSR", "scenario1", (150, 300),
               ("AODV", "DSR", "GPSR"), "pdr", "AODV", ("DSR", "GPSR"), False, 2),
    TrendCheck("scenario3 AODV PDR > DSR", "scenario3", None, ("AODV", "DSR"), "pdr",
               "AODV", ("DSR",), False, 4),
)


@dataclass
class PointResult:
    value: object
    medians: dict[str, float | None]
    ok: bool


@dataclass
class TrendOutcome:
    check: TrendCheck
    points: list[PointResult] = field(default_factory=list)

    @property
    def held(self) -> int:
        return sum(p.ok for p in self.points)

    @property
    def passed(self) -> bool:
        return self.held >= self.check.required

    def summary(self) -> str:
        c = self.check
        cells = []
        for p in self.points:
            meds = " ".join(f"{k}={fmt(v)}" for k, v in p.medians.items())
            cells.append(f"{fmt(p.value)}[{meds}]{'+' if p.ok else '-'}")
        return (f"{c.name}: {self.held}/{len(self.points)} points hold "
                f"(need {c.required}); " + "; ".join(cells))


def sweep_spec(check: TrendCheck, seeds: int = 10, sim_time: float | None = None,
               **overrides) -> SweepSpec:
    """Sweep for ``check``; ``overrides`` are extra config fields (e.g. gpsr_reroute)."""
    spec = SweepSpec.from_preset(check.preset, seeds, protocols=check.protocols)
    if check.values is not None:
        spec.values = list(check.values)
    spec.base = spec.base.replace(sim_time=sim_time or DESK_SIM_TIME[check.preset], **overrides)
    spec.name = check.preset
    return spec


def evaluate(check: TrendCheck, rows: list[dict]) -> TrendOutcome:
    out = TrendOutcome(check)
    for value, per in aggregate(rows, check.metric, check.protocols).items():
        meds = {p: (None if per[p] is None else per[p][0]) for p in check.protocols}
        win = meds[check.winner]
        ok = win is not None
        for other in check.losers:
            o = meds[other]
            if not ok or o is None:
                ok = False
                break
            ok = win < o if check.lower_is_better else win > o
            if not ok:
                break
        out.points.append(PointResult(value, meds, ok))
    return out


def run_check(check: TrendCheck, seeds: int = 10, sim_time: float | None = None,
              out_dir: str | Path | None = None, progress=None, **overrides) -> TrendOutcome:
    """Sweep, then judge medians read back from the written CSV when persisted."""
    spec = sweep_spec(check, seeds, sim_time, **overrides)
    result = run_sweep(spec, out_dir, progress)
    rows = read_rows(Path(out_dir) / "runs.csv") if out_dir is not None else result.rows
    return evaluate(check, rows)
