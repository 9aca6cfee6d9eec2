"""Command line: ``run``, ``sweep`` and ``report``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import (PRESETS, PROTOCOLS, ConfigError, load_config, param_value, preset,
                     with_param)
from .experiments import (PLOT_METRICS, SweepError, SweepSpec, aggregate, fmt, format_rows,
                          read_rows, rebuild_from_ledgers, run_one, run_sweep)


def _protocol(text: str) -> str:
    p = text.upper()
    if p not in PROTOCOLS:
        raise argparse.ArgumentTypeError(f"unknown protocol {text!r} (choose from "
                                         f"{', '.join(PROTOCOLS)})")
    return p


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vanetsim", description="Discrete-event VANET routing "
                                 "simulator (AODV, DSR, GPSR).")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate one configuration")
    src = run.add_mutually_exclusive_group()
    src.add_argument("--preset", choices=sorted(PRESETS), default="scenario2")
    src.add_argument("--config", help="key = value config file")
    run.add_argument("--protocol", type=_protocol)
    run.add_argument("--seed", type=int)
    run.add_argument("--value", help="value of the preset's swept parameter")
    run.add_argument("--sim-time", type=float)
    run.add_argument("--trace", action="store_true", help="write a per-event trace file")
    run.add_argument("--out", help="directory for the CSV row, ledger and trace")

    sw = sub.add_parser("sweep", help="sweep a preset's parameter over seeds")
    sw.add_argument("--preset", choices=sorted(PRESETS), required=True)
    sw.add_argument("--seeds", type=int, default=10)
    sw.add_argument("--protocols", type=_protocol, nargs="+", default=list(PROTOCOLS))
    sw.add_argument("--param", help="sweep this config field instead of the preset's "
                    "(e.g. nodes for scenario1)")
    sw.add_argument("--values", nargs="+", help="override the preset's value list")
    sw.add_argument("--sim-time", type=float)
    sw.add_argument("--out", required=True)
    sw.add_argument("--quiet", action="store_true")

    rep = sub.add_parser("report", help="recompute aggregates from a sweep's ledgers")
    rep.add_argument("--from", dest="src", required=True)
    rep.add_argument("--out", help="write aggregates here instead of back into --from")
    return ap


def _cast(p, raw: str):
    return type(p.values[0])(float(raw)) if p.values else float(raw)


def cmd_run(args) -> int:
    if args.config:
        cfg, param, value = load_config(args.config), "", None
    else:
        p = preset(args.preset)
        cfg, param = p.config, p.param
        value = _cast(p, args.value) if args.value is not None else param_value(cfg, param)
        cfg = with_param(cfg, param, value)
    changes = {}
    if args.protocol:
        changes["protocol"] = args.protocol
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.sim_time is not None:
        changes["sim_time"] = args.sim_time
    if args.trace:
        changes["trace"] = True
    cfg = cfg.replace(**changes)
    if cfg.trace and not (args.out or cfg.out_dir):
        raise ConfigError("trace: --trace needs --out DIR")
    res = run_one(cfg, args.out, param, value)
    text = format_rows([res.row])
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"run_{cfg.protocol.lower()}_s{cfg.seed}.csv").write_text(text)
    sys.stdout.write(text)
    print(f"# wall {res.wall:.1f}s", file=sys.stderr)
    return 0


def _print_table(rows, protocols) -> None:
    for metric in PLOT_METRICS:
        print(f"{metric} (median [q1, q3])")
        for value, per in aggregate(rows, metric, protocols).items():
            cells = []
            for p in protocols:
                s = per[p]
                cells.append(f"{p} NA" if s is None else f"{p} {s[0]:.3f} [{s[1]:.3f}, {s[2]:.3f}]")
            print(f"  {fmt(value):>12}  " + "  ".join(cells))


def cmd_sweep(args) -> int:
    spec = SweepSpec.from_preset(args.preset, args.seeds, protocols=tuple(args.protocols))
    if args.param:
        spec = SweepSpec(spec.base, args.param, spec.values, spec.seeds, spec.protocols,
                         name=spec.name)
    kind = type(param_value(spec.base, spec.param))
    if args.values:
        spec.values = [kind(float(v)) for v in args.values]
    elif args.param:
        spec.values = [kind(v) for v in spec.values]
    if args.sim_time is not None:
        spec.base = spec.base.replace(sim_time=args.sim_time)

    def progress(r):
        if not args.quiet:
            print(f"{r.cfg.protocol:>4} {spec.param}={fmt(param_value(r.cfg, spec.param))} "
                  f"seed={r.cfg.seed} pdr={fmt(r.report.pdr)} ({r.wall:.1f}s)", file=sys.stderr)

    result = run_sweep(spec, args.out, progress)
    _print_table(result.rows, spec.protocols)
    return 0


def cmd_report(args) -> int:
    rows = rebuild_from_ledgers(args.src, args.out)
    protocols = tuple(dict.fromkeys(r["protocol"] for r in rows))
    dest = Path(args.out or args.src)
    _print_table(read_rows(dest / "runs.csv"), protocols)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"run": cmd_run, "sweep": cmd_sweep, "report": cmd_report}
    try:
        return handlers[args.command](args)
    except (ConfigError, SweepError, FileNotFoundError, ValueError) as exc:
        print(f"vanetsim {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
