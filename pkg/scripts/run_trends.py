#!/usr/bin/env python3
"""Run the three directional trend checks and print one verdict per check.

    python3 scripts/run_trends.py --out results/trends            # desk scale
    python3 scripts/run_trends.py --scale full --out results/full  # 600 s runs

Each check writes a sweep directory (runs.csv, plot_*.csv, ledgers) that
``vanetsim report --from DIR`` can re-aggregate.
"""

import argparse
import sys
import time
from pathlib import Path

from vanetsim.trends import CHECKS, DESK_SIM_TIME, FULL_SIM_TIME, run_check


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scale", choices=("desk", "full"), default="desk")
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--out", default="results/trends")
    ap.add_argument("--only", nargs="+", choices=("scenario1", "scenario2", "scenario3"),
                    help="run only the checks on these presets")
    ap.add_argument("--gpsr-reroute", action="store_true",
                    help="GPSR re-forwards after a failed unicast instead of dropping")
    args = ap.parse_args()
    times = DESK_SIM_TIME if args.scale == "desk" else FULL_SIM_TIME

    def progress(r):
        print(f"  {r.cfg.protocol:>4} seed={r.cfg.seed} pdr={r.report.pdr:.2f} "
              f"({r.wall:.1f}s)", file=sys.stderr)

    t0 = time.perf_counter()
    outcomes = []
    for check in CHECKS:
        if args.only and check.preset not in args.only:
            continue
        print(f"# {check.name} (sim time {times[check.preset]:g}s)", file=sys.stderr)
        out = Path(args.out) / check.preset
        outcomes.append(run_check(check, args.seeds, times[check.preset], out, progress,
                                  gpsr_reroute=args.gpsr_reroute))
    for o in outcomes:
        print(("PASS " if o.passed else "FAIL ") + o.summary())
    print(f"# total wall {time.perf_counter() - t0:.0f}s")
    return 0 if all(o.passed for o in outcomes) else 1


if __name__ == "__main__":
    sys.exit(main())
