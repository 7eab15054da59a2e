"""Non-local op counts on one benchmark for every lookahead kind and sigma.

    python3 scripts/sigma_sweep.py [--family cuccaro] [--size 76] [--jobs 4] [--csv out.csv]

Prints a sigma-by-kind table; the CSV holds the raw sweep rows.
"""

import argparse
import csv
import sys

from qslice.cli import CSV_FIELDS, run_sweep, sweep_jobs
from qslice.partition import MachineSpec

KINDS = ["constant", "exponential", "gaussian"]
SIGMAS = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--family", default="cuccaro")
    ap.add_argument("--size", type=int, default=76)
    ap.add_argument("--p-edge", type=float, default=0.2)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--csv")
    args = ap.parse_args()

    machine = MachineSpec(10, 10)
    jobs = []
    for kind in KINDS:
        # a zero width only makes sense for the constant (no lookahead) case
        sigmas = SIGMAS if kind == "constant" else [s for s in SIGMAS if s > 0]
        jobs += sweep_jobs([args.family], [args.size], ["fgp-roee"], [kind], sigmas, machine, [args.p_edge], 0, 100)
    jobs += sweep_jobs([args.family], [args.size], ["static-oee"], ["constant"], [0.0], machine, [args.p_edge], 0, 100)
    rows, errors = run_sweep(jobs, args.jobs)
    for e in errors:
        print(f"run failed: {e}", file=sys.stderr)
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
            w.writeheader()
            w.writerows(rows)

    table = {(r["lookahead"], float(r["sigma"])): r["nonlocal_ops"] for r in rows if r["algorithm"] == "fgp-roee"}
    static = next((r["nonlocal_ops"] for r in rows if r["algorithm"] == "static-oee"), "")
    print(f"{args.family}-{args.size}: static-oee = {static}")
    print(f"{'sigma':>6s} " + " ".join(f"{k:>12s}" for k in KINDS))
    for s in SIGMAS:
        print(f"{s:>6g} " + " ".join(f"{str(table.get((k, s), '-')):>12s}" for k in KINDS))


if __name__ == "__main__":
    main()
