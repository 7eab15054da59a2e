"""Run the benchmark suite on the 10x10 machine and print op counts and reductions.

    python3 scripts/reproduce_tables.py [--jobs 4] [--csv out.csv] [--seed 0]
"""

import argparse
import csv
import math
import sys
from collections import defaultdict

from qslice.cli import CSV_FIELDS, run_sweep, sweep_jobs
from qslice.partition import MachineSpec

SUITE = [
    ("multi_control_clean", [50, 76, 87]),
    ("multi_target_clean", [50, 76, 100]),
    ("multi_target_dirty", [50, 76, 100]),
    ("cuccaro", [50, 76, 100]),
    ("qft_adder", [50, 76, 100]),
]
RANDOM_P = [0.2, 0.4, 0.8]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--csv", help="also write every run as a CSV row")
    args = ap.parse_args()

    machine = MachineSpec(10, 10)
    algs = ["static-oee", "fgp-oee", "fgp-roee"]
    jobs = []
    for fam, sizes in SUITE:
        jobs += sweep_jobs([fam], sizes, algs, ["exponential"], [1.0], machine, [0.0], args.seed, 100, timing=True)
    jobs += sweep_jobs(["random"], [50, 76, 100], algs, ["exponential"], [1.0], machine, RANDOM_P, args.seed, 100)
    rows, errors = run_sweep(jobs, args.jobs)
    for e in errors:
        print(f"run failed: {e}", file=sys.stderr)
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
            w.writeheader()
            w.writerows(rows)

    by = defaultdict(dict)
    for r in rows:
        by[r["benchmark"]][r["algorithm"]] = r
    print(f"{'benchmark':28s} {'depth':>6s} {'2q ops':>7s} {'static':>7s} {'fgp-oee':>8s} {'fgp-roee':>9s} {'reduction':>9s}")
    groups = defaultdict(list)
    for name, runs in by.items():
        s, o, f = (str(runs.get(a, {}).get("nonlocal_ops", "")) for a in algs)
        any_run = next(iter(runs.values()))
        red = ""
        if s and f and int(s):
            ratio = int(f) / int(s)
            groups[name.rsplit("-", 1)[0]].append(ratio)
            red = f"{1 - ratio:.1%}"
        print(f"{name:28s} {any_run['depth_unmapped']!s:>6s} {any_run['two_qubit_ops']!s:>7s} {s:>7s} {o:>8s} {f:>9s} {red:>9s}")

    print(f"\n{'reduction by family':28s} {'min':>7s} {'max':>7s} {'gmean':>7s}")
    everything = []
    for fam, ratios in groups.items():
        everything += ratios
        red = [1 - r for r in ratios]
        g = 1 - math.exp(sum(math.log(r) for r in ratios) / len(ratios))
        print(f"{fam:28s} {min(red):>7.1%} {max(red):>7.1%} {g:>7.1%}")
    if everything:
        red = [1 - r for r in everything]
        g = 1 - math.exp(sum(math.log(r) for r in everything) / len(everything))
        print(f"{'aggregate':28s} {min(red):>7.1%} {max(red):>7.1%} {g:>7.1%}")


if __name__ == "__main__":
    main()
