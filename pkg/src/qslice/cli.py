"""Command-line driver: generate, compile, sweep, evaluate, selftest.

Exit codes: 0 success, 1 usage error, 2 input error, 3 capacity error.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .benchgen import FAMILIES, BenchError, BenchSpec, generate
from .circuit import Circuit, CircuitError, emit_circuit, parse_circuit
from .igraph import LookaheadSpec
from .mapper import ALGORITHMS, CapacityError, compile_circuit, latency_estimate, summarize_mapped
from .partition import MachineSpec, PartitionError

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_CAPACITY = 0, 1, 2, 3
MULTIPLIERS = (5, 10, 100)

CSV_FIELDS = [
    "benchmark", "family", "n_data", "n_total", "k", "p", "algorithm", "lookahead", "sigma", "seed",
    "depth_unmapped", "two_qubit_ops", "nonlocal_ops", "depth_mapped",
    "seq_ns_5x", "seq_ns_10x", "seq_ns_100x", "par_ns_5x", "par_ns_10x", "par_ns_100x", "wall_ms",
]  # fmt: skip

FAMILY_ALIASES = {
    "multi_control": "multi_control_clean",
    "multi_target": "multi_target_clean",
    "qft": "qft_adder",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def default_seed() -> int:
    raw = os.environ.get("QSLICE_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"QSLICE_SEED must be an integer, got {raw!r}") from None


def _family(name: str) -> str:
    fam = FAMILY_ALIASES.get(name, name)
    if fam not in FAMILIES:
        raise UsageError(f"unknown family {name!r}; expected one of {', '.join(FAMILIES)}")
    return fam


def _csv_list(text: str, cast=str) -> list:
    return [cast(x) for x in text.split(",") if x.strip()] if text else []


@dataclass(frozen=True)
class RunConfig:
    machine: MachineSpec
    algorithm: str
    lookahead: LookaheadSpec
    seed: int = 0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise UsageError(f"unknown algorithm {self.algorithm!r}; expected one of {', '.join(ALGORITHMS)}")

    @property
    def lookahead_fields(self) -> tuple[str, str]:
        if self.algorithm == "static-oee":
            return "-", "-"
        return self.lookahead.kind, f"{self.lookahead.sigma:g}"


def stats_row(
    circuit: Circuit, mapped, cfg: RunConfig, benchmark: str, family: str, n_data: int, wall_ms: float | None
) -> dict:
    kind, sigma = cfg.lookahead_fields
    row = {
        "benchmark": benchmark,
        "family": family,
        "n_data": n_data,
        "n_total": circuit.width,
        "k": cfg.machine.clusters,
        "p": cfg.machine.capacity,
        "algorithm": cfg.algorithm,
        "lookahead": kind,
        "sigma": sigma,
        "seed": cfg.seed,
        "depth_unmapped": mapped.depth_unmapped,
        "two_qubit_ops": sum(1 for g in circuit.gates() if g.arity == 2),
        "nonlocal_ops": mapped.nonlocal_ops,
        "depth_mapped": mapped.depth,
        "wall_ms": "" if wall_ms is None else f"{wall_ms:.1f}",
    }
    for m in MULTIPLIERS:
        est = mapped.latency(m)
        row[f"seq_ns_{m}x"] = f"{est.sequential_ns:.0f}"
        row[f"par_ns_{m}x"] = f"{est.parallel_ns:.0f}"
    return row


def _header_fields(text: str) -> dict:
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if not line.startswith("#"):
            if line:
                break
            continue
        for tok in line.lstrip("#").split():
            if "=" in tok:
                k, v = tok.split("=", 1)
                out[k] = v
    return out


def _write_rows(path, rows: list[dict], append: bool) -> None:
    new = not append or not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a" if append else "w", encoding="utf-8", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
        if new:
            w.writeheader()
        w.writerows(rows)


# ---------------------------------------------------------------------------
# subcommands


def cmd_generate(args) -> int:
    fam = _family(args.family)
    seed = default_seed() if args.seed is None else args.seed
    spec = BenchSpec(fam, args.data, args.total, p_edge=args.p, samples=args.samples, seed=seed)
    text = emit_circuit(generate(spec), spec.header())
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _machine(args) -> MachineSpec:
    return MachineSpec(args.k, args.p, args.multiplier)


def _lookahead_spec(kind: str, sigma: float) -> LookaheadSpec:
    try:
        return LookaheadSpec(kind, sigma)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _lookahead(args) -> LookaheadSpec:
    return _lookahead_spec(args.lookahead, args.sigma)


def cmd_compile(args) -> int:
    text = Path(args.input).read_text(encoding="utf-8")
    circuit = parse_circuit(text)
    cfg = RunConfig(_machine(args), args.alg, _lookahead(args), default_seed() if args.seed is None else args.seed)
    t0 = time.perf_counter()
    _, mapped = compile_circuit(circuit, cfg.machine, cfg.algorithm, cfg.lookahead)
    wall = (time.perf_counter() - t0) * 1000
    head = _header_fields(text)
    family = head.get("family", "-")
    n_data = int(head.get("data", circuit.width))
    if "seed" in head:
        cfg = RunConfig(cfg.machine, cfg.algorithm, cfg.lookahead, int(head["seed"]))
    out = mapped.emit([f"source={Path(args.input).name}"])
    if args.out:
        Path(args.out).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    if args.stats:
        row = stats_row(circuit, mapped, cfg, Path(args.input).stem, family, n_data, None if args.no_timing else wall)
        _write_rows(args.stats, [row], append=True)
    print(f"nonlocal_ops={mapped.nonlocal_ops} depth_mapped={mapped.depth}", file=sys.stderr)
    return EXIT_OK


def _sweep_one(job) -> tuple[tuple, dict | None, str | None]:
    key, spec, cfg, timing = job
    try:
        circuit = generate(spec)
        t0 = time.perf_counter()
        _, mapped = compile_circuit(circuit, cfg.machine, cfg.algorithm, cfg.lookahead)
        wall = (time.perf_counter() - t0) * 1000
        row = stats_row(circuit, mapped, cfg, spec.name, spec.family, spec.data_qubits, wall if timing else None)
        return key, row, None
    except (BenchError, PartitionError, CapacityError, ValueError) as exc:
        kind, sigma = cfg.lookahead_fields
        row = {f: "" for f in CSV_FIELDS}
        row.update(
            benchmark=spec.name, family=spec.family, n_data=spec.data_qubits, k=cfg.machine.clusters,
            p=cfg.machine.capacity, algorithm=cfg.algorithm, lookahead=kind, sigma=sigma, seed=spec.seed,
        )  # fmt: skip
        return key, row, f"{spec.name} {cfg.algorithm} {kind}-{sigma}: {exc}"


def sweep_jobs(
    families: list[str],
    sizes: list[int],
    algorithms: list[str],
    lookaheads: list[str],
    sigmas: list[float],
    machine: MachineSpec,
    p_edges: list[float],
    seed: int,
    total: int,
    timing: bool = True,
) -> list:
    jobs = []
    for fam, n in itertools.product(families, sizes):
        for p_edge in (p_edges if fam == "random" else [0.0]):
            spec = BenchSpec(fam, n, max(total, n), p_edge=p_edge, seed=seed)
            seen = set()
            for alg, kind, sigma in itertools.product(algorithms, lookaheads, sigmas):
                cfg = RunConfig(machine, alg, LookaheadSpec(kind, sigma), seed)
                if cfg.lookahead_fields in seen and alg == "static-oee":
                    continue
                seen.add(cfg.lookahead_fields)
                key = (fam, n, p_edge, ALGORITHMS.index(alg), cfg.lookahead_fields[0], sigma)
                jobs.append((key, spec, cfg, timing))
    return jobs


def run_sweep(jobs: list, workers: int = 1) -> tuple[list[dict], list[str]]:
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_one, jobs))
    else:
        results = [_sweep_one(j) for j in jobs]
    results.sort(key=lambda r: r[0])
    rows = [r for _, r, _ in results]
    errors = [e for _, _, e in results if e]
    return rows, errors


def cmd_sweep(args) -> int:
    families = [_family(f) for f in _csv_list(args.families)]
    algorithms = _csv_list(args.algs)
    for a in algorithms:
        if a not in ALGORITHMS:
            raise UsageError(f"unknown algorithm {a!r}")
    for kind, sigma in itertools.product(_csv_list(args.lookaheads), _csv_list(args.sigmas, float)):
        _lookahead_spec(kind, sigma)
    seed = default_seed() if args.seed is None else args.seed
    jobs = sweep_jobs(
        families,
        _csv_list(args.sizes, int),
        algorithms,
        _csv_list(args.lookaheads),
        _csv_list(args.sigmas, float),
        _machine(args),
        _csv_list(args.p_edge, float),
        seed,
        args.total,
        timing=not args.no_timing,
    )
    rows, errors = run_sweep(jobs, args.jobs)
    for e in errors:
        print(f"run failed: {e}", file=sys.stderr)
    if args.out:
        _write_rows(args.out, rows, append=False)
    else:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def _fmt_ns(ns: float) -> str:
    return f"{ns / 1e6:.4g} ms" if ns >= 1e5 else f"{ns / 1e3:.4g} us"


def cmd_evaluate(args) -> int:
    if args.input:
        s = summarize_mapped(Path(args.input).read_text(encoding="utf-8"))
        depth, cost, rounds = s.depth_unmapped, s.cost, s.rounds
    elif args.depth is not None and args.cost is not None:
        depth, cost = args.depth, args.cost
        rounds = args.rounds if args.rounds is not None else cost
    else:
        raise UsageError("evaluate needs a mapped circuit file or --depth and --cost")
    mults = _csv_list(args.multipliers, float) or list(MULTIPLIERS)
    print(f"depth={depth} nonlocal={cost} rounds={rounds} gate_ns={args.gate_ns:g}")
    print(f"{'multiplier':>10}  {'sequential':>12}  {'parallel':>12}")
    for m in mults:
        est = latency_estimate(depth, cost, m, rounds, args.gate_ns)
        print(f"{m:>9g}x  {_fmt_ns(est.sequential_ns):>12}  {_fmt_ns(est.parallel_ns):>12}")
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    return EXIT_OK if run_selftest(sys.stdout) else EXIT_INPUT


# ---------------------------------------------------------------------------


def _add_machine(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=10, help="clusters")
    p.add_argument("--p", type=int, default=10, help="qubits per cluster")
    p.add_argument("--multiplier", type=float, default=1.0, help="non-local latency ratio")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qslice", description="Slice-by-slice mapping of quantum circuits onto clustered machines.")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a benchmark circuit")
    g.add_argument("family")
    g.add_argument("--data", "--n", type=int, required=True, dest="data")
    g.add_argument("--total", type=int, default=100)
    g.add_argument("--p", type=float, default=0.0, help="edge probability (random)")
    g.add_argument("--samples", type=int, default=1)
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("-o", "--out")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("compile", help="map a circuit file")
    c.add_argument("input")
    c.add_argument("-o", "--out")
    c.add_argument("--alg", default="fgp-roee", choices=ALGORITHMS)
    c.add_argument("--lookahead", default="exponential")
    c.add_argument("--sigma", type=float, default=1.0)
    c.add_argument("--stats", help="CSV file to append a stats row to")
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--no-timing", action="store_true", help="leave wall_ms empty")
    _add_machine(c)
    c.set_defaults(func=cmd_compile)

    s = sub.add_parser("sweep", help="cross-product of benchmarks and algorithms to CSV")
    s.add_argument("--families", default="cuccaro")
    s.add_argument("--sizes", default="50,76,100")
    s.add_argument("--algs", default="static-oee,fgp-roee")
    s.add_argument("--lookaheads", default="exponential")
    s.add_argument("--sigmas", default="1")
    s.add_argument("--p-edge", default="0.2", help="edge probabilities for the random family")
    s.add_argument("--total", type=int, default=100)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--no-timing", action="store_true", help="leave wall_ms empty for byte-identical output")
    s.add_argument("-o", "--out")
    _add_machine(s)
    s.set_defaults(func=cmd_sweep)

    e = sub.add_parser("evaluate", help="latency estimates for a mapped circuit")
    e.add_argument("input", nargs="?")
    e.add_argument("--depth", type=int)
    e.add_argument("--cost", type=int)
    e.add_argument("--rounds", type=int)
    e.add_argument("--multipliers", default="5,10,100")
    e.add_argument("--gate-ns", type=float, default=300.0)
    e.set_defaults(func=cmd_evaluate)

    t = sub.add_parser("selftest", help="quick internal consistency checks")
    t.set_defaults(func=cmd_selftest)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qslice: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"qslice: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (CircuitError, BenchError, PartitionError, ValueError, OSError) as exc:
        print(f"qslice: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
