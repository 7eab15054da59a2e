"""A handful of fast end-to-end checks, run by ``qslice selftest``."""

from __future__ import annotations

from typing import Callable, TextIO

from .benchgen import BenchSpec, gen_cuccaro, generate
from .circuit import emit_circuit, parse_circuit
from .igraph import LookaheadSpec, lookahead_graph
from .circuit import asap_schedule, Gate
from .mapper import comm_cost, compile_circuit, latency_estimate, path_is_valid
from .partition import Assignment, MachineSpec
from .replay import basis_outputs


def _cost_formula() -> bool:
    a = Assignment((0, 0, 1, 1, 2, 2), 3, 2)
    two = Assignment((1, 0, 0, 1, 2, 2), 3, 2)
    three = Assignment((1, 0, 2, 1, 0, 2), 3, 2)
    return comm_cost(a, a).cost == 0 and comm_cost(a, two).cost == 1 and comm_cost(a, three).cost == 2


def _lookahead_sum() -> bool:
    gates = [Gate("cx", (2, 3))] * 3 + [Gate("cx", (0, 1)), Gate("cx", (2, 3)), Gate("cx", (0, 1))]
    ops = []
    for g in gates:
        ops += [g, None]
    c = asap_schedule(ops, 4)
    w = lookahead_graph(c, 2, LookaheadSpec("exponential", 1.0)).weight(0, 1)
    return abs(w.finite - 0.625) < 1e-12


def _round_trip() -> bool:
    c = generate(BenchSpec("random", 12, 12, p_edge=0.5, seed=3))
    return parse_circuit(emit_circuit(c)) == c


def _mapped_adder_replay() -> bool:
    c = gen_cuccaro(6, 12)
    _, mapped = compile_circuit(c, MachineSpec(2, 6), "fgp-roee")
    n = mapped.machine.size
    inputs = list(range(0, 2**c.width, 5))

    def lift(x: int, slots) -> int:
        return sum(1 << slots[q] for q in range(c.width) if x >> q & 1)

    want = basis_outputs(c.gates(), c.width, inputs)
    got = basis_outputs(mapped.ops(), n, [lift(x, mapped.initial_slots) for x in inputs])
    return got == [lift(y, mapped.final_slots) for y in want]


def _latency_fixture() -> bool:
    est = latency_estimate(265, 1297, 100)
    return abs(est.sequential_ns - 39.0e6) / 39.0e6 < 0.02


def _paths_valid() -> bool:
    c = generate(BenchSpec("cuccaro", 20, 30))
    m = MachineSpec(3, 10)
    return all(path_is_valid(c, compile_circuit(c, m, alg)[0]) for alg in ("static-oee", "fgp-oee", "fgp-roee"))


CHECKS: list[tuple[str, Callable[[], bool]]] = [
    ("cost formula", _cost_formula),
    ("lookahead weight", _lookahead_sum),
    ("text round trip", _round_trip),
    ("latency fixture", _latency_fixture),
    ("path validity", _paths_valid),
    ("mapped adder replay", _mapped_adder_replay),
]


def run_selftest(out: TextIO) -> bool:
    ok = True
    for name, check in CHECKS:
        try:
            passed = check()
        except Exception as exc:  # report and keep going
            passed = False
            name = f"{name} ({exc})"
        ok &= passed
        print(f"{'ok  ' if passed else 'FAIL'} {name}", file=out)
    return ok
