"""Deterministic benchmark circuit generators.

Every generator returns an ASAP-packed :class:`Circuit` made of one- and
two-qubit gates only. Toffolis are expanded with an 8-CNOT linear phase
polynomial over the chain ``control - target - control``, conjugated by
Hadamards on the target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, CircuitBuilder

FAMILIES = ("cuccaro", "qft_adder", "multi_control_clean", "multi_target_clean", "multi_target_dirty", "random")
MULTI_CONTROL_MAX_DATA = 87


class BenchError(ValueError):
    pass


@dataclass(frozen=True)
class BenchSpec:
    family: str
    data_qubits: int
    total_qubits: int = 100
    p_edge: float = 0.0
    samples: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise BenchError(f"unknown family {self.family!r}; expected one of {', '.join(FAMILIES)}")
        if self.data_qubits > self.total_qubits:
            raise BenchError(f"data_qubits={self.data_qubits} exceeds total_qubits={self.total_qubits}")
        if not 0.0 <= self.p_edge <= 1.0:
            raise BenchError(f"p_edge={self.p_edge} outside [0, 1]")

    @property
    def name(self) -> str:
        if self.family == "random":
            return f"random-{self.p_edge:g}-{self.data_qubits}"
        return f"{self.family}-{self.data_qubits}"

    def header(self) -> list[str]:
        h = [f"family={self.family} data={self.data_qubits} total={self.total_qubits}"]
        if self.family == "random":
            h.append(f"p={self.p_edge!r} samples={self.samples} seed={self.seed} rng=numpy-PCG64")
        return h


def toffoli(b: CircuitBuilder, c1: int, c2: int, target: int) -> None:
    b.add("h", target)
    ccz(b, c1, target, c2)
    b.add("h", target)


def ccz(b: CircuitBuilder, x: int, y: int, z: int) -> None:
    # phases pi/4 * (x + y + z - x^y - y^z - x^z + x^y^z) == pi * xyz
    def sweep():
        b.add("cx", x, y)
        b.add("cx", y, z)

    b.add("t", x)
    b.add("t", y)
    b.add("t", z)
    sweep()  # (x, x^y, x^y^z)
    b.add("tdg", y)
    b.add("t", z)
    sweep()  # (x, y, x^z)
    b.add("tdg", z)
    sweep()  # (x, x^y, y^z)
    b.add("tdg", z)
    sweep()  # (x, y, z)


# ---------------------------------------------------------------------------
# arithmetic


def cuccaro_layout(data_qubits: int) -> dict:
    """Register layout for the ripple-carry adder: carry-in, interleaved b/a, carry-out."""
    bits = (data_qubits - 2) // 2
    if bits < 1:
        raise BenchError(f"cuccaro adder needs at least 4 data qubits, got {data_qubits}")
    return {
        "bits": bits,
        "cin": 0,
        "b": [1 + 2 * i for i in range(bits)],
        "a": [2 + 2 * i for i in range(bits)],
        "cout": 2 * bits + 1,
        "width": 2 * bits + 2,
    }


def gen_cuccaro(data_qubits: int, total_qubits: int = 100) -> Circuit:
    """Ripple-carry adder computing ``b <- a + b`` with carry-out into ``cout``.

    Uses the MAJ / 3-CNOT UMA construction. Requested sizes that are not of
    the form ``2 * bits + 2`` are rounded down; leftover qubits stay idle.
    """
    if data_qubits < 4:
        raise BenchError(f"cuccaro adder needs at least 4 data qubits, got {data_qubits}")
    if data_qubits > total_qubits:
        raise BenchError(f"data_qubits={data_qubits} exceeds total_qubits={total_qubits}")
    lay = cuccaro_layout(data_qubits)
    a, bb, n = lay["a"], lay["b"], lay["bits"]
    carry = [lay["cin"]] + a[:-1]
    b = CircuitBuilder(lay["width"])
    for i in range(n):
        c, y, x = carry[i], bb[i], a[i]
        b.add("cx", x, y)
        b.add("cx", x, c)
        toffoli(b, c, y, x)
    b.add("cx", a[-1], lay["cout"])
    for i in reversed(range(n)):
        c, y, x = carry[i], bb[i], a[i]
        b.add("x", y)
        b.add("cx", c, y)
        toffoli(b, c, y, x)
        b.add("x", y)
        b.add("cx", x, c)
        b.add("cx", x, y)
    return b.build()


def qft_adder_layout(data_qubits: int) -> dict:
    m = data_qubits // 2
    return {"bits": m, "a": list(range(m)), "b": list(range(m, 2 * m)), "width": 2 * m}


def qft_adder_cp_count(data_qubits: int, inverse_qft: bool = False) -> int:
    """Closed-form controlled-phase count: QFT ``m(m-1)/2`` plus addition ``m(m+1)/2``."""
    m = data_qubits // 2
    count = m * (m - 1) // 2 + m * (m + 1) // 2
    if inverse_qft:
        count += m * (m - 1) // 2
    return count


def _qft(b: CircuitBuilder, reg: list[int], inverse: bool = False) -> None:
    # no final swaps: reg[0] is the most significant input bit
    m = len(reg)
    ops: list[tuple[int, ...]] = []
    for i in range(m):
        ops.append((i,))
        for j in range(i + 1, m):
            ops.append((i, j))
    if inverse:
        ops.reverse()
    sign = -1.0 if inverse else 1.0
    for op in ops:
        if len(op) == 1:
            b.add("h", reg[op[0]])
        else:
            i, j = op
            b.add("cp", reg[i], reg[j], param=sign * math.pi / 2 ** (j - i))


def gen_qft_adder(data_qubits: int, total_qubits: int = 100, inverse_qft: bool = False) -> Circuit:
    """Draper adder: QFT of ``b`` then controlled-phase addition of ``a``.

    Qubit ``b[i]`` is little-endian bit ``i`` of the target register. With
    ``inverse_qft=False`` (the benchmark default) the sum is left in the
    Fourier basis; ``inverse_qft=True`` appends the inverse transform so that
    ``b <- a + b mod 2**m`` holds on basis states.
    """
    if data_qubits % 2:
        raise BenchError(f"qft adder needs an even number of data qubits, got {data_qubits}")
    if data_qubits < 2:
        raise BenchError("qft adder needs at least 2 data qubits")
    if data_qubits > total_qubits:
        raise BenchError(f"data_qubits={data_qubits} exceeds total_qubits={total_qubits}")
    lay = qft_adder_layout(data_qubits)
    a, breg, m = lay["a"], lay["b"], lay["bits"]
    # process the target register most-significant first
    rev = breg[::-1]
    b = CircuitBuilder(lay["width"])
    _qft(b, rev)
    # after the transform, rev[i] carries phase 2*pi * value / 2**(m - i)
    for i in range(m):
        k = m - i  # rev[i] picks up a_j * 2**j / 2**k for j < k
        for j in range(k - 1, -1, -1):
            b.add("cp", a[j], rev[i], param=2 * math.pi * 2**j / 2**k)
    if inverse_qft:
        _qft(b, rev, inverse=True)
    return b.build()


# ---------------------------------------------------------------------------
# generalized Toffoli and fan-out


def _and_tree(b: CircuitBuilder, controls: list[int], target: int, helpers: list[int]) -> None:
    """X on ``target`` iff all ``controls`` are 1, using ``len(controls) - 2`` clean helpers.

    Pairs are reduced level by level so the Toffoli depth is logarithmic. The
    helpers are returned to 0.
    """
    if len(controls) == 1:
        b.add("cx", controls[0], target)
        return
    if len(controls) == 2:
        toffoli(b, controls[0], controls[1], target)
        return
    assert len(helpers) >= len(controls) - 2
    free = list(helpers)
    level = list(controls)
    compute: list[tuple[int, int, int]] = []
    while len(level) > 2:
        nxt = []
        for i in range(0, len(level) - 1, 2):
            h = free.pop(0)
            compute.append((level[i], level[i + 1], h))
            nxt.append(h)
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    for c1, c2, h in compute:
        toffoli(b, c1, c2, h)
    toffoli(b, level[0], level[1], target)
    for c1, c2, h in reversed(compute):
        toffoli(b, c1, c2, h)


def _toffoli_count_tree(c: int) -> int:
    return 0 if c <= 1 else 2 * c - 3


def _multi_control(b: CircuitBuilder, controls: list[int], target: int, clean: list[int]) -> None:
    c = len(controls)
    if c - 2 <= len(clean):
        _and_tree(b, controls, target, clean)
        return
    if not clean:
        raise BenchError("ran out of clean ancilla while splitting the generalized Toffoli")
    # fold the first block of controls into one clean ancilla, recurse on the rest;
    # the block is only as large as needed for the remainder to fit in one tree
    x, helpers = clean[0], clean[1:]
    block = min(len(helpers) + 2, c - len(clean))
    head, tail = controls[:block], controls[block:]
    _and_tree(b, head, x, helpers)
    _multi_control(b, tail + [x], target, helpers)
    _and_tree(b, head, x, helpers)


def multi_control_toffoli_count(controls: int, ancilla: int) -> int:
    """Number of Toffolis used by :func:`gen_multi_control` (closed recurrence)."""
    if controls - 2 <= ancilla:
        return _toffoli_count_tree(controls)
    if ancilla == 0:
        raise BenchError("ran out of clean ancilla while splitting the generalized Toffoli")
    block = min(ancilla + 1, controls - ancilla)
    return 2 * _toffoli_count_tree(block) + multi_control_toffoli_count(controls - block + 1, ancilla - 1)


def gen_multi_control(data_qubits: int, total_qubits: int = 100) -> Circuit:
    """C^(n-1)X on ``data_qubits`` (last one is the target) with clean ancilla.

    When there are at least ``controls - 2`` ancilla the controls are reduced
    by a log-depth tree. Otherwise a leading block of at most ``a + 1``
    controls is folded into one ancilla (the other ``a - 1`` are its helpers),
    the rest is solved recursively with one ancilla fewer, and the fold is
    undone.
    """
    if data_qubits > MULTI_CONTROL_MAX_DATA:
        raise BenchError(f"multi-control benchmark is capped at {MULTI_CONTROL_MAX_DATA} data qubits, got {data_qubits}")
    if data_qubits < 2:
        raise BenchError("multi-control needs at least one control and a target")
    if data_qubits > total_qubits:
        raise BenchError(f"data_qubits={data_qubits} exceeds total_qubits={total_qubits}")
    controls = list(range(data_qubits - 1))
    target = data_qubits - 1
    ancilla_avail = total_qubits - data_qubits
    multi_control_toffoli_count(len(controls), ancilla_avail)  # raises if infeasible
    used = min(ancilla_avail, max(len(controls) - 2, 0))
    clean = list(range(data_qubits, data_qubits + used))
    b = CircuitBuilder(data_qubits + used)
    _multi_control(b, controls, target, clean)
    return b.build()


def fanout_copies(targets: int, ancilla: int) -> int:
    """Ancilla copies of the control used by the multi-target generators."""
    if targets < 4:
        return 0
    return max(0, min(ancilla, int(math.log2(targets)) - 1))


def _groups(items: list[int], n: int) -> list[list[int]]:
    return [items[i::n] for i in range(n)]


def gen_multi_target(data_qubits: int, total_qubits: int = 100, ancilla_kind: str = "clean") -> Circuit:
    """X on ``data_qubits - 1`` targets conditioned on qubit 0.

    The control is copied (clean) or XOR-ed (dirty) into a few ancilla, each
    source then drives a round-robin share of the targets. Dirty ancilla are
    restored by toggling them again and repeating their target CNOTs.
    """
    if ancilla_kind not in ("clean", "dirty"):
        raise BenchError(f"ancilla_kind must be clean or dirty, got {ancilla_kind!r}")
    if data_qubits < 2:
        raise BenchError("multi-target needs a control and at least one target")
    if data_qubits > total_qubits:
        raise BenchError(f"data_qubits={data_qubits} exceeds total_qubits={total_qubits}")
    ctrl = 0
    targets = list(range(1, data_qubits))
    k = fanout_copies(len(targets), total_qubits - data_qubits)
    anc = list(range(data_qubits, data_qubits + k))
    sources = [ctrl] + anc
    groups = _groups(targets, len(sources))
    b = CircuitBuilder(data_qubits + k)
    for a in anc:
        b.add("cx", ctrl, a)
    for src, grp in zip(sources, groups):
        for t in grp:
            b.add("cx", src, t)
    if ancilla_kind == "clean":
        for a in reversed(anc):
            b.add("cx", ctrl, a)
    else:
        for a in reversed(anc):
            b.add("cx", ctrl, a)
        for src, grp in zip(anc, groups[1:]):
            for t in grp:
                b.add("cx", src, t)
    return b.build()


# ---------------------------------------------------------------------------
# random


def gen_random(n: int, p_edge: float, samples: int = 1, seed: int = 0) -> Circuit:
    """Each sample draws every pair ``i < j`` independently with probability ``p_edge``.

    Draws come from numpy's PCG64 seeded with ``seed``: one uniform per pair in
    lexicographic pair order, sample after sample. The selected pairs of one
    sample commute, so they are emitted as ``cz`` gates grouped into greedy
    maximal matchings before ASAP packing.
    """
    if n < 2:
        raise BenchError("random circuits need at least 2 qubits")
    if samples < 1:
        raise BenchError("samples must be at least 1")
    if not 0.0 <= p_edge <= 1.0:
        raise BenchError(f"p_edge={p_edge} outside [0, 1]")
    rng = np.random.Generator(np.random.PCG64(seed))
    iu, ju = np.triu_indices(n, k=1)
    b = CircuitBuilder(n)
    for _ in range(samples):
        hit = rng.random(len(iu)) < p_edge
        pairs = [(int(i), int(j)) for i, j in zip(iu[hit], ju[hit])]
        for i, j in _matching_order(pairs):
            b.add("cz", i, j)
    return b.build()


def _matching_order(pairs: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Reorder commuting pair interactions as successive greedy maximal matchings."""
    out = []
    remaining = pairs
    while remaining:
        busy: set[int] = set()
        rest = []
        for i, j in remaining:
            if i in busy or j in busy:
                rest.append((i, j))
            else:
                busy.update((i, j))
                out.append((i, j))
        remaining = rest
    return out


def generate(spec: BenchSpec) -> Circuit:
    f = spec.family
    if f == "cuccaro":
        return gen_cuccaro(spec.data_qubits, spec.total_qubits)
    if f == "qft_adder":
        return gen_qft_adder(spec.data_qubits, spec.total_qubits)
    if f == "multi_control_clean":
        return gen_multi_control(spec.data_qubits, spec.total_qubits)
    if f == "multi_target_clean":
        return gen_multi_target(spec.data_qubits, spec.total_qubits, "clean")
    if f == "multi_target_dirty":
        return gen_multi_target(spec.data_qubits, spec.total_qubits, "dirty")
    return gen_random(spec.data_qubits, spec.p_edge, spec.samples, spec.seed)
