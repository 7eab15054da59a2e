"""Gate-level circuit IR with ASAP time slicing and a line-oriented text format."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence


class CircuitError(ValueError):
    """Raised for malformed circuits or circuit text."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    param: float | None = None

    def __post_init__(self):
        if len(self.qubits) not in (1, 2):
            raise CircuitError(f"gate {self.kind!r} has arity {len(self.qubits)}; only 1 and 2 are supported")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"gate {self.kind!r} has repeated operand {self.qubits[0]}")

    @property
    def arity(self) -> int:
        return len(self.qubits)

    def remap(self, mapping: Sequence[int]) -> "Gate":
        return Gate(self.kind, tuple(mapping[q] for q in self.qubits), self.param)


def _slice_key(gate: Gate):
    return (gate.qubits[0], gate.qubits, gate.kind, -1.0 if gate.param is None else gate.param)


@dataclass(frozen=True)
class Circuit:
    """A width-``n`` circuit as an ordered tuple of time slices.

    Each slice is a tuple of gates acting on pairwise disjoint qubits, stored in
    ascending order of first operand so that equal circuits compare equal.
    """

    width: int
    slices: tuple[tuple[Gate, ...], ...] = ()

    def __post_init__(self):
        if self.width < 0:
            raise CircuitError("width must be non-negative")
        canon = []
        for t, gates in enumerate(self.slices):
            seen: set[int] = set()
            for g in gates:
                for q in g.qubits:
                    if not 0 <= q < self.width:
                        raise CircuitError(f"operand {q} out of range for width {self.width}")
                    if q in seen:
                        raise CircuitError(f"qubit {q} used twice in slice {t}")
                    seen.add(q)
            canon.append(tuple(sorted(gates, key=_slice_key)))
        object.__setattr__(self, "slices", tuple(canon))

    @property
    def depth(self) -> int:
        return len(self.slices)

    def gates(self) -> Iterable[Gate]:
        for s in self.slices:
            yield from s

    def two_qubit_pairs(self, t: int) -> list[tuple[int, int]]:
        """Sorted operand pairs of the two-qubit gates in slice ``t``."""
        return sorted(tuple(sorted(g.qubits)) for g in self.slices[t] if g.arity == 2)


def depth(circuit: Circuit) -> int:
    return circuit.depth


def two_qubit_count(circuit: Circuit) -> int:
    return sum(1 for g in circuit.gates() if g.arity == 2)


def asap_schedule(gates: Iterable[Gate | None], width: int) -> Circuit:
    """Place each gate in the earliest slice after the last use of its operands.

    ``None`` entries in ``gates`` act as barriers: every later gate starts no
    earlier than the current end of the circuit.
    """
    frontier = [0] * width
    floor = 0
    slices: list[list[Gate]] = []
    for g in gates:
        if g is None:
            floor = len(slices)
            continue
        for q in g.qubits:
            if not 0 <= q < width:
                raise CircuitError(f"operand {q} out of range for width {width}")
        t = max(floor, max(frontier[q] for q in g.qubits))
        if t == len(slices):
            slices.append([])
        slices[t].append(g)
        for q in g.qubits:
            frontier[q] = t + 1
    return Circuit(width, tuple(tuple(s) for s in slices))


# ---------------------------------------------------------------------------
# text format


def _format_param(x: float) -> str:
    return repr(float(x))


def format_gate(g: Gate) -> str:
    parts = [g.kind, *map(str, g.qubits)]
    if g.param is not None:
        parts.append("@" + _format_param(g.param))
    return " ".join(parts)


def _needs_barrier(slices: Sequence[Sequence[Gate]], t: int, last_use: list[int]) -> bool:
    # A slice is implied by ASAP only if every gate is blocked by the slice before it.
    return any(max(last_use[q] for q in g.qubits) < t - 1 for g in slices[t])


def emit_circuit(circuit: Circuit, header: Sequence[str] = ()) -> str:
    """Serialize slice-major; ``--`` is written only where ASAP would not reproduce a slice."""
    lines = [f"# {h}" for h in header]
    lines.append(f"qubits {circuit.width}")
    last_use = [-1] * circuit.width
    for t, gates in enumerate(circuit.slices):
        if t > 0 and _needs_barrier(circuit.slices, t, last_use):
            lines.append("--")
        for g in gates:
            lines.append(format_gate(g))
        for g in gates:
            for q in g.qubits:
                last_use[q] = t
    return "\n".join(lines) + "\n"


def parse_gate_line(text: str, lineno: int | None = None) -> Gate:
    tokens = text.split()
    kind, rest = tokens[0], tokens[1:]
    param = None
    if rest and rest[-1].startswith("@"):
        try:
            param = float(rest[-1][1:])
        except ValueError:
            raise CircuitError(f"bad parameter {rest[-1]!r}", lineno) from None
        rest = rest[:-1]
    if not 1 <= len(rest) <= 2:
        raise CircuitError(f"gate {kind!r} needs 1 or 2 operands, got {len(rest)}", lineno)
    try:
        qubits = tuple(int(x) for x in rest)
    except ValueError:
        raise CircuitError(f"non-integer operand in {text!r}", lineno) from None
    if any(q < 0 for q in qubits):
        raise CircuitError(f"negative operand in {text!r}", lineno)
    try:
        return Gate(kind, qubits, param)
    except CircuitError as exc:
        raise CircuitError(str(exc), lineno) from None


def parse_circuit(text: str) -> Circuit:
    width = None
    ops: list[Gate | None] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "--":
            ops.append(None)
            continue
        if line.startswith("qubits"):
            parts = line.split()
            if width is not None:
                raise CircuitError("duplicate qubits header", lineno)
            if len(parts) != 2 or not parts[1].isdigit():
                raise CircuitError(f"malformed header {line!r}", lineno)
            width = int(parts[1])
            continue
        if width is None:
            raise CircuitError("gate before 'qubits' header", lineno)
        g = parse_gate_line(line, lineno)
        if max(g.qubits) >= width:
            raise CircuitError(f"operand {max(g.qubits)} out of range for width {width}", lineno)
        ops.append(g)
    if width is None:
        raise CircuitError("missing 'qubits' header")
    return asap_schedule(ops, width)


def read_circuit(path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return parse_circuit(fh.read())


def write_circuit(path, circuit: Circuit, header: Sequence[str] = ()) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(emit_circuit(circuit, header))


@dataclass
class CircuitBuilder:
    """Accumulates gates in program order; ``build`` ASAP-packs them."""

    width: int
    ops: list[Gate | None] = field(default_factory=list)

    def add(self, kind: str, *qubits: int, param: float | None = None) -> None:
        self.ops.append(Gate(kind, tuple(qubits), param))

    def barrier(self) -> None:
        self.ops.append(None)

    def extend(self, gates: Iterable[Gate]) -> None:
        self.ops.extend(gates)

    def build(self) -> Circuit:
        return asap_schedule(self.ops, self.width)


def interaction_circuit(circuit: Circuit) -> Circuit:
    """ASAP re-slicing of the two-qubit gates alone, in the circuit's gate order.

    Single-qubit gates take no interaction time, so this is the timeline the
    mapper and the lookahead weights work on.
    """
    return asap_schedule((g for g in circuit.gates() if g.arity == 2), circuit.width)


def interaction_depth(circuit: Circuit) -> int:
    return interaction_circuit(circuit).depth
