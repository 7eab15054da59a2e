"""Paths of per-slice assignments, their communication cost, and mapped circuits.

Mapping works on the interaction timeline (two-qubit gates re-sliced ASAP).
Slot-holders ``0..n-1`` are circuit qubits and ``n..k*p-1`` are idle padding.
Idle holders are interchangeable, so a transition is costed on the moves of
real qubits only; the idle labels of each stored assignment are whatever the
realized swaps leave behind.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

from .circuit import Circuit, CircuitError, Gate, format_gate, interaction_circuit
from .igraph import LookaheadIndex, LookaheadSpec, total_interaction_graph
from .partition import (
    Assignment,
    DenseGraph,
    MachineSpec,
    PartitionError,
    repair,
)

GATE_TIME_NS = 300.0
ALGORITHMS = ("static-oee", "fgp-oee", "fgp-roee")


class CapacityError(ValueError):
    pass


def _check_fits(circuit: Circuit, machine: MachineSpec) -> None:
    if circuit.width > machine.size:
        raise CapacityError(f"circuit needs {circuit.width} qubits, machine has {machine.clusters}x{machine.capacity}")


# ---------------------------------------------------------------------------
# paths


@dataclass(frozen=True)
class Path:
    assignments: tuple[Assignment, ...]
    algorithm: str
    machine: MachineSpec
    width: int

    def __len__(self) -> int:
        return len(self.assignments)

    def transitions(self) -> list["MoveSet"]:
        a = self.assignments
        return [comm_cost(a[t - 1], a[t], self.width) for t in range(1, len(a))]

    def cost(self) -> int:
        return sum(m.cost for m in self.transitions())


def _realize(path: list[Assignment], nxt: Assignment, width: int) -> Assignment:
    """``nxt`` with idle labels as left by the swaps that reach it from ``path[-1]``."""
    if not path:
        return nxt
    return comm_cost(path[-1], nxt, width).result


def static_seed(circuit: Circuit, machine: MachineSpec) -> Assignment:
    """OEE of the total interaction graph, from the index-order layout."""
    req, fin = total_interaction_graph(circuit).dense(machine.size)
    return DenseGraph(req, fin).oee(Assignment.blocked(machine))


def fgp_path(
    circuit: Circuit,
    machine: MachineSpec,
    lookahead: LookaheadSpec = LookaheadSpec(),
    partitioner: str = "roee",
) -> Path:
    """Fine-grained partitioning: each slice's assignment seeds the next."""
    if partitioner not in ("roee", "oee"):
        raise ValueError(f"unknown partitioner {partitioner!r}")
    _check_fits(circuit, machine)
    skel = interaction_circuit(circuit)
    index = LookaheadIndex(skel, lookahead, machine.size)
    current = static_seed(skel, machine)
    out: list[Assignment] = []
    for t in range(skel.depth):
        g = DenseGraph(*index.weights(t))
        if partitioner == "roee":
            nxt = g.roee(current)
        else:
            nxt = g.oee(current)
            if not g.valid(nxt.array()):
                nxt = repair(nxt, g.required_pairs)
        current = _realize(out, nxt, circuit.width)
        out.append(current)
    return Path(tuple(out), f"fgp-{partitioner}", machine, circuit.width)


def static_path(circuit: Circuit, machine: MachineSpec) -> Path:
    """One global partition, minimally repaired per slice and reset to it afterwards."""
    _check_fits(circuit, machine)
    skel = interaction_circuit(circuit)
    s = static_seed(skel, machine)
    out: list[Assignment] = []
    for t in range(skel.depth):
        nxt = repair(s, skel.two_qubit_pairs(t), idle_from=circuit.width, prefer_idle=True)
        out.append(_realize(out, nxt, circuit.width))
    return Path(tuple(out), "static-oee", machine, circuit.width)


def build_path(
    circuit: Circuit, machine: MachineSpec, algorithm: str, lookahead: LookaheadSpec = LookaheadSpec()
) -> Path:
    if algorithm == "static-oee":
        return static_path(circuit, machine)
    if algorithm == "fgp-roee":
        return fgp_path(circuit, machine, lookahead, "roee")
    if algorithm == "fgp-oee":
        return fgp_path(circuit, machine, lookahead, "oee")
    raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {', '.join(ALGORITHMS)}")


def path_is_valid(circuit: Circuit, path: Path) -> bool:
    skel = interaction_circuit(circuit)
    if len(path) != skel.depth:
        return False
    return all(
        all(a[x] == a[y] for x, y in skel.two_qubit_pairs(t)) for t, a in enumerate(path.assignments)
    )


# ---------------------------------------------------------------------------
# communication cost


@dataclass(frozen=True)
class MoveSet:
    """Swaps realizing one transition.

    ``cycles`` holds ``(clusters, holders)`` rotations, where ``holders[i]``
    moves from ``clusters[i]`` to ``clusters[i + 1]`` (wrapping). Each
    residual move is ``(holder, from_cluster, to_cluster, idle_partner)``.
    """

    cycles: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    residual_moves: tuple[tuple[int, int, int, int], ...]
    result: Assignment

    @property
    def cost(self) -> int:
        return sum(len(c) - 1 for c, _ in self.cycles) + len(self.residual_moves)

    @property
    def rounds(self) -> int:
        """Longest sequential hop chain: ``len - 1`` per cycle, 1 per residual move."""
        hops = [len(c) - 1 for c, _ in self.cycles] + [1] * bool(self.residual_moves)
        return max(hops, default=0)

    def cycle_counts(self) -> dict[int, int]:
        out: dict[int, int] = defaultdict(int)
        for c, _ in self.cycles:
            out[len(c)] += 1
        return dict(out)

    def swaps(self) -> list[tuple[int, int]]:
        """Holder pairs in execution order."""
        out = []
        for _, holders in self.cycles:
            for x, y in zip(holders, holders[1:]):
                out.append((x, y))
        for h, _, _, idle in self.residual_moves:
            out.append((h, idle))
        return out


def _find_cycle(adj: dict[int, dict[int, list[int]]], length: int, k: int) -> tuple[int, ...] | None:
    """Lexicographically smallest simple cycle of exactly ``length`` clusters, rotated to start at its minimum."""

    def dfs(start: int, seq: list[int]) -> tuple[int, ...] | None:
        u = seq[-1]
        if len(seq) == length:
            return tuple(seq) if adj[u].get(start) else None
        for v in sorted(adj[u]):
            if v > start and v not in seq and adj[u][v]:
                found = dfs(start, seq + [v])
                if found:
                    return found
        return None

    for s in range(k):
        if adj[s]:
            found = dfs(s, [s])
            if found:
                return found
    return None


def comm_cost(frm: Assignment, to: Assignment, width: int | None = None) -> MoveSet:
    """Decompose the moves between two assignments into cycles, then residual idle swaps.

    Only holders below ``width`` are real qubits; the rest are idle and
    interchangeable. Cycles are extracted shortest first, lexicographically
    smallest cluster sequence first; each uses the smallest holder on each hop.
    """
    if (frm.k, frm.p) != (to.k, to.p):
        raise ValueError("assignments are for different machines")
    width = frm.size if width is None else width
    if not 0 <= width <= frm.size:
        raise ValueError(f"width {width} out of range for {frm.size} holders")
    k = frm.k

    adj: dict[int, dict[int, list[int]]] = {c: defaultdict(list) for c in range(k)}
    for h in range(width):
        if frm[h] != to[h]:
            adj[frm[h]][to[h]].append(h)
    for c in range(k):
        for lst in adj[c].values():
            lst.sort()

    def prune(u: int, v: int) -> None:
        if not adj[u][v]:
            del adj[u][v]

    for c in range(k):
        for v in list(adj[c]):
            prune(c, v)

    cycles = []
    for length in range(2, k + 1):
        while True:
            cyc = _find_cycle(adj, length, k)
            if cyc is None:
                break
            holders = []
            for i, u in enumerate(cyc):
                v = cyc[(i + 1) % length]
                holders.append(adj[u][v].pop(0))
                prune(u, v)
            cycles.append((cyc, tuple(holders)))

    cl = list(frm.clusters)
    for cyc, holders in cycles:
        for i, h in enumerate(holders):
            cl[h] = cyc[(i + 1) % len(cyc)]

    pending = sorted((h, u, v) for u in range(k) for v, hs in adj[u].items() for h in hs)
    residual = []
    while pending:
        for i, (h, u, v) in enumerate(pending):
            idle = next((x for x in range(width, len(cl)) if cl[x] == v), None)
            if idle is not None:
                break
        else:
            raise PartitionError("target assignment exceeds cluster capacity")
        pending.pop(i)
        cl[h], cl[idle] = v, u
        residual.append((h, u, v, idle))

    result = Assignment(tuple(cl), k, frm.p)
    if any(result[h] != to[h] for h in range(width)):
        raise ValueError("mismatched slot-holder sets")
    return MoveSet(tuple(cycles), tuple(residual), result)


# ---------------------------------------------------------------------------
# latency


@dataclass(frozen=True)
class LatencyEstimate:
    sequential_ns: float
    parallel_ns: float
    multiplier: float
    gate_time_ns: float = GATE_TIME_NS


def latency_estimate(
    depth: int,
    cost: int,
    multiplier: float,
    rounds: int | None = None,
    gate_time_ns: float = GATE_TIME_NS,
) -> LatencyEstimate:
    """``depth`` gate steps plus ``cost`` (sequential) or ``rounds`` (parallel) non-local steps."""
    if multiplier < 1:
        raise ValueError(f"multiplier must be >= 1, got {multiplier}")
    rounds = cost if rounds is None else rounds
    if rounds > cost:
        raise ValueError(f"rounds ({rounds}) cannot exceed cost ({cost})")
    base = depth * gate_time_ns
    return LatencyEstimate(
        sequential_ns=base + cost * multiplier * gate_time_ns,
        parallel_ns=base + rounds * multiplier * gate_time_ns,
        multiplier=multiplier,
        gate_time_ns=gate_time_ns,
    )


# ---------------------------------------------------------------------------
# mapped circuits


def slots_for(a: Assignment) -> list[int]:
    """Physical slot of every holder: ``cluster * p + rank`` within the cluster."""
    slot = [0] * a.size
    fill = [0] * a.k
    for h, c in enumerate(a.clusters):
        slot[h] = c * a.p + fill[c]
        fill[c] += 1
    return slot


@dataclass
class Stage:
    """Movement layers into slice ``t`` followed by the gates of that slice."""

    t: int
    moves: MoveSet | None
    movement: list[list[Gate]] = field(default_factory=list)
    gates: list[Gate] = field(default_factory=list)


@dataclass
class MappedCircuit:
    width: int
    machine: MachineSpec
    algorithm: str
    lookahead: str
    depth_unmapped: int
    initial_slots: list[int]
    final_slots: list[int]
    stages: list[Stage]
    tail: list[Gate] = field(default_factory=list)

    @property
    def nonlocal_ops(self) -> int:
        return sum(len(layer) for s in self.stages for layer in s.movement)

    @property
    def cost(self) -> int:
        return sum(s.moves.cost for s in self.stages if s.moves is not None)

    @property
    def rounds(self) -> int:
        return sum(s.moves.rounds for s in self.stages if s.moves is not None)

    @property
    def movement_layers(self) -> int:
        return sum(len(s.movement) for s in self.stages)

    @property
    def depth(self) -> int:
        return self.depth_unmapped + self.movement_layers

    def ops(self) -> list[Gate]:
        out = []
        for s in self.stages:
            for layer in s.movement:
                out.extend(layer)
            out.extend(s.gates)
        out.extend(self.tail)
        return out

    def latency(self, multiplier: float) -> LatencyEstimate:
        return latency_estimate(self.depth_unmapped, self.cost, multiplier, self.rounds)

    def emit(self, header: Sequence[str] = ()) -> str:
        m = self.machine
        lines = [f"# {h}" for h in header]
        lines.append(
            f"## mapped k={m.clusters} p={m.capacity} width={self.width} algorithm={self.algorithm}"
            f" lookahead={self.lookahead} depth_unmapped={self.depth_unmapped} depth_mapped={self.depth}"
        )
        lines.append("## placement " + " ".join(map(str, self.initial_slots[: self.width])))
        lines.append(f"qubits {m.size}")
        for s in self.stages:
            if s.moves is not None:
                lines.append(f"## transition {s.t} cost={s.moves.cost} rounds={s.moves.rounds}")
            for layer in s.movement:
                lines.extend(format_gate(g) for g in layer)
            lines.extend(format_gate(g) for g in s.gates)
        lines.extend(format_gate(g) for g in self.tail)
        return "\n".join(lines) + "\n"


def _movement_layers(swaps: list[tuple[int, int]], p: int) -> list[list[tuple[int, int]]]:
    """ASAP layering of slot swaps with clusters as the exclusive resource."""
    free_at: dict[int, int] = defaultdict(int)
    layers: list[list[tuple[int, int]]] = []
    for a, b in swaps:
        ca, cb = a // p, b // p
        t = max(free_at[ca], free_at[cb])
        if t == len(layers):
            layers.append([])
        layers[t].append((a, b))
        free_at[ca] = free_at[cb] = t + 1
    return layers


def _attach_single_qubit(circuit: Circuit, skel_depth: int) -> tuple[list[list[Gate]], list[Gate]]:
    """Group one-qubit gates by the skeleton slice of their qubit's next two-qubit gate."""
    before: list[list[Gate]] = [[] for _ in range(skel_depth)]
    tail: list[Gate] = []
    frontier = [0] * circuit.width
    pending: dict[int, list[Gate]] = defaultdict(list)
    for g in circuit.gates():
        if g.arity == 1:
            pending[g.qubits[0]].append(g)
            continue
        t = max(frontier[q] for q in g.qubits)
        for q in g.qubits:
            before[t].extend(pending.pop(q, []))
            frontier[q] = t + 1
    for q in sorted(pending):
        tail.extend(pending[q])
    return before, tail


def insert_movement(circuit: Circuit, path: Path, lookahead: str = "-") -> MappedCircuit:
    """Interleave movement swaps with the circuit, re-addressing gates to physical slots."""
    skel = interaction_circuit(circuit)
    if len(path) != skel.depth:
        raise ValueError(f"path has {len(path)} assignments, circuit has {skel.depth} interaction slices")
    machine = path.machine
    p = machine.capacity
    before, tail = _attach_single_qubit(circuit, skel.depth)

    if path.assignments:
        slot = slots_for(path.assignments[0])
    else:
        slot = slots_for(Assignment.blocked(machine))
    initial = list(slot)
    stages = []
    for t in range(skel.depth):
        moves = None
        movement: list[list[Gate]] = []
        if t > 0:
            moves = comm_cost(path.assignments[t - 1], path.assignments[t], path.width)
            slot_swaps = []
            for x, y in moves.swaps():
                slot_swaps.append((slot[x], slot[y]))
                slot[x], slot[y] = slot[y], slot[x]
            for layer in _movement_layers(slot_swaps, p):
                movement.append([Gate("swap-nl", (a, b)) for a, b in layer])
        for x, y in skel.two_qubit_pairs(t):
            if slot[x] // p != slot[y] // p:
                raise PartitionError(f"qubits {x} and {y} not co-located at slice {t}")
        gates = [g.remap(slot) for g in before[t]]
        gates.extend(g.remap(slot) for g in skel.slices[t])
        stages.append(Stage(t, moves, movement, gates))
    return MappedCircuit(
        width=circuit.width,
        machine=machine,
        algorithm=path.algorithm,
        lookahead=lookahead,
        depth_unmapped=skel.depth,
        initial_slots=initial,
        final_slots=list(slot),
        stages=stages,
        tail=[g.remap(slot) for g in tail],
    )


def compile_circuit(
    circuit: Circuit,
    machine: MachineSpec,
    algorithm: str = "fgp-roee",
    lookahead: LookaheadSpec = LookaheadSpec(),
) -> tuple[Path, MappedCircuit]:
    path = build_path(circuit, machine, algorithm, lookahead)
    label = "-" if algorithm == "static-oee" else lookahead.label
    return path, insert_movement(circuit, path, label)


# ---------------------------------------------------------------------------
# reading mapped text back


@dataclass(frozen=True)
class MappedSummary:
    depth_unmapped: int
    depth_mapped: int
    cost: int
    rounds: int
    swap_ops: int
    fields: dict


def summarize_mapped(text: str) -> MappedSummary:
    """Recover the latency inputs from mapped-circuit text."""
    fields = None
    cost = rounds = swaps = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("## mapped"):
            fields = dict(tok.split("=", 1) for tok in line.split()[2:])
        elif line.startswith("## transition"):
            kv = dict(tok.split("=", 1) for tok in line.split()[3:])
            try:
                cost += int(kv["cost"])
                rounds += int(kv["rounds"])
            except (KeyError, ValueError):
                raise CircuitError(f"malformed transition annotation {line!r}", lineno) from None
        elif line.split("#", 1)[0].split()[:1] == ["swap-nl"]:
            swaps += 1
    if fields is None:
        raise CircuitError("missing '## mapped' annotation")
    try:
        du, dm = int(fields["depth_unmapped"]), int(fields["depth_mapped"])
    except (KeyError, ValueError):
        raise CircuitError("'## mapped' annotation lacks depth fields") from None
    return MappedSummary(du, dm, cost, rounds, swaps, fields)
