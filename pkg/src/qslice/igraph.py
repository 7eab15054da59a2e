"""Interaction graphs: total, per-slice, and lookahead-weighted slice graphs.

Edge weights are two-level: ``required`` counts current-slice interactions that
must end up inside one cluster, ``finite`` accumulates ordinary weight. They
compare lexicographically, so a required edge outweighs any finite weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .circuit import Circuit

FINITE_TOL = 1e-9
TRUNCATE_BELOW = 1e-12


@dataclass(frozen=True)
class EdgeWeight:
    required: int = 0
    finite: float = 0.0

    def __add__(self, other: "EdgeWeight") -> "EdgeWeight":
        return EdgeWeight(self.required + other.required, self.finite + other.finite)

    def __sub__(self, other: "EdgeWeight") -> "EdgeWeight":
        return EdgeWeight(self.required - other.required, self.finite - other.finite)

    def __neg__(self) -> "EdgeWeight":
        return EdgeWeight(-self.required, -self.finite)

    def scaled(self, k: float) -> "EdgeWeight":
        return EdgeWeight(int(self.required * k), self.finite * k)

    def key(self) -> tuple[int, float]:
        return (self.required, self.finite)

    def __lt__(self, other: "EdgeWeight") -> bool:
        return self.key() < other.key()

    def __le__(self, other: "EdgeWeight") -> bool:
        return self.key() <= other.key()

    def __gt__(self, other: "EdgeWeight") -> bool:
        return self.key() > other.key()

    def __ge__(self, other: "EdgeWeight") -> bool:
        return self.key() >= other.key()

    def is_positive(self, tol: float = FINITE_TOL) -> bool:
        return self.required > 0 or (self.required == 0 and self.finite > tol)

    def isclose(self, other: "EdgeWeight", tol: float = FINITE_TOL) -> bool:
        return self.required == other.required and abs(self.finite - other.finite) <= tol


ZERO = EdgeWeight()


def _pair(a: int, b: int) -> tuple[int, int]:
    if a == b:
        raise ValueError(f"self-loop on vertex {a}")
    return (a, b) if a < b else (b, a)


@dataclass
class InteractionGraph:
    """Undirected graph on vertices ``0..n-1`` with :class:`EdgeWeight` edges."""

    n: int
    edges: dict[tuple[int, int], EdgeWeight] = field(default_factory=dict)

    def add(self, a: int, b: int, w: EdgeWeight) -> None:
        key = _pair(a, b)
        self.edges[key] = self.edges.get(key, ZERO) + w

    def weight(self, a: int, b: int) -> EdgeWeight:
        return self.edges.get(_pair(a, b), ZERO)

    def required_edges(self) -> list[tuple[int, int]]:
        return sorted(e for e, w in self.edges.items() if w.required > 0)

    def __add__(self, other: "InteractionGraph") -> "InteractionGraph":
        out = InteractionGraph(max(self.n, other.n), dict(self.edges))
        for (a, b), w in other.edges.items():
            out.add(a, b, w)
        return out

    def nonzero(self) -> "InteractionGraph":
        return InteractionGraph(self.n, {e: w for e, w in self.edges.items() if w != ZERO})

    def dense(self, size: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Symmetric ``(required, finite)`` matrices padded to ``size`` vertices."""
        size = self.n if size is None else size
        req = np.zeros((size, size), dtype=np.int64)
        fin = np.zeros((size, size), dtype=float)
        for (a, b), w in self.edges.items():
            req[a, b] = req[b, a] = w.required
            fin[a, b] = fin[b, a] = w.finite
        return req, fin

    @classmethod
    def from_dense(cls, req: np.ndarray, fin: np.ndarray) -> "InteractionGraph":
        g = cls(req.shape[0])
        ii, jj = np.nonzero(np.triu((req != 0) | (fin != 0), k=1))
        for a, b in zip(ii.tolist(), jj.tolist()):
            g.edges[(a, b)] = EdgeWeight(int(req[a, b]), float(fin[a, b]))
        return g

    def dump(self) -> str:
        """Edge list text, one ``a b required finite`` line per edge."""
        return "".join(f"{a} {b} {w.required} {w.finite!r}\n" for (a, b), w in sorted(self.edges.items()))

    @classmethod
    def load(cls, text: str, n: int) -> "InteractionGraph":
        g = cls(n)
        for line in text.splitlines():
            if line.strip():
                a, b, r, f = line.split()
                g.add(int(a), int(b), EdgeWeight(int(r), float(f)))
        return g


def total_interaction_graph(circuit: Circuit) -> InteractionGraph:
    g = InteractionGraph(circuit.width)
    for gate in circuit.gates():
        if gate.arity == 2:
            g.add(*gate.qubits, EdgeWeight(0, 1.0))
    return g


def slice_graph(circuit: Circuit, t: int) -> InteractionGraph:
    if not 0 <= t < circuit.depth:
        raise IndexError(f"slice {t} out of range for depth {circuit.depth}")
    g = InteractionGraph(circuit.width)
    for a, b in circuit.two_qubit_pairs(t):
        g.add(a, b, EdgeWeight(0, 1.0))
    return g


# ---------------------------------------------------------------------------
# lookahead


LOOKAHEAD_KINDS = ("constant", "exponential", "gaussian")
_ALIASES = {"const": "constant", "expon": "exponential", "exp": "exponential", "gauss": "gaussian"}


@dataclass(frozen=True)
class LookaheadSpec:
    kind: str = "exponential"
    sigma: float = 1.0

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in LOOKAHEAD_KINDS:
            raise ValueError(f"unknown lookahead kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if kind == "constant":
            if self.sigma < 0:
                raise ValueError("constant lookahead needs sigma >= 0")
        elif not self.sigma > 0:
            raise ValueError(f"{kind} lookahead needs sigma > 0, got {self.sigma}")

    @property
    def label(self) -> str:
        return f"{self.kind}-{self.sigma:g}"

    def horizon(self) -> float:
        """Largest distance whose weight is kept (``inf`` for unbounded constant)."""
        if self.kind == "constant":
            return self.sigma
        if self.kind == "exponential":
            # 2**(-n/s) < 1e-12  <=>  n > s * log2(1e12)
            return math.floor(self.sigma * math.log2(1 / TRUNCATE_BELOW))
        return math.floor(self.sigma * math.sqrt(math.log(1 / TRUNCATE_BELOW)))


def lookahead_value(spec: LookaheadSpec, n: int) -> float:
    if n < 1:
        raise ValueError(f"lookahead distance must be >= 1, got {n}")
    if spec.kind == "constant":
        return 1.0 if n <= spec.sigma else 0.0
    if spec.kind == "exponential":
        return 2.0 ** (-n / spec.sigma)
    return math.exp(-(n * n) / (spec.sigma * spec.sigma))


class LookaheadIndex:
    """Per-slice interaction pairs of a circuit, for fast dense lookahead graphs.

    ``weights(t)`` returns the dense ``(required, finite)`` matrices of the
    lookahead graph at slice ``t`` over ``size`` vertices (extra vertices are
    isolated, e.g. idle padding).
    """

    def __init__(self, circuit: Circuit, spec: LookaheadSpec, size: int | None = None):
        self.circuit = circuit
        self.spec = spec
        self.size = circuit.width if size is None else size
        self.depth = circuit.depth
        self.pairs: list[tuple[np.ndarray, np.ndarray]] = []
        for t in range(self.depth):
            pr = circuit.two_qubit_pairs(t)
            a = np.array([p[0] for p in pr], dtype=np.int64)
            b = np.array([p[1] for p in pr], dtype=np.int64)
            self.pairs.append((a, b))
        h = spec.horizon()
        self.unbounded = math.isinf(h) or h >= self.depth
        self.window = self.depth if self.unbounded else int(h)
        self._decay = np.array([lookahead_value(spec, d) for d in range(1, self.window + 1)])
        # unbounded constant lookahead: finite(t) = total - interactions in slices 0..t
        self._counting = self.unbounded and spec.kind == "constant"
        if self._counting:
            self._total = np.zeros((self.size, self.size))
            for a, b in self.pairs:
                self._total[a, b] += 1
                self._total[b, a] += 1
            self._prefix_t = -1
            self._prefix = np.zeros_like(self._total)

    def _advance_prefix(self, t: int) -> np.ndarray:
        if t < self._prefix_t:
            self._prefix_t = -1
            self._prefix[:] = 0
        while self._prefix_t < t:
            self._prefix_t += 1
            a, b = self.pairs[self._prefix_t]
            self._prefix[a, b] += 1
            self._prefix[b, a] += 1
        return self._prefix

    def required(self, t: int) -> np.ndarray:
        req = np.zeros((self.size, self.size), dtype=np.int64)
        a, b = self.pairs[t]
        req[a, b] = 1
        req[b, a] = 1
        return req

    def finite(self, t: int) -> np.ndarray:
        if self._counting:
            return self._total - self._advance_prefix(t)
        fin = np.zeros((self.size, self.size))
        last = min(self.depth - 1, t + self.window)
        for m in range(t + 1, last + 1):
            d = self._decay[m - t - 1]
            if d == 0.0:
                continue
            a, b = self.pairs[m]
            fin[a, b] += d
            fin[b, a] += d
        return fin

    def weights(self, t: int) -> tuple[np.ndarray, np.ndarray]:
        if not 0 <= t < self.depth:
            raise IndexError(f"slice {t} out of range for depth {self.depth}")
        return self.required(t), self.finite(t)


def lookahead_graph(circuit: Circuit, t: int, spec: LookaheadSpec) -> InteractionGraph:
    """Slice ``t`` edges marked required, plus decayed weight of later interactions."""
    if not 0 <= t < circuit.depth:
        raise IndexError(f"slice {t} out of range for depth {circuit.depth}")
    req, fin = LookaheadIndex(circuit, spec).weights(t)
    return InteractionGraph.from_dense(req, fin)


def sum_graphs(graphs: Iterable[InteractionGraph], n: int) -> InteractionGraph:
    out = InteractionGraph(n)
    for g in graphs:
        out = out + g
    return out
