"""Capacity-bounded k-way partitioning by pairwise exchange.

All moves are exchanges of two slot-holders in different clusters, so every
cluster always holds exactly ``p`` of them. Slot-holders ``0..n-1`` are circuit
qubits; any remaining holders up to ``k * p`` are idle padding with no edges.

Gains are two-level (required count, finite weight) and compared
lexicographically. The dense engine keeps, for every holder, its summed
edge weight towards each cluster, so the gain of exchanging ``a`` and ``b`` is

    W[a, C(b)] - W[a, C(a)] + W[b, C(a)] - W[b, C(b)] - 2 w(a, b)

in both components at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .igraph import FINITE_TOL, EdgeWeight, InteractionGraph


class PartitionError(RuntimeError):
    pass


@dataclass(frozen=True)
class MachineSpec:
    clusters: int = 10
    capacity: int = 10
    comm_multiplier: float = 1.0

    def __post_init__(self):
        if self.clusters < 2:
            raise ValueError(f"need at least 2 clusters, got {self.clusters}")
        if self.capacity < 1:
            raise ValueError(f"cluster capacity must be positive, got {self.capacity}")
        if self.comm_multiplier <= 0:
            raise ValueError("comm_multiplier must be positive")

    @property
    def size(self) -> int:
        return self.clusters * self.capacity


@dataclass(frozen=True)
class Assignment:
    """Cluster id of every slot-holder; ``clusters[h]`` is the cluster of holder ``h``."""

    clusters: tuple[int, ...]
    k: int
    p: int

    def __post_init__(self):
        if len(self.clusters) != self.k * self.p:
            raise PartitionError(f"assignment covers {len(self.clusters)} holders, machine has {self.k * self.p} slots")
        counts = np.bincount(np.asarray(self.clusters, dtype=np.int64), minlength=self.k)
        if len(counts) != self.k or (counts != self.p).any():
            raise PartitionError(f"cluster occupancies {counts.tolist()} differ from capacity {self.p}")

    @classmethod
    def blocked(cls, machine: MachineSpec) -> "Assignment":
        """Holder ``i`` in cluster ``i // p``."""
        k, p = machine.clusters, machine.capacity
        return cls(tuple(i // p for i in range(k * p)), k, p)

    @property
    def size(self) -> int:
        return len(self.clusters)

    def __getitem__(self, h: int) -> int:
        return self.clusters[h]

    def members(self, c: int) -> list[int]:
        return [h for h, x in enumerate(self.clusters) if x == c]

    def exchanged(self, a: int, b: int) -> "Assignment":
        cl = list(self.clusters)
        cl[a], cl[b] = cl[b], cl[a]
        return Assignment(tuple(cl), self.k, self.p)

    def array(self) -> np.ndarray:
        return np.asarray(self.clusters, dtype=np.int64)


@dataclass
class ExchangeLog:
    """Exchanges in the order they were made, with their gains at that moment."""

    entries: list[tuple[int, int, EdgeWeight]] = field(default_factory=list)

    def append(self, a: int, b: int, gain: EdgeWeight) -> None:
        self.entries.append((a, b, gain))

    def prefix_sums(self) -> list[EdgeWeight]:
        out, acc = [], EdgeWeight()
        for _, _, g in self.entries:
            acc = acc + g
            out.append(acc)
        return out

    def __len__(self) -> int:
        return len(self.entries)

    def format(self) -> str:
        return "".join(f"{a} {b} {g.required} {g.finite!r}\n" for a, b, g in self.entries)


# ---------------------------------------------------------------------------
# small, graph-object level API


def _check_covers(graph: InteractionGraph, assignment: Assignment) -> None:
    for a, b in graph.edges:
        if max(a, b) >= assignment.size:
            raise PartitionError(f"vertex {max(a, b)} missing from assignment of {assignment.size} holders")


def cut_weight(graph: InteractionGraph, assignment: Assignment) -> EdgeWeight:
    _check_covers(graph, assignment)
    req, fin = 0, 0.0
    for (a, b), w in graph.edges.items():
        if assignment[a] != assignment[b]:
            req += w.required
            fin += w.finite
    return EdgeWeight(req, fin)


def exchange_gain(graph: InteractionGraph, assignment: Assignment, a: int, b: int) -> EdgeWeight:
    """``cut(before) - cut(after)`` for exchanging holders ``a`` and ``b``."""
    _check_covers(graph, assignment)
    ca, cb = assignment[a], assignment[b]
    if ca == cb:
        raise PartitionError(f"holders {a} and {b} are both in cluster {ca}")
    da, db = EdgeWeight(), EdgeWeight()
    for (u, v), w in graph.edges.items():
        for x, y in ((u, v), (v, u)):
            if x == a and y != b:
                if assignment[y] == cb:
                    da = da + w
                elif assignment[y] == ca:
                    da = da - w
            elif x == b and y != a:
                if assignment[y] == ca:
                    db = db + w
                elif assignment[y] == cb:
                    db = db - w
    # the a-b edge stays cut either way; D_a + D_b - 2 w(a, b) with w(a, b) counted in both D terms
    return da + db


def is_valid(assignment: Assignment, graph_or_pairs) -> bool:
    """True iff every required edge (or every given pair) lies inside one cluster."""
    if isinstance(graph_or_pairs, InteractionGraph):
        pairs = graph_or_pairs.required_edges()
    else:
        pairs = graph_or_pairs
    return all(assignment[a] == assignment[b] for a, b in pairs)


def oee(graph: InteractionGraph, seed: Assignment, log: ExchangeLog | None = None) -> Assignment:
    req, fin = graph.dense(seed.size)
    return DenseGraph(req, fin).oee(seed, log)


def roee(graph: InteractionGraph, seed: Assignment, log: ExchangeLog | None = None) -> Assignment:
    req, fin = graph.dense(seed.size)
    return DenseGraph(req, fin).roee(seed, log)


# ---------------------------------------------------------------------------
# dense engine


class _State:
    """Mutable partition state with per-cluster weight sums."""

    def __init__(self, g: "DenseGraph", seed: Assignment):
        self.g = g
        self.k, self.p = seed.k, seed.p
        self.cl = seed.array().copy()
        onehot = np.zeros((seed.size, self.k))
        onehot[np.arange(seed.size), self.cl] = 1
        self.wr = g.req @ onehot  # (N, k) required weight towards each cluster
        self.wf = g.fin @ onehot

    def gains(self) -> tuple[np.ndarray, np.ndarray]:
        cl = self.cl
        idx = np.arange(len(cl))
        gr = self.wr[:, cl]  # gr[a, b] = W[a, C(b)]
        own = self.wr[idx, cl]
        greq = gr - own[:, None]
        greq = greq + greq.T - 2 * self.g.req
        gf = self.wf[:, cl]
        ownf = self.wf[idx, cl]
        gfin = gf - ownf[:, None]
        gfin = gfin + gfin.T - 2 * self.g.fin
        return greq, gfin

    def exchange(self, a: int, b: int) -> None:
        ca, cb = self.cl[a], self.cl[b]
        g = self.g
        delta_r = g.req[:, b] - g.req[:, a]
        delta_f = g.fin[:, b] - g.fin[:, a]
        self.wr[:, ca] += delta_r
        self.wr[:, cb] -= delta_r
        self.wf[:, ca] += delta_f
        self.wf[:, cb] -= delta_f
        self.cl[a], self.cl[b] = cb, ca

    def assignment(self) -> Assignment:
        return Assignment(tuple(int(x) for x in self.cl), self.k, self.p)


def _best_pair(greq: np.ndarray, gfin: np.ndarray, mask: np.ndarray) -> tuple[int, int] | None:
    """Lexicographically best gain among ``mask``; ties go to the smallest ``(a, b)``."""
    if not mask.any():
        return None
    r = np.where(mask, greq, np.iinfo(np.int64).min)
    rmax = r.max()
    cand = mask & (greq == rmax)
    f = np.where(cand, gfin, -np.inf)
    fmax = f.max()
    cand &= gfin >= fmax - FINITE_TOL
    flat = int(np.argmax(cand))
    n = mask.shape[1]
    return flat // n, flat % n


class DenseGraph:
    """Two-level weighted graph held as symmetric dense matrices."""

    def __init__(self, req: np.ndarray, fin: np.ndarray):
        self.req = np.asarray(req, dtype=np.int64)
        self.fin = np.asarray(fin, dtype=float)
        self.n = self.req.shape[0]
        self._upper = np.triu(np.ones((self.n, self.n), dtype=bool), k=1)
        ii, jj = np.nonzero(np.triu(self.req, k=1))
        self.required_pairs = list(zip(ii.tolist(), jj.tolist()))

    def cut(self, cl: np.ndarray) -> EdgeWeight:
        cross = cl[:, None] != cl[None, :]
        return EdgeWeight(int(self.req[cross].sum()) // 2, float(self.fin[cross].sum()) / 2)

    def valid(self, cl: np.ndarray) -> bool:
        return all(cl[a] == cl[b] for a, b in self.required_pairs)

    def _candidates(self, st: _State, unlocked: np.ndarray) -> np.ndarray:
        cl = st.cl
        return self._upper & (cl[:, None] != cl[None, :]) & unlocked[:, None] & unlocked[None, :]

    def _pass(self, st: _State, stop_when_valid: bool) -> tuple[list, bool]:
        """One KL-style pass; returns the tentative exchange list and whether it stopped on validity."""
        unlocked = np.ones(self.n, dtype=bool)
        made: list[tuple[int, int, EdgeWeight]] = []
        while True:
            mask = self._candidates(st, unlocked)
            greq, gfin = st.gains()
            pick = _best_pair(greq, gfin, mask)
            if pick is None:
                return made, False
            a, b = pick
            gain = EdgeWeight(int(greq[a, b]), float(gfin[a, b]))
            st.exchange(a, b)
            unlocked[a] = unlocked[b] = False
            made.append((a, b, gain))
            if stop_when_valid and self.valid(st.cl):
                return made, True

    def _keep_best_prefix(self, st: _State, made: list, log: ExchangeLog | None) -> int:
        """Undo the pass back to its best positive cumulative gain; returns the kept length."""
        best_len, best, acc = 0, EdgeWeight(), EdgeWeight()
        for i, (_, _, g) in enumerate(made, start=1):
            acc = acc + g
            if (acc - best).is_positive():
                best_len, best = i, acc
        for a, b, _ in reversed(made[best_len:]):
            st.exchange(a, b)
        if log is not None:
            for a, b, g in made[:best_len]:
                log.append(a, b, g)
        return best_len

    def oee(self, seed: Assignment, log: ExchangeLog | None = None, max_passes: int = 1000) -> Assignment:
        """Repeat passes, keeping each pass's best positive-gain prefix, until none improves."""
        self._check(seed)
        st = _State(self, seed)
        for _ in range(max_passes):
            made, _ = self._pass(st, stop_when_valid=False)
            if self._keep_best_prefix(st, made, log) == 0:
                break
        return st.assignment()

    def roee(self, seed: Assignment, log: ExchangeLog | None = None, max_passes: int = 1000) -> Assignment:
        """OEE whose exchanges are committed as made, stopping once the required edges are all internal.

        A pass that ends without validity is cut back to its best prefix, as in
        OEE, and another pass starts. If OEE converges while the slice is still
        invalid, :func:`repair` finishes the job.
        """
        self._check(seed)
        if self.valid(seed.array()):
            return seed
        st = _State(self, seed)
        for _ in range(max_passes):
            made, ok = self._pass(st, stop_when_valid=True)
            if ok:
                if log is not None:
                    for a, b, g in made:
                        log.append(a, b, g)
                return st.assignment()
            if self._keep_best_prefix(st, made, log) == 0:
                break
        return repair(st.assignment(), self.required_pairs)

    def _check(self, seed: Assignment) -> None:
        if seed.size != self.n:
            raise PartitionError(f"graph has {self.n} vertices, assignment covers {seed.size}")


# ---------------------------------------------------------------------------
# direct repair


def repair(
    assignment: Assignment,
    pairs: Sequence[tuple[int, int]],
    idle_from: int | None = None,
    prefer_idle: bool = False,
) -> Assignment:
    """Co-locate every pair in ``pairs`` with as little movement as the greedy rule finds.

    Pairs already inside a cluster stay put. Each violated pair ``(a, b)`` goes
    to ``b``'s cluster or ``a``'s cluster, whichever has two slots left for it,
    so only one endpoint moves; failing both, it goes to the lowest cluster with
    room and both endpoints move. With ``prefer_idle`` (holders ``>= idle_from``
    are idle padding) a destination holding an idle holder is preferred, ties to
    the lower cluster; otherwise moving ``a`` is tried first.

    Unpaired holders then fill what is left. Where a cluster overflows, idle
    holders leave before real ones, and an evicted real holder goes back to
    the cluster whose endpoint displaced it when that cluster has room.
    Placing a pair uses up exactly one pair-sized gap, so this only fails
    when the pairs cannot fit at all.
    """
    cl = list(assignment.clusters)
    k, p, size = assignment.k, assignment.p, assignment.size
    idle_from = size if idle_from is None else idle_from
    pairs = sorted(tuple(sorted(pr)) for pr in pairs)
    matched = {q for pr in pairs for q in pr}
    violated = [(a, b) for a, b in pairs if cl[a] != cl[b]]
    if not violated:
        return assignment

    room = [0] * k  # slots not held by co-located pairs
    singles: list[list[int]] = [[] for _ in range(k)]
    fixed = {q for a, b in pairs if cl[a] == cl[b] for q in (a, b)}
    for h in range(size):
        if h not in fixed:
            room[cl[h]] += 1
        if h not in matched:
            singles[cl[h]].append(h)

    target = list(cl)
    displaced_by: list[list[int]] = [[] for _ in range(k)]
    for a, b in violated:
        options = []
        for mover, d in ((a, cl[b]), (b, cl[a])):
            if room[d] < 2:
                continue
            if prefer_idle:
                rank = (0 if any(h >= idle_from for h in singles[d]) else 1, d)
            else:
                rank = (len(options),)
            options.append((rank, mover, d))
        if options:
            _, mover, d = min(options)
            movers = [mover]
        else:
            d = next((c for c in range(k) if room[c] >= 2), None)
            if d is None:
                raise PartitionError(f"cannot co-locate pair {(a, b)}: no cluster has room for it")
            movers = [a, b]
        room[d] -= 2
        target[a] = target[b] = d
        displaced_by[d].extend(cl[m] for m in movers)

    evicted: list[tuple[int, int]] = []  # (holder, cluster it left)
    holes = [0] * k
    for c in range(k):
        extra = len(singles[c]) - room[c]
        if extra > 0:
            order = sorted(singles[c], key=lambda h: (h < idle_from, h))
            evicted.extend((h, c) for h in order[:extra])
        else:
            holes[c] = -extra
    evicted.sort(key=lambda e: (e[0] >= idle_from, e[0]))
    for h, c in evicted:
        back = [d for d in displaced_by[c] if holes[d] > 0]
        d = back[0] if back and h < idle_from else next(d for d in range(k) if holes[d] > 0)
        if back and h < idle_from:
            displaced_by[c].remove(d)
        holes[d] -= 1
        target[h] = d
    return Assignment(tuple(target), k, p)
