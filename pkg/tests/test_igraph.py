import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qslice.circuit import CircuitBuilder, Gate, asap_schedule
from qslice.igraph import (
    EdgeWeight,
    InteractionGraph,
    LookaheadIndex,
    LookaheadSpec,
    lookahead_graph,
    lookahead_value,
    slice_graph,
    sum_graphs,
    total_interaction_graph,
)

from oracles import sample_program


@st.composite
def circuits(draw, max_width=7, max_gates=40):
    width = draw(st.integers(2, max_width))
    ops = []
    for _ in range(draw(st.integers(0, max_gates))):
        a, b = draw(st.lists(st.integers(0, width - 1), min_size=2, max_size=2, unique=True))
        ops.append(Gate("cx", (a, b)))
    return asap_schedule(ops, width)


specs = st.one_of(
    st.builds(LookaheadSpec, st.just("constant"), st.sampled_from([0, 1, 2, 5, math.inf])),
    st.builds(LookaheadSpec, st.just("exponential"), st.floats(0.1, 8)),
    st.builds(LookaheadSpec, st.just("gaussian"), st.floats(0.1, 8)),
)


def naive_lookahead(circuit, t, spec):
    g = InteractionGraph(circuit.width)
    for a, b in circuit.two_qubit_pairs(t):
        g.add(a, b, EdgeWeight(1, 0.0))
    for m in range(t + 1, circuit.depth):
        d = lookahead_value(spec, m - t)
        for a, b in circuit.two_qubit_pairs(m):
            g.add(a, b, EdgeWeight(0, d))
    return g


def close(g, h, tol=1e-9):
    keys = set(g.edges) | set(h.edges)
    return all(g.weight(*e).required == h.weight(*e).required for e in keys) and all(
        abs(g.weight(*e).finite - h.weight(*e).finite) <= tol for e in keys
    )


def test_edge_weight_order_is_lexicographic():
    assert EdgeWeight(1, 0.0) > EdgeWeight(0, 1e9)
    assert EdgeWeight(0, 2.0) > EdgeWeight(0, 1.0)
    assert EdgeWeight(1, 2.0) + EdgeWeight(0, 1.0) == EdgeWeight(1, 3.0)
    assert not EdgeWeight(0, 1e-12).is_positive()


def test_repeated_cnot_counts():
    b = CircuitBuilder(2)
    b.add("cx", 0, 1)
    b.add("cx", 0, 1)
    assert total_interaction_graph(b.build()).weight(0, 1) == EdgeWeight(0, 2.0)


def test_empty_circuit_graph():
    assert total_interaction_graph(asap_schedule([], 3)).edges == {}


def test_slice_graph_edges():
    c = asap_schedule([Gate("cx", (0, 1)), Gate("cx", (2, 3))], 4)
    g = slice_graph(c, 0)
    assert g.edges == {(0, 1): EdgeWeight(0, 1.0), (2, 3): EdgeWeight(0, 1.0)}


def test_single_qubit_slice_has_no_edges():
    c = asap_schedule([Gate("h", (0,)), Gate("t", (1,))], 2)
    assert slice_graph(c, 0).edges == {}


def test_slice_out_of_range():
    with pytest.raises(IndexError):
        slice_graph(sample_program(), 6)
    with pytest.raises(IndexError):
        lookahead_graph(sample_program(), -1, LookaheadSpec())


def test_sample_program_total_is_sum_of_slices():
    c = sample_program()
    total = total_interaction_graph(c)
    assert sum_graphs((slice_graph(c, t) for t in range(c.depth)), c.width).edges == total.edges
    assert total.weight(1, 2) == EdgeWeight(0, 3.0)


def test_lookahead_values():
    assert lookahead_value(LookaheadSpec("exponential", 1), 2) == 0.25
    assert lookahead_value(LookaheadSpec("constant", 0), 1) == 0.0
    assert lookahead_value(LookaheadSpec("gaussian", 2), 2) == pytest.approx(math.exp(-1))
    with pytest.raises(ValueError):
        lookahead_value(LookaheadSpec(), 0)


@pytest.mark.parametrize("kind, sigma", [("exponential", 0), ("gaussian", -1), ("constant", -1), ("cubic", 1)])
def test_bad_lookahead_specs(kind, sigma):
    with pytest.raises(ValueError):
        LookaheadSpec(kind, sigma)


def test_aliases():
    assert LookaheadSpec("expon", 1) == LookaheadSpec("exponential", 1)
    assert LookaheadSpec("gauss", 2).kind == "gaussian"


def test_worked_lookahead_sum():
    ops = []
    for pair in [(2, 3), (2, 3), (2, 3), (0, 1), (2, 3), (0, 1)]:
        ops += [Gate("cx", pair), None]
    c = asap_schedule(ops, 4)
    w = lookahead_graph(c, 2, LookaheadSpec("exponential", 1)).weight(0, 1)
    assert w == EdgeWeight(0, 0.625)


def test_last_slice_has_only_required_edges():
    c = sample_program()
    g = lookahead_graph(c, c.depth - 1, LookaheadSpec("exponential", 1))
    assert g.edges == {e: EdgeWeight(1, 0.0) for e in c.two_qubit_pairs(c.depth - 1)}


def test_unbounded_constant_counts_future_interactions():
    c = sample_program()
    g = lookahead_graph(c, 0, LookaheadSpec("constant", math.inf))
    future = sum_graphs((slice_graph(c, t) for t in range(1, c.depth)), c.width)
    for e, w in future.edges.items():
        assert g.weight(*e).finite == w.finite


def test_dump_and_load():
    g = lookahead_graph(sample_program(), 1, LookaheadSpec("gaussian", 2))
    assert InteractionGraph.load(g.dump(), 4).edges == g.edges


@given(circuits())
def test_slice_graphs_sum_to_total(c):
    summed = sum_graphs((slice_graph(c, t) for t in range(c.depth)), c.width)
    assert summed.edges == total_interaction_graph(c).edges


@given(circuits())
def test_slice_graphs_are_matchings(c):
    for t in range(c.depth):
        deg = {}
        for a, b in slice_graph(c, t).edges:
            deg[a] = deg.get(a, 0) + 1
            deg[b] = deg.get(b, 0) + 1
        assert max(deg.values(), default=0) <= 1


@settings(max_examples=60, deadline=None)
@given(circuits(), specs)
def test_index_matches_naive_sum(c, spec):
    if c.depth == 0:
        return
    index = LookaheadIndex(c, spec, c.width + 2)
    for t in range(c.depth):
        req, fin = index.weights(t)
        assert req.shape == (c.width + 2, c.width + 2)
        assert close(InteractionGraph.from_dense(req, fin), naive_lookahead(c, t, spec))


@settings(max_examples=30, deadline=None)
@given(circuits())
def test_index_handles_backwards_queries(c):
    if c.depth < 2:
        return
    index = LookaheadIndex(c, LookaheadSpec("constant", math.inf))
    forward = [index.finite(t).copy() for t in range(c.depth)]
    for t in reversed(range(c.depth)):
        assert np.array_equal(index.finite(t), forward[t])


@given(specs, st.integers(1, 200))
def test_lookahead_monotone_and_nonnegative(spec, n):
    assert 0 <= lookahead_value(spec, n + 1) <= lookahead_value(spec, n) <= 1


@settings(max_examples=40, deadline=None)
@given(circuits(), st.floats(0.1, 4), st.floats(0.1, 4))
def test_larger_decay_never_lowers_weights(c, s1, s2):
    lo, hi = sorted((s1, s2))
    for t in range(c.depth):
        small = lookahead_graph(c, t, LookaheadSpec("exponential", lo))
        big = lookahead_graph(c, t, LookaheadSpec("exponential", hi))
        for e, w in small.edges.items():
            assert big.weight(*e).finite >= w.finite - 1e-12


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 1.0), st.lists(st.integers(1, 40), min_size=1, max_size=30, unique=True))
def test_near_interaction_dominates_later_ones(sigma, distances):
    spec = LookaheadSpec("exponential", sigma)
    d = min(distances)
    later = sum(lookahead_value(spec, x) for x in distances if x > d)
    assert lookahead_value(spec, d) > later
