import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qslice.circuit import (
    Circuit,
    CircuitBuilder,
    CircuitError,
    Gate,
    asap_schedule,
    depth,
    emit_circuit,
    interaction_circuit,
    parse_circuit,
    two_qubit_count,
)

from oracles import sample_program


@st.composite
def gate_lists(draw, max_width=6, max_gates=30):
    width = draw(st.integers(2, max_width))
    gates = []
    for _ in range(draw(st.integers(0, max_gates))):
        if draw(st.booleans()):
            a, b = draw(st.lists(st.integers(0, width - 1), min_size=2, max_size=2, unique=True))
            gates.append(Gate("cx", (a, b)))
        else:
            q = draw(st.integers(0, width - 1))
            kind = draw(st.sampled_from(["h", "t", "rz"]))
            gates.append(Gate(kind, (q,), 0.25 if kind == "rz" else None))
    return width, gates


def test_asap_packs_disjoint_gates_together():
    c = asap_schedule([Gate("cx", (0, 1)), Gate("cx", (2, 3)), Gate("cx", (1, 2))], 4)
    assert c.depth == 2
    assert c.two_qubit_pairs(0) == [(0, 1), (2, 3)]
    assert c.two_qubit_pairs(1) == [(1, 2)]


def test_empty_program():
    c = asap_schedule([], 4)
    assert (depth(c), two_qubit_count(c)) == (0, 0)


def test_sample_program_has_six_slices():
    c = sample_program()
    assert c.depth == 6
    assert two_qubit_count(c) == 10


def test_barrier_forces_new_slice():
    c = parse_circuit("qubits 4\ncx 0 1\n--\ncx 2 3\n")
    assert c.depth == 2


def test_parse_sequential():
    c = parse_circuit("qubits 4\ncx 0 1\ncx 1 2")
    assert c.width == 4 and c.depth == 2 and two_qubit_count(c) == 2


def test_parse_comments_and_params():
    c = parse_circuit("# hi\nqubits 2  # width\nrz 0 @0.5\ncx 0 1 # trailing\n")
    assert c.slices[0][0].param == 0.5
    assert c.depth == 2


@pytest.mark.parametrize(
    "text, where",
    [
        ("qubits 2\ncx 0 0", 2),
        ("qubits 2\ncx 0 5", 2),
        ("cx 0 1", 1),
        ("qubits 2\nqubits 3", 2),
        ("qubits 2\nccx 0 1 1", 2),
        ("qubits 2\nrz 0 @abc", 2),
        ("qubits x", 1),
    ],
)
def test_parse_errors_report_line(text, where):
    with pytest.raises(CircuitError) as exc:
        parse_circuit(text)
    assert exc.value.line == where


def test_missing_header():
    with pytest.raises(CircuitError):
        parse_circuit("# nothing\n")


def test_gate_invariants():
    with pytest.raises(CircuitError):
        Gate("cx", (1, 1))
    with pytest.raises(CircuitError):
        Gate("ccx", (0, 1, 2))


def test_slice_disjointness_enforced():
    with pytest.raises(CircuitError):
        Circuit(3, ((Gate("cx", (0, 1)), Gate("cx", (1, 2))),))


def test_interaction_circuit_drops_single_qubit_slices():
    b = CircuitBuilder(3)
    b.add("cx", 0, 1)
    b.add("h", 1)
    b.add("t", 1)
    b.add("cx", 1, 2)
    c = b.build()
    assert c.depth == 4
    assert interaction_circuit(c).depth == 2


@given(gate_lists())
def test_round_trip(data):
    width, gates = data
    c = asap_schedule(gates, width)
    assert parse_circuit(emit_circuit(c, ["x=1"])) == c


@given(gate_lists())
def test_asap_is_idempotent(data):
    width, gates = data
    c = asap_schedule(gates, width)
    assert asap_schedule(list(c.gates()), width) == c


@given(gate_lists())
def test_depth_bounds(data):
    width, gates = data
    c = asap_schedule(gates, width)
    chain = max((sum(1 for g in gates if q in g.qubits) for q in range(width)), default=0)
    assert chain <= c.depth <= len(gates)


@given(gate_lists())
def test_per_qubit_order_preserved(data):
    width, gates = data
    c = asap_schedule(gates, width)
    for q in range(width):
        before = [g for g in gates if q in g.qubits]
        after = [g for g in c.gates() if q in g.qubits]
        assert before == after


@settings(max_examples=50)
@given(gate_lists())
def test_slices_are_disjoint(data):
    width, gates = data
    for s in asap_schedule(gates, width).slices:
        used = [q for g in s for q in g.qubits]
        assert len(used) == len(set(used))
