"""Small dense state-vector replay used to check benchmark and mapping semantics.

Only meant for circuits of a dozen or so qubits. Basis inputs are simulated as
a batch, and each is expected to land on a single basis state.
"""

from __future__ import annotations

import numpy as np

from .circuit import Circuit, Gate

_S2 = 1 / np.sqrt(2)

ONE_QUBIT = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "h": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "z": np.diag([1, -1]).astype(complex),
    "s": np.diag([1, 1j]),
    "sdg": np.diag([1, -1j]),
    "t": np.diag([1, np.exp(1j * np.pi / 4)]),
    "tdg": np.diag([1, np.exp(-1j * np.pi / 4)]),
    "measure": np.eye(2, dtype=complex),
}


def _one_qubit_matrix(g: Gate) -> np.ndarray:
    if g.kind == "rz":
        return np.diag([1, np.exp(1j * g.param)])
    try:
        return ONE_QUBIT[g.kind]
    except KeyError:
        raise ValueError(f"no replay semantics for gate {g.kind!r}") from None


def _two_qubit_matrix(g: Gate) -> np.ndarray:
    if g.kind == "cx":
        m = np.eye(4, dtype=complex)
        m[2:, 2:] = [[0, 1], [1, 0]]
        return m
    if g.kind == "cz":
        return np.diag([1, 1, 1, -1]).astype(complex)
    if g.kind == "cp":
        return np.diag([1, 1, 1, np.exp(1j * g.param)])
    if g.kind in ("swap", "swap-nl"):
        m = np.zeros((4, 4), dtype=complex)
        m[0, 0] = m[1, 2] = m[2, 1] = m[3, 3] = 1
        return m
    raise ValueError(f"no replay semantics for gate {g.kind!r}")


def _apply(state: np.ndarray, g: Gate, n: int) -> np.ndarray:
    # axis i of the state tensor is qubit n-1-i so that bit q of the index is qubit q
    axes = [n - 1 - q for q in g.qubits]
    if g.arity == 1:
        m = _one_qubit_matrix(g)
        out = np.tensordot(m, state, axes=([1], axes))
        return np.moveaxis(out, 0, axes[0])
    m = _two_qubit_matrix(g).reshape(2, 2, 2, 2)
    out = np.tensordot(m, state, axes=([2, 3], axes))
    return np.moveaxis(out, [0, 1], axes)


def run_gates(gates, n: int, inputs: list[int]) -> np.ndarray:
    """Return the final state vectors (shape ``(2**n, len(inputs))``)."""
    batch = len(inputs)
    state = np.zeros((2**n, batch), dtype=complex)
    state[inputs, np.arange(batch)] = 1
    state = state.reshape((2,) * n + (batch,))
    for g in gates:
        state = _apply(state, g, n)
    return state.reshape(2**n, batch)


def basis_outputs(gates, n: int, inputs: list[int], atol: float = 1e-9) -> list[int]:
    """Map each basis input to its basis output; raises if any output is a superposition."""
    final = run_gates(gates, n, inputs)
    probs = np.abs(final) ** 2
    out = probs.argmax(axis=0)
    worst = probs[out, np.arange(len(inputs))].min() if inputs else 1.0
    if worst < 1 - atol:
        raise ValueError(f"output is not a basis state (max probability {worst:.6f})")
    return [int(x) for x in out]


def circuit_basis_outputs(circuit: Circuit, inputs: list[int]) -> list[int]:
    return basis_outputs(circuit.gates(), circuit.width, inputs)
