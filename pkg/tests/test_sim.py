import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpar.basic import Permutation, permutation_with_ancillae
from qpar.circuit import Circuit, EmbeddedCircuit, Gate, W_MATRIX
from qpar.generators import random_clifford, random_diag
from qpar.sim import (
    SparseState,
    WidthCapExceeded,
    apply_state,
    basis_state,
    equal_up_to_phase,
    restricted_action,
    unitary_of,
    verify_embedding,
)

S = 1 / math.sqrt(2)
CZ = np.diag([1, 1, 1, -1]).astype(complex)


def test_hadamard_on_zero():
    out = apply_state(Circuit.from_gates(1, [Gate("H", (0,))]), basis_state(1, 0))
    assert np.allclose(out, [S, S])


def test_cx_copies_amplitudes():
    a, b = 0.6, 0.8j
    psi = np.kron([a, b], [1, 0])
    out = apply_state(Circuit.from_gates(2, [Gate("CX", (0, 1))]), psi)
    assert np.allclose(out, [a, 0, 0, b])


def test_w_columns():
    u = unitary_of(Circuit.from_gates(2, [Gate("W", (0, 1))]))
    expected = 0.5 * np.array([[1, 1, 1, -1], [1, 1, -1, 1], [1, -1, 1, 1], [-1, 1, 1, 1]])
    assert np.allclose(u, expected)
    assert np.allclose(W_MATRIX, expected)


def test_unitary_basics():
    assert np.allclose(unitary_of(Circuit(3)), np.eye(8))
    assert np.allclose(unitary_of(Circuit.from_gates(2, [Gate("CZ", (0, 1))])), CZ)
    conj = Circuit.from_gates(2, [Gate("H", (1,)), Gate("CX", (0, 1)), Gate("H", (1,))])
    assert np.allclose(unitary_of(conj), CZ)


def test_qubit_zero_is_most_significant():
    u = unitary_of(Circuit.from_gates(2, [Gate("X", (0,))]))
    assert u[2, 0] == 1


def test_width_cap():
    with pytest.raises(WidthCapExceeded):
        unitary_of(Circuit(13))


def test_equal_up_to_phase():
    u = unitary_of(random_clifford(3, 12, np.random.default_rng(0)))
    assert equal_up_to_phase(u, u) == (True, 1)
    ok, ph = equal_up_to_phase(u, -u)
    assert ok and np.isclose(ph, -1)
    cx = unitary_of(Circuit.from_gates(2, [Gate("CX", (0, 1))]))
    assert not equal_up_to_phase(CZ, cx)[0]
    with pytest.raises(ValueError):
        equal_up_to_phase(np.eye(2), np.eye(4))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 5), st.integers(0, 20), st.integers(0, 20), st.integers(0, 2**32 - 1))
def test_composition_and_norm(n, k1, k2, seed):
    rng = np.random.default_rng(seed)
    c1, c2 = random_diag(n, k1, rng), random_clifford(n, k2, rng)
    assert np.allclose(unitary_of(c1.then(c2)), unitary_of(c2) @ unitary_of(c1), atol=1e-9)
    psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    psi /= np.linalg.norm(psi)
    for layer in c2.layers:
        psi = apply_state(Circuit(n, (layer,)), psi)
        assert abs(np.linalg.norm(psi) - 1) <= 1e-9


def test_identity_embedding():
    c = random_clifford(3, 10, np.random.default_rng(1))
    r = verify_embedding(EmbeddedCircuit(c, 3, 0), c)
    assert r.equivalent and r.subspace_preserved and np.isclose(r.global_phase, 1)


def test_permutation_embedding():
    p = Permutation((3, 2, 1, 0))
    assert verify_embedding(permutation_with_ancillae(p), p.matrix()).equivalent


def test_missing_uncopy_leaks():
    e = EmbeddedCircuit(Circuit.from_gates(2, [Gate("H", (0,)), Gate("CX", (0, 1))]), 1, 1)
    r = verify_embedding(e, np.array([[S, S], [S, -S]]))
    assert not r.subspace_preserved and not r.equivalent


def test_exact_phase_mode():
    c = Circuit.from_gates(1, [Gate("DIAG", (0,), (0.3, 0.3))])
    assert verify_embedding(c, np.eye(2)).equivalent
    r = verify_embedding(c, np.eye(2), up_to_phase=False)
    assert not r.equivalent and r.max_deviation > 0.2


def test_sparse_matches_dense(rng):
    for _ in range(10):
        c = random_clifford(4, 15, rng).then(random_diag(4, 10, rng))
        e = EmbeddedCircuit(c.widen(6), 4, 2)
        dense, leak_d, _ = restricted_action(e, backend="dense")
        sparse, leak_s, _ = restricted_action(e, backend="sparse")
        assert np.allclose(dense, sparse, atol=1e-12) and abs(leak_d - leak_s) < 1e-12


def test_sparse_general_gate_branching():
    u = np.array([[S, S * 1j], [S * 1j, S]])
    c = Circuit.from_gates(2, [Gate("U1", (0,), u), Gate("CU", (0, 1), u), Gate("W", (0, 1))])
    e = EmbeddedCircuit(c, 2, 0)
    assert np.allclose(restricted_action(e, "sparse")[0], unitary_of(c))


def test_sparse_state_merge_cancels():
    st_ = SparseState(np.zeros(1, dtype=int), np.zeros((1, 1), dtype=np.uint8), np.ones(1, dtype=complex))
    st_.apply(Gate("H", (0,)))
    st_.apply(Gate("H", (0,)))
    assert len(st_) == 1 and st_.bits[0, 0] == 0


def test_wide_embedding_uses_sparse():
    n = 6
    from qpar.cnot import parallelize_cnot_circuit
    from qpar.generators import random_cnot

    c = random_cnot(n, 20, np.random.default_rng(9))
    r = verify_embedding(parallelize_cnot_circuit(c), c)
    assert r.equivalent and r.backend == "sparse"
