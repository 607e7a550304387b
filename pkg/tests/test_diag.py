import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpar.circuit import CircuitError
from qpar.diag import (
    PhaseVector,
    mask_to_qubits,
    mu,
    mu_coefficients,
    parity_phase_circuit,
    qubits_to_mask,
    read_phase_vector,
    synthesize_diagonal,
    walsh_hadamard,
)
from qpar.gf2 import GF2Matrix, matrix_of_cnot_circuit
from qpar.sim import unitary_of, verify_embedding


def test_cz_coefficients():
    theta = mu_coefficients(PhaseVector([0, 0, 0, math.pi])).theta
    expected = np.array([1, -1, -1, 1]) * math.pi / 4
    assert np.max(np.abs(theta - expected)) < 1e-12


def test_cz_coefficients_by_linear_solve():
    basis = np.stack([mu(s, 2) for s in range(4)], axis=1)
    theta = np.linalg.solve(basis, [0, 0, 0, math.pi])
    assert np.allclose(theta, mu_coefficients(PhaseVector([0, 0, 0, math.pi])).theta, atol=1e-12)


def test_constant_and_zero():
    c = mu_coefficients(PhaseVector(np.full(8, 0.7))).theta
    assert math.isclose(c[0], 0.7) and np.allclose(c[1:], 0)
    assert synthesize_diagonal(PhaseVector(np.zeros(4))).depth == 0


def test_mask_convention():
    assert qubits_to_mask((0,), 3) == 0b100
    assert mask_to_qubits(0b011, 3) == (1, 2)
    # mu_{qubit 0} flips sign on the upper half
    assert list(mu(0b10, 2)) == [1, 1, -1, -1]


def test_butterfly_matches_direct_sum(rng):
    for n in range(1, 6):
        v = rng.normal(size=2**n)
        direct = np.array([np.sum(mu(s, n) * v) for s in range(2**n)])
        assert np.allclose(walsh_hadamard(v), direct)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_round_trip(n, seed):
    omega = np.random.default_rng(seed).uniform(-math.pi, math.pi, 2**n)
    coeffs = mu_coefficients(PhaseVector(omega))
    assert np.allclose(coeffs.reconstruct(), omega, atol=1e-10)


def test_subset_lookup():
    coeffs = mu_coefficients(PhaseVector([0, 0, 0, math.pi]))
    assert math.isclose(coeffs[(0, 1)], math.pi / 4)
    assert set(coeffs.subsets()) == {(), (0,), (1,), (0, 1)}


def test_parity_circuit_two_qubits():
    c = parity_phase_circuit((0, 1), 0.5, 2)
    assert [g.kind for g in c.gates] == ["CX", "DIAG", "CX"]
    assert np.allclose(np.diag(unitary_of(c)), np.exp(0.5j * np.array([1, -1, -1, 1])))


def test_parity_circuit_sign_pattern():
    # three-qubit parity gives the Thue-Morse sign sequence
    c = parity_phase_circuit((0, 1, 2), 1.0, 3)
    signs = np.round(np.angle(np.diag(unitary_of(c)))).astype(int)
    assert list(signs) == [1, -1, -1, 1, -1, 1, 1, -1]


@pytest.mark.parametrize("s", [(0,), (1, 3), (0, 2, 3), (0, 1, 2, 3, 4)])
def test_parity_circuit_structure(s):
    n = 5
    c = parity_phase_circuit(s, 0.3, n)
    cx = [g for g in c.gates if g.kind == "CX"]
    assert len(cx) == 2 * (len(s) - 1)
    assert c.depth == 2 * math.ceil(math.log2(len(s))) + 1 if len(s) > 1 else c.depth == 1
    # the CX part alone is the identity map
    from qpar.circuit import Circuit

    assert matrix_of_cnot_circuit(Circuit.from_gates(n, cx)) == GF2Matrix.identity(n)


def test_parity_terms_add(rng):
    a, b = rng.uniform(-2, 2, 2)
    ua = unitary_of(parity_phase_circuit((0, 2), a, 3))
    ub = unitary_of(parity_phase_circuit((0, 2), b, 3))
    uab = unitary_of(parity_phase_circuit((0, 2), a + b, 3))
    assert np.allclose(ua @ ub, uab)


def test_exact_phase_synthesis(rng):
    for n in range(1, 5):
        for _ in range(25):
            p = PhaseVector(rng.uniform(-math.pi, math.pi, 2**n))
            c = synthesize_diagonal(p)
            assert verify_embedding(c, p.matrix(), tol=1e-9, up_to_phase=False).equivalent


def test_caps():
    with pytest.raises(CircuitError):
        synthesize_diagonal(PhaseVector(np.zeros(2**7)))
    with pytest.raises(ValueError):
        PhaseVector(np.zeros(3))


def test_read_phase_vector():
    p = read_phase_vector("# cz\n0\n0\n0\n3.141592653589793\n")
    assert p.n == 2
    with pytest.raises(CircuitError, match="line 2"):
        read_phase_vector("0\nabc\n")
