"""End-to-end acceptance checks, one test per criterion.

Run ``pytest tests/test_acceptance.py`` (or this file directly); the terminal
summary prints a PASS/FAIL line for every criterion.
"""
import itertools
import math
import time

import numpy as np
import pytest

from qpar.basic import (
    ControlledSeries,
    Permutation,
    ceil_log2,
    controlled_gate,
    parallelize_commuting_series,
    parallelize_diagonal_series,
    parallelize_fanout,
    permutation_in_place,
    permutation_with_ancillae,
)
from qpar.circuit import Circuit, EmbeddedCircuit, Gate, diag_gate
from qpar.cli import PASSES, run_pass
from qpar.clifford import comb_hadamards, default_rules, expand_clifford, normal_form, parallelize_clifford
from qpar.cnot import load_depth_constants, parallelize_cnot_circuit, parallelize_cnot_diagonal
from qpar.diag import PhaseVector, mu_coefficients, synthesize_diagonal
from qpar.errors import NotParallelizable
from qpar.circuit import CircuitError
from qpar.generators import dft_matrix, gen_qft, gen_staircase, random_clifford, random_cnot, random_diag
from qpar.gf2 import data_action, matrix_of_cnot_circuit
from qpar.sim import equal_up_to_phase, unitary_of, verify_embedding

TOL = 1e-9


def random_unitary(rng):
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / abs(np.diag(r)))


@pytest.mark.criterion("1 permutations: depth 4 with ancillae, <= 6 in place, < 10 s")
def test_permutations():
    start = time.perf_counter()
    perms = [Permutation(p) for n in range(1, 6) for p in itertools.permutations(range(n))]
    rng = np.random.default_rng(8)
    perms += [Permutation(tuple(int(x) for x in rng.permutation(8))) for _ in range(100)]
    for p in perms:
        e = permutation_with_ancillae(p)
        assert e.depth == 4, p
        assert verify_embedding(e, p.matrix(), tol=TOL).equivalent, p
        c = permutation_in_place(p)
        assert c.depth <= 6, p
        assert verify_embedding(c, p.matrix(), tol=TOL).equivalent, p
    assert time.perf_counter() - start < 10


@pytest.mark.criterion("2 fan-out: depth 2 ceil(log2 k) + 1 for k = 1..8")
def test_fanout():
    rng = np.random.default_rng(2)
    for k in range(1, 9):
        items = tuple((t, random_unitary(rng)) for t in range(1, k + 1))
        s = ControlledSeries(0, items, k + 1)
        e = parallelize_fanout(s)
        assert e.depth == 2 * ceil_log2(k) + 1, k
        if e.width <= 11:
            assert verify_embedding(e, s.to_circuit(), tol=TOL).equivalent, k


@pytest.mark.criterion("3 diagonal and commuting series: 50 + 50 instances, depth <= 2 ceil(log2 g) + 3")
def test_series():
    rng = np.random.default_rng(3)
    for i in range(50):
        k = 1 + i % 2
        g = 1 + i % 4
        support = tuple(int(x) for x in rng.choice(k + 1, k, replace=False))
        gates = [diag_gate(support, rng.uniform(-math.pi, math.pi, 2**k)) for _ in range(g)]
        e = parallelize_diagonal_series(gates, k + 1)
        assert e.width <= 10
        ref = Circuit.from_gates(k + 1, gates)
        assert verify_embedding(e, ref, tol=TOL, up_to_phase=False).equivalent
    for i in range(50):
        g = 1 + i % 5
        t = random_unitary(rng)
        gates = [
            controlled_gate(c, g, t @ np.diag(np.exp(1j * rng.uniform(-3, 3, 2))) @ t.conj().T) for c in range(g)
        ]
        e = parallelize_commuting_series(gates, g + 1)
        assert e.width <= 10
        assert e.depth <= 2 * ceil_log2(g) + 3
        assert verify_embedding(e, Circuit.from_gates(g + 1, gates), tol=TOL, up_to_phase=False).equivalent


@pytest.mark.criterion("4 CNOT resynthesis: exact equivalence, GF(2) to n = 256, pinned depth and ancilla constants")
def test_cnot_resynthesis():
    rng = np.random.default_rng(4)
    for _ in range(100):
        n = int(rng.integers(3, 6))
        c = random_cnot(n, int(rng.integers(0, 61)), rng)
        assert verify_embedding(parallelize_cnot_circuit(c), c, tol=TOL, up_to_phase=False).equivalent
    for n in (8, 32, 100, 256):
        c = random_cnot(n, 2 * n, rng)
        e = parallelize_cnot_circuit(c)
        m, anc = data_action(e.circuit, n)
        assert m == matrix_of_cnot_circuit(c) and not any(anc)
    k = load_depth_constants("cnot")
    for n in (8, 16, 32, 64):
        e = parallelize_cnot_circuit(random_cnot(n, n * n, np.random.default_rng(n)))
        assert e.depth <= k.a * ceil_log2(n) + k.b
        assert e.n_anc <= k.c * n * n


@pytest.mark.criterion("5 CNOT + diagonal: 100 instances verify in exact-phase mode")
def test_cnot_diagonal():
    rng = np.random.default_rng(5)
    for _ in range(100):
        n = int(rng.integers(1, 5))
        c = random_diag(n, int(rng.integers(0, 41)), rng)
        e = parallelize_cnot_diagonal(c)
        assert verify_embedding(e, c, tol=TOL, up_to_phase=False).equivalent


@pytest.mark.criterion("6 diagonal synthesis: exact-phase reconstruction and the CZ coefficients")
def test_diagonal_synthesis():
    theta = mu_coefficients(PhaseVector([0, 0, 0, math.pi])).theta
    assert np.max(np.abs(theta - np.array([1, -1, -1, 1]) * math.pi / 4)) < 1e-12
    rng = np.random.default_rng(6)
    for i in range(100):
        n = 1 + i % 4
        p = PhaseVector(rng.uniform(-math.pi, math.pi, 2**n))
        assert verify_embedding(synthesize_diagonal(p), p.matrix(), tol=TOL, up_to_phase=False).equivalent


def _h_never_left_of_multiqubit(c, nf):
    """No H before a multi-qubit gate on its qubit, except the two full H layers."""
    body, _ = comb_hadamards(expand_clifford(c))
    if any(g.kind == "H" for g in body.gates):
        return False
    timeline = list(nf.cnot_block) + list(nf.z1) + ["full"] + list(nf.z2) + ["full"] + list(nf.z3)
    timeline += [Gate("H", (q,)) for q in nf.final_h]
    pending = set()
    for g in timeline:
        if g == "full":
            continue
        if g.kind == "H":
            pending.add(g.qubits[0])
        elif len(g.qubits) > 1 and pending & set(g.qubits):
            return False
    return True


@pytest.mark.criterion("7 Clifford pipeline: verified rules, 200 instances, band purity, < 60 s")
def test_clifford():
    start = time.perf_counter()
    rules = default_rules()
    assert sum(r.check() > 1e-12 for r in rules.rules) == 0
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(1, 6))
        c = random_clifford(n, int(rng.integers(0, 41)), rng)
        nf = normal_form(c)
        assert all(g.kind in ("X", "CX") for g in nf.cnot_block)
        assert all(g.kind in ("Z", "CZ") for g in nf.z1 + nf.z3)
        assert all(g.kind == "CZ" for g in nf.z2)
        assert _h_never_left_of_multiqubit(c, nf)
        u = unitary_of(c)
        assert equal_up_to_phase(u, unitary_of(nf.to_circuit()), tol=TOL)[0]
        assert verify_embedding(parallelize_clifford(c), c, tol=TOL).equivalent
    assert time.perf_counter() - start < 60


@pytest.mark.criterion("8 QFT: depth 2n - 1 for n = 1..64, DFT for n <= 6")
def test_qft():
    for n in range(1, 65):
        assert gen_qft(n).depth == 2 * n - 1
    for n in range(1, 7):
        assert np.max(np.abs(unitary_of(gen_qft(n, reverse=True)) - dft_matrix(n))) < TOL


@pytest.mark.criterion("9 staircases: H rejected by every pass, X and diagonal accepted")
def test_staircases():
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    stair = gen_staircase(4, h)
    for name in PASSES:
        with pytest.raises(CircuitError):
            run_pass(name, stair)
    with pytest.raises(NotParallelizable, match="linear depth"):
        run_pass("auto", stair)
    for u in (np.array([[0, 1], [1, 0]]), np.diag([1, np.exp(0.9j)]), np.diag([np.exp(0.2j), np.exp(-1.1j)])):
        c = gen_staircase(5, u)
        e, _ = run_pass("auto", c)
        assert verify_embedding(e, unitary_of(c) / e.phase, tol=TOL, up_to_phase=False).equivalent


def _drop_gate(e: EmbeddedCircuit, index: int) -> EmbeddedCircuit:
    gates = e.circuit.gates
    c = Circuit.from_gates(e.width, gates[:index] + gates[index + 1 :])
    return EmbeddedCircuit(c, e.n_data, e.n_anc, e.phase)


@pytest.mark.criterion("10 negative control: deleting one gate breaks verification")
def test_negative_control():
    rng = np.random.default_rng(10)
    c1 = random_cnot(4, 20, rng)
    c2 = random_diag(3, 15, rng)
    c3 = random_clifford(4, 25, rng)
    p = Permutation((2, 0, 3, 1))
    pv = PhaseVector(rng.uniform(-3, 3, 8))
    pairs = [
        (parallelize_cnot_circuit(c1), unitary_of(c1)),
        (parallelize_cnot_diagonal(c2), unitary_of(c2)),
        (parallelize_clifford(c3), unitary_of(c3)),
        (permutation_with_ancillae(p), p.matrix()),
        (EmbeddedCircuit(synthesize_diagonal(pv), 3, 0), pv.matrix()),
    ]
    for e, ref in pairs:
        ref = ref / e.phase
        assert verify_embedding(e, ref, tol=TOL, up_to_phase=False).equivalent
        for i in range(len(e.circuit.gates)):
            assert not verify_embedding(_drop_gate(e, i), ref, tol=TOL, up_to_phase=False).equivalent, i


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
