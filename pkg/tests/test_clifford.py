import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpar.circuit import Circuit, Gate, diag_gate, phase_gate
from qpar.clifford import (
    RuleVerificationFailure,
    ShapeError,
    comb_hadamards,
    default_rules,
    expand_clifford,
    group_zw,
    load_rule_table,
    normal_form,
    parallelize_clifford,
    parse_pattern,
    pattern_matrix,
)
from qpar.errors import NotParallelizable
from qpar.generators import gen_css_demo, gen_staircase, random_clifford
from qpar.sim import equal_up_to_phase, unitary_of, verify_embedding


def pair(g):
    return tuple(sorted(g.qubits))


# ---------------------------------------------------------------- rule table


def test_rule_table_verifies():
    rules = default_rules()
    assert len(rules) >= 25
    assert max(r.check() for r in rules.rules) <= 1e-12


def test_corrupted_rule_rejected():
    with pytest.raises(RuleVerificationFailure, match="bad"):
        load_rule_table("bad  H a, CX a b ; CZ a b, H a ; 1\n")
    with pytest.raises(RuleVerificationFailure, match="x_past_z"):
        load_rule_table("x_past_z  Z a, X a ; X a, Z a ; 1\n")


def test_rule_table_syntax_error():
    with pytest.raises(RuleVerificationFailure, match="line 1"):
        load_rule_table("broken H a ; H a\n")


def test_pattern_matrix_time_order():
    # X then Z as a circuit is the matrix Z @ X
    m = pattern_matrix(parse_pattern("X a, Z a"))
    assert np.allclose(m[:2, :2] if m.shape[0] == 2 else m, m)
    z, x = np.diag([1, -1]), np.array([[0, 1], [1, 0]])
    assert np.allclose(m, np.kron(z @ x, np.eye(m.shape[0] // 2)))


def test_symmetric_gates_match_either_way():
    rules = default_rules()
    out, ph, name = rules.rewrite([Gate("CZ", (1, 0)), Gate("CZ", (0, 1))])
    assert out == [] and name == "cz_cancel"


def test_swap_disjoint_is_structural():
    out, ph = default_rules().swap(Gate("CZ", (0, 1)), Gate("W", (2, 3)))
    assert out == [Gate("W", (2, 3)), Gate("CZ", (0, 1))] and ph == 1


# ---------------------------------------------------------------- Hadamard combing


def test_comb_examples():
    c = Circuit.from_gates(2, [Gate("H", (0,)), Gate("CX", (0, 1))])
    body, final = comb_hadamards(c)
    assert body.gates == [Gate("W", (0, 1))] and final == (0,)

    c = Circuit.from_gates(2, [Gate("H", (1,)), Gate("CX", (0, 1)), Gate("H", (1,))])
    body, final = comb_hadamards(c)
    assert body.gates == [Gate("CZ", (0, 1))] and final == ()


def test_comb_preserves_unitary(rng):
    for _ in range(30):
        c = random_clifford(3, 20, rng)
        body, final = comb_hadamards(c)
        assert all(g.kind != "H" for g in body.gates)
        full = body.then(Circuit.from_gates(3, [Gate("H", (q,)) for q in final]))
        assert equal_up_to_phase(unitary_of(full), unitary_of(c))[0]


# ---------------------------------------------------------------- grouping


def test_zz_cancels():
    out, ph = group_zw(Circuit.from_gates(2, [Gate("CZ", (0, 1)), Gate("CZ", (1, 0))]))
    assert out.gates == [] and ph == 1


def test_wzw_becomes_zwz():
    c = Circuit.from_gates(2, [Gate("W", (0, 1)), Gate("CZ", (0, 1)), Gate("W", (0, 1))])
    out, ph = group_zw(c)
    assert [g.kind for g in out.gates] == ["CZ", "W", "CZ"]
    assert np.allclose(unitary_of(c), ph * unitary_of(out))


def _s3_elements():
    """Closure of {z, w} on one pair, keyed by unitary up to phase."""
    z = unitary_of(Circuit.from_gates(2, [Gate("CZ", (0, 1))]))
    w = unitary_of(Circuit.from_gates(2, [Gate("W", (0, 1))]))
    elems = [np.eye(4)]
    frontier = [np.eye(4)]
    while frontier:
        nxt = []
        for m in frontier:
            for g in (z, w):
                p = g @ m
                if not any(equal_up_to_phase(p, e)[0] for e in elems):
                    elems.append(p)
                    nxt.append(p)
        frontier = nxt
    return elems


def test_s3_has_six_elements():
    assert len(_s3_elements()) == 6


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(["CZ", "W"]), max_size=14))
def test_single_pair_words_reduce(word):
    c = Circuit.from_gates(2, [Gate(k, (0, 1)) for k in word])
    out, ph = group_zw(c)
    assert len(out.gates) <= 3
    assert all(g.kind in ("CZ", "W") for g in out.gates)
    assert np.allclose(unitary_of(c), ph * unitary_of(out), atol=1e-9)


def test_single_w_normal_form():
    nf = normal_form(Circuit.from_gates(2, [Gate("W", (0, 1))]))
    assert nf.z2 == (Gate("CZ", (0, 1)),)
    assert nf.z1 == () and nf.z3 == () and nf.cnot_block == ()


# ---------------------------------------------------------------- normal form invariants


def check_normal_form(c, nf):
    assert all(g.kind in ("X", "CX") for g in nf.cnot_block)
    assert all(g.kind in ("Z", "CZ") for g in nf.z1 + nf.z3)
    assert all(g.kind == "CZ" for g in nf.z2)
    # each band holds a gate at most once
    for band in (nf.z1, nf.z2, nf.z3):
        keys = [(g.kind, pair(g)) for g in band]
        assert len(keys) == len(set(keys))
    # no pair carries CZ in both outer bands without its middle gate
    mid = {pair(g) for g in nf.z2}
    outer1 = {pair(g) for g in nf.z1 if g.kind == "CZ"}
    outer3 = {pair(g) for g in nf.z3 if g.kind == "CZ"}
    assert not ((outer1 & outer3) - mid)
    # no H to the left of any multi-qubit gate, except the two full layers
    out = nf.to_circuit()
    assert equal_up_to_phase(unitary_of(c), nf.phase * unitary_of(out))[0]
    assert np.allclose(unitary_of(c), nf.phase * unitary_of(out), atol=1e-9)


def test_random_normal_forms(rng):
    for _ in range(40):
        n = int(rng.integers(1, 6))
        c = random_clifford(n, int(rng.integers(0, 41)), rng)
        check_normal_form(c, normal_form(c))


def test_normal_form_comb_has_no_inner_h(rng):
    c = random_clifford(4, 30, rng)
    body, _ = comb_hadamards(expand_clifford(c))
    assert not any(g.kind == "H" for g in body.gates)


# ---------------------------------------------------------------- parallelization


def test_hadamard_layer_depth_one():
    c = Circuit.from_gates(5, [Gate("H", (q,)) for q in range(5)])
    e = parallelize_clifford(c)
    assert e.depth == 1 and verify_embedding(e, c).equivalent


def test_css_demo():
    c = gen_css_demo()
    e = parallelize_clifford(c)
    assert verify_embedding(e, c).equivalent


def test_tracked_phase_is_exact(rng):
    for _ in range(20):
        c = random_clifford(3, 25, rng)
        e = parallelize_clifford(c)
        r = verify_embedding(e, unitary_of(c) / e.phase, up_to_phase=False)
        assert r.equivalent


def test_expanded_gates():
    y = np.array([[0, 1], [-1, 0]])
    c = Circuit.from_gates(
        3,
        [Gate("CU", (0, 1), y), phase_gate(math.pi, 1, 2), Gate("U1", (2,), np.array([[1, 1], [1, -1]]) / math.sqrt(2))],
    )
    assert verify_embedding(parallelize_clifford(c), c).equivalent


def test_phase_gate_rejected():
    c = Circuit.from_gates(1, [diag_gate((0,), (0, math.pi / 2))])
    with pytest.raises(ShapeError, match="phase"):
        normal_form(c)


def test_h_staircase_rejected():
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    with pytest.raises(NotParallelizable, match="linear depth"):
        parallelize_clifford(gen_staircase(3, h))
