"""Circuit families used for demos, tests and the command line."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .basic import Permutation, controlled_gate, permutation_in_place
from .circuit import Circuit, Gate, H_MATRIX, X_MATRIX, diag_gate, phase_gate

FAMILIES = ("qft", "staircase", "random_cnot", "random_clifford", "random_diag", "css_demo")


def gen_qft(n: int, reverse: bool = False) -> Circuit:
    """QFT scheduled in 2n-1 layers: H(i) in layer 2i, PHASE(i, j) in layer i + j.

    Per qubit the gates keep the textbook order, and any one layer holds the
    disjoint pairs summing to its index plus at most one H. Output qubits
    come out bit-reversed unless ``reverse`` appends the reversal.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    layers: list[list[Gate]] = [[] for _ in range(2 * n - 1)]
    for i in range(n):
        layers[2 * i].append(Gate("H", (i,)))
        for j in range(i + 1, n):
            layers[i + j].append(phase_gate(math.pi / 2 ** (j - i), i, j))
    c = Circuit(n, tuple(tuple(l) for l in layers))
    if reverse:
        c = c.then(permutation_in_place(Permutation(tuple(range(n - 1, -1, -1)))))
    return c


def dft_matrix(n: int) -> np.ndarray:
    dim = 2**n
    jk = np.outer(np.arange(dim), np.arange(dim))
    return np.exp(2j * math.pi * jk / dim) / math.sqrt(dim)


def gen_staircase(n: int, u=X_MATRIX) -> Circuit:
    """Controlled-u from each qubit onto the next, depth n - 1."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2) or not np.allclose(u.conj().T @ u, np.eye(2), atol=1e-9):
        raise ValueError("u must be a 2x2 unitary")
    return Circuit.from_gates(n, [controlled_gate(i, i + 1, u) for i in range(n - 1)])


def random_cnot(n: int, count: int, rng: np.random.Generator) -> Circuit:
    gates = []
    for _ in range(count):
        a, b = rng.choice(n, 2, replace=False)
        gates.append(Gate("CX", (int(a), int(b))))
    return Circuit.from_gates(n, gates)


def random_clifford(n: int, count: int, rng: np.random.Generator) -> Circuit:
    one, two = ("H", "X", "Z"), ("CX", "CZ", "W")
    gates = []
    for _ in range(count):
        if n == 1 or rng.random() < 0.4:
            gates.append(Gate(one[rng.integers(3)], (int(rng.integers(n)),)))
        else:
            a, b = (int(x) for x in rng.choice(n, 2, replace=False))
            gates.append(Gate(two[rng.integers(3)], (a, b)))
    return Circuit.from_gates(n, gates)


def random_diag(n: int, count: int, rng: np.random.Generator) -> Circuit:
    gates = []
    for _ in range(count):
        r = int(rng.integers(4))
        if n == 1 or r == 3:
            k = 1 if n == 1 else int(rng.integers(1, 3))
            qs = tuple(int(x) for x in rng.choice(n, k, replace=False))
            gates.append(diag_gate(qs, rng.uniform(-math.pi, math.pi, 2**k)))
            continue
        a, b = (int(x) for x in rng.choice(n, 2, replace=False))
        if r == 0:
            gates.append(Gate("CX", (a, b)))
        elif r == 1:
            gates.append(Gate("CZ", (a, b)))
        else:
            gates.append(phase_gate(float(rng.uniform(-math.pi, math.pi)), a, b))
    return Circuit.from_gates(n, gates)


def gen_css_demo() -> Circuit:
    """Seven-qubit encoder in the H + CX class (Steane-style layout)."""
    gates = [Gate("H", (q,)) for q in (4, 5, 6)]
    for c, ts in ((0, (1, 2)), (4, (0, 1, 3)), (5, (0, 2, 3)), (6, (1, 2, 3))):
        gates += [Gate("CX", (c, t)) for t in ts]
    return Circuit.from_gates(7, gates)


_RANDOM = {"random_cnot": random_cnot, "random_clifford": random_clifford, "random_diag": random_diag}


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    n: int = 4
    gate_count: int = 0
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {', '.join(FAMILIES)}")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.family == "random_cnot" and self.n < 2 and self.gate_count:
            raise ValueError("random CX circuits need at least 2 qubits")


def generate(spec: GeneratorSpec) -> Circuit:
    if spec.family == "qft":
        return gen_qft(spec.n, bool(spec.params.get("reverse", False)))
    if spec.family == "staircase":
        return gen_staircase(spec.n, spec.params.get("u", X_MATRIX))
    if spec.family == "css_demo":
        return gen_css_demo()
    return gen_random(spec)


def gen_random(spec: GeneratorSpec) -> Circuit:
    try:
        make = _RANDOM[spec.family]
    except KeyError:
        raise ValueError(f"{spec.family!r} is not a random family") from None
    return make(spec.n, spec.gate_count, np.random.default_rng(spec.seed))


NAMED_UNITARIES = {"X": X_MATRIX, "H": H_MATRIX}
