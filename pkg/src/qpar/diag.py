"""Exact synthesis of diagonal unitaries from parity phases.

A phase vector omega (one angle per basis state) is expanded in the +-1
parity vectors mu_s(a) = (-1)^{|a & s|}. Each term theta_s * mu_s is a CX
parity tree onto one qubit of s, a one-qubit phase, and the tree undone.
The number of terms can reach 2**n; that blow-up is unavoidable for generic
diagonals, so synthesis is capped at a few qubits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import Circuit, CircuitError, Gate, diag_gate

MU_CAP = 12
SYNTH_CAP = 6
PRUNE = 1e-12


@dataclass(frozen=True)
class PhaseVector:
    omega: np.ndarray

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float).reshape(-1)
        n = omega.size.bit_length() - 1
        if omega.size == 0 or 2**n != omega.size:
            raise ValueError(f"phase vector length {omega.size} is not a power of two")
        object.__setattr__(self, "omega", omega)

    @property
    def n(self) -> int:
        return self.omega.size.bit_length() - 1

    def matrix(self) -> np.ndarray:
        return np.diag(np.exp(1j * self.omega))


@dataclass(frozen=True)
class ParityCoefficients:
    """theta indexed by subset mask; mask bit (n-1-j) stands for qubit j."""

    n: int
    theta: np.ndarray

    def subsets(self) -> dict[tuple[int, ...], float]:
        return {mask_to_qubits(s, self.n): float(t) for s, t in enumerate(self.theta)}

    def __getitem__(self, qubits: Sequence[int]) -> float:
        return float(self.theta[qubits_to_mask(qubits, self.n)])

    def reconstruct(self) -> np.ndarray:
        return walsh_hadamard(self.theta)


def qubits_to_mask(qubits: Sequence[int], n: int) -> int:
    return sum(1 << (n - 1 - q) for q in qubits)


def mask_to_qubits(mask: int, n: int) -> tuple[int, ...]:
    return tuple(q for q in range(n) if (mask >> (n - 1 - q)) & 1)


def mu(s: int, n: int) -> np.ndarray:
    a = np.arange(2**n)
    return 1 - 2 * (np.array([bin(x).count("1") for x in (a & s)]) & 1)


def walsh_hadamard(v: np.ndarray) -> np.ndarray:
    """Unnormalized butterfly: out[s] = sum_a (-1)^{|a & s|} v[a]."""
    out = np.array(v, dtype=float)
    h = 1
    while h < out.size:
        view = out.reshape(-1, 2, h)
        a, b = view[:, 0, :].copy(), view[:, 1, :].copy()
        view[:, 0, :] = a + b
        view[:, 1, :] = a - b
        h *= 2
    return out


def mu_coefficients(p: PhaseVector) -> ParityCoefficients:
    if p.n > MU_CAP:
        raise CircuitError(f"{p.n} qubits exceeds cap {MU_CAP}")
    return ParityCoefficients(p.n, walsh_hadamard(p.omega) / 2**p.n)


def parity_phase_circuit(s: Sequence[int], theta: float, n: int) -> Circuit:
    """Phase +theta on even parity of ``s`` and -theta on odd, no ancillae."""
    s = sorted(set(s))
    if not s:
        raise ValueError("empty subset is a global phase, not a parity term")
    survivors = s[::-1]  # largest index first: it collects the parity
    tree: list[list[Gate]] = []
    while len(survivors) > 1:
        layer, keep = [], []
        for i in range(0, len(survivors), 2):
            if i + 1 < len(survivors):
                layer.append(Gate("CX", (survivors[i + 1], survivors[i])))
            keep.append(survivors[i])
        tree.append(layer)
        survivors = keep
    rep = s[-1]
    middle = [[diag_gate((rep,), (theta, -theta))]]
    layers = tree + middle + tree[::-1]
    return Circuit(n, tuple(tuple(l) for l in layers))


def synthesize_diagonal(p: PhaseVector, cap: int = SYNTH_CAP) -> Circuit:
    """CX and one-qubit diagonal gates realizing diag(e^{i omega}) exactly.

    The constant term theta_empty is emitted as diag(e^{it}, e^{it}) on
    qubit 0 so the result matches in exact-phase mode.
    """
    n = p.n
    if n > cap:
        raise CircuitError(f"{n} qubits exceeds synthesis cap {cap}")
    coeffs = mu_coefficients(p)
    out = Circuit(n)
    t0 = float(coeffs.theta[0])
    if abs(t0) > PRUNE:
        out = out.then(Circuit.from_gates(n, [diag_gate((0,), (t0, t0))]))
    for mask in range(1, 2**n):
        t = float(coeffs.theta[mask])
        if abs(t) > PRUNE:
            out = out.then(parity_phase_circuit(mask_to_qubits(mask, n), t, n))
    return out


def read_phase_vector(text: str) -> PhaseVector:
    """One angle per line, basis order with qubit 0 most significant."""
    vals = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            vals.append(float(line))
        except ValueError:
            raise CircuitError(f"line {lineno}: not an angle: {line!r}") from None
    return PhaseVector(np.array(vals))


def phases_mod_2pi(omega: np.ndarray) -> np.ndarray:
    return np.mod(omega, 2 * math.pi)
