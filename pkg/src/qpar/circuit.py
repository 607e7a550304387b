"""Circuit IR: gates, layered circuits, embeddings, layerization and metrics.

Qubit 0 is the top wire and the most significant bit of a basis-state index.
A multi-qubit gate's matrix is written in the basis of its own qubit tuple,
first listed qubit most significant.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

KINDS = ("H", "X", "Z", "CX", "CZ", "W", "PHASE", "DIAG", "CU", "U1")
ONE_QUBIT = {"H", "X", "Z", "U1"}
TWO_QUBIT = {"CX", "CZ", "W", "PHASE", "CU"}
SYMMETRIC = {"CZ", "W", "PHASE"}
DIAGONAL_KINDS = {"Z", "CZ", "PHASE", "DIAG"}

UNITARY_TOL = 1e-9
ANGLE_TOL = 1e-12

_S = 1 / math.sqrt(2)
H_MATRIX = np.array([[_S, _S], [_S, -_S]], dtype=complex)
X_MATRIX = np.array([[0, 1], [1, 0]], dtype=complex)
Z_MATRIX = np.array([[1, 0], [0, -1]], dtype=complex)
CX_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
CZ_MATRIX = np.diag([1, 1, 1, -1]).astype(complex)
W_MATRIX = 0.5 * np.array(
    [[1, 1, 1, -1], [1, 1, -1, 1], [1, -1, 1, 1], [-1, 1, 1, 1]], dtype=complex
)


class CircuitError(ValueError):
    """Raised for malformed gates or circuits."""


def _as_unitary_params(matrix) -> tuple[complex, ...]:
    m = np.asarray(matrix, dtype=complex)
    if m.shape != (2, 2):
        raise CircuitError(f"expected a 2x2 matrix, got shape {m.shape}")
    if np.max(np.abs(m @ m.conj().T - np.eye(2))) > UNITARY_TOL:
        raise CircuitError("matrix is not unitary within 1e-9")
    return tuple(complex(v) for v in m.reshape(-1))


@dataclass(frozen=True)
class Gate:
    """A gate record.

    ``params`` holds angles for PHASE (one) and DIAG (2**k, indexed by the
    qubit tuple with the first qubit most significant), and the four
    row-major complex entries of the 2x2 block for CU and U1.
    """

    kind: str
    qubits: tuple[int, ...]
    params: tuple = ()

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if kind not in KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        q = self.qubits
        if len(set(q)) != len(q):
            raise CircuitError(f"{kind} has repeated qubits {q}")
        if any(i < 0 for i in q):
            raise CircuitError(f"{kind} has a negative qubit index")
        if kind in ONE_QUBIT and len(q) != 1:
            raise CircuitError(f"{kind} acts on exactly one qubit")
        if kind in TWO_QUBIT and len(q) != 2:
            raise CircuitError(f"{kind} acts on exactly two qubits")
        if kind == "DIAG":
            if len(q) < 1:
                raise CircuitError("DIAG needs at least one qubit")
            if len(self.params) != 2 ** len(q):
                raise CircuitError(
                    f"DIAG on {len(q)} qubits needs {2 ** len(q)} angles, got {len(self.params)}"
                )
            object.__setattr__(self, "params", tuple(float(a) for a in self.params))
        elif kind == "PHASE":
            if len(self.params) != 1:
                raise CircuitError("PHASE carries exactly one angle")
            object.__setattr__(self, "params", (float(self.params[0]),))
        elif kind in ("CU", "U1"):
            p = self.params
            if isinstance(p, np.ndarray) or (len(p) == 2 and not np.isscalar(p[0])):
                p = np.asarray(p)
            object.__setattr__(self, "params", _as_unitary_params(np.reshape(p, (2, 2))))
        elif self.params:
            raise CircuitError(f"{kind} takes no parameters")

    @property
    def block(self) -> np.ndarray:
        """The 2x2 block of a CU or U1 gate."""
        return np.array(self.params, dtype=complex).reshape(2, 2)

    @property
    def is_diagonal(self) -> bool:
        if self.kind in DIAGONAL_KINDS:
            return True
        if self.kind in ("CU", "U1"):
            b = self.block
            return abs(b[0, 1]) <= ANGLE_TOL and abs(b[1, 0]) <= ANGLE_TOL
        return False

    def matrix(self) -> np.ndarray:
        k = self.kind
        if k == "H":
            return H_MATRIX
        if k == "X":
            return X_MATRIX
        if k == "Z":
            return Z_MATRIX
        if k == "CX":
            return CX_MATRIX
        if k == "CZ":
            return CZ_MATRIX
        if k == "W":
            return W_MATRIX
        if k == "U1":
            return self.block
        if k == "CU":
            m = np.eye(4, dtype=complex)
            m[2:, 2:] = self.block
            return m
        return np.diag(np.exp(1j * self.diagonal_angles()))

    def diagonal_angles(self) -> np.ndarray:
        """Phase angles of a diagonal gate, indexed over its own qubit tuple."""
        k = self.kind
        if k == "Z":
            return np.array([0.0, math.pi])
        if k == "CZ":
            return np.array([0.0, 0.0, 0.0, math.pi])
        if k == "PHASE":
            return np.array([0.0, 0.0, 0.0, self.params[0]])
        if k == "DIAG":
            return np.array(self.params)
        if k in ("CU", "U1") and self.is_diagonal:
            d = np.angle(np.diag(self.block))
            return np.array([0.0, 0.0, d[0], d[1]]) if k == "CU" else d
        raise CircuitError(f"{k} gate is not diagonal")

    def approx_eq(self, other: "Gate", tol: float = ANGLE_TOL) -> bool:
        if self.kind != other.kind:
            return False
        if self.kind in SYMMETRIC:
            same = set(self.qubits) == set(other.qubits)
        else:
            same = self.qubits == other.qubits
        if not same or len(self.params) != len(other.params):
            return False
        return all(abs(a - b) <= tol for a, b in zip(self.params, other.params))

    def relabel(self, mapping) -> "Gate":
        return Gate(self.kind, tuple(mapping[q] for q in self.qubits), self.params)

    def __str__(self) -> str:
        from .textformat import format_gate

        return format_gate(self)


def diag_on(gate: Gate, qubits: Sequence[int]) -> np.ndarray:
    """Angles of a diagonal ``gate`` re-expressed over the ordered ``qubits``.

    ``gate.qubits`` must be a subset of ``qubits``.
    """
    qubits = tuple(qubits)
    own = gate.diagonal_angles()
    pos = [qubits.index(q) for q in gate.qubits]
    k = len(qubits)
    out = np.empty(2**k)
    for idx in range(2**k):
        sub = 0
        for p in pos:
            sub = (sub << 1) | ((idx >> (k - 1 - p)) & 1)
        out[idx] = own[sub]
    return out


def phase_gate(theta: float, a: int, b: int) -> Gate:
    return Gate("PHASE", (a, b), (theta,))


def diag_gate(qubits: Sequence[int], angles: Iterable[float]) -> Gate:
    return Gate("DIAG", tuple(qubits), tuple(angles))


def cu_gate(control: int, target: int, u) -> Gate:
    return Gate("CU", (control, target), np.asarray(u, dtype=complex))


def u1_gate(q: int, u) -> Gate:
    return Gate("U1", (q,), np.asarray(u, dtype=complex))


def _check_layer(layer: Sequence[Gate], width: int) -> tuple[Gate, ...]:
    seen: set[int] = set()
    for g in layer:
        if not isinstance(g, Gate):
            raise CircuitError(f"not a gate: {g!r}")
        for q in g.qubits:
            if q >= width:
                raise CircuitError(f"{g.kind} on qubit {q} outside width {width}")
            if q in seen:
                raise CircuitError(f"qubit {q} used twice in one layer")
            seen.add(q)
    return tuple(layer)


@dataclass(frozen=True)
class Circuit:
    """Ordered layers of gates with pairwise disjoint supports per layer."""

    width: int
    layers: tuple[tuple[Gate, ...], ...] = ()

    def __post_init__(self):
        if self.width < 0:
            raise CircuitError("width must be non-negative")
        layers = tuple(_check_layer(layer, self.width) for layer in self.layers)
        object.__setattr__(self, "layers", tuple(l for l in layers if l))

    @classmethod
    def from_gates(cls, width: int, gates: Iterable[Gate]) -> "Circuit":
        """One gate per layer, in sequence order."""
        return cls(width, tuple((g,) for g in gates))

    @classmethod
    def packed(cls, width: int, gates: Iterable[Gate]) -> "Circuit":
        return layerize(cls.from_gates(width, gates))

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def gates(self) -> list[Gate]:
        return [g for layer in self.layers for g in layer]

    def __len__(self) -> int:
        return sum(len(layer) for layer in self.layers)

    def then(self, other: "Circuit") -> "Circuit":
        width = max(self.width, other.width)
        return Circuit(width, self.layers + other.layers)

    def widen(self, width: int) -> "Circuit":
        if width < self.width:
            raise CircuitError("cannot shrink a circuit")
        return Circuit(width, self.layers)

    def inverse(self) -> "Circuit":
        return Circuit(self.width, tuple(tuple(inverse_gate(g) for g in layer) for layer in reversed(self.layers)))

    def relabel(self, mapping, width: int | None = None) -> "Circuit":
        w = self.width if width is None else width
        return Circuit(w, tuple(tuple(g.relabel(mapping) for g in layer) for layer in self.layers))

    def __str__(self) -> str:
        from .textformat import emit_circuit

        return emit_circuit(self)


def inverse_gate(g: Gate) -> Gate:
    if g.kind in ("H", "X", "Z", "CX", "CZ", "W"):
        return g
    if g.kind == "PHASE":
        return Gate("PHASE", g.qubits, (-g.params[0],))
    if g.kind == "DIAG":
        return Gate("DIAG", g.qubits, tuple(-a for a in g.params))
    return Gate(g.kind, g.qubits, g.block.conj().T)


def concat(*circuits: Circuit, width: int | None = None) -> Circuit:
    w = max([c.width for c in circuits] + [width or 0])
    return Circuit(w, tuple(layer for c in circuits for layer in c.layers))


@dataclass(frozen=True)
class EmbeddedCircuit:
    """A circuit on ``n_data + n_anc`` qubits; ancillae are the top indices
    and must start and end in |0>."""

    circuit: Circuit
    n_data: int
    n_anc: int = 0
    phase: complex = field(default=1.0, compare=False)

    def __post_init__(self):
        if self.circuit.width != self.n_data + self.n_anc:
            raise CircuitError(
                f"circuit width {self.circuit.width} != {self.n_data} data + {self.n_anc} ancillae"
            )

    @property
    def depth(self) -> int:
        return self.circuit.depth

    @property
    def width(self) -> int:
        return self.circuit.width


def layerize(c: Circuit) -> Circuit:
    """Greedy as-soon-as-possible packing.

    A gate only moves earlier and never past a gate that shares a qubit, so
    the operator is unchanged and depth never grows.
    """
    frontier = [0] * c.width
    layers: list[list[Gate]] = []
    for g in c.gates:
        slot = max((frontier[q] for q in g.qubits), default=0)
        if slot == len(layers):
            layers.append([])
        layers[slot].append(g)
        for q in g.qubits:
            frontier[q] = slot + 1
    return Circuit(c.width, tuple(tuple(layer) for layer in layers))


@dataclass(frozen=True)
class Metrics:
    depth: int
    width: int
    gate_count: int
    two_qubit_count: int

    def as_dict(self) -> dict:
        return {
            "depth": self.depth,
            "width": self.width,
            "gate_count": self.gate_count,
            "two_qubit_count": self.two_qubit_count,
        }


def metrics(c: Circuit | EmbeddedCircuit) -> Metrics:
    if isinstance(c, EmbeddedCircuit):
        c = c.circuit
    gates = c.gates
    return Metrics(
        depth=c.depth,
        width=c.width,
        gate_count=len(gates),
        two_qubit_count=sum(1 for g in gates if len(g.qubits) >= 2),
    )


def normalize_gate(g: Gate) -> Gate:
    """Canonical spelling: PHASE(pi) becomes CZ; symmetric gates get sorted qubits."""
    if g.kind == "PHASE":
        theta = math.remainder(g.params[0], 2 * math.pi)
        if abs(abs(theta) - math.pi) <= ANGLE_TOL:
            return Gate("CZ", tuple(sorted(g.qubits)))
        return Gate("PHASE", tuple(sorted(g.qubits)), g.params)
    if g.kind in ("CZ", "W"):
        return Gate(g.kind, tuple(sorted(g.qubits)))
    return g


def normalize(c: Circuit) -> Circuit:
    return Circuit(c.width, tuple(tuple(normalize_gate(g) for g in layer) for layer in c.layers))


def unit_phase(z: complex) -> complex:
    return cmath.exp(1j * cmath.phase(z))
