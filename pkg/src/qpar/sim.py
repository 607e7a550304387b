"""Dense state-vector / unitary oracle and the ancilla-embedding checker.

Two simulators back the checker. The dense one builds full state vectors and
is capped at ``WIDTH_CAP`` qubits. The sparse one keeps only nonzero basis
terms as bit rows and handles wide circuits whose gates mostly permute basis
states (CX trees over many ancillae), which is what the parallelizers emit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, CircuitError, EmbeddedCircuit, Gate

WIDTH_CAP = 12
DEFAULT_TOL = 1e-9
_PRUNE = 1e-13


class WidthCapExceeded(CircuitError):
    pass


def basis_state(n: int, index: int) -> np.ndarray:
    psi = np.zeros(2**n, dtype=complex)
    psi[index] = 1.0
    return psi


def _apply_gate_dense(psi: np.ndarray, g: Gate) -> np.ndarray:
    # psi has shape (batch, 2, ..., 2); qubit q lives on axis 1 + q.
    k = len(g.qubits)
    axes = [1 + q for q in g.qubits]
    m = g.matrix().reshape((2,) * (2 * k))
    out = np.tensordot(m, psi, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes)


def _run_dense(c: Circuit, states: np.ndarray) -> np.ndarray:
    batch = states.shape[0]
    psi = states.reshape((batch,) + (2,) * c.width)
    for layer in c.layers:
        for g in layer:
            psi = _apply_gate_dense(psi, g)
    return psi.reshape(batch, 2**c.width)


def apply_state(c: Circuit, state) -> np.ndarray:
    """Apply the layers of ``c`` in order to a state vector."""
    state = np.asarray(state, dtype=complex)
    if state.shape != (2**c.width,):
        raise CircuitError(f"state has {state.shape[0]} amplitudes, circuit width is {c.width}")
    if c.width > WIDTH_CAP + 8:
        raise WidthCapExceeded(f"width {c.width} too large for dense simulation")
    return _run_dense(c, state[None, :])[0]


def unitary_of(c: Circuit, cap: int = WIDTH_CAP) -> np.ndarray:
    """Column ``a`` is the circuit applied to basis state ``a``."""
    if c.width > cap:
        raise WidthCapExceeded(f"width {c.width} exceeds cap {cap}")
    dim = 2**c.width
    return _run_dense(c, np.eye(dim, dtype=complex)).T


def equal_up_to_phase(u, v, tol: float = DEFAULT_TOL) -> tuple[bool, complex]:
    """Whether ``u == e^{i phi} v`` entrywise; phi is read off v's largest entry."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch {u.shape} vs {v.shape}")
    idx = np.unravel_index(np.argmax(np.abs(v)), v.shape)
    if abs(v[idx]) == 0:
        return bool(np.max(np.abs(u), initial=0.0) <= tol), 1.0 + 0j
    ratio = u[idx] / v[idx]
    phase = ratio / abs(ratio) if abs(ratio) > 0 else 1.0 + 0j
    dev = np.max(np.abs(u - phase * v), initial=0.0)
    return bool(dev <= tol), complex(phase)


# ---------------------------------------------------------------- sparse


class SparseState:
    """Superposition over labelled inputs: one row per (input label, basis) term."""

    def __init__(self, labels: np.ndarray, bits: np.ndarray, amps: np.ndarray):
        self.labels = labels
        self.bits = bits
        self.amps = amps

    def __len__(self) -> int:
        return len(self.amps)

    def _merge(self) -> None:
        if len(self.amps) == 0:
            return
        packed = np.packbits(self.bits, axis=1)
        lab = self.labels.astype(">u4").view(np.uint8).reshape(-1, 4)
        keys = np.concatenate([lab, packed], axis=1)
        uniq, first, inv = np.unique(keys, axis=0, return_index=True, return_inverse=True)
        inv = inv.reshape(-1)
        amps = np.bincount(inv, weights=self.amps.real, minlength=len(uniq)) + 1j * np.bincount(
            inv, weights=self.amps.imag, minlength=len(uniq)
        )
        keep = np.abs(amps) > _PRUNE
        self.labels = self.labels[first][keep]
        self.bits = self.bits[first][keep]
        self.amps = amps[keep]

    def apply(self, g: Gate) -> None:
        q = g.qubits
        b = self.bits
        kind = g.kind
        if kind == "X":
            b[:, q[0]] ^= 1
            return
        if kind == "CX":
            b[:, q[1]] ^= b[:, q[0]]
            return
        if g.is_diagonal:
            idx = np.zeros(len(self.amps), dtype=np.int64)
            for qq in q:
                idx = (idx << 1) | b[:, qq]
            self.amps = self.amps * np.exp(1j * g.diagonal_angles())[idx]
            return
        m = g.matrix()
        k = len(q)
        if kind in ("CU", "U1"):
            blk = g.block
            if abs(blk[0, 0]) <= 1e-12 and abs(blk[1, 1]) <= 1e-12:
                t = q[-1]
                sel = b[:, q[0]] == 1 if kind == "CU" else np.ones(len(self.amps), dtype=bool)
                inbit = b[sel, t].astype(np.int64)
                self.amps[sel] = self.amps[sel] * blk[1 - inbit, inbit]
                b[sel, t] ^= 1
                return
        idx = np.zeros(len(self.amps), dtype=np.int64)
        for qq in q:
            idx = (idx << 1) | b[:, qq]
        parts_bits, parts_amps, parts_labels = [], [], []
        for j in range(2**k):
            col = m[j, idx]
            nz = np.abs(col) > _PRUNE
            if not nz.any():
                continue
            nb = b[nz].copy()
            for pos, qq in enumerate(q):
                nb[:, qq] = (j >> (k - 1 - pos)) & 1
            parts_bits.append(nb)
            parts_amps.append(self.amps[nz] * col[nz])
            parts_labels.append(self.labels[nz])
        self.bits = np.concatenate(parts_bits)
        self.amps = np.concatenate(parts_amps)
        self.labels = np.concatenate(parts_labels)
        self._merge()


# ---------------------------------------------------------------- embedding


@dataclass(frozen=True)
class VerificationReport:
    equivalent: bool
    subspace_preserved: bool
    global_phase: complex
    max_deviation: float
    leakage: float = 0.0
    backend: str = "dense"

    def __bool__(self) -> bool:
        return self.equivalent


def _reference_unitary(reference, n_data: int) -> np.ndarray:
    if isinstance(reference, EmbeddedCircuit):
        reference = reference.circuit
    if isinstance(reference, Circuit):
        if reference.width != n_data:
            raise CircuitError(f"reference width {reference.width} != data width {n_data}")
        return unitary_of(reference)
    u = np.asarray(reference, dtype=complex)
    if u.shape != (2**n_data, 2**n_data):
        raise CircuitError(f"reference matrix shape {u.shape} does not match {n_data} data qubits")
    return u


def restricted_action(
    e: EmbeddedCircuit, backend: str = "auto", cap: int = WIDTH_CAP
) -> tuple[np.ndarray, float, str]:
    """Block of ``e`` on the ancillae-zero subspace, plus the worst leaked norm."""
    n, m = e.n_data, e.n_anc
    if backend == "auto":
        backend = "dense" if e.width <= cap else "sparse"
    if backend == "dense":
        if e.width > cap:
            raise WidthCapExceeded(f"total width {e.width} exceeds cap {cap}")
        states = np.zeros((2**n, 2 ** (n + m)), dtype=complex)
        states[np.arange(2**n), np.arange(2**n) << m] = 1.0
        out = _run_dense(e.circuit, states).reshape(2**n, 2**n, 2**m)
        block = out[:, :, 0].T
        leak = float(np.max(np.linalg.norm(out[:, :, 1:].reshape(2**n, -1), axis=1), initial=0.0))
        return block, leak, "dense"
    if backend != "sparse":
        raise ValueError(f"unknown backend {backend!r}")
    state = SparseState(
        np.arange(2**n),
        np.zeros((2**n, n + m), dtype=np.uint8),
        np.ones(2**n, dtype=complex),
    )
    for pos in range(n):
        state.bits[:, pos] = (np.arange(2**n) >> (n - 1 - pos)) & 1
    for layer in e.circuit.layers:
        for g in layer:
            state.apply(g)
    data_idx = np.zeros(len(state), dtype=np.int64)
    for pos in range(n):
        data_idx = (data_idx << 1) | state.bits[:, pos]
    clean = ~state.bits[:, n:].any(axis=1) if m else np.ones(len(state), dtype=bool)
    block = np.zeros((2**n, 2**n), dtype=complex)
    np.add.at(block, (data_idx[clean], state.labels[clean]), state.amps[clean])
    leaked = np.zeros(2**n)
    np.add.at(leaked, state.labels[~clean], np.abs(state.amps[~clean]) ** 2)
    return block, float(np.sqrt(leaked.max(initial=0.0))), "sparse"


def verify_embedding(
    e: EmbeddedCircuit | Circuit,
    reference,
    tol: float = DEFAULT_TOL,
    up_to_phase: bool = True,
    backend: str = "auto",
    cap: int = WIDTH_CAP,
) -> VerificationReport:
    """Check that ``e`` restricted to ancillae = |0> acts as ``reference``.

    ``reference`` is a Circuit on the data qubits or its unitary matrix.
    """
    if isinstance(e, Circuit):
        e = EmbeddedCircuit(e, e.width, 0)
    ref = _reference_unitary(reference, e.n_data)
    block, leak, used = restricted_action(e, backend=backend, cap=cap)
    preserved = leak <= tol
    if up_to_phase:
        _, phase = equal_up_to_phase(block, ref, tol)
    else:
        phase = 1.0 + 0j
    dev = float(np.max(np.abs(block - phase * ref), initial=0.0))
    return VerificationReport(
        equivalent=bool(preserved and dev <= tol),
        subspace_preserved=bool(preserved),
        global_phase=complex(phase),
        max_deviation=dev,
        leakage=leak,
        backend=used,
    )
