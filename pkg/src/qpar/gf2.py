"""Square bit matrices over GF(2) and the linear map of a CNOT circuit.

Rows are Python integers used as packed bit vectors (bit j is column j), so
row operations are single big-int XORs.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .circuit import Circuit, CircuitError

MAX_DIM = 4096


class SingularMatrix(ArithmeticError):
    pass


class GF2Matrix:
    __slots__ = ("n", "rows")

    def __init__(self, n: int, rows: Sequence[int]):
        if n < 0 or n > MAX_DIM:
            raise ValueError(f"dimension {n} outside 0..{MAX_DIM}")
        if len(rows) != n:
            raise ValueError(f"expected {n} rows, got {len(rows)}")
        mask = (1 << n) - 1
        for r in rows:
            if r < 0 or r & ~mask:
                raise ValueError("row has bits outside the matrix")
        self.n = n
        self.rows = tuple(int(r) for r in rows)

    @classmethod
    def identity(cls, n: int) -> "GF2Matrix":
        return cls(n, [1 << i for i in range(n)])

    @classmethod
    def from_array(cls, a) -> "GF2Matrix":
        a = np.asarray(a, dtype=np.int64) & 1
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("matrix must be square")
        rows = [sum(1 << int(j) for j in np.flatnonzero(row)) for row in a]
        return cls(a.shape[0], rows)

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            for j in range(self.n):
                out[i, j] = (r >> j) & 1
        return out

    def __getitem__(self, ij) -> int:
        i, j = ij
        return (self.rows[i] >> j) & 1

    def __eq__(self, other) -> bool:
        return isinstance(other, GF2Matrix) and self.n == other.n and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.n, self.rows))

    def __repr__(self) -> str:
        body = "\n".join(
            " ".join(str((r >> j) & 1) for j in range(self.n)) for r in self.rows
        )
        return f"GF2Matrix({self.n})\n{body}"

    def support(self, i: int) -> list[int]:
        """Sorted column indices set in row ``i``."""
        r = self.rows[i]
        out = []
        while r:
            low = r & -r
            out.append(low.bit_length() - 1)
            r ^= low
        return out

    def apply(self, x: int) -> int:
        """Image of the packed column vector ``x`` (bit j = entry j)."""
        y = 0
        for i, r in enumerate(self.rows):
            if bin(r & x).count("1") & 1:
                y |= 1 << i
        return y

    def __matmul__(self, other: "GF2Matrix") -> "GF2Matrix":
        return mul(self, other)

    def transpose(self) -> "GF2Matrix":
        cols = [0] * self.n
        for i, r in enumerate(self.rows):
            for j in self.support(i):
                cols[j] |= 1 << i
        return GF2Matrix(self.n, cols)

    def is_permutation(self) -> bool:
        return all(r and not r & (r - 1) for r in self.rows) and len(set(self.rows)) == self.n


def mul(a: GF2Matrix, b: GF2Matrix) -> GF2Matrix:
    if a.n != b.n:
        raise ValueError(f"dimension mismatch {a.n} vs {b.n}")
    rows = []
    for r in a.rows:
        acc = 0
        while r:
            low = r & -r
            acc ^= b.rows[low.bit_length() - 1]
            r ^= low
        rows.append(acc)
    return GF2Matrix(a.n, rows)


def rank(m: GF2Matrix) -> int:
    pivots: dict[int, int] = {}
    for r in m.rows:
        while r:
            top = r.bit_length() - 1
            if top not in pivots:
                pivots[top] = r
                break
            r ^= pivots[top]
    return len(pivots)


def invert(m: GF2Matrix) -> GF2Matrix:
    """Gauss-Jordan elimination on ``[m | I]``."""
    n = m.n
    work = list(m.rows)
    inv = [1 << i for i in range(n)]
    for col in range(n):
        bit = 1 << col
        pivot = next((i for i in range(col, n) if work[i] & bit), None)
        if pivot is None:
            raise SingularMatrix(f"matrix has rank < {n}")
        work[col], work[pivot] = work[pivot], work[col]
        inv[col], inv[pivot] = inv[pivot], inv[col]
        pr, pi = work[col], inv[col]
        for i in range(n):
            if i != col and work[i] & bit:
                work[i] ^= pr
                inv[i] ^= pi
    return GF2Matrix(n, inv)


def matrix_of_cnot_circuit(c: Circuit) -> GF2Matrix:
    """Linear map q -> Mq of a CX-only circuit.

    Later gates compose on the left, so ``matrix_of(c1 then c2)`` equals
    ``matrix_of(c2) @ matrix_of(c1)``.
    """
    n = c.width
    rows = [1 << i for i in range(n)]
    for g in c.gates:
        if g.kind != "CX":
            raise CircuitError(f"CNOT circuit contains a {g.kind} gate")
        a, b = g.qubits
        rows[b] ^= rows[a]
    return GF2Matrix(n, rows)


def data_action(c: Circuit, n_data: int) -> tuple[GF2Matrix, list[int]]:
    """Track a CX circuit with ancillae fixed at 0 as linear forms of the data.

    Returns the data-wire matrix and each ancilla's final linear form (all
    zero when the ancillae are restored). Works at any width.
    """
    forms = [1 << i if i < n_data else 0 for i in range(c.width)]
    for g in c.gates:
        if g.kind != "CX":
            raise CircuitError(f"CNOT circuit contains a {g.kind} gate")
        a, b = g.qubits
        forms[b] ^= forms[a]
    return GF2Matrix(n_data, forms[:n_data]), forms[n_data:]


def random_invertible(n: int, rng: np.random.Generator) -> GF2Matrix:
    while True:
        m = GF2Matrix.from_array(rng.integers(0, 2, size=(n, n)))
        if rank(m) == n:
            return m
