"""Constant- and log-depth gadgets: permutations, fan-out, diagonal series,
commuting controlled-U series, binary-controlled powers and commuting circuits.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import zip_longest
from typing import Iterable, Sequence

import numpy as np

from .circuit import (
    Circuit,
    CircuitError,
    EmbeddedCircuit,
    Gate,
    X_MATRIX,
    Z_MATRIX,
    diag_gate,
    diag_on,
)
from .errors import STAIRCASE_MESSAGE, NonCommuting, NotParallelizable

COMMUTE_TOL = 1e-9
DIAGONALIZER_TOL = 1e-8


def ceil_log2(k: int) -> int:
    return 0 if k <= 1 else (k - 1).bit_length()


class AncillaPool:
    """Hands out fresh qubit indices starting at ``start``."""

    def __init__(self, start: int):
        self.start = start
        self.next = start

    def __call__(self) -> int:
        q = self.next
        self.next += 1
        return q

    @property
    def used(self) -> int:
        return self.next - self.start


Layers = list[list[Gate]]


def merge_parallel(*blocks: Layers) -> Layers:
    """Run layer lists side by side; callers guarantee disjoint qubits."""
    return [sum(group, []) for group in zip_longest(*blocks, fillvalue=[])]


def copy_tree(source: int, total: int, alloc) -> tuple[Layers, list[int]]:
    """Fan ``source`` out to ``total`` holders (itself included) by CX doubling.

    Takes ceil(log2 total) layers and ``total - 1`` fresh ancillae.
    """
    holders = [source]
    layers: Layers = []
    while len(holders) < total:
        layer = []
        for h in list(holders):
            if len(holders) == total:
                break
            a = alloc()
            layer.append(Gate("CX", (h, a)))
            holders.append(a)
        layers.append(layer)
    return layers, holders


def mirrored(build: Layers, middle: Layers, width: int) -> Circuit:
    """``build``, then ``middle``, then ``build`` undone (CX layers are self-inverse)."""
    layers = build + middle + [list(reversed(l)) for l in reversed(build)]
    return Circuit(width, tuple(tuple(l) for l in layers))


def _near(u: np.ndarray, v: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(np.asarray(u) - v)) <= tol)


def controlled_gate(control: int, target: int, u) -> Gate:
    """CX / CZ when ``u`` is exactly X / Z, otherwise CU."""
    u = np.asarray(u, dtype=complex)
    if _near(u, X_MATRIX):
        return Gate("CX", (control, target))
    if _near(u, Z_MATRIX):
        return Gate("CZ", (control, target))
    return Gate("CU", (control, target), u)


def controlled_block(g: Gate) -> np.ndarray:
    if g.kind == "CX":
        return X_MATRIX
    if g.kind == "CZ":
        return Z_MATRIX
    if g.kind == "CU":
        return g.block
    raise CircuitError(f"{g.kind} is not a controlled gate")


# ---------------------------------------------------------------- permutations


@dataclass(frozen=True)
class Permutation:
    """``images[i]`` is where the value on qubit ``i`` ends up."""

    images: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(int(i) for i in self.images))
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"not a permutation: {self.images}")

    @property
    def n(self) -> int:
        return len(self.images)

    def matrix(self) -> np.ndarray:
        """Permutation operator on 2**n basis states (qubit 0 most significant)."""
        n = self.n
        dim = 2**n
        out = np.zeros((dim, dim))
        for a in range(dim):
            b = 0
            for i in range(n):
                if (a >> (n - 1 - i)) & 1:
                    b |= 1 << (n - 1 - self.images[i])
            out[b, a] = 1
        return out

    def cycles(self) -> list[list[int]]:
        seen = [False] * self.n
        out = []
        for start in range(self.n):
            if seen[start]:
                continue
            cyc = []
            j = start
            while not seen[j]:
                seen[j] = True
                cyc.append(j)
                j = self.images[j]
            out.append(cyc)
        return out


def permutation_with_ancillae(p: Permutation) -> EmbeddedCircuit:
    """Copy out, clear originals, copy back permuted, clear ancillae: 4 CX layers."""
    n = p.n
    anc = [n + i for i in range(n)]
    layers = [
        [Gate("CX", (i, anc[i])) for i in range(n)],
        [Gate("CX", (anc[i], i)) for i in range(n)],
        [Gate("CX", (anc[i], p.images[i])) for i in range(n)],
        [Gate("CX", (p.images[i], anc[i])) for i in range(n)],
    ]
    return EmbeddedCircuit(Circuit(2 * n, tuple(tuple(l) for l in layers)), n, n)


def swap_layers(pairs: Sequence[tuple[int, int]]) -> Layers:
    if not pairs:
        return []
    return [
        [Gate("CX", (a, b)) for a, b in pairs],
        [Gate("CX", (b, a)) for a, b in pairs],
        [Gate("CX", (a, b)) for a, b in pairs],
    ]


def reflection_pairs(p: Permutation) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """Two sets of disjoint transpositions whose composition is ``p``.

    A cycle c_0 -> c_1 -> ... on positions j is j -> j+1, which is the
    reflection j -> -j followed by j -> 1-j.
    """
    first, second = [], []
    for cyc in p.cycles():
        length = len(cyc)
        if length == 1:
            continue
        for j in range(length):
            k = (-j) % length
            if j < k:
                first.append((cyc[j], cyc[k]))
            k = (1 - j) % length
            if j < k:
                second.append((cyc[j], cyc[k]))
    return first, second


def permutation_in_place(p: Permutation) -> Circuit:
    """At most 6 CX layers, no ancillae: two rounds of disjoint swaps."""
    first, second = reflection_pairs(p)
    layers = swap_layers(first) + swap_layers(second)
    return Circuit(p.n, tuple(tuple(l) for l in layers))


# ---------------------------------------------------------------- fan-out


@dataclass(frozen=True)
class ControlledSeries:
    """Controlled gates sharing one control, each on its own target."""

    control: int
    items: tuple[tuple[int, tuple], ...]
    width: int

    def __post_init__(self):
        items = tuple((int(t), np.asarray(u, dtype=complex)) for t, u in self.items)
        targets = [t for t, _ in items]
        if self.control in targets:
            raise ValueError("control qubit is also a target")
        if len(set(targets)) != len(targets):
            raise ValueError("targets must be distinct")
        if max(targets + [self.control]) >= self.width:
            raise ValueError("qubit index outside width")
        object.__setattr__(self, "items", items)

    @classmethod
    def from_circuit(cls, c: Circuit) -> "ControlledSeries":
        gates = c.gates
        if not gates or any(g.kind not in ("CX", "CZ", "CU") for g in gates):
            raise NotParallelizable("fan-out needs a series of controlled gates")
        controls = {g.qubits[0] for g in gates}
        if len(controls) != 1:
            raise NotParallelizable("fan-out needs every gate to share one control qubit")
        return cls(controls.pop(), tuple((g.qubits[1], controlled_block(g)) for g in gates), c.width)

    def to_circuit(self) -> Circuit:
        return Circuit.from_gates(self.width, [controlled_gate(self.control, t, u) for t, u in self.items])


def parallelize_fanout(s: ControlledSeries) -> EmbeddedCircuit:
    k = len(s.items)
    if k == 0:
        raise ValueError("empty series")
    pool = AncillaPool(s.width)
    build, holders = copy_tree(s.control, k, pool)
    middle = [[controlled_gate(h, t, u) for h, (t, u) in zip(holders, s.items)]]
    width = s.width + pool.used
    return EmbeddedCircuit(mirrored(build, middle, width), s.width, pool.used)


# ---------------------------------------------------------------- diagonals


def fan_diagonals(
    width: int, shared: Sequence[int], parts: Sequence[tuple[tuple[int, ...], np.ndarray]]
) -> EmbeddedCircuit:
    """Apply several diagonal gates that all read the ``shared`` qubits at once.

    Each part is ``(private qubits, angles over shared + private)``; the
    private qubit sets must be disjoint from each other and from ``shared``.
    The shared qubits are CX-copied once per extra part.
    """
    g = len(parts)
    pool = AncillaPool(width)
    trees = [copy_tree(q, g, pool) for q in shared]
    build = merge_parallel(*[t[0] for t in trees])
    middle = [
        [
            diag_gate(tuple(t[1][i] for t in trees) + tuple(private), angles)
            for i, (private, angles) in enumerate(parts)
        ]
    ]
    return EmbeddedCircuit(mirrored(build, middle, width + pool.used), width, pool.used)


def parallelize_diagonal_series(gates: Sequence[Gate], width: int | None = None) -> EmbeddedCircuit:
    gates = list(gates)
    if not gates:
        raise ValueError("empty gate list")
    for g in gates:
        if not g.is_diagonal:
            raise NotParallelizable(f"{g.kind} gate is not diagonal")
    support = gates[0].qubits
    for g in gates[1:]:
        if set(g.qubits) != set(support):
            raise NotParallelizable("diagonal series gates must act on one shared qubit set")
    if width is None:
        width = max(support) + 1
    if len(gates) == 1:
        return EmbeddedCircuit(Circuit.from_gates(width, gates), width, 0)
    parts = [((), diag_on(g, support)) for g in gates]
    return fan_diagonals(width, support, parts)


def _commutes(a: np.ndarray, b: np.ndarray, tol: float = COMMUTE_TOL) -> bool:
    return bool(np.linalg.norm(a @ b - b @ a) <= tol)


def common_diagonalizer(mats: Sequence[np.ndarray], seed: int = 0, attempts: int = 3) -> np.ndarray:
    """Unitary T with T^dagger U T diagonal for every (commuting) U."""
    rng = np.random.default_rng(seed)
    dim = mats[0].shape[0]
    for _ in range(attempts):
        h = np.zeros((dim, dim), dtype=complex)
        for u in mats:
            c, d = rng.standard_normal(2)
            h += c * (u + u.conj().T) / 2 + d * (u - u.conj().T) / 2j
        _, t = np.linalg.eigh(h)
        if all(
            np.max(np.abs(t.conj().T @ u @ t - np.diag(np.diag(t.conj().T @ u @ t)))) <= DIAGONALIZER_TOL
            for u in mats
        ):
            return t
    raise NonCommuting("no common eigenbasis found")


def parallelize_commuting_series(
    gates: Sequence[Gate], width: int | None = None, seed: int = 0
) -> EmbeddedCircuit:
    """Controlled gates on one shared target whose blocks commute.

    Conjugate the target into the common eigenbasis, fan the (now diagonal)
    controlled gates out over copies of the target, and rotate back.
    """
    gates = list(gates)
    if not gates:
        raise ValueError("empty gate list")
    for g in gates:
        if g.kind not in ("CX", "CZ", "CU"):
            raise NotParallelizable(f"{g.kind} is not a controlled gate")
    targets = {g.qubits[1] for g in gates}
    if len(targets) != 1:
        raise NotParallelizable("commuting series gates must share one target qubit")
    target = targets.pop()
    blocks = [controlled_block(g) for g in gates]
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            if not _commutes(blocks[i], blocks[j]):
                raise NonCommuting(f"gates {i} and {j} do not commute")
    if width is None:
        width = max(q for g in gates for q in g.qubits) + 1
    merged: dict[int, np.ndarray] = {}
    for g, b in zip(gates, blocks):
        c = g.qubits[0]
        merged[c] = b @ merged.get(c, np.eye(2))
    all_diag = all(np.max(np.abs(b - np.diag(np.diag(b)))) <= 1e-12 for b in merged.values())
    t = np.eye(2, dtype=complex) if all_diag else common_diagonalizer(list(merged.values()), seed)
    parts = []
    for c in sorted(merged):
        d = np.angle(np.diag(t.conj().T @ merged[c] @ t))
        # angles over (target copy, control)
        parts.append(((c,), np.array([0.0, d[0], 0.0, d[1]])))
    fanned = fan_diagonals(width, (target,), parts)
    if all_diag:
        return fanned
    total = fanned.width
    pre = Circuit(total, ((Gate("U1", (target,), t.conj().T),),))
    post = Circuit(total, ((Gate("U1", (target,), t),),))
    return EmbeddedCircuit(pre.then(fanned.circuit).then(post), width, fanned.n_anc)


def gen_power_circuit(u, k: int) -> Circuit:
    """Target (qubit k) receives U**q, q read in binary from qubits 0..k-1
    (qubit 0 most significant)."""
    u = np.asarray(u, dtype=complex)
    gates = []
    power = u
    for i in range(k):
        gates.append(controlled_gate(k - 1 - i, k, power))
        power = power @ power
    return Circuit.from_gates(k + 1, gates)


# ---------------------------------------------------------------- commuting circuits


def round_robin_rounds(n: int) -> dict[tuple[int, int], int]:
    """Circle-method tournament: pair -> round, n - 1 rounds for even n."""
    m = n if n % 2 == 0 else n + 1
    out = {}
    for r in range(m - 1):
        pairs = [(r, m - 1)] + [((r + i) % (m - 1), (r - i) % (m - 1)) for i in range(1, m // 2)]
        for a, b in pairs:
            if a < n and b < n:
                out[(min(a, b), max(a, b))] = r
    return out


def merge_diagonals(gates: Iterable[Gate]) -> dict[tuple[int, ...], np.ndarray]:
    """Sum diagonal gates per sorted support tuple."""
    merged: dict[tuple[int, ...], np.ndarray] = {}
    for g in gates:
        key = tuple(sorted(g.qubits))
        merged[key] = merged.get(key, 0) + diag_on(g, key)
    return {k: v for k, v in sorted(merged.items())}


def compress_schedule(tuples: Sequence[tuple[int, ...]], n: int) -> list[list[tuple[int, ...]]]:
    """Disjoint rounds: pairs by round robin, other tuples first-fit."""
    rr = round_robin_rounds(n)
    rounds: dict[int, list[tuple[int, ...]]] = {}
    for t in sorted(tuples):
        if len(t) == 2:
            rounds.setdefault(rr[t], []).append(t)
    layers = [rounds[r] for r in sorted(rounds)]
    for t in sorted(tuples):
        if len(t) == 2:
            continue
        for layer in layers:
            if not any(set(t) & set(o) for o in layer):
                layer.append(t)
                break
        else:
            layers.append([t])
    return layers


def parallelize_commuting_circuit(
    c: Circuit, mode: str = "log_depth", seed: int = 0, max_support: int = 3
) -> EmbeddedCircuit:
    gates = c.gates
    if mode not in ("compress", "log_depth"):
        raise ValueError(f"unknown mode {mode!r}")
    if not gates:
        return EmbeddedCircuit(c, c.width, 0)
    if all(g.is_diagonal for g in gates):
        if any(len(g.qubits) > max_support for g in gates):
            raise NotParallelizable(f"diagonal gates on more than {max_support} qubits")
        if len(gates) == 1:
            return EmbeddedCircuit(c, c.width, 0)
        merged = merge_diagonals(gates)
        if mode == "compress":
            rounds = compress_schedule(list(merged), c.width)
            layers = tuple(tuple(diag_gate(t, merged[t]) for t in r) for r in rounds)
            return EmbeddedCircuit(Circuit(c.width, layers), c.width, 0)
        demand: dict[int, int] = {}
        for t in merged:
            for q in t:
                demand[q] = demand.get(q, 0) + 1
        pool = AncillaPool(c.width)
        trees = {q: copy_tree(q, demand[q], pool) for q in sorted(demand)}
        build = merge_parallel(*[trees[q][0] for q in sorted(trees)])
        cursor = {q: 0 for q in demand}
        middle = []
        for t, angles in merged.items():
            wires = []
            for q in t:
                wires.append(trees[q][1][cursor[q]])
                cursor[q] += 1
            middle.append(diag_gate(wires, angles))
        width = c.width + pool.used
        return EmbeddedCircuit(mirrored(build, [middle], width), c.width, pool.used)
    if all(g.kind in ("CX", "CZ", "CU") for g in gates) and len({g.qubits[1] for g in gates}) == 1:
        return parallelize_commuting_series(gates, c.width, seed)
    raise NotParallelizable(
        "commuting pass needs all-diagonal gates or controlled gates on one shared target; "
        + STAIRCASE_MESSAGE
    )
