"""Log-depth resynthesis of CNOT circuits and of CNOT circuits with diagonals.

A CNOT circuit is the linear map q -> Mq over GF(2). The resynthesis builds
every output parity Mq into fresh ancillae with balanced XOR trees, clears
the trees, recomputes q = M^-1 (Mq) from the outputs to zero the data wires,
clears those trees too, and finally moves the outputs onto the data wires.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from typing import Sequence

import numpy as np

from .basic import AncillaPool, Layers, ceil_log2, copy_tree, merge_parallel
from .circuit import Circuit, CircuitError, EmbeddedCircuit, Gate, diag_gate, layerize
from .errors import check_not_staircase_gate
from .gf2 import GF2Matrix, invert, matrix_of_cnot_circuit


@dataclass(frozen=True)
class TreeNode:
    """One XOR node: ``wire`` receives ``left`` then ``right`` in build round ``round``."""

    wire: int
    round: int
    left: int
    right: int | None


@dataclass
class ParitySumPlan:
    """Copy fan-out plus XOR trees writing each target parity to a slot wire.

    ``targets[r]`` lists the input indices summed for row ``r`` and
    ``slots[r]`` is the wire holding that sum once the plan has run.
    Root gates are the ones writing into an explicit output wire.
    """

    targets: list[list[int]]
    copy_layers: Layers
    tree_layers: Layers
    nodes: list[TreeNode]
    slots: list[int]
    outputs: frozenset[int] = field(default_factory=frozenset)

    @property
    def layers(self) -> Layers:
        return self.copy_layers + self.tree_layers

    def undo(self) -> Layers:
        """The plan reversed, minus root gates, so only the slot values survive."""
        return [
            [g for g in reversed(layer) if g.qubits[1] not in self.outputs]
            for layer in reversed(self.layers)
        ]

    @property
    def intermediate_sums(self) -> int:
        return sum(1 for nd in self.nodes if nd.wire not in self.outputs)


def parity_sum_plan(
    targets: Sequence[Sequence[int]],
    sources: Sequence[int],
    alloc,
    outputs: Sequence[int | None] | None = None,
) -> ParitySumPlan:
    """Plan XOR trees for each row of ``targets`` over the ``sources`` wires.

    ``outputs[r]`` is the wire row ``r`` is XORed into. ``None`` means a fresh
    ancilla, except that a one-element row then reuses its copied input wire.
    Every leaf and every inner node has a single parent, so each build round
    is two CX layers.
    """
    targets = [sorted(set(t)) for t in targets]
    if outputs is None:
        outputs = [None] * len(targets)
    explicit = frozenset(o for o in outputs if o is not None)

    demand = [0] * len(sources)
    for t in targets:
        if not t:
            raise ValueError("empty parity row")
        for j in t:
            demand[j] += 1
    trees = [copy_tree(sources[j], d, alloc) if d else ([], []) for j, d in enumerate(demand)]
    copy_layers = merge_parallel(*[t[0] for t in trees])
    free = [list(t[1]) for t in trees]

    rounds: dict[int, tuple[list[Gate], list[Gate]]] = {}
    nodes: list[TreeNode] = []

    def emit(wire: int, h: int, left: int, right: int | None) -> None:
        first, second = rounds.setdefault(h, ([], []))
        first.append(Gate("CX", (left, wire)))
        if right is not None:
            second.append(Gate("CX", (right, wire)))
        nodes.append(TreeNode(wire, h, left, right))

    def build(leaves: list[int], out: int | None) -> tuple[int, int]:
        if len(leaves) == 1:
            if out is None:
                return leaves[0], 0
            emit(out, 1, leaves[0], None)
            return out, 1
        mid = len(leaves) // 2
        lw, lh = build(leaves[:mid], None)
        rw, rh = build(leaves[mid:], None)
        h = max(lh, rh) + 1
        wire = alloc() if out is None else out
        emit(wire, h, lw, rw)
        return wire, h

    slots = []
    for t, out in zip(targets, outputs):
        leaves = [free[j].pop() for j in t]
        slots.append(build(leaves, out)[0])

    tree_layers: Layers = []
    for h in sorted(rounds):
        tree_layers.extend(layer for layer in rounds[h] if layer)
    return ParitySumPlan(targets, copy_layers, tree_layers, nodes, slots, explicit)


@dataclass
class CnotResynthesis:
    """The five stages of the CNOT resynthesis, before layer packing."""

    n: int
    forward: ParitySumPlan
    backward: ParitySumPlan
    move_back: Layers
    ancillae: int

    @property
    def stages(self) -> list[Layers]:
        return [
            self.forward.layers,
            self.forward.undo(),
            self.backward.layers,
            self.backward.undo(),
            self.move_back,
        ]

    def circuit(self) -> Circuit:
        layers = [layer for stage in self.stages for layer in stage if layer]
        return layerize(Circuit(self.n + self.ancillae, tuple(tuple(l) for l in layers)))


def plan_cnot_resynthesis(m: GF2Matrix) -> CnotResynthesis:
    n = m.n
    outs = list(range(n, 2 * n))
    pool = AncillaPool(2 * n)
    forward = parity_sum_plan([m.support(i) for i in range(n)], list(range(n)), pool, outs)
    used = pool.used
    # every tree ancilla is back at zero, so the inverse trees reuse them
    pool = AncillaPool(2 * n)
    inv = invert(m)
    backward = parity_sum_plan([inv.support(i) for i in range(n)], outs, pool, list(range(n)))
    used = max(used, pool.used)
    move_back = [
        [Gate("CX", (outs[i], i)) for i in range(n)],
        [Gate("CX", (i, outs[i])) for i in range(n)],
    ]
    return CnotResynthesis(n, forward, backward, move_back, n + used)


def parallelize_cnot_circuit(c: Circuit) -> EmbeddedCircuit:
    """Depth O(log n) CX circuit with O(n^2) ancillae acting as ``c``."""
    for g in c.gates:
        check_not_staircase_gate(g)
    m = matrix_of_cnot_circuit(c)
    n = c.width
    if m == GF2Matrix.identity(n):
        return EmbeddedCircuit(Circuit(n), n, 0)
    plan = plan_cnot_resynthesis(m)
    return EmbeddedCircuit(plan.circuit(), n, plan.ancillae)


# ---------------------------------------------------------------- with diagonals


def _as_cnot_and_diagonals(c: Circuit) -> list[Gate]:
    """Rewrite into CX gates and DIAG gates; off-diagonal CU becomes CX then a controlled phase."""
    out = []
    for g in c.gates:
        if g.kind == "CX":
            out.append(g)
        elif g.is_diagonal:
            out.append(diag_gate(g.qubits, g.diagonal_angles()))
        elif g.kind == "CU" and np.max(np.abs(np.diag(g.block))) <= 1e-12:
            a, b = g.block[0, 1], g.block[1, 0]
            out.append(Gate("CX", g.qubits))
            out.append(diag_gate(g.qubits, (0.0, 0.0, float(np.angle(a)), float(np.angle(b)))))
        else:
            check_not_staircase_gate(g)
            raise CircuitError(f"{g.kind} gate is neither CX nor diagonal")
    return out


def parallelize_cnot_diagonal(c: Circuit) -> EmbeddedCircuit:
    """CX plus diagonal gates in O(log n) depth.

    Each diagonal sees the parities its qubits held at that point, which are
    rows of the CX prefix before it. All diagonals commute once rewritten on
    those parities of the input, so they are evaluated together on parity
    slots built by XOR trees, the trees are undone, and the CX part runs last.
    """
    gates = _as_cnot_and_diagonals(c)
    n = c.width
    rows = [1 << i for i in range(n)]
    slot_rows: list[list[int]] = []
    diags: list[tuple[int, tuple[float, ...]]] = []
    cx_only: list[Gate] = []
    for g in gates:
        if g.kind == "CX":
            a, b = g.qubits
            rows[b] ^= rows[a]
            cx_only.append(g)
            continue
        diags.append((len(slot_rows), g.diagonal_angles()))
        for q in g.qubits:
            r = rows[q]
            slot_rows.append([j for j in range(n) if (r >> j) & 1])

    cnot_part = parallelize_cnot_circuit(Circuit.from_gates(n, cx_only))
    if not diags:
        return cnot_part

    pool = AncillaPool(n)
    plan = parity_sum_plan(slot_rows, list(range(n)), pool)
    k_of = [len(a).bit_length() - 1 for _, a in diags]
    middle = [[diag_gate(tuple(plan.slots[s : s + k]), a) for (s, a), k in zip(diags, k_of)]]
    undo = [[g for g in reversed(layer)] for layer in reversed(plan.layers)]
    diag_layers = plan.layers + middle + undo

    width = n + max(pool.used, cnot_part.n_anc)
    layers = [l for l in diag_layers if l] + [list(l) for l in cnot_part.circuit.layers]
    out = layerize(Circuit(width, tuple(tuple(l) for l in layers)))
    return EmbeddedCircuit(out, n, width - n)


# ---------------------------------------------------------------- pinned constants


@dataclass(frozen=True)
class DepthConstants:
    """``depth <= a * ceil(log2 n) + b`` and ``ancillae <= c * n**2``."""

    a: int
    b: int
    c: int

    def depth_bound(self, n: int) -> int:
        return self.a * ceil_log2(n) + self.b

    def ancilla_bound(self, n: int) -> int:
        return self.c * n * n


def load_depth_constants(name: str = "cnot") -> DepthConstants:
    text = resources.files("qpar").joinpath("data/depth_constants.txt").read_text()
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].split()
        if line and line[0] == name:
            vals = dict(kv.split("=") for kv in line[1:])
            return DepthConstants(int(vals["A"]), int(vals["B"]), int(vals["C"]))
    raise KeyError(f"no pinned constants for {name!r}")


def measured_constants(ns: Sequence[int] = (8, 16, 32, 64), seed: int = 0) -> list[tuple[int, int, int]]:
    """(n, depth, ancillae) for random n^2-gate CX circuits, used to pin the golden file."""
    from .generators import random_cnot

    out = []
    for n in ns:
        e = parallelize_cnot_circuit(random_cnot(n, n * n, np.random.default_rng(seed + n)))
        out.append((n, e.depth, e.n_anc))
    return out
