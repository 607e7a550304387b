"""Normal form and log-depth parallelization for {H, X, Z, CX, CZ, W} circuits.

The pipeline has three passes, each a sequence of local rewrites looked up in
a rule table that is checked against 8x8 unitaries when it loads:

1. comb every H to the right end, leaving one partial H layer;
2. group the two-qubit diagonals (z = CZ, Z) and the W gates into a
   z band, a W band and a z band, pulling CX and X to the left as they
   appear (CX crossing a band only spawns gates of that band's type, or X);
3. package the result, rewriting the W band as H-all, CZ band, H-all.

Rule phases are multiplied into one tracked global phase, so the bands stay
pure. ``NormalForm.phase`` satisfies ``source = phase * normal form``.
"""
from __future__ import annotations

import cmath
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from .basic import _near, parallelize_commuting_circuit
from .circuit import (
    Circuit,
    CircuitError,
    EmbeddedCircuit,
    Gate,
    H_MATRIX,
    X_MATRIX,
    Z_MATRIX,
    layerize,
)
from .cnot import parallelize_cnot_circuit
from .errors import check_not_staircase_gate
from .sim import unitary_of

ALPHABET = ("H", "X", "Z", "CX", "CZ", "W")
C_KINDS = ("X", "CX")
Z_KINDS = ("Z", "CZ")
SYMMETRIC = ("CZ", "W")
RULE_TOL = 1e-12
PATTERN_VARS = "abc"
REAL_Y = Z_MATRIX @ X_MATRIX  # [[0, 1], [-1, 0]], the product of controlled-X and controlled-Z blocks


class RuleVerificationFailure(RuntimeError):
    pass


class ShapeError(CircuitError):
    pass


# ---------------------------------------------------------------- patterns

PatternGate = tuple[str, tuple[str, ...]]


def parse_pattern(text: str) -> list[PatternGate]:
    """``"H a, CX a b"`` -> ``[("H", ("a",)), ("CX", ("a", "b"))]``; ``-`` is empty."""
    text = text.strip()
    if not text or text == "-":
        return []
    out = []
    for part in text.split(","):
        tok = part.split()
        kind, qs = tok[0].upper(), tuple(tok[1:])
        if kind not in ALPHABET:
            raise ValueError(f"unknown gate {kind!r} in pattern")
        if not all(q in PATTERN_VARS for q in qs) or len(set(qs)) != len(qs):
            raise ValueError(f"bad pattern qubits in {part.strip()!r}")
        if len(qs) != (1 if kind in ("H", "X", "Z") else 2):
            raise ValueError(f"wrong arity in {part.strip()!r}")
        out.append((kind, qs))
    return out


def format_pattern(gates: list[PatternGate]) -> str:
    return ", ".join(f"{k} {' '.join(qs)}" for k, qs in gates)


def pattern_matrix(gates: list[PatternGate]) -> np.ndarray:
    """Unitary on three qubits with a, b, c as qubits 0, 1, 2."""
    idx = {v: i for i, v in enumerate(PATTERN_VARS)}
    c = Circuit.from_gates(3, [Gate(k, tuple(idx[q] for q in qs)) for k, qs in gates])
    return unitary_of(c)


def _parse_phase(text: str) -> complex:
    text = text.strip()
    if text.startswith("e(") and text.endswith(")"):
        body = text[2:-1].replace("pi", "")
        num, den = body.split("/")
        return cmath.exp(1j * cmath.pi * float(num or 1) / float(den))
    return complex(text)


@dataclass(frozen=True)
class RewriteRule:
    name: str
    lhs: tuple[PatternGate, ...]
    rhs: tuple[PatternGate, ...]
    phase: complex

    def check(self) -> float:
        """Largest entry of ``matrix(lhs) - phase * matrix(rhs)``."""
        return float(np.max(np.abs(pattern_matrix(list(self.lhs)) - self.phase * pattern_matrix(list(self.rhs)))))

    def match(self, gates: list[Gate]) -> dict[str, int] | None:
        if len(gates) != len(self.lhs):
            return None
        return _unify(self.lhs, gates, {})

    def instantiate(self, binding: dict[str, int]) -> list[Gate]:
        return [Gate(k, tuple(binding[q] for q in qs)) for k, qs in self.rhs]


def _unify(pattern, gates, binding):
    if not pattern:
        return binding
    (kind, vars_), g = pattern[0], gates[0]
    if g.kind != kind:
        return None
    orders = [g.qubits]
    if kind in SYMMETRIC:
        orders.append(g.qubits[::-1])
    for qs in orders:
        b = dict(binding)
        ok = True
        for v, q in zip(vars_, qs):
            if b.get(v, q) != q or (v not in b and q in b.values()):
                ok = False
                break
            b[v] = q
        if ok:
            found = _unify(pattern[1:], gates[1:], b)
            if found is not None:
                return found
    return None


def parse_rules(text: str) -> list[RewriteRule]:
    rules = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            name, rest = line.split(None, 1)
            lhs, rhs, phase = (p.strip() for p in rest.split(";"))
            rules.append(RewriteRule(name, tuple(parse_pattern(lhs)), tuple(parse_pattern(rhs)), _parse_phase(phase)))
        except ValueError as exc:
            raise RuleVerificationFailure(f"rule table line {lineno}: {exc}") from None
    return rules


class RuleBook:
    """Verified rules indexed by their left-hand gate kinds."""

    def __init__(self, rules: list[RewriteRule]):
        for r in rules:
            err = r.check()
            if not err <= RULE_TOL:
                raise RuleVerificationFailure(f"rule {r.name} fails its matrix check (deviation {err:.3g})")
        self.rules = rules
        self._by_kinds: dict[tuple[str, ...], list[RewriteRule]] = {}
        self._memo: dict[tuple, tuple[list[Gate], complex, str]] = {}
        for r in rules:
            self._by_kinds.setdefault(tuple(k for k, _ in r.lhs), []).append(r)

    def __len__(self) -> int:
        return len(self.rules)

    def __getitem__(self, name: str) -> RewriteRule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)

    def rewrite(self, gates: list[Gate]) -> tuple[list[Gate], complex, str]:
        memo_key = tuple(_key(g) for g in gates)
        hit = self._memo.get(memo_key)
        if hit is not None:
            return list(hit[0]), hit[1], hit[2]
        for r in self._by_kinds.get(tuple(g.kind for g in gates), ()):
            b = r.match(gates)
            if b is not None:
                self._memo[memo_key] = (r.instantiate(b), r.phase, r.name)
                return self.rewrite(gates)
        raise LookupError("no rule for " + ", ".join(str(g) for g in gates))

    def swap(self, first: Gate, second: Gate) -> tuple[list[Gate], complex]:
        """Exchange two adjacent gates; the result starts ``second, first``."""
        if not set(first.qubits) & set(second.qubits):
            return [second, first], 1.0
        out, phase, name = self.rewrite([first, second])
        if [_key(g) for g in out[:2]] != [_key(second), _key(first)]:
            raise LookupError(f"rule {name} does not exchange {first} and {second}")
        return [second, first] + out[2:], phase


def load_rule_table(text: str | None = None) -> RuleBook:
    if text is None:
        text = resources.files("qpar").joinpath("data/rules.txt").read_text()
    return RuleBook(parse_rules(text))


@lru_cache(maxsize=1)
def default_rules() -> RuleBook:
    return load_rule_table()


# ---------------------------------------------------------------- pass 1


def _check_alphabet(c: Circuit, allowed) -> None:
    for g in c.gates:
        if g.kind not in allowed:
            raise ShapeError(f"{g.kind} gate outside {{{', '.join(allowed)}}}")


def comb_hadamards(c: Circuit, rules: RuleBook | None = None) -> tuple[Circuit, tuple[int, ...]]:
    """Move every H to the end. Returns the H-free body and the qubits still needing H."""
    rules = rules or default_rules()
    _check_alphabet(c, ALPHABET)
    pending: set[int] = set()
    body: list[Gate] = []
    for g in c.gates:
        if g.kind == "H":
            q = g.qubits[0]
            if q in pending:
                rules.rewrite([g, g])
                pending.discard(q)
            else:
                pending.add(q)
            continue
        for q in g.qubits:
            if q in pending:
                out, _, _ = rules.rewrite([Gate("H", (q,)), g])
                g = out[0]
        body.append(g)
    return layerize(Circuit.from_gates(c.width, body)), tuple(sorted(pending))


# ---------------------------------------------------------------- pass 2


def _category(g: Gate) -> str:
    if g.kind in C_KINDS:
        return "c"
    if g.kind in Z_KINDS:
        return "z"
    return "w"


def _key(g: Gate) -> tuple:
    return (g.kind, tuple(sorted(g.qubits)) if g.kind in SYMMETRIC else g.qubits)


class BandBuilder:
    """Keeps ``cnots`` (CX/X) followed by ``tail``, which is z* w* z* between pushes."""

    def __init__(self, width: int, rules: RuleBook):
        self.width = width
        self.rules = rules
        self.cnots: list[Gate] = []
        self.tail: list[Gate] = []
        self.phase: complex = 1.0

    # -- primitive moves
    def _swap(self, i: int) -> None:
        out, ph = self.rules.swap(self.tail[i], self.tail[i + 1])
        self.tail[i : i + 2] = out
        self.phase *= ph

    def _move_left(self, i: int, stop: int) -> None:
        """Carry ``tail[i]`` left until it sits at ``stop``; spawns land behind it."""
        while i > stop:
            self._swap(i - 1)
            i -= 1

    def _rewrite(self, i: int, length: int) -> None:
        out, ph, _ = self.rules.rewrite(self.tail[i : i + length])
        self.tail[i : i + length] = out
        self.phase *= ph

    def push_cnots(self) -> None:
        while True:
            i = next((j for j, g in enumerate(self.tail) if _category(g) == "c"), None)
            if i is None:
                return
            self._move_left(i, 0)
            self.cnots.append(self.tail.pop(0))
            self.normalize()

    def bands(self) -> tuple[int, int]:
        """(start, end) of the W band; an empty band sits at position 0."""
        ws = [j for j, g in enumerate(self.tail) if g.kind == "W"]
        if not ws:
            return 0, 0
        return ws[0], ws[-1] + 1

    def normalize(self) -> None:
        """Cancel equal pairs inside each run of z gates or of W gates.

        Members of one run commute and square to the identity; CX and X
        separate runs.
        """
        out: list[Gate] = []
        run: list[Gate] = []

        def flush():
            counts = Counter(_key(g) for g in run)
            seen = set()
            for g in run:
                k = _key(g)
                if counts[k] % 2 and k not in seen:
                    out.append(g)
                seen.add(k)
            run.clear()

        for g in self.tail:
            if run and _category(g) != _category(run[0]):
                flush()
            if _category(g) == "c":
                out.append(g)
            else:
                run.append(g)
        flush()
        self.tail = out

    def _index(self, lo: int, hi: int, kind: str, pair) -> int | None:
        pair = set(pair)
        return next(
            (j for j in range(lo, hi) if self.tail[j].kind == kind and set(self.tail[j].qubits) == pair),
            None,
        )

    # -- appending
    def append(self, g: Gate) -> None:
        cat = _category(g)
        if cat == "c":
            self.tail.append(g)
            self.push_cnots()
        elif cat == "z":
            self.tail.append(g)
        else:
            self._append_w(g)
        self.normalize()

    def _append_w(self, g: Gate) -> None:
        self.normalize()
        wstart, s = self.bands()
        blocker = self._index(s, len(self.tail), "CZ", g.qubits)
        if blocker is not None:
            self._move_left(blocker, s)
        self.tail.append(g)
        self._move_left(len(self.tail) - 1, s + (blocker is not None))
        same_w = self._index(wstart, s, "W", g.qubits)
        if blocker is not None:
            if same_w is not None:
                self._move_left_within(same_w, s - 1)
                self._rewrite(s - 1, 3)  # W z W -> z W z
                self._move_left(s - 1, wstart)
            else:
                self._move_left(s, wstart)
        elif same_w is not None:
            self._move_left_within(same_w, s - 1)
            self._rewrite(s - 1, 2)  # W W -> 1
        self.push_cnots()

    def _move_left_within(self, i: int, target: int) -> None:
        """Carry a W right inside its own band; neighbours are Ws, which commute."""
        while i < target:
            self._swap(i)
            i += 1

    def finish(self) -> None:
        """Remove any z..z word on one pair whose W band lacks that pair's W."""
        while True:
            self.normalize()
            wstart, wend = self.bands()
            if wend == 0:
                return
            z1 = {_key(g) for g in self.tail[:wstart]}
            wb = {_key(g)[1] for g in self.tail[wstart:wend]}
            j = next(
                (
                    j
                    for j in range(wend, len(self.tail))
                    if self.tail[j].kind == "CZ" and _key(self.tail[j]) in z1 and _key(self.tail[j])[1] not in wb
                ),
                None,
            )
            if j is None:
                return
            self._move_left(j, wend)
            self._move_left(wend, wstart)
            self.push_cnots()

    def circuit(self) -> Circuit:
        return Circuit.from_gates(self.width, self.cnots + self.tail)


def _build_bands(c: Circuit, rules: RuleBook) -> BandBuilder:
    _check_alphabet(c, ("X", "Z", "CX", "CZ", "W"))
    b = BandBuilder(c.width, rules)
    for g in c.gates:
        b.append(g)
    b.finish()
    return b


def group_zw(c: Circuit, rules: RuleBook | None = None) -> tuple[Circuit, complex]:
    """Arrange CZ/Z and W gates as a z band, a W band and a z band.

    CX and X are pulled to the front as they arrive, since W gates can only be
    merged across a z band that holds no controlled-nots. Returns the circuit
    and the phase with ``input = phase * output``.
    """
    b = _build_bands(c, rules or default_rules())
    return b.circuit(), b.phase


# ---------------------------------------------------------------- pass 3


@dataclass(frozen=True)
class NormalForm:
    """cnot_block, z1, H-all, z2, H-all, z3, then H on ``final_h``."""

    width: int
    cnot_block: tuple[Gate, ...]
    z1: tuple[Gate, ...]
    z2: tuple[Gate, ...]
    z3: tuple[Gate, ...]
    final_h: tuple[int, ...] = ()
    phase: complex = 1.0

    def to_circuit(self) -> Circuit:
        h_all = [Gate("H", (q,)) for q in range(self.width)]
        gates = list(self.cnot_block) + list(self.z1)
        if self.z2:
            gates += h_all + list(self.z2) + h_all
        gates += list(self.z3) + [Gate("H", (q,)) for q in self.final_h]
        return layerize(Circuit.from_gates(self.width, gates))


def _grouped_split(gates: list[Gate]):
    """Split a c* z* w* z* sequence into its four runs, or None for any other shape."""
    cats = "".join(_category(g) for g in gates)
    nc = len(cats) - len(cats.lstrip("c"))
    rest = cats[nc:]
    if "c" in rest:
        return None
    ws = [j for j, ch in enumerate(rest) if ch == "w"]
    if not ws:
        return gates[:nc], [], [], gates[nc:]
    lo, hi = ws[0], ws[-1] + 1
    if "z" in rest[lo:hi]:
        return None
    return gates[:nc], gates[nc : nc + lo], gates[nc + lo : nc + hi], gates[nc + hi :]


def pull_cnots_left(c: Circuit, final_h=(), rules: RuleBook | None = None, phase: complex = 1.0) -> NormalForm:
    """Normal form of a circuit over {X, Z, CX, CZ, W} followed by H on ``final_h``.

    Output of ``group_zw`` (shape c* z* w* z*) is packaged as is; any other
    order is grouped first. The W band becomes CZ conjugated by a full H layer.
    """
    _check_alphabet(c, ("X", "Z", "CX", "CZ", "W"))
    split = _grouped_split(list(c.gates))
    if split is None:
        b = _build_bands(c, rules or default_rules())
        wstart, wend = b.bands()
        split = b.cnots, b.tail[:wstart], b.tail[wstart:wend], b.tail[wend:]
        phase = phase * b.phase
    cnots, z1, wband, z3 = split
    return NormalForm(
        c.width,
        tuple(cnots),
        tuple(z1),
        tuple(Gate("CZ", tuple(sorted(g.qubits))) for g in wband),
        tuple(z3),
        tuple(sorted(final_h)),
        complex(phase),
    )


def normal_form(c: Circuit, rules: RuleBook | None = None) -> NormalForm:
    c = expand_clifford(c)
    body, final_h = comb_hadamards(c, rules)
    grouped, phase = group_zw(body, rules)
    return pull_cnots_left(grouped, final_h, rules, phase)


# ---------------------------------------------------------------- parallelization


def expand_clifford(c: Circuit) -> Circuit:
    """Rewrite controlled-X/Z/real-Y blocks and PHASE(pi) into the gate alphabet."""
    out = []
    for g in c.gates:
        if g.kind in ALPHABET:
            out.append(g)
        elif g.kind == "PHASE" and abs(abs(g.params[0]) - np.pi) <= 1e-12:
            out.append(Gate("CZ", g.qubits))
        elif g.kind == "CU" and _near(g.block, X_MATRIX):
            out.append(Gate("CX", g.qubits))
        elif g.kind == "CU" and _near(g.block, Z_MATRIX):
            out.append(Gate("CZ", g.qubits))
        elif g.kind == "CU" and _near(g.block, REAL_Y):
            out += [Gate("CX", g.qubits), Gate("CZ", g.qubits)]
        elif g.kind == "U1" and _near(g.block, H_MATRIX):
            out.append(Gate("H", g.qubits))
        elif g.kind == "U1" and _near(g.block, X_MATRIX):
            out.append(Gate("X", g.qubits))
        elif g.kind == "U1" and _near(g.block, Z_MATRIX):
            out.append(Gate("Z", g.qubits))
        elif g.is_diagonal and len(g.qubits) == 1:
            raise ShapeError(
                "one-qubit phase gates other than Z (such as diag(1, i)) are outside the "
                "H/CX/CZ class this pass normalizes"
            )
        else:
            check_not_staircase_gate(g)
            raise ShapeError(f"{g.kind} gate is outside the {{{', '.join(ALPHABET)}}} class")
    return Circuit.from_gates(c.width, out)


def _split_affine(block) -> tuple[list[Gate], list[int]]:
    """CX/X sequence -> (its CX gates, qubits needing X afterwards)."""
    n = 1 + max((q for g in block for q in g.qubits), default=-1)
    flips = [0] * n
    cx = []
    for g in block:
        if g.kind == "X":
            flips[g.qubits[0]] ^= 1
        else:
            a, b = g.qubits
            flips[b] ^= flips[a]
            cx.append(g)
    return cx, [q for q, f in enumerate(flips) if f]


def _z_band(width: int, gates) -> EmbeddedCircuit:
    gates = list(gates)
    if not gates:
        return EmbeddedCircuit(Circuit(width), width, 0)
    return parallelize_commuting_circuit(Circuit.from_gates(width, gates), mode="log_depth")


def parallelize_clifford(c: Circuit, rules: RuleBook | None = None) -> EmbeddedCircuit:
    """O(log n) depth embedding, equal to ``c`` up to a global phase."""
    nf = normal_form(c, rules)
    n = c.width
    cx, flips = _split_affine(nf.cnot_block)
    parts: list[EmbeddedCircuit] = [parallelize_cnot_circuit(Circuit.from_gates(n, cx))]
    if flips:
        parts.append(EmbeddedCircuit(Circuit.from_gates(n, [Gate("X", (q,)) for q in flips]), n, 0))
    parts.append(_z_band(n, nf.z1))
    if nf.z2:
        h_all = EmbeddedCircuit(Circuit(n, (tuple(Gate("H", (q,)) for q in range(n)),)), n, 0)
        parts += [h_all, _z_band(n, nf.z2), h_all]
    parts.append(_z_band(n, nf.z3))
    if nf.final_h:
        parts.append(EmbeddedCircuit(Circuit(n, (tuple(Gate("H", (q,)) for q in nf.final_h),)), n, 0))
    anc = max(p.n_anc for p in parts)
    layers = tuple(layer for p in parts for layer in p.circuit.layers)
    return EmbeddedCircuit(Circuit(n + anc, layers), n, anc, phase=nf.phase)
