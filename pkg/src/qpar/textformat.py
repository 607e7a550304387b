"""Line-based circuit text format.

::

    qubits N
    ancillae M            # optional, top M indices are ancillae
    H q | X q | Z q
    CX a b | CZ a b | W a b
    PHASE theta a b
    DIAG k q1 .. qk : w0 .. w_{2^k-1}
    CU a b : u00r,u00i u01r,u01i u10r,u10i u11r,u11i
    U1 q : (same four entries)
    ---                   # layer separator

Keywords are case-insensitive and ``#`` starts a comment. Without any
``---`` every gate is its own layer.
"""
from __future__ import annotations

import numpy as np

from .circuit import Circuit, CircuitError, EmbeddedCircuit, Gate


class ParseError(CircuitError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _fmt(x: float) -> str:
    return repr(float(x))


def _fmt_complex(z: complex) -> str:
    return f"{_fmt(z.real)},{_fmt(z.imag)}"


def format_gate(g: Gate) -> str:
    q = " ".join(str(i) for i in g.qubits)
    if g.kind == "PHASE":
        return f"PHASE {_fmt(g.params[0])} {q}"
    if g.kind == "DIAG":
        return f"DIAG {len(g.qubits)} {q} : " + " ".join(_fmt(a) for a in g.params)
    if g.kind in ("CU", "U1"):
        return f"{g.kind} {q} : " + " ".join(_fmt_complex(z) for z in g.params)
    return f"{g.kind} {q}"


def emit_circuit(c: Circuit | EmbeddedCircuit, ancillae: int | None = None) -> str:
    if isinstance(c, EmbeddedCircuit):
        if ancillae is None:
            ancillae = c.n_anc
        c = c.circuit
    lines = [f"qubits {c.width}"]
    if ancillae:
        lines.append(f"ancillae {ancillae}")
    for layer in c.layers:
        lines.extend(format_gate(g) for g in layer)
        lines.append("---")
    return "\n".join(lines) + "\n"


def _ints(tokens, lineno):
    try:
        return [int(t) for t in tokens]
    except ValueError as exc:
        raise ParseError(lineno, f"bad qubit index ({exc})") from None


def _complex(token: str, lineno: int) -> complex:
    parts = token.split(",")
    if len(parts) != 2:
        raise ParseError(lineno, f"complex entry must be 're,im', got {token!r}")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        raise ParseError(lineno, f"bad complex entry {token!r}") from None


def _parse_gate(tokens: list[str], lineno: int) -> Gate:
    kind = tokens[0].upper()
    args = tokens[1:]
    try:
        if kind in ("H", "X", "Z", "CX", "CZ", "W"):
            return Gate(kind, tuple(_ints(args, lineno)))
        if kind == "PHASE":
            if len(args) != 3:
                raise ParseError(lineno, "PHASE expects: theta a b")
            return Gate("PHASE", tuple(_ints(args[1:], lineno)), (float(args[0]),))
        if kind in ("DIAG", "CU", "U1"):
            if ":" not in args:
                raise ParseError(lineno, f"{kind} needs ':' before its parameters")
            cut = args.index(":")
            head, tail = args[:cut], args[cut + 1 :]
            if kind == "DIAG":
                if not head:
                    raise ParseError(lineno, "DIAG expects: k q1 .. qk : angles")
                k = int(head[0])
                qubits = _ints(head[1:], lineno)
                if len(qubits) != k:
                    raise ParseError(lineno, f"DIAG declares {k} qubits but lists {len(qubits)}")
                return Gate("DIAG", tuple(qubits), tuple(float(t) for t in tail))
            if len(tail) != 4:
                raise ParseError(lineno, f"{kind} needs 4 complex entries")
            m = np.array([_complex(t, lineno) for t in tail]).reshape(2, 2)
            return Gate(kind, tuple(_ints(head, lineno)), m)
    except ParseError:
        raise
    except (CircuitError, ValueError) as exc:
        raise ParseError(lineno, str(exc)) from None
    raise ParseError(lineno, f"unknown keyword {tokens[0]!r}")


def parse_embedded(text: str) -> EmbeddedCircuit:
    width = None
    ancillae = 0
    layers: list[list[Gate]] = [[]]
    separators = any(
        (l := raw.split("#", 1)[0].strip()) and set(l) == {"-"} for raw in text.splitlines()
    )
    gate_lines: list[tuple[int, Gate]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if set(line) == {"-"}:
            layers.append([])
            continue
        tokens = line.replace(":", " : ").split()
        key = tokens[0].lower()
        if key == "qubits":
            if width is not None:
                raise ParseError(lineno, "duplicate 'qubits' header")
            if len(tokens) != 2:
                raise ParseError(lineno, "expected 'qubits N'")
            width = _ints(tokens[1:], lineno)[0]
            continue
        if key == "ancillae":
            if len(tokens) != 2:
                raise ParseError(lineno, "expected 'ancillae M'")
            ancillae = _ints(tokens[1:], lineno)[0]
            continue
        if width is None:
            raise ParseError(lineno, "missing 'qubits N' header before first gate")
        g = _parse_gate(tokens, lineno)
        for q in g.qubits:
            if q >= width:
                raise ParseError(lineno, f"qubit {q} outside width {width}")
        if separators:
            busy = {q for h in layers[-1] for q in h.qubits}
            if busy & set(g.qubits):
                raise ParseError(lineno, f"qubit(s) {sorted(busy & set(g.qubits))} already used in this layer")
        layers[-1].append(g)
        gate_lines.append((lineno, g))
    if width is None:
        raise ParseError(0, "missing 'qubits N' header")
    if separators:
        circuit = Circuit(width, tuple(tuple(l) for l in layers))
    else:
        circuit = Circuit.from_gates(width, [g for _, g in gate_lines])
    if ancillae < 0 or ancillae > width:
        raise ParseError(0, f"ancillae {ancillae} outside 0..{width}")
    return EmbeddedCircuit(circuit, width - ancillae, ancillae)


def parse_circuit(text: str) -> Circuit:
    return parse_embedded(text).circuit
