"""Search for the right-hand side of each rewrite rule and print the rule table.

Each left-hand side is paired with a required prefix for its right-hand side
(the crossing gates in swapped order). The search appends up to two spawned
gates from an allowed alphabet and keeps the shortest sequence whose 8x8
matrix equals the left-hand side up to a unit phase.

    python scripts/derive_rules.py > src/qpar/data/rules.txt
"""
import cmath
import itertools

import numpy as np

from qpar.clifford import parse_pattern, pattern_matrix, format_pattern

TOL = 1e-12
VARS = "abc"

# (name, lhs, required rhs prefix, spawn kinds)
SPECS = [
    ("h_cancel", "H a, H a", "", ""),
    ("h_through_x", "H a, X a", "", "Z a"),
    ("h_through_z", "H a, Z a", "", "X a"),
    ("h_through_cx_target", "H b, CX a b", "", "CZ a b"),
    ("h_through_cx_control", "H a, CX a b", "", "W a b"),
    ("h_through_cz", "H a, CZ a b", "", "CX b a"),
    ("h_through_w", "H a, W a b", "", "CX a b"),
    ("x_past_z", "Z a, X a", "X a, Z a", ""),
    ("cx_past_z_control", "Z a, CX a b", "CX a b, Z a", "Z"),
    ("cx_past_z_target", "Z b, CX a b", "CX a b, Z b", "Z"),
    ("x_past_cz", "CZ a b, X a", "X a, CZ a b", "Z"),
    ("cx_past_cz_same", "CZ a b, CX a b", "CX a b, CZ a b", "Z"),
    ("cx_past_cz_control", "CZ a b, CX a c", "CX a c, CZ a b", "Z CZ"),
    ("cx_past_cz_target", "CZ a b, CX c a", "CX c a, CZ a b", "Z CZ"),
    ("x_past_w", "W a b, X a", "X a, W a b", "X W"),
    ("cx_past_w_same", "W a b, CX a b", "CX a b, W a b", "X W"),
    ("cx_past_w_control", "W a b, CX a c", "CX a c, W a b", "X W"),
    ("cx_past_w_target", "W a b, CX c a", "CX c a, W a b", "X W"),
    ("w_past_z", "Z a, W a b", "W a b, Z a", "X CX"),
    ("w_past_cz", "CZ a c, W a b", "W a b, CZ a c", "X CX"),
    ("cz_past_w", "W a c, CZ a b", "CZ a b, W a c", "X CX"),
    ("z_past_cz", "Z a, CZ a b", "CZ a b, Z a", ""),
    ("cz_past_z", "CZ a b, Z a", "Z a, CZ a b", ""),
    ("cz_past_cz", "CZ a b, CZ a c", "CZ a c, CZ a b", ""),
    ("w_past_w", "W a b, W a c", "W a c, W a b", ""),
    ("z_cancel", "Z a, Z a", "", ""),
    ("cz_cancel", "CZ a b, CZ a b", "", ""),
    ("w_cancel", "W a b, W a b", "", ""),
    ("wzw_to_zwz", "W a b, CZ a b, W a b", "CZ a b, W a b, CZ a b", ""),
]


def candidates(kinds, qubits):
    out = []
    for kind in kinds.split():
        if kind in ("X", "Z", "H"):
            out += [f"{kind} {q}" for q in qubits]
        elif kind == "CX":
            out += [f"CX {p} {q}" for p in qubits for q in qubits if p != q]
        else:
            out += [f"{kind} {p} {q}" for p, q in itertools.combinations(qubits, 2)]
    return out


def proportional(u, v):
    idx = np.unravel_index(np.argmax(np.abs(v)), v.shape)
    ph = u[idx] / v[idx]
    if abs(abs(ph) - 1) > TOL or np.max(np.abs(u - ph * v)) > TOL:
        return None
    return ph


def phase_literal(ph):
    for k in range(8):
        z = cmath.exp(1j * cmath.pi * k / 4)
        if abs(ph - z) < 1e-9:
            return ["1", "e(pi/4)", "1j", "e(3pi/4)", "-1", "e(5pi/4)", "-1j", "e(7pi/4)"][k]
    return repr(ph)


def derive(name, lhs, prefix, spawn):
    lhs_p = parse_pattern(lhs)
    qubits = sorted({q for g in lhs_p for q in g[1]})
    u = pattern_matrix(lhs_p)
    base = parse_pattern(prefix) if prefix else []
    if spawn and " " in spawn and spawn.split()[1] in VARS:
        pool = [spawn]  # an exact target gate for the H rules
    else:
        pool = candidates(spawn, qubits)
    for size in range(0, 3):
        for extra in itertools.product(pool, repeat=size):
            if name.startswith("h_through"):
                seq = [parse_pattern(e)[0] for e in extra] + parse_pattern(lhs.split(",")[0])
            else:
                seq = base + [parse_pattern(e)[0] for e in extra]
            ph = proportional(u, pattern_matrix(seq))
            if ph is not None:
                return f"{name:<22} {lhs} ; {format_pattern(seq) or '-'} ; {phase_literal(ph)}"
    raise SystemExit(f"no right-hand side found for {name}")


if __name__ == "__main__":
    print("# name  lhs ; rhs ; phase   (gates in time order, matrix(lhs) = phase * matrix(rhs))")
    print("# generated by scripts/derive_rules.py; pattern qubits a, b, c")
    for spec in SPECS:
        print(derive(*spec))
