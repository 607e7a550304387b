"""Command-line front end: ``qpar gen | parallelize | stats | verify | normal-form | synth-diag``.

Exit status is 0 on success, 1 when a verification fails and 2 for usage,
parse or unsupported-circuit errors. ``-`` names standard input or output.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .basic import (
    ControlledSeries,
    Permutation,
    parallelize_commuting_circuit,
    parallelize_diagonal_series,
    parallelize_fanout,
    permutation_with_ancillae,
)
from .circuit import Circuit, CircuitError, EmbeddedCircuit, H_MATRIX, X_MATRIX, Z_MATRIX, metrics
from .clifford import normal_form, parallelize_clifford
from .cnot import parallelize_cnot_circuit, parallelize_cnot_diagonal
from .diag import read_phase_vector, synthesize_diagonal
from .errors import STAIRCASE_MESSAGE, NotParallelizable
from .generators import FAMILIES, GeneratorSpec, generate
from .gf2 import matrix_of_cnot_circuit
from .sim import WIDTH_CAP, unitary_of, verify_embedding
from .textformat import emit_circuit, parse_circuit, parse_embedded

PASSES = ("auto", "cnot", "cnot_diag", "diag_series", "commuting", "clifford", "fanout", "perm")
AUTO_ORDER = ("cnot", "cnot_diag", "clifford", "commuting")


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _perm_pass(c: Circuit) -> EmbeddedCircuit:
    m = matrix_of_cnot_circuit(c)
    if not m.is_permutation():
        raise NotParallelizable("CX circuit does not compute a qubit permutation")
    images = [0] * m.n
    for i in range(m.n):
        images[m.support(i)[0]] = i
    return permutation_with_ancillae(Permutation(tuple(images)))


def run_pass(name: str, c: Circuit, seed: int = 0) -> tuple[EmbeddedCircuit, str]:
    if name == "auto":
        for candidate in AUTO_ORDER:
            try:
                return run_pass(candidate, c, seed)
            except CircuitError:
                continue
        raise NotParallelizable(f"no pass accepts this circuit; {STAIRCASE_MESSAGE}")
    if name == "cnot":
        return parallelize_cnot_circuit(c), name
    if name == "cnot_diag":
        return parallelize_cnot_diagonal(c), name
    if name == "diag_series":
        return parallelize_diagonal_series(c.gates, c.width), name
    if name == "commuting":
        return parallelize_commuting_circuit(c, seed=seed), name
    if name == "clifford":
        return parallelize_clifford(c), name
    if name == "fanout":
        return parallelize_fanout(ControlledSeries.from_circuit(c)), name
    if name == "perm":
        return _perm_pass(c), name
    raise UsageError(f"unknown pass {name!r}")


def _report(r, out=None) -> None:
    out = out or sys.stderr
    status = "equivalent" if r.equivalent else "NOT equivalent"
    print(
        f"{status} (backend {r.backend}, max deviation {r.max_deviation:.3g}, "
        f"leakage {r.leakage:.3g}, phase {r.global_phase:.6g})",
        file=out,
    )


# ---------------------------------------------------------------- subcommands


def _unitary_arg(text: str):
    named = {"X": X_MATRIX, "H": H_MATRIX, "Z": Z_MATRIX}
    if text.upper() in named:
        return named[text.upper()]
    if text.lower().startswith("phase:"):
        return np.diag([1.0, np.exp(1j * float(text.split(":", 1)[1]))])
    raise UsageError(f"unknown unitary {text!r}; use X, H, Z or phase:THETA")


def cmd_gen(args) -> int:
    params = {"reverse": args.reverse}
    if args.u:
        params["u"] = _unitary_arg(args.u)
    spec = GeneratorSpec(args.family, args.n, args.gates, args.seed, params)
    _write(args.output, emit_circuit(generate(spec)))
    return 0


def cmd_parallelize(args) -> int:
    c = parse_circuit(_read(args.input))
    e, used = run_pass(args.pass_name, c, args.seed)
    _write(args.output, emit_circuit(e))
    m = metrics(e)
    print(f"pass {used}: depth {c.depth} -> {m.depth}, ancillae {e.n_anc}", file=sys.stderr)
    if not args.verify:
        return 0
    if c.width > WIDTH_CAP:
        print(f"verification skipped: {c.width} data qubits exceeds {WIDTH_CAP}", file=sys.stderr)
        return 0
    ref = unitary_of(c) / e.phase
    r = verify_embedding(e, ref, tol=args.tol, up_to_phase=not args.exact_phase)
    _report(r)
    return 0 if r.equivalent else 1


def cmd_stats(args) -> int:
    e = parse_embedded(_read(args.input))
    m = metrics(e)
    print(f"depth {m.depth}")
    print(f"width {m.width}")
    print(f"ancillae {e.n_anc}")
    print(f"gates {m.gate_count}")
    print(f"two_qubit {m.two_qubit_count}")
    return 0


def cmd_verify(args) -> int:
    cand = parse_embedded(_read(args.candidate))
    if args.ancillae is not None:
        cand = EmbeddedCircuit(cand.circuit, cand.circuit.width - args.ancillae, args.ancillae)
    ref = parse_circuit(_read(args.reference))
    r = verify_embedding(cand, ref, tol=args.tol, up_to_phase=not args.exact_phase)
    _report(r, out=sys.stdout)
    return 0 if r.equivalent else 1


def cmd_normal_form(args) -> int:
    nf = normal_form(parse_circuit(_read(args.input)))
    header = (
        f"# normal form: {len(nf.cnot_block)} CX/X, bands z1={len(nf.z1)} z2={len(nf.z2)} "
        f"z3={len(nf.z3)}, final H on {list(nf.final_h)}\n"
        f"# source = ({nf.phase.real:.12g}{nf.phase.imag:+.12g}j) * circuit below\n"
    )
    _write(args.output, header + emit_circuit(nf.to_circuit()))
    return 0


def cmd_synth_diag(args) -> int:
    c = synthesize_diagonal(read_phase_vector(_read(args.input)), cap=args.cap)
    _write(args.output, emit_circuit(c))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qpar", description="Log-depth circuit parallelization toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a circuit family")
    g.add_argument("family", choices=FAMILIES)
    g.add_argument("-n", type=int, default=4, help="number of qubits")
    g.add_argument("--gates", type=int, default=0, help="gate count for random families")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--reverse", action="store_true", help="QFT: append the bit reversal")
    g.add_argument("--u", help="staircase unitary: X, H, Z or phase:THETA")
    g.add_argument("-o", "--output", default="-")
    g.set_defaults(func=cmd_gen)

    g = sub.add_parser("parallelize", help="rewrite a circuit to logarithmic depth")
    g.add_argument("input")
    g.add_argument("--pass", dest="pass_name", choices=PASSES, default="auto")
    g.add_argument("--verify", action="store_true", help="simulate and compare with the input")
    g.add_argument("--exact-phase", action="store_true", help="do not allow a global phase")
    g.add_argument("--tol", type=float, default=1e-9)
    g.add_argument("--seed", type=int, default=0, help="seed for the common diagonalizer")
    g.add_argument("-o", "--output", default="-")
    g.set_defaults(func=cmd_parallelize)

    g = sub.add_parser("stats", help="print depth, width and gate counts")
    g.add_argument("input")
    g.set_defaults(func=cmd_stats)

    g = sub.add_parser("verify", help="check an ancilla embedding against a reference circuit")
    g.add_argument("candidate")
    g.add_argument("reference")
    g.add_argument("--ancillae", type=int, help="override the candidate's ancilla count")
    g.add_argument("--exact-phase", action="store_true")
    g.add_argument("--tol", type=float, default=1e-9)
    g.set_defaults(func=cmd_verify)

    g = sub.add_parser("normal-form", help="CNOT block, three CZ bands, final H layer")
    g.add_argument("input")
    g.add_argument("-o", "--output", default="-")
    g.set_defaults(func=cmd_normal_form)

    g = sub.add_parser("synth-diag", help="synthesize a diagonal unitary from a phase vector file")
    g.add_argument("input")
    g.add_argument("--cap", type=int, default=6)
    g.add_argument("-o", "--output", default="-")
    g.set_defaults(func=cmd_synth_diag)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (CircuitError, UsageError, ValueError, OSError) as exc:
        print(f"qpar: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
