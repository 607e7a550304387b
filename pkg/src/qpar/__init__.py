"""Logarithmic-depth parallelization of quantum circuits with ancillae.

Circuits are layered gate lists (qubit 0 is the most significant bit of the
basis index). Each parallelizer returns an ``EmbeddedCircuit`` whose ancillae
start and end in |0>; ``verify_embedding`` checks that contract by
simulation.
"""
from .basic import (
    AncillaPool,
    ControlledSeries,
    Permutation,
    common_diagonalizer,
    compress_schedule,
    gen_power_circuit,
    parallelize_commuting_circuit,
    parallelize_commuting_series,
    parallelize_diagonal_series,
    parallelize_fanout,
    permutation_in_place,
    permutation_with_ancillae,
    round_robin_rounds,
)
from .circuit import (
    Circuit,
    CircuitError,
    EmbeddedCircuit,
    Gate,
    Metrics,
    layerize,
    metrics,
    normalize,
)
from .clifford import (
    NormalForm,
    RewriteRule,
    RuleVerificationFailure,
    comb_hadamards,
    group_zw,
    load_rule_table,
    normal_form,
    parallelize_clifford,
    pull_cnots_left,
)
from .cnot import (
    ParitySumPlan,
    load_depth_constants,
    parallelize_cnot_circuit,
    parallelize_cnot_diagonal,
)
from .diag import (
    ParityCoefficients,
    PhaseVector,
    mu_coefficients,
    parity_phase_circuit,
    synthesize_diagonal,
)
from .errors import NonCommuting, NotParallelizable
from .generators import GeneratorSpec, gen_css_demo, gen_qft, gen_random, gen_staircase
from .gf2 import GF2Matrix, SingularMatrix, invert, matrix_of_cnot_circuit, rank
from .sim import VerificationReport, WidthCapExceeded, equal_up_to_phase, unitary_of, verify_embedding
from .textformat import ParseError, emit_circuit, parse_circuit, parse_embedded

__version__ = "0.1.0"
