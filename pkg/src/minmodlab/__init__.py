"""minmodlab: an exact computation lab for the minimum modulus of
operators on finite sections of sup-norm sequence spaces.

Everything is rational arithmetic end to end: minimum moduli come from
facet linear programs with exact witnesses, an independent certified
oracle brackets them, and the harness studies how the finite sections
shadow the infinite-dimensional picture (descending moduli, escaping
minimizers, a rank-one repair that lifts the minimum).
"""

from .exactnum import (
    Covector,
    Rational,
    Vector,
    as_rational,
    basis_vector,
    covector,
    dual_norm_l1,
    evaluate,
    format_rational,
    parse_rational,
    rat,
    sup_norm,
    vector,
    zero_vector,
)
from .linops import (
    Dense,
    Diagonal,
    Identity,
    Operator,
    RankOne,
    Scaled,
    Sum,
    add,
    materialize,
    op_norm_sup,
    op_norm_witness,
    scale,
    zero_operator,
)
from .lpsolve import (
    LinearProgram,
    LPResult,
    LPStatus,
    Relation,
    dump_lp,
    linear_program,
    parse_lp,
    solve,
)
from .minmod import (
    BudgetExceededError,
    MinModResult,
    OracleResult,
    PerturbationGain,
    brute_force_min,
    min_modulus_sup,
    perturbation_gain,
)
from .constructions import (
    CounterexampleFamily,
    FamilyKind,
    c0_family,
    closed_form_min_modulus,
    deflation_operator,
    deflation_repair,
    direct_sum_family,
    direct_sum_minimizer,
    direct_sum_operator,
    direct_sum_perturbation,
    geometric_functional,
    minimizing_vector,
    shifted_geometric_functional,
)
from .harness import (
    DEFAULT_CONFIG,
    ConvergenceReport,
    HarnessConfig,
    InvariantViolation,
    Report,
    SearchOutcome,
    WeakNullStatus,
    WeakNullVerdict,
    convergence_study,
    emit_report,
    non_attainment_profile,
    rank_one_search,
    weak_null_test,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
