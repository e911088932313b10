"""Exact distributions on the p-adic integers.

Construction, finite-depth verification, and Riemann-sum integration of
Q-valued finitely additive distributions on Z_p, with every value an exact
rational.  See README.md for a tour; the `padicdist` console script exposes
the same functionality on the command line.
"""

from .core import (
    Ball,
    Divergence,
    DivergenceKind,
    NotPAdicIntegerError,
    Order,
    Path,
    PrimeMismatchError,
    as_rational,
    ball_children,
    ball_contains,
    ball_digits,
    ball_make,
    ball_meet,
    ball_nests_in,
    digit_expand,
    divergence_index,
    format_rational,
    norm,
    parse_rational,
    path_compare,
    path_to_point,
    point_to_path,
    require_padic_integer,
    require_prime,
    valuation,
)
from .distributions import (
    Bernoulli,
    BoundednessFlag,
    Branch,
    Dirac,
    DistExpr,
    Graft,
    Haar,
    LinearComb,
    Mazur,
    Regularize,
    Restrict,
    bernoulli_polynomial,
    boundedness_flag,
    evaluate,
    remark_pair,
)
from .integrate import (
    ConvergenceVerdict,
    IntegrationReport,
    Polynomial,
    StepFn,
    classify_tail,
    integrate,
    parse_polynomial,
    riemann_sum,
    step_fn_from_json,
)
from .serialize import (
    dump_document,
    expr_from_json,
    expr_to_json,
    load_document,
    load_document_file,
)
from .verify import (
    BallBudgetError,
    BoundednessVerdict,
    BranchWitness,
    DEFAULT_BALL_BUDGET,
    GraftPreconditionReport,
    NormScanReport,
    RelationReport,
    boundedness_verdict,
    check_branch_hypothesis,
    check_graft_precondition,
    check_relation,
    distinctness_witness,
    norm_scan,
)

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "BallBudgetError",
    "Bernoulli",
    "BoundednessFlag",
    "BoundednessVerdict",
    "Branch",
    "BranchWitness",
    "ConvergenceVerdict",
    "DEFAULT_BALL_BUDGET",
    "Dirac",
    "DistExpr",
    "Divergence",
    "DivergenceKind",
    "Graft",
    "GraftPreconditionReport",
    "Haar",
    "IntegrationReport",
    "LinearComb",
    "Mazur",
    "NormScanReport",
    "NotPAdicIntegerError",
    "Order",
    "Path",
    "Polynomial",
    "PrimeMismatchError",
    "Regularize",
    "RelationReport",
    "Restrict",
    "StepFn",
    "as_rational",
    "ball_children",
    "ball_contains",
    "ball_digits",
    "ball_make",
    "ball_meet",
    "ball_nests_in",
    "bernoulli_polynomial",
    "boundedness_flag",
    "boundedness_verdict",
    "check_branch_hypothesis",
    "check_graft_precondition",
    "check_relation",
    "classify_tail",
    "digit_expand",
    "distinctness_witness",
    "divergence_index",
    "dump_document",
    "evaluate",
    "expr_from_json",
    "expr_to_json",
    "format_rational",
    "integrate",
    "load_document",
    "load_document_file",
    "norm",
    "norm_scan",
    "parse_polynomial",
    "parse_rational",
    "path_compare",
    "path_to_point",
    "point_to_path",
    "remark_pair",
    "require_padic_integer",
    "require_prime",
    "riemann_sum",
    "step_fn_from_json",
    "valuation",
]
