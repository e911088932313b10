"""Finitely additive Q-valued distributions on Z_p, as expression trees.

A distribution assigns an exact rational to every ball of Z_p subject to the
additivity law

    mu(B) = sum of mu(C) over the p children C of B,

checked at any finite depth by `padicdist.verify.check_relation`.  This
module defines the expression language and its exact evaluator:

base families
    Dirac(point)      indicator of the point: 1 on balls containing it
    Haar(scale)       scale / p^n on every depth-n ball
    Mazur             rep/p^n - 1/2
    Bernoulli(k)      p^(n(k-1)) * B_k(rep / p^n), B_k the k-th Bernoulli
                      polynomial (B_1 = Mazur)

combinators
    LinearComb        rational linear combination
    Restrict          zero outside a fixed cell
    Regularize        mu(B) - alpha^(-k) * mu(alpha * B) for a unit alpha
    Graft             splice two distributions along a digit path
    Branch            dispatch on the first k digits among p^k distributions

Values are exact Fractions; no node ever rounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Mapping, Union

from .core import (
    Ball,
    Path,
    PrimeMismatchError,
    as_rational,
    ball_children,
    ball_contains,
    ball_digits,
    ball_make,
    ball_meet,
    valuation,
)

_ZERO = Fraction(0)
_ONE = Fraction(1)


# =====================================================================
# Bernoulli numbers and polynomials
# =====================================================================

@lru_cache(maxsize=None)
def _bernoulli_number(j: int) -> Fraction:
    # First convention (B_1 = -1/2), via sum_{i<=j} C(j+1, i) B_i = 0.
    if j == 0:
        return _ONE
    acc = sum(comb(j + 1, i) * _bernoulli_number(i) for i in range(j))
    return Fraction(-acc, j + 1)


def bernoulli_polynomial(k: int, x: Fraction | int) -> Fraction:
    """B_k(x) = sum_j C(k, j) B_j x^(k-j), exactly (first convention).

    B_0(x) = 1, B_1(x) = x - 1/2, B_2(x) = x^2 - x + 1/6, ...
    """
    if not isinstance(k, int) or k < 0:
        raise ValueError(f"polynomial index must be an integer >= 0, got {k!r}")
    t = as_rational(x)
    return sum(
        (comb(k, j) * _bernoulli_number(j) * t ** (k - j) for j in range(k + 1)),
        _ZERO,
    )


# =====================================================================
# Expression nodes
# =====================================================================

@dataclass(frozen=True)
class Dirac:
    """Point mass: value 1 on balls containing the point, else 0."""

    point: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "point", as_rational(self.point))


@dataclass(frozen=True)
class Haar:
    """Translation-invariant distribution: scale / p^n on each depth-n ball."""

    scale: Fraction = field(default_factory=lambda: _ONE)

    def __post_init__(self) -> None:
        object.__setattr__(self, "scale", as_rational(self.scale))


@dataclass(frozen=True)
class Mazur:
    """rep/p^n - 1/2 on the ball rep + (p^n); equals Bernoulli(1)."""


@dataclass(frozen=True)
class Bernoulli:
    """p^(n(k-1)) * B_k(rep / p^n) on the ball rep + (p^n), k >= 1."""

    k: int

    def __post_init__(self) -> None:
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError(f"Bernoulli index must be an integer >= 1, got {self.k!r}")


@dataclass(frozen=True)
class LinearComb:
    """sum of coef * expr over the given (coef, expr) terms."""

    terms: tuple[tuple[Fraction, "DistExpr"], ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "terms", tuple((as_rational(c), e) for c, e in self.terms)
        )


@dataclass(frozen=True)
class Restrict:
    """The inner distribution confined to a cell: value mu(B meet cell)."""

    cell: Ball
    expr: "DistExpr"


@dataclass(frozen=True)
class Regularize:
    """mu(B) - alpha^(-k) * mu(alpha * B), alpha a unit of Z_p, alpha != 1.

    alpha * B is the depth-n ball with representative alpha * rep mod p^n.
    The unit condition is checked against the ball's prime at evaluation.
    """

    k: int
    alpha: Fraction
    expr: "DistExpr"

    def __post_init__(self) -> None:
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError(f"regularization weight must be an integer >= 1, got {self.k!r}")
        object.__setattr__(self, "alpha", as_rational(self.alpha))
        if self.alpha == 1:
            raise ValueError("alpha must differ from 1")


@dataclass(frozen=True)
class Graft:
    """Splice `left` and `right` along a digit path.

    On a ball whose digits all follow the path, the value is left's.  On any
    other ball the first digit that leaves the path decides: smaller than the
    path's digit -> left, larger -> right.  Each off-path subtree therefore
    carries exactly one of the two inputs.
    """

    path: Path
    left: "DistExpr"
    right: "DistExpr"


@dataclass(frozen=True)
class Branch:
    """Dispatch on the integer formed by the first k digits.

    children[t] governs the depth-k subtree of cells whose representative is
    t mod p^k; on balls shallower than k the value is the sum over child
    cells, making the additivity law hold by construction.  The children are
    a total table indexed 0..p^k-1 (a dict with exactly those keys is
    accepted and normalized).
    """

    k: int
    children: tuple["DistExpr", ...]

    def __post_init__(self) -> None:
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError(f"branch level must be an integer >= 1, got {self.k!r}")
        ch = self.children
        if isinstance(ch, Mapping):
            if sorted(ch) != list(range(len(ch))):
                raise ValueError("branch children keys must be exactly 0..len-1")
            ch = tuple(ch[i] for i in range(len(ch)))
        else:
            ch = tuple(ch)
        if not ch:
            raise ValueError("branch needs at least one child")
        object.__setattr__(self, "children", ch)


DistExpr = Union[
    Dirac, Haar, Mazur, Bernoulli, LinearComb, Restrict, Regularize, Graft, Branch
]


# =====================================================================
# Evaluation
# =====================================================================

def _branch_table_size(expr: Branch, p: int) -> int:
    size = p**expr.k
    if len(expr.children) != size:
        raise ValueError(
            f"branch at level {expr.k} needs {size} children for p={p}, "
            f"got {len(expr.children)}"
        )
    return size


def evaluate(expr: DistExpr, ball: Ball) -> Fraction:
    """Exact value of the distribution on the ball.

    Prime consistency between the expression and the ball is enforced here:
    an embedded path or cell over a different prime raises
    PrimeMismatchError, a Dirac point outside Z_p raises
    NotPAdicIntegerError, and a Regularize alpha that is not a unit for the
    ball's prime raises ValueError.
    """
    p, n, a = ball.prime, ball.depth, ball.rep

    if isinstance(expr, Dirac):
        return _ONE if ball_contains(ball, expr.point) else _ZERO

    if isinstance(expr, Haar):
        return expr.scale / p**n

    if isinstance(expr, Mazur):
        return Fraction(a, p**n) - Fraction(1, 2)

    if isinstance(expr, Bernoulli):
        return p ** (n * (expr.k - 1)) * bernoulli_polynomial(expr.k, Fraction(a, p**n))

    if isinstance(expr, LinearComb):
        return sum((c * evaluate(e, ball) for c, e in expr.terms), _ZERO)

    if isinstance(expr, Restrict):
        meet = ball_meet(ball, expr.cell)
        return evaluate(expr.expr, meet) if meet is not None else _ZERO

    if isinstance(expr, Regularize):
        if valuation(expr.alpha, p) != 0:
            raise ValueError(f"alpha={expr.alpha} is not a unit of Z_p for p={p}")
        scaled = ball_make(p, n, expr.alpha * a)
        return evaluate(expr.expr, ball) - expr.alpha ** (-expr.k) * evaluate(
            expr.expr, scaled
        )

    if isinstance(expr, Graft):
        if expr.path.prime != p:
            raise PrimeMismatchError(
                f"graft path over p={expr.path.prime} evaluated at p={p}"
            )
        for j, d in enumerate(ball_digits(ball)):
            pd = expr.path.digit(j)
            if d != pd:
                return evaluate(expr.left if d < pd else expr.right, ball)
        return evaluate(expr.left, ball)

    if isinstance(expr, Branch):
        size = _branch_table_size(expr, p)
        if n >= expr.k:
            return evaluate(expr.children[a % size], ball)
        return sum((evaluate(expr, c) for c in ball_children(ball)), _ZERO)

    raise TypeError(f"not a distribution expression: {type(expr).__name__}")


# =====================================================================
# Boundedness bookkeeping
# =====================================================================

class BoundednessFlag(Enum):
    BOUNDED = "bounded"
    UNBOUNDED = "unbounded"
    UNKNOWN = "unknown"


def boundedness_flag(expr: DistExpr) -> BoundednessFlag:
    """Syntactic boundedness of sup over balls of |value|_p.

    The flag is propagated structurally and never consults ball values:
    point masses are bounded; the Haar/Mazur/Bernoulli families are
    unbounded; a graft is bounded iff both sides are and unbounded if either
    side is; a branch is bounded iff all children are and unbounded if any
    child is; a linear combination is bounded if all terms are, unbounded if
    exactly one unbounded term survives with a nonzero coefficient, and
    unknown otherwise (cancellation can hide either outcome); restriction
    keeps the inner flag; regularization is always unknown here, its point
    being to cancel growth.  `padicdist.verify.boundedness_verdict` compares
    this flag with an empirical norm scan.
    """
    if isinstance(expr, Dirac):
        return BoundednessFlag.BOUNDED
    if isinstance(expr, (Haar, Mazur, Bernoulli)):
        return BoundednessFlag.UNBOUNDED
    if isinstance(expr, LinearComb):
        flags = [(c, boundedness_flag(e)) for c, e in expr.terms]
        if all(f is BoundednessFlag.BOUNDED for _, f in flags):
            return BoundednessFlag.BOUNDED
        live = [i for i, (c, f) in enumerate(flags) if f is BoundednessFlag.UNBOUNDED and c != 0]
        if len(live) == 1 and all(
            f is BoundednessFlag.BOUNDED for i, (_, f) in enumerate(flags) if i != live[0]
        ):
            return BoundednessFlag.UNBOUNDED
        return BoundednessFlag.UNKNOWN
    if isinstance(expr, Restrict):
        return boundedness_flag(expr.expr)
    if isinstance(expr, Regularize):
        return BoundednessFlag.UNKNOWN
    if isinstance(expr, Graft):
        sides = {boundedness_flag(expr.left), boundedness_flag(expr.right)}
        if sides == {BoundednessFlag.BOUNDED}:
            return BoundednessFlag.BOUNDED
        if BoundednessFlag.UNBOUNDED in sides:
            return BoundednessFlag.UNBOUNDED
        return BoundednessFlag.UNKNOWN
    if isinstance(expr, Branch):
        flags = {boundedness_flag(c) for c in expr.children}
        if flags == {BoundednessFlag.BOUNDED}:
            return BoundednessFlag.BOUNDED
        if BoundednessFlag.UNBOUNDED in flags:
            return BoundednessFlag.UNBOUNDED
        return BoundednessFlag.UNKNOWN
    raise TypeError(f"not a distribution expression: {type(expr).__name__}")


# =====================================================================
# Derived constructions
# =====================================================================

def remark_pair(nu0: DistExpr, nu1: DistExpr, path: Path) -> tuple[DistExpr, DistExpr]:
    """A candidate pair for grafting along `path` built from two inputs.

    Returns (mu1, mu2) with mu1 = nu0 and mu2 the level-1 branch placing nu0
    on the subtree the path enters first and nu1 on every other subtree.
    The pair comes with no agreement guarantee; run
    `padicdist.verify.check_graft_precondition` before relying on it.
    """
    i0 = path.digit(0)
    children = tuple(nu0 if t == i0 else nu1 for t in range(path.prime))
    return nu0, Branch(1, children)
