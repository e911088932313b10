"""Finite-depth verification of distribution laws, with exact reports.

Every checker enumerates balls in a fixed order (depth ascending, then
representative ascending) and compares exact rationals, so a report is a
pure function of its inputs: byte-identical across runs and across thread
counts.  Work is optionally spread over a thread pool in contiguous
representative chunks whose results merge back in index order.

Enumeration size is guarded: a checker refuses to start when p^depth exceeds
its ball budget (default 10^6) and raises BallBudgetError instead of
thrashing.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence, TypeVar

from .core import (
    Ball,
    Path,
    ball_children,
    ball_to_json,
    format_rational,
    norm,
    path_to_json,
    require_prime,
)
from .distributions import (
    Branch,
    BoundednessFlag,
    DistExpr,
    boundedness_flag,
    evaluate,
)

DEFAULT_BALL_BUDGET = 10**6

_T = TypeVar("_T")


class BallBudgetError(RuntimeError):
    """The requested depth would enumerate more balls than the budget allows."""


def _require_budget(prime: int, depth: int, ball_budget: int) -> None:
    if prime**depth > ball_budget:
        raise BallBudgetError(
            f"refusing to enumerate {prime}^{depth} balls "
            f"(budget {ball_budget}); raise the ball budget to proceed"
        )


def _map_ordered(fn: Callable[[int], _T], count: int, threads: int) -> list[_T]:
    # Pure map over 0..count-1.  Threads split the range into contiguous
    # chunks; pool.map returns chunk results in submission order, so the
    # merged list is independent of scheduling.
    if threads <= 1 or count < 2:
        return [fn(i) for i in range(count)]
    chunk = max(1, -(-count // (threads * 4)))
    spans = [range(lo, min(lo + chunk, count)) for lo in range(0, count, chunk)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = pool.map(lambda span: [fn(i) for i in span], spans)
        return [item for part in parts for item in part]


def _rows_to_text(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [
        max(len(header[i]), *(len(r[i]) for r in rows)) if rows else len(header[i])
        for i in range(len(header))
    ]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(header)).rstrip()]
    for row in rows:
        lines.append("  ".join(cell.rjust(widths[i]) for i, cell in enumerate(row)))
    return "\n".join(lines)


# =====================================================================
# Additivity relation
# =====================================================================

@dataclass(frozen=True)
class RelationViolation:
    ball: Ball
    lhs: Fraction
    rhs_sum: Fraction


@dataclass(frozen=True)
class RelationReport:
    """Result of checking mu(B) = sum of mu over B's children, ball by ball.

    `checked_count` counts the parent balls examined: all balls of depth
    0..max_depth-1, compared against their depth+1 children.  Violations are
    listed in (depth, rep) order.
    """

    prime: int
    max_depth: int
    checked_count: int
    violations: tuple[RelationViolation, ...]

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json_dict(self, max_violations: int | None = None) -> dict:
        shown = list(self.violations)
        truncated = max_violations is not None and len(shown) > max_violations
        if truncated:
            shown = shown[:max_violations]
        return {
            "prime": self.prime,
            "max_depth": self.max_depth,
            "checked_count": self.checked_count,
            "passed": self.passed,
            "total_violations": len(self.violations),
            "truncated": truncated,
            "violations": [
                {
                    "ball": ball_to_json(v.ball),
                    "lhs": format_rational(v.lhs),
                    "children_sum": format_rational(v.rhs_sum),
                }
                for v in shown
            ],
        }

    def to_text(self, max_violations: int | None = None) -> str:
        lines = [
            "additivity relation check",
            f"prime={self.prime} max_depth={self.max_depth} "
            f"balls_checked={self.checked_count} violations={len(self.violations)}",
        ]
        shown = list(self.violations)
        truncated = max_violations is not None and len(shown) > max_violations
        if truncated:
            shown = shown[:max_violations]
        if shown:
            rows = [
                [str(v.ball.depth), str(v.ball.rep), format_rational(v.lhs),
                 format_rational(v.rhs_sum)]
                for v in shown
            ]
            lines.append(_rows_to_text(("depth", "rep", "value", "children_sum"), rows))
        if truncated:
            lines.append(
                f"(truncated: showing {max_violations} of {len(self.violations)} violations)"
            )
        lines.append("result: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def check_relation(
    expr: DistExpr,
    prime: int,
    max_depth: int,
    *,
    ball_budget: int = DEFAULT_BALL_BUDGET,
    threads: int = 1,
) -> RelationReport:
    """Verify the additivity relation on every ball of depth < max_depth."""
    require_prime(prime)
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    _require_budget(prime, max_depth, ball_budget)

    violations: list[RelationViolation] = []
    checked = 0
    for n in range(max_depth):
        def probe(rep: int, n: int = n) -> RelationViolation | None:
            ball = Ball(prime, n, rep)
            lhs = evaluate(expr, ball)
            rhs = sum(
                (evaluate(expr, child) for child in ball_children(ball)), Fraction(0)
            )
            return None if lhs == rhs else RelationViolation(ball, lhs, rhs)

        for outcome in _map_ordered(probe, prime**n, threads):
            checked += 1
            if outcome is not None:
                violations.append(outcome)
    return RelationReport(prime, max_depth, checked, tuple(violations))


# =====================================================================
# Graft precondition
# =====================================================================

@dataclass(frozen=True)
class OnPathFailure:
    level: int
    left_value: Fraction
    right_value: Fraction


@dataclass(frozen=True)
class TailSumFailure:
    level: int
    left_sum: Fraction
    right_sum: Fraction


@dataclass(frozen=True)
class GraftPreconditionReport:
    """Agreement checks that make a graft along a path additive.

    For each level n = 0..depth_checked, with P_n the ball spanned by the
    path's first n digits and i_n the path's next digit:

    * on-path agreement: left(P_n) = right(P_n); failures are recorded with
      both values;
    * tail sums: over the children of P_n, the sum of left - right taken
      over digits below i_n and over digits above i_n must each vanish;
      failures record both sums.

    Both lists empty means the graft of (left, right) along the path
    satisfies the additivity relation on every ball of depth <= depth_checked
    (off-path balls inherit it from whichever side they carry).  The two
    checks are independent: a pair can agree on the path and still fail a
    tail sum, and that failure is exactly an additivity violation at P_n.
    """

    prime: int
    path: Path
    depth_checked: int
    on_path_agreement: tuple[OnPathFailure, ...]
    tail_sum_failures: tuple[TailSumFailure, ...]

    @property
    def passed(self) -> bool:
        return not self.on_path_agreement and not self.tail_sum_failures

    def to_json_dict(self) -> dict:
        return {
            "prime": self.prime,
            "path": path_to_json(self.path),
            "depth_checked": self.depth_checked,
            "passed": self.passed,
            "on_path_agreement": [
                {
                    "level": f.level,
                    "left": format_rational(f.left_value),
                    "right": format_rational(f.right_value),
                }
                for f in self.on_path_agreement
            ],
            "tail_sum_failures": [
                {
                    "level": f.level,
                    "left_sum": format_rational(f.left_sum),
                    "right_sum": format_rational(f.right_sum),
                }
                for f in self.tail_sum_failures
            ],
        }

    def to_text(self) -> str:
        lines = [
            "graft precondition check",
            f"prime={self.prime} depth_checked={self.depth_checked}",
            f"on-path agreement failures: {len(self.on_path_agreement)}",
        ]
        if self.on_path_agreement:
            rows = [
                [str(f.level), format_rational(f.left_value), format_rational(f.right_value)]
                for f in self.on_path_agreement
            ]
            lines.append(_rows_to_text(("level", "left", "right"), rows))
        lines.append(f"tail-sum failures: {len(self.tail_sum_failures)}")
        if self.tail_sum_failures:
            rows = [
                [str(f.level), format_rational(f.left_sum), format_rational(f.right_sum)]
                for f in self.tail_sum_failures
            ]
            lines.append(_rows_to_text(("level", "left_sum", "right_sum"), rows))
        lines.append("result: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def check_graft_precondition(
    left: DistExpr, right: DistExpr, path: Path, max_depth: int
) -> GraftPreconditionReport:
    """Check on-path agreement and tail sums at levels 0..max_depth."""
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    p = path.prime
    on_path: list[OnPathFailure] = []
    tails: list[TailSumFailure] = []
    rep = 0
    for n in range(max_depth + 1):
        here = Ball(p, n, rep)
        lv, rv = evaluate(left, here), evaluate(right, here)
        if lv != rv:
            on_path.append(OnPathFailure(n, lv, rv))
        i_n = path.digit(n)
        q = p**n
        below = above = Fraction(0)
        for b in range(p):
            if b == i_n:
                continue
            child = Ball(p, n + 1, rep + b * q)
            diff = evaluate(left, child) - evaluate(right, child)
            if b < i_n:
                below += diff
            else:
                above += diff
        if below != 0 or above != 0:
            tails.append(TailSumFailure(n, below, above))
        rep += i_n * q
    return GraftPreconditionReport(p, path, max_depth, tuple(on_path), tuple(tails))


# =====================================================================
# Branch hypothesis and distinctness witnesses
# =====================================================================

@dataclass(frozen=True)
class BranchWitness:
    t: int
    s: int
    ball: Ball

    def to_json_dict(self) -> dict:
        return {"t": self.t, "s": self.s, "ball": ball_to_json(self.ball)}


def check_branch_hypothesis(
    children: Sequence[DistExpr] | Branch,
    prime: int,
    k: int,
    search_depth: int,
    *,
    ball_budget: int = DEFAULT_BALL_BUDGET,
) -> BranchWitness | None:
    """Search for a ball of depth >= k separating two branch children.

    Returns the lexicographically first witness (t, s, ball) with t < s,
    balls ordered by depth then representative, or None when no two children
    differ on any ball of depth k..search_depth.  A None result means "no
    witness up to search_depth", never that the children coincide.
    """
    require_prime(prime)
    if isinstance(children, Branch):
        k = children.k
        children = children.children
    if k < 1:
        raise ValueError("k must be >= 1")
    if search_depth < k:
        raise ValueError("search_depth must be >= k")
    table = tuple(children)
    if len(table) != prime**k:
        raise ValueError(f"need {prime**k} children for p={prime}, k={k}, got {len(table)}")
    _require_budget(prime, search_depth, ball_budget)
    for t in range(len(table)):
        for s in range(t + 1, len(table)):
            if table[t] == table[s]:
                # structurally equal children evaluate identically
                continue
            for n in range(k, search_depth + 1):
                for rep in range(prime**n):
                    ball = Ball(prime, n, rep)
                    if evaluate(table[t], ball) != evaluate(table[s], ball):
                        return BranchWitness(t, s, ball)
    return None


def distinctness_witness(
    first: DistExpr,
    second: DistExpr,
    prime: int,
    max_depth: int,
    *,
    ball_budget: int = DEFAULT_BALL_BUDGET,
) -> Ball | None:
    """First ball (by depth, then rep) where the two evaluations differ.

    None means no differing ball up to max_depth, not that the distributions
    are equal.
    """
    require_prime(prime)
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    _require_budget(prime, max_depth, ball_budget)
    for n in range(max_depth + 1):
        for rep in range(prime**n):
            ball = Ball(prime, n, rep)
            if evaluate(first, ball) != evaluate(second, ball):
                return ball
    return None


# =====================================================================
# Norm scans and boundedness
# =====================================================================

@dataclass(frozen=True)
class NormScanEntry:
    depth: int
    max_norm: Fraction
    argmax: Ball


@dataclass(frozen=True)
class NormScanReport:
    """Per-depth maxima of |value|_p with the first ball attaining each."""

    prime: int
    max_depth: int
    entries: tuple[NormScanEntry, ...]

    def to_json_dict(self) -> dict:
        return {
            "prime": self.prime,
            "max_depth": self.max_depth,
            "entries": [
                {
                    "depth": e.depth,
                    "max_norm": format_rational(e.max_norm),
                    "argmax": ball_to_json(e.argmax),
                }
                for e in self.entries
            ],
        }

    def to_csv(self) -> str:
        lines = ["depth,max_norm,argmax_a"]
        for e in self.entries:
            lines.append(f"{e.depth},{format_rational(e.max_norm)},{e.argmax.rep}")
        return "\n".join(lines)

    def to_text(self) -> str:
        rows = [
            [str(e.depth), format_rational(e.max_norm), str(e.argmax.rep)]
            for e in self.entries
        ]
        return "\n".join(
            [
                "norm scan",
                f"prime={self.prime} max_depth={self.max_depth}",
                _rows_to_text(("depth", "max_norm", "argmax_a"), rows),
            ]
        )


def norm_scan(
    expr: DistExpr,
    prime: int,
    max_depth: int,
    *,
    ball_budget: int = DEFAULT_BALL_BUDGET,
    threads: int = 1,
) -> NormScanReport:
    """Exact per-depth maxima of |value|_p over all balls of depth 0..max_depth."""
    require_prime(prime)
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    _require_budget(prime, max_depth, ball_budget)
    entries: list[NormScanEntry] = []
    for n in range(max_depth + 1):
        def probe(rep: int, n: int = n) -> Fraction:
            return norm(evaluate(expr, Ball(prime, n, rep)), prime)

        norms = _map_ordered(probe, prime**n, threads)
        best_rep = max(range(len(norms)), key=lambda r: (norms[r], -r))
        entries.append(NormScanEntry(n, norms[best_rep], Ball(prime, n, best_rep)))
    return NormScanReport(prime, max_depth, tuple(entries))


@dataclass(frozen=True)
class BoundednessVerdict:
    """A syntactic flag next to an empirical scan, with any discrepancy noted.

    The note never overrides the flag; it flags a flag/scan disagreement for
    a human: a bounded flag with maxima growing across the last three depths,
    or an unbounded flag with maxima constant across the whole scan.
    """

    flag: BoundednessFlag
    scan: NormScanReport
    note: str | None

    def to_json_dict(self) -> dict:
        return {
            "flag": self.flag.value,
            "scan": self.scan.to_json_dict(),
            "note": self.note,
        }


def boundedness_verdict(
    expr: DistExpr,
    prime: int,
    max_depth: int,
    *,
    ball_budget: int = DEFAULT_BALL_BUDGET,
    threads: int = 1,
) -> BoundednessVerdict:
    """Pair boundedness_flag(expr) with a norm scan to max_depth."""
    flag = boundedness_flag(expr)
    scan = norm_scan(expr, prime, max_depth, ball_budget=ball_budget, threads=threads)
    maxima = [e.max_norm for e in scan.entries]
    note = None
    if (
        flag is BoundednessFlag.BOUNDED
        and len(maxima) >= 3
        and maxima[-3] < maxima[-2] < maxima[-1]
    ):
        note = "flag says bounded but per-depth maxima grow across the last three depths"
    elif flag is BoundednessFlag.UNBOUNDED and len(set(maxima)) == 1:
        note = "flag says unbounded but per-depth maxima are constant over the scanned depths"
    return BoundednessVerdict(flag, scan, note)
