"""Threshold bounds from truncated cluster series.

For the self-dual tiling with parameter m, the truncated series

    D_n(p) = (2/m) * sum over tally rows (e, v, b) with e <= n of
             count * (1/v) * (p^e q^b - q^e p^b),   q = 1 - p,

enters the defining equation f_n(p) = p - 2/m + D_n(p) = 0.  The
largest root of f_n in (0, 1/2] is an upper bound on the bond
percolation threshold of the tiling; the trivial root p = 0 is
excluded.  Larger truncation sizes n give sharper (smaller) bounds
because each tally row contributes positively on (0, 1/2) whenever
its boundary exceeds its edge count, which check_isoperimetry
verifies exhaustively.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .animals import TallyTable, enumerate_animals

__all__ = [
    "GRID_STEP",
    "DEFAULT_TOL",
    "BracketingError",
    "BoundResult",
    "IsoperimetryReport",
    "eval_Dn",
    "eval_fn",
    "solve_ph",
    "isoperimetric_constant",
    "check_isoperimetry",
]

log = logging.getLogger(__name__)

GRID_STEP = 1e-3
DEFAULT_TOL = 1e-9
_MAX_BISECT = 200


class BracketingError(RuntimeError):
    """f_n has no sign change on the search grid in (0, 1/2]."""


@dataclass(frozen=True)
class BoundResult:
    """Certificate for one solved bound.

    p_h is the largest root of f_n in (0, 1/2], bracketed by
    lo < p_h <= hi with |f_n(p_h)| = residual <= the solver tolerance.
    The digest ties the certificate to the exact tally it used.
    sign_changes counts all roots seen on the scan grid; more than one
    is legal but logged, and p_h is always the largest.
    """

    m: int
    n: int
    p_h: float
    residual: float
    bracket: tuple[float, float]
    tally_digest: str
    sign_changes: int


def eval_Dn(tally: TallyTable, p: float) -> float:
    """Evaluate the truncated series D_n at p.

    Rows are summed in canonical order with compensated summation, so
    the value is bit-stable across runs.  At p = 1/2 every term is
    antisymmetric and the result is exactly 0.0.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0,1], got {p}")
    q = 1.0 - p
    terms = [
        (count / v) * (p ** e * q ** b - q ** e * p ** b)
        for (e, v, b), count in sorted(tally.counts.items())
    ]
    return (2.0 / tally.m) * math.fsum(terms)


def eval_fn(tally: TallyTable, p: float) -> float:
    """f_n(p) = p - 2/m + D_n(p); f_n(0) = 0 exactly."""
    return p - 2.0 / tally.m + eval_Dn(tally, p)


def _scan_roots(tally: TallyTable) -> list[tuple[float, float, float, float]]:
    """Descending grid scan of f_n over (0, 1/2].

    Returns brackets (lo, hi, f_lo, f_hi) in descending order of p;
    grid points are k * GRID_STEP for k = 500 .. 1, so the grid is
    exact and identical on every run.

    f_n(0.5) == 0.0 is structural: D_n(1/2) is exactly zero by term
    antisymmetry, so the top point is a root precisely when 2/m = 1/2.
    That case short-circuits to a zero-width bracket.  Interior grid
    values of exactly 0.0 are a different matter: f_n is analytically
    O(p^k) near 0 with cancelling O(1) terms, so doubles can round to
    zero where the true value is merely tiny.  Such points are treated
    as sign-indeterminate and skipped; a sign change is then recorded
    between the nearest grid points with nonzero values.
    """
    top = 500 * GRID_STEP  # == 0.5
    f_top = eval_fn(tally, top)
    if f_top == 0.0:
        return [(top, top, 0.0, 0.0)]
    found = []
    last_p, last_f = top, f_top
    for k in range(499, 0, -1):
        p = k * GRID_STEP
        fp = eval_fn(tally, p)
        if fp == 0.0:
            continue
        if (fp > 0.0) != (last_f > 0.0):
            found.append((p, last_p, fp, last_f))
        last_p, last_f = p, fp
    return found


def _bisect(tally: TallyTable, lo: float, hi: float, f_lo: float,
            f_hi: float, tol: float) -> tuple[float, float, float, float]:
    """Shrink a sign-change bracket; returns (p_h, residual, lo, hi).

    Runs until the bracket is narrower than tol and the best interior
    residual is within tol, or the bracket hits the floating point
    floor.  p_h is chosen strictly inside (lo, hi] so the bracket
    invariant lo < p_h <= hi always holds.
    """
    best_p, best_f = hi, abs(f_hi)
    for _ in range(_MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = eval_fn(tally, mid)
        if abs(f_mid) < best_f:
            best_p, best_f = mid, abs(f_mid)
        if f_mid == 0.0:
            return mid, 0.0, lo, mid
        if (f_mid > 0.0) == (f_hi > 0.0):
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid
        if best_p <= lo or best_p > hi:
            best_p, best_f = hi, abs(f_hi)
        if hi - lo < tol and best_f <= tol:
            break
    return best_p, best_f, lo, hi


def solve_ph(tally: TallyTable, tol: float = DEFAULT_TOL) -> BoundResult:
    """Largest root of f_n in (0, 1/2], located by grid scan + bisection.

    Raises BracketingError when f_n has no sign change on the grid; the
    root, if any, would then be below GRID_STEP.
    """
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    m = tally.m
    if tally.counts.get((0, 1, m)) != 1:
        raise ValueError("tally must contain the single-vertex row (0, 1, m)")
    roots = _scan_roots(tally)
    if not roots:
        raise BracketingError(
            f"no sign change of f_n on (0, 0.5] for m={m}, n={tally.max_edges}: "
            f"any root is below the grid step {GRID_STEP}")
    if len(roots) > 1:
        log.warning("f_n has %d sign changes on (0, 0.5] for m=%d, n=%d; "
                    "reporting the largest root", len(roots), m, tally.max_edges)
    lo, hi, f_lo, f_hi = roots[0]
    if lo == hi:  # exact grid-point root, e.g. p = 1/2 for m = 4
        p_h, residual = hi, 0.0
        lo = math.nextafter(hi, 0.0)
    else:
        p_h, residual, lo, hi = _bisect(tally, lo, hi, f_lo, f_hi, tol)
    return BoundResult(
        m=m,
        n=tally.max_edges,
        p_h=p_h,
        residual=residual,
        bracket=(lo, hi),
        tally_digest=tally.digest(),
        sign_changes=len(roots),
    )


def isoperimetric_constant(m: int) -> float:
    """Edge-isoperimetric constant (m-2) * sqrt(1 - 4/(m-2)^2).

    Defined for m >= 5; the value is the infimum of boundary/vertices
    over finite connected subgraphs, strictly positive exactly in the
    hyperbolic regime.  At m = 4 the formula degenerates to 0 (the
    square lattice is amenable), so m <= 4 is rejected.
    """
    if m <= 4:
        raise ValueError(f"isoperimetric constant requires m >= 5, got {m}")
    s = float(m - 2)
    return s * math.sqrt(1.0 - 4.0 / (s * s))


@dataclass(frozen=True)
class IsoperimetryReport:
    """Exhaustive boundary-vs-edges audit of a tally."""

    m: int
    max_edges: int
    isoperimetric: float
    total_animals: int
    violations: int
    violating_rows: tuple[tuple[int, int, int, int], ...]
    min_ratio: float

    @property
    def ok(self) -> bool:
        return self.violations == 0


def check_isoperimetry(m: int, max_edges: int,
                       tally: TallyTable | None = None,
                       workers: int = 1) -> IsoperimetryReport:
    """Verify boundary > edges for every connected subgraph up to max_edges.

    This strict inequality is what makes every series term positive on
    (0, 1/2), so any violation would invalidate the bound chain; the
    report records the minimum observed boundary/edges ratio (over rows
    with at least one edge).  The per-animal ratio boundary/vertices is
    deliberately not compared against the isoperimetric constant: that
    constant is an infimum over all sizes, not a bound at each size.
    """
    if m <= 4:
        raise ValueError(f"isoperimetry check requires m >= 5, got {m}")
    if tally is None:
        tally = enumerate_animals(m, max_edges, workers=workers)
    elif tally.m != m or tally.max_edges < max_edges:
        raise ValueError("supplied tally does not cover the requested check")
    total = 0
    violations = 0
    bad: list[tuple[int, int, int, int]] = []
    ratios = []
    for e, v, b, count in tally.rows():
        if e > max_edges:
            continue
        total += count
        if b <= e:
            violations += count
            bad.append((e, v, b, count))
        if e >= 1:
            ratios.append(b / e)
    return IsoperimetryReport(
        m=m,
        max_edges=max_edges,
        isoperimetric=isoperimetric_constant(m),
        total_animals=total,
        violations=violations,
        violating_rows=tuple(bad),
        min_ratio=min(ratios, default=math.inf),
    )
