"""Ground truth at fixed eps by exact linear algebra, and expansion comparison."""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ._exact import as_fraction, fmt, pow_up
from .errors import EpsilonOutOfRange, SingularSystem
from .laurent import LaurentExpansion, evaluate
from .model import PerturbedSMP
from .stationary import StationaryReport, stationary_distribution

DEFAULT_GRID = (Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000), Fraction(1, 10000))


@dataclass(frozen=True)
class NumericSMP:
    eps: Fraction
    states: tuple[int, ...]
    P: tuple[tuple[Fraction, ...], ...]
    E1: tuple[tuple[Fraction, ...], ...]
    row_residuals: tuple[Fraction, ...]
    negative: tuple[tuple[int, int], ...]

    @property
    def e(self) -> tuple[Fraction, ...]:
        return tuple(sum(row, Fraction(0)) for row in self.E1)


def instantiate(model: PerturbedSMP, epsilon, polynomial_exact: bool | None = None) -> NumericSMP:
    """Evaluate every expansion's partial sum at ``epsilon``.

    ``polynomial_exact`` only records the caller's claim that remainders vanish;
    it defaults to the model's own flag.
    """
    eps = as_fraction(epsilon)
    if not 0 < eps <= model.eps0:
        raise EpsilonOutOfRange(f"epsilon {eps} outside (0, {model.eps0}]")
    idx = {s: n for n, s in enumerate(model.states)}
    N = len(idx)
    P = [[Fraction(0)] * N for _ in range(N)]
    E1 = [[Fraction(0)] * N for _ in range(N)]
    negative = []
    for (i, j), a in model.p.items():
        P[idx[i]][idx[j]] = v = evaluate(a, eps)
        if v < 0:
            negative.append((i, j))
    for (i, j), a in model.e.items():
        E1[idx[i]][idx[j]] = v = evaluate(a, eps)
        if v < 0:
            negative.append((i, j))
    residuals = tuple(sum(row, Fraction(0)) - 1 for row in P)
    return NumericSMP(eps, model.states, tuple(map(tuple, P)), tuple(map(tuple, E1)),
                      residuals, tuple(negative))


def solve(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Exact Gaussian elimination with Fraction entries."""
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(bi)] for row, bi in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise SingularSystem("linear system is singular")
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        pivot_row = [x * inv for x in M[col]]
        M[col] = pivot_row
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], pivot_row)]
    return [M[r][n] for r in range(n)]


def embedded_stationary(num: NumericSMP) -> list[Fraction]:
    """Stationary law ``rho`` of the embedded chain: ``rho P = rho``, ``sum rho = 1``."""
    N = len(num.states)
    # transpose(P - I) rho = 0 with the last equation replaced by normalization
    A = [[num.P[r][c] - (1 if r == c else 0) for r in range(N)] for c in range(N)]
    A[-1] = [Fraction(1)] * N
    b = [Fraction(0)] * (N - 1) + [Fraction(1)]
    return solve(A, b)


def numeric_stationary(num: NumericSMP) -> list[Fraction]:
    rho = embedded_stationary(num)
    weights = [r * e for r, e in zip(rho, num.e)]
    total = sum(weights, Fraction(0))
    if total == 0:
        raise SingularSystem("stationary weights sum to zero")
    return [w / total for w in weights]


def numeric_hitting(num: NumericSMP, j: int) -> list[Fraction]:
    """Mean hitting times ``E_ij`` of state ``j`` from every state ``i``."""
    N = len(num.states)
    jj = num.states.index(j)
    A = [[(1 if r == c else 0) - (num.P[r][c] if c != jj else 0) for c in range(N)]
         for r in range(N)]
    return solve(A, list(num.e))


# -- comparison ----------------------------------------------------------------

def _log(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


def slope(eps: Sequence[Fraction], err: Sequence[Fraction]) -> float | None:
    """Least-squares slope of log|err| against log eps over nonzero errors."""
    pts = [(_log(e), _log(abs(d))) for e, d in zip(eps, err) if d != 0]
    if len(pts) < 2:
        return None
    xs, ys = zip(*pts)
    return statistics.linear_regression(xs, ys).slope


@dataclass
class Point:
    eps: Fraction
    oracle: Fraction
    predicted: Fraction
    error: Fraction
    bound: Fraction | None

    @property
    def within_bound(self) -> bool | None:
        return None if self.bound is None else abs(self.error) <= self.bound


@dataclass
class QuantityCheck:
    name: str
    expansion: LaurentExpansion
    points: list[Point] = field(default_factory=list)
    slope: float | None = None
    required_slope: Fraction = Fraction(0)

    @property
    def slope_ok(self) -> bool:
        return self.slope is None or self.slope >= float(self.required_slope)

    @property
    def bound_ok(self) -> bool:
        return all(p.within_bound is not False for p in self.points)

    @property
    def passed(self) -> bool:
        return self.bound_ok and (self.slope_ok or self._bounded_everywhere())

    def _bounded_everywhere(self) -> bool:
        # a certified bound at every grid point settles the question on its own
        return bool(self.points) and all(p.within_bound for p in self.points)

    def to_record(self) -> dict:
        return {
            "quantity": self.name,
            "k": self.expansion.k,
            "slope": self.slope,
            "required_slope": float(self.required_slope),
            "passed": self.passed,
            "points": [{
                "eps": fmt(p.eps),
                "oracle": fmt(p.oracle),
                "predicted": fmt(p.predicted),
                "abs_error": float(abs(p.error)),
                "bound": None if p.bound is None else float(p.bound),
                "within_bound": p.within_bound,
            } for p in self.points],
        }


@dataclass
class ComparisonReport:
    grid: list[Fraction]
    checks: list[QuantityCheck]
    warnings: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[QuantityCheck]:
        return [c for c in self.checks if not c.passed]

    def to_record(self) -> dict:
        return {
            "format_version": 1,
            "grid": [fmt(e) for e in self.grid],
            "passed": self.passed,
            "warnings": self.warnings,
            "checks": [c.to_record() for c in self.checks],
        }


def default_grid(model: PerturbedSMP) -> list[Fraction]:
    top = model.eps0
    for _, _, a in model.expansions():
        if a.bound is not None:
            top = min(top, a.bound.eps_max)
    return [e for e in DEFAULT_GRID if e <= top]


def _check(name: str, a: LaurentExpansion, grid, truth) -> QuantityCheck:
    delta = a.bound.delta if a.bound is not None else Fraction(1)
    qc = QuantityCheck(name, a, required_slope=a.k + delta / 2)
    for eps in grid:
        pred = evaluate(a, eps)
        err = truth[eps] - pred
        bound = None
        if a.bound is not None and eps <= a.bound.eps_max:
            bound = a.bound.G * pow_up(eps, a.k + a.bound.delta)
        qc.points.append(Point(eps, truth[eps], pred, err, bound))
    qc.slope = slope([p.eps for p in qc.points], [p.error for p in qc.points])
    return qc


def compare(model: PerturbedSMP, eps_grid: Sequence | None = None,
            report: StationaryReport | None = None,
            pairs: Sequence[tuple[int, int, LaurentExpansion]] = ()) -> ComparisonReport:
    """Check stationary and return-time expansions against exact solves.

    ``report`` may be supplied to test a precomputed (or deliberately altered)
    set of expansions; ``pairs`` adds ``(i, j, E_ij)`` hitting-time checks.
    """
    grid = [as_fraction(e) for e in (eps_grid if eps_grid is not None else default_grid(model))]
    for eps in grid:
        if not 0 < eps <= model.eps0:
            raise EpsilonOutOfRange(f"grid value {eps} outside (0, {model.eps0}]")
    if report is None:
        report = stationary_distribution(model, force=True)
    pi_true, E_true = {}, {}
    warnings = []
    for eps in grid:
        num = instantiate(model, eps)
        if num.negative:
            warnings.append(f"eps={eps}: negative entries at {list(num.negative)}")
        if any(num.row_residuals):
            warnings.append(f"eps={eps}: row sums deviate from one by "
                            f"{[float(x) for x in num.row_residuals]}")
        pi_true[eps] = dict(zip(num.states, numeric_stationary(num)))
        E_true[eps] = {}
        for j in num.states:
            col = dict(zip(num.states, numeric_hitting(num, j)))
            for i in num.states:
                E_true[eps][i, j] = col[i]
    checks = []
    for ent in report.entries:
        i = ent.state
        checks.append(_check(f"pi[{i}]", ent.pi, grid, {e: pi_true[e][i] for e in grid}))
        checks.append(_check(f"E[{i},{i}]", ent.E, grid, {e: E_true[e][i, i] for e in grid}))
    for i, j, a in pairs:
        checks.append(_check(f"E[{i},{j}]", a, grid, {e: E_true[e][i, j] for e in grid}))
    return ComparisonReport(grid, checks, warnings)
