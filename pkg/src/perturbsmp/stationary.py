"""Stationary distribution expansions and their structural diagnostics."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ._exact import fmt
from .errors import InvalidModel, InvariantViolation
from .laurent import LaurentExpansion, div, sum_many, to_record
from .model import PerturbedSMP, validate
from .reduction import hitting_expectation

FORMAT_VERSION = 1


def sojourn(model: PerturbedSMP, i: int) -> LaurentExpansion:
    """Expansion of the mean sojourn time ``e_i = sum_j e_ij``."""
    return sum_many([model.e[i, j] for j in model.Y(i)])


def input_delta(model: PerturbedSMP) -> Fraction | None:
    """Smallest bound exponent over all input expansions (None if any is unbounded)."""
    deltas = []
    for _, _, a in model.expansions():
        if a.bound is None:
            return None
        deltas.append(a.bound.delta)
    return min(deltas)


@dataclass
class StateEntry:
    state: int
    e: LaurentExpansion
    E: LaurentExpansion
    pi: LaurentExpansion

    @property
    def n_minus(self) -> int:
        return self.pi.h

    @property
    def n_plus(self) -> int:
        return self.pi.k

    @property
    def limit(self) -> Fraction:
        """Value of ``pi_i`` at eps = 0."""
        return self.pi.coeff(0) if self.pi.k >= 0 else Fraction(0)


@dataclass
class StationaryReport:
    entries: list[StateEntry]
    X0: list[int]
    residuals: dict[int, Fraction]
    violations: list[str] = field(default_factory=list)
    delta_min: Fraction | None = None
    names: dict | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def entry(self, i: int) -> StateEntry:
        for ent in self.entries:
            if ent.state == i:
                return ent
        raise KeyError(i)

    def to_record(self) -> dict:
        states = []
        for ent in self.entries:
            rec = {
                "state": ent.state,
                "n_minus": ent.n_minus,
                "n_plus": ent.n_plus,
                "coeffs": [fmt(c) for c in ent.pi.coeffs],
                "limit_at_zero": fmt(ent.limit),
                "pi": to_record(ent.pi),
                "e": to_record(ent.e),
                "E": to_record(ent.E),
            }
            if self.names and ent.state in self.names:
                rec["name"] = self.names[ent.state]
            if ent.pi.bound is not None:
                rec["bound"] = rec["pi"]["bound"]
            states.append(rec)
        return {
            "format_version": FORMAT_VERSION,
            "states": states,
            "X0": self.X0,
            "coefficient_sum_residuals": {str(l): fmt(v) for l, v in self.residuals.items()},
            "delta_min_inputs": None if self.delta_min is None else fmt(self.delta_min),
            "violations": self.violations,
            "ok": self.ok,
        }


def _diagnose(entries: list[StateEntry]) -> tuple[list[int], dict[int, Fraction], list[str]]:
    problems = []
    for ent in entries:
        if ent.n_minus < 0:
            problems.append(f"state {ent.state}: n_minus = {ent.n_minus} is negative")
        if ent.pi.lead <= 0:
            problems.append(f"state {ent.state}: leading coefficient {ent.pi.lead} is not positive")
    n_min = min(ent.n_minus for ent in entries)
    if n_min != 0:
        problems.append(f"min n_minus is {n_min}, expected 0")
    X0 = [ent.state for ent in entries if ent.n_minus == 0]
    n_plus = min(ent.n_plus for ent in entries)
    residuals = {}
    for l in range(0, n_plus + 1):
        s = sum((ent.pi.coeff(l) for ent in entries), Fraction(0))
        residuals[l] = s - (1 if l == 0 else 0)
        if residuals[l] != 0:
            problems.append(f"coefficient sum at order {l} is off by {residuals[l]}")
    return X0, residuals, problems


def stationary_distribution(model: PerturbedSMP, order=None, force: bool = False,
                            check: bool = True) -> StationaryReport:
    """Expansions of ``pi_i = e_i / E_ii`` for every state, plus diagnostics.

    ``order`` maps a target state to an elimination order; states not listed
    use ascending order.  Raises :class:`InvariantViolation` if a structural
    identity fails, unless ``force`` is set.
    """
    if check:
        report = validate(model)
        if not report.ok:
            raise InvalidModel(report)
    order = order or {}
    entries = []
    for i in model.states:
        E = hitting_expectation(model, i, order.get(i), check=False)
        e = sojourn(model, i)
        if E.lead <= 0:
            raise ArithmeticError(f"E_{i}{i} has non-positive lead {E.lead}")
        entries.append(StateEntry(i, e, E, div(e, E)))
    X0, residuals, problems = _diagnose(entries)
    rep = StationaryReport(entries, X0, residuals, problems, input_delta(model),
                           dict(model.names) if model.names else None)
    if problems and not force:
        raise InvariantViolation(rep)
    return rep
