"""Perturbed semi-Markov process model, structural validation and file format."""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

from ._exact import as_fraction, fmt
from .errors import EmptySubset, ParseError
from .laurent import LaurentExpansion, div, from_record, sum_many, to_record

FORMAT_VERSION = 1

Pair = tuple[int, int]


@dataclass(frozen=True)
class PerturbedSMP:
    """Expansion-valued transition probabilities ``p`` and sojourn expectations ``e``.

    ``states`` is the current phase space.  For a model read from a file it is
    ``(1, ..., N)``; reduced models keep the original labels of the surviving
    states and list the removed ones in ``eliminated``.
    """

    states: tuple[int, ...]
    eps0: Fraction
    p: Mapping[Pair, LaurentExpansion]
    e: Mapping[Pair, LaurentExpansion]
    bounded: bool = False
    polynomial_exact: bool = False
    names: Mapping[int, str] | None = None
    eliminated: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(sorted(self.states)))
        object.__setattr__(self, "eps0", as_fraction(self.eps0))
        object.__setattr__(self, "p", MappingProxyType(dict(sorted(self.p.items()))))
        object.__setattr__(self, "e", MappingProxyType(dict(sorted(self.e.items()))))
        if self.names is not None:
            object.__setattr__(self, "names", MappingProxyType(dict(self.names)))

    @property
    def n_states(self) -> int:
        return len(self.states)

    def Y(self, i: int) -> tuple[int, ...]:
        """Transition set of state ``i``."""
        return tuple(j for (a, j) in self.p if a == i)

    def label(self, i: int) -> str:
        if self.names and i in self.names:
            return self.names[i]
        return str(i)

    def expansions(self) -> Iterable[tuple[str, Pair, LaurentExpansion]]:
        for key, a in self.p.items():
            yield "p", key, a
        for key, a in self.e.items():
            yield "e", key, a


@dataclass(frozen=True)
class Violation:
    condition: str
    location: str
    message: str

    def to_record(self) -> dict:
        return {"condition": self.condition, "location": self.location, "message": self.message}


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, condition: str, location: str, message: str):
        self.violations.append(Violation(condition, location, message))

    def to_record(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_record() for v in self.violations]}


def _reachable(model: PerturbedSMP, start: int) -> set[int]:
    """States reachable from ``start`` in one or more steps."""
    seen: set[int] = set()
    queue = deque(model.Y(start))
    while queue:
        s = queue.popleft()
        if s in seen:
            continue
        seen.add(s)
        queue.extend(t for t in model.Y(s) if t not in seen)
    return seen


def validate(model: PerturbedSMP) -> ValidationReport:
    report = ValidationReport()
    states = set(model.states)
    if model.n_states < 1:
        report.add("A", "model", "phase space is empty")
        return report
    if not 0 < model.eps0 <= 1:
        report.add("A", "model", f"eps0 = {model.eps0} is outside (0, 1]")

    for (i, j) in model.p:
        if i not in states or j not in states:
            report.add("A", f"p[{i},{j}]", "transition refers to an unknown state")
    for i in model.states:
        if not model.Y(i):
            report.add("A", f"state {i}", "transition set is empty")
    for i in model.states:
        missing = states - _reachable(model, i)
        for j in sorted(missing):
            report.add("A", f"({i},{j})", f"state {j} cannot be reached from state {i}")

    for (i, j), a in model.p.items():
        loc = f"p[{i},{j}]"
        if a.h < 0:
            report.add("B", loc, f"lowest order h = {a.h} is negative")
        if a.lead <= 0:
            report.add("B", loc, f"leading coefficient {a.lead} is not positive")
    if set(model.e) != set(model.p):
        for key in sorted(set(model.p) ^ set(model.e)):
            report.add("F", f"e[{key[0]},{key[1]}]", "e and p entries do not match")
    for (i, j), a in model.e.items():
        if a.lead <= 0:
            report.add("F", f"e[{i},{j}]", f"leading coefficient {a.lead} is not positive")

    for i in model.states:
        row = [model.p[i, j] for j in model.Y(i)]
        if not row:
            continue
        top = min(a.k for a in row)
        for l in range(0, top + 1):
            s = sum((a.coeff(l) for a in row), Fraction(0))
            want = 1 if l == 0 else 0
            if s != want:
                report.add("C", f"state {i}",
                           f"coefficient sum at order {l} is {s}, expected {want}")

    if model.bounded:
        for kind, (i, j), a in model.expansions():
            cond = "B'" if kind == "p" else "F'"
            loc = f"{kind}[{i},{j}]"
            if a.bound is None:
                report.add(cond, loc, "bounded mode requires a remainder bound")
            elif a.bound.eps_max > model.eps0:
                report.add(cond, loc, f"eps_max {a.bound.eps_max} exceeds eps0 {model.eps0}")
    return report


def row_sum(model: PerturbedSMP, i: int, Z: Iterable[int]) -> LaurentExpansion:
    Z = sorted(Z)
    if not Z:
        raise EmptySubset(f"empty subset of the transition set of state {i}")
    return sum_many([model.p[i, j] for j in Z])


def row_sum_class(model: PerturbedSMP, i: int, Z: Iterable[int]) -> str:
    """Diagnostic class of a partial row sum ``p_iZ`` (never enforced).

    ``"a"``: lead order is positive.  ``"b"``: lead order 0 with coefficient
    below one.  ``"c"``: constant term one, first nonzero higher coefficient
    negative.  ``"d"``: constant term one and all higher coefficients zero, so
    the remainder must be nonpositive (not checkable from coefficients).
    ``"x"``: none of these, which is incompatible with a stochastic row.
    """
    s = row_sum(model, i, Z)
    if s.h > 0:
        return "a"
    if s.lead < 1:
        return "b"
    if s.lead > 1:
        return "x"
    for l in range(1, s.k + 1):
        c = s.coeff(l)
        if c < 0:
            return "c"
        if c > 0:
            return "x"
    return "d"


def discrete_time(states, eps0, p: Mapping[Pair, LaurentExpansion], **kw) -> PerturbedSMP:
    """Markov chain: unit sojourn times, so ``e_ij = p_ij``."""
    return PerturbedSMP(tuple(states), eps0, p, dict(p), **kw)


def continuous_time(states, eps0, p: Mapping[Pair, LaurentExpansion],
                    rates: Mapping[int, LaurentExpansion], **kw) -> PerturbedSMP:
    """Continuous-time chain with exit rates ``rates[i]``: ``e_ij = p_ij / lambda_i``."""
    e = {(i, j): div(a, rates[i]) for (i, j), a in p.items()}
    return PerturbedSMP(tuple(states), eps0, p, e, **kw)


# -- file format -------------------------------------------------------------

def _state_index(value, lookup: dict[str, int], labels: tuple[int, ...],
                 location: str) -> int:
    if isinstance(value, bool):
        raise ParseError("state must be an integer or a name", location)
    if isinstance(value, int):
        if value not in labels:
            raise ParseError(f"unknown state {value}", location)
        return value
    if isinstance(value, str) and value in lookup:
        return lookup[value]
    raise ParseError(f"unknown state {value!r}", location)


def _entries(raw, lookup, labels, kind) -> dict[Pair, LaurentExpansion]:
    if not isinstance(raw, list):
        raise ParseError("expected a list of entries", kind)
    out: dict[Pair, LaurentExpansion] = {}
    for idx, rec in enumerate(raw):
        loc = f"{kind}[{idx}]"
        if not isinstance(rec, dict):
            raise ParseError("entry must be an object", loc)
        try:
            i = _state_index(rec["i"], lookup, labels, loc)
            j = _state_index(rec["j"], lookup, labels, loc)
        except KeyError as exc:
            raise ParseError(f"missing field {exc}", loc) from None
        if (i, j) in out:
            raise ParseError(f"duplicate entry ({i},{j})", loc)
        out[i, j] = from_record(rec, loc)
    return out


def model_from_record(rec: dict) -> PerturbedSMP:
    if not isinstance(rec, dict):
        raise ParseError("model must be an object")
    version = rec.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported format_version {version}")
    try:
        n = rec["n_states"]
        eps0 = as_fraction(rec["eps0"])
    except KeyError as exc:
        raise ParseError(f"missing field {exc}") from None
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad eps0 ({exc})") from None
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError("n_states must be a positive integer")
    mode = rec.get("mode", "plain")
    if mode not in ("bounded", "plain"):
        raise ParseError(f"mode must be 'bounded' or 'plain', got {mode!r}")
    labels = tuple(rec.get("state_labels", range(1, n + 1)))
    if len(labels) != n or len(set(labels)) != n or not all(
            isinstance(x, int) and not isinstance(x, bool) and x >= 1 for x in labels):
        raise ParseError("state_labels must list n_states distinct positive integers")
    names = rec.get("states")
    lookup: dict[str, int] = {}
    if names is not None:
        if not isinstance(names, list) or len(names) != n or len(set(names)) != n:
            raise ParseError("states must list n_states distinct names")
        lookup = {str(name): lab for name, lab in zip(names, labels)}
    p = _entries(rec.get("p"), lookup, labels, "p")
    e_raw = rec.get("e", "discrete-time")
    if e_raw == "discrete-time":
        e = dict(p)
    elif isinstance(e_raw, dict) and "continuous-time" in e_raw:
        rates = {_state_index(r["i"], lookup, labels, "rates"): from_record(r, "rates")
                 for r in e_raw["continuous-time"]}
        missing = {i for (i, _) in p} - set(rates)
        if missing:
            raise ParseError(f"no exit rate for states {sorted(missing)}", "e")
        e = {(i, j): div(a, rates[i]) for (i, j), a in p.items()}
    else:
        e = _entries(e_raw, lookup, labels, "e")
        extra = set(e) ^ set(p)
        if extra:
            i, j = sorted(extra)[0]
            raise ParseError(f"entry ({i},{j}) appears in only one of p and e", "e")
    return PerturbedSMP(
        states=labels,
        eps0=eps0,
        p=p,
        e=e,
        bounded=(mode == "bounded"),
        polynomial_exact=bool(rec.get("polynomial_exact", False)),
        names={lab: str(name) for name, lab in zip(names, labels)} if names else None,
        eliminated=tuple(rec.get("eliminated", ())),
    )


def model_to_record(model: PerturbedSMP) -> dict:
    """Serialize a model; reduced models keep their original state labels."""
    rec: dict = {
        "format_version": FORMAT_VERSION,
        "n_states": model.n_states,
        "eps0": fmt(model.eps0),
        "mode": "bounded" if model.bounded else "plain",
    }
    if model.eliminated or model.states != tuple(range(1, model.n_states + 1)):
        rec["state_labels"] = list(model.states)
        rec["eliminated"] = list(model.eliminated)
    if model.names:
        rec["states"] = [model.label(i) for i in model.states]
    if model.polynomial_exact:
        rec["polynomial_exact"] = True
    rec["p"] = [{"i": i, "j": j, **to_record(a)} for (i, j), a in model.p.items()]
    rec["e"] = [{"i": i, "j": j, **to_record(a)} for (i, j), a in model.e.items()]
    return rec


def load_model(path) -> PerturbedSMP:
    text = Path(path).read_text()
    try:
        rec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON ({exc})", str(path)) from None
    return model_from_record(rec)


def dump_model(model: PerturbedSMP) -> str:
    return json.dumps(model_to_record(model), indent=2) + "\n"
