"""Phase-space reduction: eliminating states one at a time.

Removing a state ``r`` replaces the process by its restriction to visits of
the remaining states.  Hitting times of surviving states are unchanged, so
eliminating every state but ``i`` leaves a one-state model whose sojourn
expectation is the mean return time ``E_ii``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .errors import BadPermutation, InvalidModel, SameState, SingleState
from .laurent import (
    LaurentExpansion,
    add,
    constant,
    div,
    merge,
    mul,
    scale,
    sum_many,
)
from .model import PerturbedSMP, validate


def non_absorption(model: PerturbedSMP, i: int) -> LaurentExpansion:
    """Expansion of ``1 - p_ii``.

    With a self-loop the quantity is computed twice, as ``1 - p_ii`` and as the
    sum of the other transition probabilities, and the two are merged.
    Without one it is the constant one, of order ``max_j k(p_ij)``.
    """
    others = [j for j in model.Y(i) if j != i]
    if (i, i) not in model.p:
        n = max(model.p[i, j].k for j in model.Y(i))
        return constant(1, n, model.eps0)
    p_ii = model.p[i, i]
    by_subtraction = add(constant(1, p_ii.k, model.eps0), scale(-1, p_ii))
    if not others:
        return by_subtraction
    by_summation = sum_many([model.p[i, j] for j in others])
    result = merge(by_subtraction, by_summation)
    if not result.pivotal or result.lead <= 0:
        raise ArithmeticError(f"non-absorption expansion of state {i} has lead {result.lead}")
    return result


def reduce_state(model: PerturbedSMP, r: int) -> PerturbedSMP:
    """Eliminate state ``r``, returning the reduced model on the other states."""
    if model.n_states < 2:
        raise SingleState("cannot eliminate the only state of a model")
    if r not in model.states:
        raise BadPermutation(f"state {r} is not in the model")
    self_loop = (r, r) in model.p
    pbar = non_absorption(model, r) if self_loop else None
    out_r = [j for j in model.Y(r) if j != r]

    tilde = {j: div(model.p[r, j], pbar) if self_loop else model.p[r, j] for j in out_r}

    p_new: dict = {}
    e_new: dict = {}
    for i in model.states:
        if i == r:
            continue
        Y_i = model.Y(i)
        plus = [j for j in Y_i if j != r]
        minus = out_r if r in Y_i else []
        if minus:
            p_ir, e_ir = model.p[i, r], model.e[i, r]
            hat = div(p_ir, pbar) if self_loop else p_ir
        for j in sorted(set(plus) | set(minus)):
            if j not in minus:
                p_new[i, j] = model.p[i, j]
                e_new[i, j] = model.e[i, j]
                continue
            via_r = mul(p_ir, tilde[j])
            e_parts = [mul(e_ir, tilde[j])]
            if self_loop:
                e_parts.append(mul(model.e[r, r], mul(hat, tilde[j])))
            e_parts.append(mul(model.e[r, j], hat))
            e_via_r = sum_many(e_parts)
            if j in plus:
                p_new[i, j] = add(model.p[i, j], via_r)
                e_new[i, j] = add(model.e[i, j], e_via_r)
            else:
                p_new[i, j] = via_r
                e_new[i, j] = e_via_r
    return PerturbedSMP(
        states=tuple(s for s in model.states if s != r),
        eps0=model.eps0,
        p=p_new,
        e=e_new,
        bounded=model.bounded,
        polynomial_exact=model.polynomial_exact,
        names=model.names,
        eliminated=model.eliminated + (r,),
    )


@dataclass
class ReductionTrace:
    """Record of a sequential elimination.

    ``models`` holds every intermediate reduced model, starting with the
    input, but only when the trace was requested.
    """

    target: int
    order: tuple[int, ...]
    result: LaurentExpansion
    models: list[PerturbedSMP] = field(default_factory=list)


def _check_order(model: PerturbedSMP, keep: Sequence[int], order) -> tuple[int, ...]:
    rest = [s for s in model.states if s not in keep]
    if order is None:
        return tuple(rest)
    order = tuple(order)
    if sorted(order) != rest:
        raise BadPermutation(
            f"order {list(order)} is not a permutation of states {rest}")
    return order


def eliminate(model: PerturbedSMP, order: Sequence[int],
              keep_models: bool = False) -> tuple[PerturbedSMP, list[PerturbedSMP]]:
    models = [model] if keep_models else []
    for r in order:
        model = reduce_state(model, r)
        if keep_models:
            models.append(model)
    return model, models


def _require_valid(model: PerturbedSMP):
    report = validate(model)
    if not report.ok:
        raise InvalidModel(report)


def hitting_trace(model: PerturbedSMP, i: int, order=None, trace: bool = False,
                  check: bool = True) -> ReductionTrace:
    if i not in model.states:
        raise BadPermutation(f"state {i} is not in the model")
    if check:
        _require_valid(model)
    order = _check_order(model, (i,), order)
    final, models = eliminate(model, order, keep_models=trace)
    return ReductionTrace(i, order, final.e[i, i], models)


def hitting_expectation(model: PerturbedSMP, i: int, order=None,
                        check: bool = True) -> LaurentExpansion:
    """Expansion of the mean return time ``E_ii`` by sequential elimination."""
    return hitting_trace(model, i, order, check=check).result


def _tightness(a: LaurentExpansion):
    b = a.bound
    return (b.delta, -b.G, b.eps_max)


def search_orders(model: PerturbedSMP, i: int) -> ReductionTrace:
    """Try every elimination order and keep the one with the tightest bound.

    Ranked by larger delta, then smaller G, then larger eps_max; ties go to the
    first order in lexicographic order.  Coefficients are the same for all.
    """
    _require_valid(model)
    rest = [s for s in model.states if s != i]
    best = None
    for order in itertools.permutations(rest):
        tr = hitting_trace(model, i, order, check=False)
        if tr.result.bound is None:
            return tr
        if best is None or _tightness(tr.result) > _tightness(best.result):
            best = tr
    return best


@dataclass(frozen=True)
class PairHitting:
    i: int
    j: int
    E_ij: LaurentExpansion
    E_ji: LaurentExpansion
    E_ii: LaurentExpansion
    E_jj: LaurentExpansion


def _pair_formulas(m: PerturbedSMP, i: int, j: int):
    e_i = sum_many([m.e[i, s] for s in m.Y(i)])
    E_ij = div(e_i, m.p[i, j])
    e_j = sum_many([m.e[j, s] for s in m.Y(j)])
    E_jj = add(e_j, mul(e_i, div(m.p[j, i], m.p[i, j])))
    return E_ij, E_jj


def pair_hitting(model: PerturbedSMP, i: int, j: int, order=None,
                 check: bool = True) -> PairHitting:
    """Mean hitting times between ``i`` and ``j`` from the two-state reduction."""
    if i == j:
        raise SameState("pair hitting needs two distinct states")
    for s in (i, j):
        if s not in model.states:
            raise BadPermutation(f"state {s} is not in the model")
    if check:
        _require_valid(model)
    order = _check_order(model, (i, j), order)
    m, _ = eliminate(model, order)
    E_ij, E_jj = _pair_formulas(m, i, j)
    E_ji, E_ii = _pair_formulas(m, j, i)
    return PairHitting(i, j, E_ij, E_ji, E_ii, E_jj)
