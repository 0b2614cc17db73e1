"""Aggregate semantics: weights, justification, bounded translation and propagation."""

from __future__ import annotations

from itertools import combinations
from typing import AbstractSet, Iterable, Sequence

from .formulas import TRUE, ElementInstance, Formula, GroundAggregate, Implies, conj, disj
from .syntax import INT_MAX, INT_MIN, Integer, Term, compare_holds

MONOTONE = "monotone"
ANTIMONOTONE = "antimonotone"
NEITHER = "neither"

DEFAULT_EXPANSION_LIMIT = 12
DEFAULT_SUBSET_SUM_CAP = 20


class AggregateOverflow(ArithmeticError):
    """An aggregate value left the signed 64-bit range."""


class ExpansionLimit(ValueError):
    """Too many element instances to expand an aggregate into a formula."""


def _checked(value: int) -> int:
    if not INT_MIN <= value <= INT_MAX:
        raise AggregateOverflow(f"aggregate value {value} exceeds 64-bit range")
    return value


def weight(t: Sequence[Term]) -> int:
    if t and isinstance(t[0], Integer):
        return t[0].value
    return 0


def weight_pos(t: Sequence[Term]) -> int:
    return max(weight(t), 0)


def weight_neg(t: Sequence[Term]) -> int:
    return min(weight(t), 0)


def contribution(func: str, t: Sequence[Term]) -> int:
    """Amount a single tuple adds to the value of ``func``."""
    if func == "count":
        return 1
    if func == "sum":
        return weight(t)
    if func == "sum+":
        return weight_pos(t)
    if func == "sum-":
        return weight_neg(t)
    raise ValueError(f"unknown aggregate function {func!r}")


def apply_aggregate(func: str, tuples: Iterable[Sequence[Term]]) -> Integer:
    """Value of ``func`` on a finite set of tuples (duplicates collapse)."""
    unique = dict.fromkeys(tuple(t) for t in tuples)
    return Integer(_checked(sum(contribution(func, t) for t in unique)))


def _value_holds(value: int, rel: str, bound: Term) -> bool:
    return compare_holds(Integer(_checked(value)), rel, bound)


def justifies(elements: Iterable[ElementInstance], a: GroundAggregate) -> bool:
    """Whether the given element instances justify ``a``."""
    tuples = {terms for terms, _ in elements}
    return compare_holds(apply_aggregate(a.func, tuples), a.rel, a.bound)


def classify(func: str, rel: str) -> str:
    if rel in ("=", "!="):
        return NEITHER
    upward = rel in (">", ">=")
    if func in ("count", "sum+"):
        return MONOTONE if upward else ANTIMONOTONE
    if func == "sum-":
        return ANTIMONOTONE if upward else MONOTONE
    return NEITHER


def classify_aggregate(a) -> str:
    return classify(a.func, a.rel)


# ---------------------------------------------------------------------------
# Bounded translation


def _conditions(elements: Iterable[ElementInstance]) -> Formula:
    return conj(atom for _, cond in elements for atom in cond)


def translate_bounded(
    a: GroundAggregate, limit: int | None = DEFAULT_EXPANSION_LIMIT, full: bool = False
) -> Formula:
    """Expand ``a`` over its element instances into a finite formula.

    For monotone aggregates only the conjunct with an empty antecedent is
    produced unless ``full`` is set.
    """
    elements = list(dict.fromkeys(a.elements))
    n = len(elements)
    if limit is not None and n > limit:
        raise ExpansionLimit(f"{n} element instances exceed the expansion limit of {limit}")
    indices = range(n)
    subsets = [frozenset(c) for k in range(n + 1) for c in combinations(indices, k)]
    justified = {s: justifies((elements[i] for i in s), a) for s in subsets}
    if classify_aggregate(a) == MONOTONE and not full:
        antecedents = [frozenset()]
    else:
        antecedents = subsets
    conjuncts = []
    for d in antecedents:
        if justified[d]:
            continue
        rest = [c for c in subsets if not (c & d) and justified[c | d]]
        consequent = disj(_conditions(elements[i] for i in sorted(c)) for c in rest)
        antecedent = _conditions(elements[i] for i in sorted(d))
        conjuncts.append(consequent if antecedent == TRUE else Implies(antecedent, consequent))
    return conj(conjuncts)


# ---------------------------------------------------------------------------
# Propagation


def _satisfied_tuples(elements: Iterable[ElementInstance], interp: AbstractSet) -> dict:
    return dict.fromkeys(terms for terms, cond in elements if all(c in interp for c in cond))


def subset_sums(weights: Iterable[int]) -> set[int]:
    sums = {0}
    for w in weights:
        if w:
            sums |= {s + w for s in sums}
    return sums


def propagate_check(
    a: GroundAggregate,
    interp_i: AbstractSet,
    interp_j: AbstractSet,
    mode: str = "possible",
    cap: int | None = DEFAULT_SUBSET_SUM_CAP,
    over: bool = True,
) -> bool:
    """Evaluate the restricted translation of ``a`` without expanding it.

    In ``possible`` mode returns whether ``interp_j`` satisfies the reduct of
    the translation with respect to ``interp_i``; in ``classical`` mode returns
    classical satisfaction under ``interp_i``.  ``cap`` bounds the number of
    tuples searched exactly for ``=`` and ``!=``; ``None`` removes the bound.
    Beyond the cap the answer over-approximates when ``over`` is set and
    under-approximates otherwise.
    """
    if mode == "classical":
        return justifies_tuples(a, _satisfied_tuples(a.elements, interp_i))
    if mode != "possible":
        raise ValueError(f"unknown mode {mode!r}")
    certain = _satisfied_tuples(a.elements, interp_i)
    possible = _satisfied_tuples(a.elements, interp_j)
    return _reduct_check(a.func, a.rel, a.bound, certain, possible, cap, over)


def justifies_tuples(a: GroundAggregate, tuples: Iterable[Sequence[Term]]) -> bool:
    return compare_holds(apply_aggregate(a.func, tuples), a.rel, a.bound)


def _total(func: str, tuples: Iterable[Sequence[Term]]) -> int:
    return _checked(sum(contribution(func, t) for t in tuples))


def _reduct_check(
    func: str, rel: str, bound: Term, certain: dict, possible: dict, cap: int | None, over: bool = True
) -> bool:
    kind = classify(func, rel)
    if kind == MONOTONE:
        return _value_holds(_total(func, possible), rel, bound)
    if kind == ANTIMONOTONE:
        return _value_holds(_total(func, certain), rel, bound)
    if not isinstance(bound, Integer):
        # every integer value relates to a non-integer bound the same way
        return compare_holds(Integer(0), rel, bound)
    if rel in (">", ">="):
        # only reached for sum
        return _value_holds(_total("sum+", possible) + _total("sum-", certain), rel, bound)
    if rel in ("<", "<="):
        return _value_holds(_total("sum-", possible) + _total("sum+", certain), rel, bound)

    shared = [t for t in certain if t in possible]
    certain_only = [contribution(func, t) for t in certain if t not in possible]
    possible_only = [contribution(func, t) for t in possible if t not in certain]
    target = bound.value - _total(func, shared)
    searched = sum(1 for w in certain_only + possible_only if w)
    if func != "count" and cap is not None and searched > cap:
        if not over:
            # false is the only cheap answer that never claims too much
            return rel == "!=" and any(possible_only)
        if rel == "=":
            return _reduct_check(func, "<=", bound, certain, possible, cap) and _reduct_check(
                func, ">=", bound, certain, possible, cap
            )
        return _reduct_check(func, "<", bound, certain, possible, cap) or _reduct_check(
            func, ">", bound, certain, possible, cap
        )
    if rel == "=":
        # every certain-only choice must be completable by possible-only tuples
        reachable = subset_sums(possible_only)
        return all(target - s in reachable for s in subset_sums(certain_only))
    # rel == "!="
    if any(possible_only):
        return True
    return target not in subset_sums(certain_only)
