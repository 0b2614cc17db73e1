"""Reduct-aware evaluation and fixed-point operators over ground programs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import AbstractSet, Callable, Iterable, Sequence

from .aggregates import (
    ANTIMONOTONE,
    MONOTONE,
    classify_aggregate,
    justifies,
    propagate_check,
)
from .formulas import (
    Agg,
    And,
    Bottom,
    Compare,
    Formula,
    GroundRule,
    Implies,
    Not,
    Or,
    Top,
)
from .syntax import Atom


@dataclass(frozen=True)
class Interp4:
    """A four-valued interpretation given by certain and possible atoms."""

    certain: frozenset = frozenset()
    possible: frozenset = frozenset()

    def __iter__(self):
        yield self.certain
        yield self.possible

    def is_consistent(self) -> bool:
        return self.certain <= self.possible

    def join(self, other: Interp4) -> Interp4:
        return Interp4(self.certain | other.certain, self.possible | other.possible)

    def precision_leq(self, other: Interp4) -> bool:
        """Whether ``other`` is at least as precise as ``self``."""
        return self.certain <= other.certain and other.possible <= self.possible


def holds(f: Formula, x: AbstractSet) -> bool:
    """Classical satisfaction of ``f`` by the atom set ``x``."""
    if isinstance(f, Atom):
        return f in x
    if isinstance(f, Not):
        return not holds(f.arg, x)
    if isinstance(f, And):
        return all(holds(a, x) for a in f.args)
    if isinstance(f, Or):
        return any(holds(a, x) for a in f.args)
    if isinstance(f, Implies):
        return not holds(f.antecedent, x) or holds(f.consequent, x)
    if isinstance(f, Compare):
        return f.value
    if isinstance(f, Agg):
        return propagate_check(f.aggregate, x, x, mode="classical")
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    raise TypeError(f"not a ground formula: {f!r}")


def _eval(f: Formula, pos: AbstractSet, neg: AbstractSet, cap: int | None) -> bool:
    # positive occurrences read ``pos``; negative occurrences read ``neg``
    if isinstance(f, Atom):
        return f in pos
    if isinstance(f, Not):
        return not _eval(f.arg, neg, pos, cap)
    if isinstance(f, And):
        return all(_eval(a, pos, neg, cap) for a in f.args)
    if isinstance(f, Or):
        return any(_eval(a, pos, neg, cap) for a in f.args)
    if isinstance(f, Implies):
        return not _eval(f.antecedent, neg, pos, cap) or _eval(f.consequent, pos, neg, cap)
    if isinstance(f, Compare):
        return f.value
    if isinstance(f, Agg):
        return propagate_check(f.aggregate, neg, pos, mode="possible", cap=cap)
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    raise TypeError(f"not a ground formula: {f!r}")


def holds_reduct(
    f: Formula, interp_i: AbstractSet, interp_j: AbstractSet, cap: int | None = None
) -> bool:
    """Whether ``interp_j`` satisfies the reduct of ``f`` with respect to ``interp_i``."""
    return _eval(f, interp_j, interp_i, cap)


def body_holds_reduct(body: Sequence[Formula], interp_i, interp_j, cap=None) -> bool:
    return all(_eval(b, interp_j, interp_i, cap) for b in body)


def immediate_consequence(rules: Iterable[GroundRule], x: AbstractSet) -> set:
    return {r.head for r in rules if all(holds(b, x) for b in r.body)}


def stable_relative(
    rules: Sequence[GroundRule],
    context: AbstractSet,
    interp_j: AbstractSet,
    cap: int | None = None,
) -> frozenset:
    """Least fixed point of the reduct's consequence operator seeded with ``context``.

    The reduct is taken with respect to ``interp_j``.  The result holds only
    derived heads, so atoms of ``context`` appear only if some rule derives them.
    """
    rules = list(rules)
    derived: set = set()
    while True:
        base = set(context) | derived
        new = {r.head for r in rules if r.head not in derived and body_holds_reduct(r.body, interp_j, base, cap)}
        if not new:
            return frozenset(derived)
        derived |= new


def well_founded_model(
    rules: Sequence[GroundRule],
    context: Interp4 = Interp4(),
    trace: Callable[[Interp4], None] | None = None,
    cap: int | None = None,
) -> Interp4:
    """Least fixed point of the relative well-founded operator.

    Starts from the least precise interpretation and calls ``trace`` after
    each operator application.
    """
    rules = list(rules)
    ctx_i, ctx_j = context
    certain: frozenset = frozenset()
    possible = frozenset(a for r in rules for a in r.atoms()) | ctx_i | ctx_j
    while True:
        nxt = Interp4(
            stable_relative(rules, ctx_i, possible | ctx_j, cap),
            stable_relative(rules, ctx_j, certain | ctx_i, cap),
        )
        if trace is not None:
            trace(nxt)
        if nxt.certain == certain and nxt.possible == possible:
            assert nxt.is_consistent(), "well-founded model must be consistent"
            return nxt
        certain, possible = nxt.certain, nxt.possible


def simplify(rules: Iterable[GroundRule], interp: Interp4, cap: int | None = None) -> list:
    """Keep the rules whose bodies hold in the reduct; bodies are left untouched."""
    certain, possible = interp
    return [r for r in rules if body_holds_reduct(r.body, certain, possible, cap)]


def _aggregate_decided_true(agg, certain: AbstractSet, possible: AbstractSet) -> bool:
    kind = classify_aggregate(agg)
    true_elems = [e for e in agg.elements if all(c in certain for c in e[1])]
    maybe_elems = [e for e in agg.elements if all(c in possible for c in e[1])]
    if kind == MONOTONE:
        return justifies(true_elems, agg)
    if kind == ANTIMONOTONE:
        return justifies(maybe_elems, agg)
    if len(true_elems) == len(maybe_elems) and all(e in maybe_elems for e in true_elems):
        return justifies(true_elems, agg)
    return False


def strip_certain(rules: Iterable[GroundRule], certain: AbstractSet, possible: AbstractSet) -> list:
    """Drop body conjuncts already decided true by ``(certain, possible)``.

    Positive atoms in ``certain``, negated atoms outside ``possible``,
    true comparisons and aggregates that hold in every interpretation between
    the two sets are removed.
    """
    out = []
    for r in rules:
        body = []
        for b in r.body:
            if isinstance(b, Atom) and b in certain:
                continue
            if isinstance(b, Not) and isinstance(b.arg, Atom) and b.arg not in possible:
                continue
            if isinstance(b, Compare) and b.value:
                continue
            if isinstance(b, Top):
                continue
            if isinstance(b, Agg) and _aggregate_decided_true(b.aggregate, certain, possible):
                continue
            body.append(b)
        out.append(GroundRule(r.head, tuple(body)))
    return out
