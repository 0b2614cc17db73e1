"""Brute-force reference semantics for small ground programs.

Everything here is deliberately naive and independent of the grounder: the
full instantiation enumerates substitutions over a finite universe, reducts
are materialized as formulas, and models are found by subset enumeration.
"""

from __future__ import annotations

from itertools import chain, combinations, product
from typing import AbstractSet, Iterable, Sequence

from .aggregates import DEFAULT_EXPANSION_LIMIT, justifies, translate_bounded
from .analysis import check_program, global_variables
from .formulas import (
    FALSE,
    TRUE,
    Agg,
    And,
    Bottom,
    Compare,
    Formula,
    GroundAggregate,
    GroundRule,
    Implies,
    Not,
    Or,
    Top,
    conj,
    disj,
)
from .ground import Interp4
from .syntax import (
    Aggregate,
    Atom,
    Comparison,
    Function,
    Literal,
    Program,
    Term,
    is_ground_term,
    substitute_atom,
    substitute_term,
)

DEFAULT_ATOM_CAP = 20
DEFAULT_RULE_CAP = 10_000


class OracleLimit(ValueError):
    """An instance is too large for brute-force evaluation."""


# ---------------------------------------------------------------------------
# Naive instantiation


def program_universe(program: Program) -> list[Term]:
    """Ground terms occurring as arguments, comparison sides, tuple terms or bounds."""
    found: dict[Term, None] = {}

    def visit(t: Term) -> None:
        if is_ground_term(t):
            found[t] = None
        elif isinstance(t, Function):
            for a in t.args:
                visit(a)

    for r in program.rules:
        atoms = [r.head]
        for b in r.body:
            if isinstance(b, Literal):
                atoms.append(b.atom)
            elif isinstance(b, Comparison):
                visit(b.left)
                visit(b.right)
            else:
                visit(b.bound)
                for e in b.elements:
                    atoms.extend(e.condition)
                    for t in e.terms:
                        visit(t)
        for a in atoms:
            for t in a.args:
                visit(t)
    return list(found)


def _assignments(variables: Sequence[str], universe: Sequence[Term]):
    for values in product(universe, repeat=len(variables)):
        yield dict(zip(variables, values))


def naive_ground(
    program: Program, universe: Iterable[Term] | None = None, cap: int = DEFAULT_RULE_CAP
) -> list[GroundRule]:
    """All instances of every rule over ``universe`` with fully instantiated aggregates.

    Instances with a false comparison are omitted since their bodies can never hold.
    """
    check_program(program)
    terms = list(universe) if universe is not None else program_universe(program)
    out: list[GroundRule] = []
    for r in program.rules:
        variables = global_variables(r)
        for sigma in _assignments(variables, terms):
            body: list[Formula] = []
            dead = False
            for b in r.body:
                if isinstance(b, Literal):
                    atom = substitute_atom(b.atom, sigma)
                    body.append(Not(atom) if b.negated else atom)
                elif isinstance(b, Comparison):
                    c = Compare(Comparison(substitute_term(b.left, sigma), b.rel, substitute_term(b.right, sigma)))
                    if not c.value:
                        dead = True
                        break
                    body.append(c)
                else:
                    body.append(Agg(_ground_aggregate(b, sigma, terms)))
            if dead:
                continue
            out.append(GroundRule(substitute_atom(r.head, sigma), tuple(body)))
            if len(out) > cap:
                raise OracleLimit(f"naive grounding exceeds {cap} rules")
    return out


def _ground_aggregate(a: Aggregate, sigma: dict, terms: Sequence[Term]) -> GroundAggregate:
    elements = []
    for e in a.elements:
        local = [v for v in dict.fromkeys(e.variables()) if v not in sigma]
        for theta in _assignments(local, terms):
            full = {**sigma, **theta}
            elements.append(
                (
                    tuple(substitute_term(t, full) for t in e.terms),
                    tuple(substitute_atom(c, full) for c in e.condition),
                )
            )
    return GroundAggregate.build(a.func, a.rel, substitute_term(a.bound, sigma), elements)


# ---------------------------------------------------------------------------
# Formula expansion


def translate_ferraris(a: GroundAggregate, limit: int | None = DEFAULT_EXPANSION_LIMIT) -> Formula:
    """The weaker translation whose consequents list the remaining element conditions."""
    elements = list(dict.fromkeys(a.elements))
    n = len(elements)
    if limit is not None and n > limit:
        raise OracleLimit(f"{n} element instances exceed the expansion limit of {limit}")
    conjuncts = []
    for k in range(n + 1):
        for d in combinations(range(n), k):
            if justifies([elements[i] for i in d], a):
                continue
            antecedent = conj(c for i in d for c in elements[i][1])
            consequent = disj(conj(elements[i][1]) for i in range(n) if i not in d)
            conjuncts.append(Implies(antecedent, consequent))
    return conj(conjuncts)


def expand(
    f: Formula,
    relevant: AbstractSet | None = None,
    translation: str = "star",
    limit: int | None = DEFAULT_EXPANSION_LIMIT,
) -> Formula:
    """Replace aggregates by formulas and comparisons by truth constants.

    When ``relevant`` is given, element instances with a condition atom outside
    it are dropped first; such conditions are false in every candidate model.
    """
    if isinstance(f, Agg):
        agg = f.aggregate
        if relevant is not None:
            kept = [e for e in agg.elements if all(c in relevant for c in e[1])]
            agg = GroundAggregate.build(agg.func, agg.rel, agg.bound, kept)
        if translation == "ferraris":
            return translate_ferraris(agg, limit)
        return translate_bounded(agg, limit, full=True)
    if isinstance(f, Compare):
        return TRUE if f.value else FALSE
    if isinstance(f, Not):
        return Not(expand(f.arg, relevant, translation, limit))
    if isinstance(f, And):
        return And(tuple(expand(a, relevant, translation, limit) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(expand(a, relevant, translation, limit) for a in f.args))
    if isinstance(f, Implies):
        return Implies(
            expand(f.antecedent, relevant, translation, limit), expand(f.consequent, relevant, translation, limit)
        )
    return f


def _sat(f: Formula, x: AbstractSet) -> bool:
    if isinstance(f, Atom):
        return f in x
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Not):
        return not _sat(f.arg, x)
    if isinstance(f, And):
        return all(_sat(a, x) for a in f.args)
    if isinstance(f, Or):
        return any(_sat(a, x) for a in f.args)
    if isinstance(f, Implies):
        return not _sat(f.antecedent, x) or _sat(f.consequent, x)
    raise TypeError(f"unexpanded formula {f!r}")


def ferraris_reduct(f: Formula, x: AbstractSet) -> Formula:
    """Reduct replacing every subformula false in ``x`` by falsity."""
    if not _sat(f, x):
        return FALSE
    if isinstance(f, (Atom, Top)):
        return f
    if isinstance(f, Not):
        return TRUE
    if isinstance(f, And):
        return conj(ferraris_reduct(a, x) for a in f.args)
    if isinstance(f, Or):
        return disj(ferraris_reduct(a, x) for a in f.args)
    if isinstance(f, Implies):
        ante = ferraris_reduct(f.antecedent, x)
        cons = ferraris_reduct(f.consequent, x)
        if isinstance(ante, Bottom) or isinstance(cons, Top):
            return TRUE
        if isinstance(ante, Top):
            return cons
        return Implies(ante, cons)
    raise TypeError(f"unexpanded formula {f!r}")


def foid_reduct(f: Formula, x: AbstractSet, positive: bool = True) -> Formula:
    """Reduct fixing negatively occurring atoms to their truth value in ``x``."""
    if isinstance(f, Atom):
        if positive:
            return f
        return TRUE if f in x else FALSE
    if isinstance(f, (Top, Bottom)):
        return f
    if isinstance(f, Not):
        return foid_reduct(Implies(f.arg, FALSE), x, positive)
    if isinstance(f, And):
        return conj(foid_reduct(a, x, positive) for a in f.args)
    if isinstance(f, Or):
        return disj(foid_reduct(a, x, positive) for a in f.args)
    if isinstance(f, Implies):
        ante = foid_reduct(f.antecedent, x, not positive)
        cons = foid_reduct(f.consequent, x, positive)
        if isinstance(ante, Bottom) or isinstance(cons, Top):
            return TRUE
        if isinstance(ante, Top):
            return cons
        return Implies(ante, cons)
    raise TypeError(f"unexpanded formula {f!r}")


def _has_implication(f: Formula) -> bool:
    if isinstance(f, Implies):
        return True
    if isinstance(f, (And, Or)):
        return any(_has_implication(a) for a in f.args)
    return isinstance(f, Not)


# ---------------------------------------------------------------------------
# Models


class _Expanded:
    """A ground program with aggregates expanded into formulas."""

    def __init__(self, rules: Iterable[GroundRule], translation: str = "star", limit=DEFAULT_EXPANSION_LIMIT):
        rules = list(rules)
        self.heads = list(dict.fromkeys(r.head for r in rules))
        relevant = set(self.heads)
        self.rules = [(r.head, expand(conj(r.body), relevant, translation, limit)) for r in rules]

    def consequences(self, x: AbstractSet) -> set:
        return {h for h, body in self.rules if _sat(body, x)}

    def least_model(self, rules: Sequence[tuple[Atom, Formula]]) -> set:
        # for implication-free bodies only
        x: set = set()
        while True:
            new = {h for h, body in rules if h not in x and _sat(body, x)}
            if not new:
                return x
            x |= new

    def foid_stable(self, x: AbstractSet) -> frozenset:
        reduced = [(h, foid_reduct(body, x)) for h, body in self.rules]
        return frozenset(self.least_model(reduced))

    def is_stable(self, x: frozenset) -> bool:
        if self.consequences(x) != x:
            return False
        reduced = [(h, ferraris_reduct(body, x)) for h, body in self.rules]
        simple = [(h, b) for h, b in reduced if not _has_implication(b)]
        complex_ = [(h, b) for h, b in reduced if _has_implication(b)]
        floor = self.least_model(simple)
        if not complex_:
            return floor == x
        optional = sorted(x - floor, key=str)
        for k in range(len(optional) + 1):
            for extra in combinations(optional, k):
                y = floor | set(extra)
                if y == x:
                    continue
                if all(h in y for h, b in reduced if _sat(b, y)):
                    return False
        return True


def _subsets(base: Sequence, fixed: AbstractSet):
    items = [a for a in base if a not in fixed]
    for k in range(len(items) + 1):
        for extra in combinations(items, k):
            yield frozenset(chain(fixed, extra))


def wf_oracle(rules: Iterable[GroundRule], limit=DEFAULT_EXPANSION_LIMIT) -> Interp4:
    """Well-founded model by alternating least models of materialized reducts."""
    prog = _Expanded(rules, limit=limit)
    certain: frozenset = frozenset()
    possible = frozenset(prog.heads)
    while True:
        nxt_certain, nxt_possible = prog.foid_stable(possible), prog.foid_stable(certain)
        if nxt_certain == certain and nxt_possible == possible:
            return Interp4(certain, possible)
        certain, possible = nxt_certain, nxt_possible


def enumerate_stable(
    rules: Iterable[GroundRule],
    cap: int = DEFAULT_ATOM_CAP,
    use_wf_bounds: bool = True,
    translation: str = "star",
    limit=DEFAULT_EXPANSION_LIMIT,
) -> set[frozenset]:
    """All stable models by candidate enumeration and a reduct minimality check.

    With ``use_wf_bounds`` only candidates between the certain and possible
    atoms of the well-founded model are tried.
    """
    rules = list(rules)
    prog = _Expanded(rules, translation, limit)
    if use_wf_bounds:
        lower, upper = wf_oracle(rules, limit)
        base = [a for a in prog.heads if a in upper]
    else:
        lower, base = frozenset(), prog.heads
    free = len(base) - len(lower)
    if free > cap:
        raise OracleLimit(f"{free} undecided atoms exceed the enumeration cap of {cap}")
    return {x for x in _subsets(base, lower) if prog.is_stable(x)}


def enumerate_foid_stable(rules: Iterable[GroundRule], cap: int = DEFAULT_ATOM_CAP, limit=DEFAULT_EXPANSION_LIMIT):
    """Fixed points of the stable operator."""
    prog = _Expanded(rules, limit=limit)
    if len(prog.heads) > cap:
        raise OracleLimit(f"{len(prog.heads)} atoms exceed the enumeration cap of {cap}")
    return {x for x in _subsets(prog.heads, frozenset()) if prog.foid_stable(x) == x}
