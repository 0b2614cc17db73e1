"""Component-wise grounding of aggregate programs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import AbstractSet, Callable, Iterable, Sequence

from .aggregates import DEFAULT_SUBSET_SUM_CAP, propagate_check
from .analysis import (
    aggregate_globals,
    check_program,
    global_variables,
    instantiation_sequence,
    negative_predicates,
    refine_sequence,
)
from .formulas import Agg, ElementInstance, GroundAggregate, GroundRule
from .ground import Interp4
from .instantiation import AtomIndex, ground_instance, instantiate
from .syntax import (
    Aggregate,
    Atom,
    Comparison,
    Integer,
    Literal,
    Program,
    Rule,
    Variable,
    substitute_atom,
    substitute_term,
)

ALPHA = "__alpha"
ETA = "__eta"
EPS = "__eps"


class BudgetExhausted(RuntimeError):
    """The configured number of rule instantiation calls was used up."""


@dataclass
class AggregateSite:
    """One aggregate occurrence together with its auxiliary predicates."""

    rule_index: int
    position: int
    aggregate: Aggregate
    globals: tuple[str, ...]
    alpha: str
    eta: str
    eps: tuple[str, ...]

    def alpha_atom(self) -> Atom:
        return Atom(self.alpha, tuple(Variable(v) for v in self.globals))

    def key(self, sigma: dict) -> tuple:
        return tuple(sigma[v] for v in self.globals)

    def ground(self, key: tuple, elements: Iterable[ElementInstance]) -> GroundAggregate:
        sigma = dict(zip(self.globals, key))
        a = self.aggregate
        return GroundAggregate.build(a.func, a.rel, substitute_term(a.bound, sigma), elements)


@dataclass
class RewrittenComponent:
    alpha_rules: list[Rule] = field(default_factory=list)
    eta_rules: list[tuple[Rule, AggregateSite]] = field(default_factory=list)
    eps_rules: list[tuple[Rule, AggregateSite, int]] = field(default_factory=list)
    sites: dict[str, AggregateSite] = field(default_factory=dict)


def rewrite_aggregates(rules: Sequence[tuple[int, Rule]]) -> RewrittenComponent:
    """Replace aggregates by auxiliary atoms and add their empty-set and element rules.

    ``rules`` pairs each rule with its index in the program; the index keeps
    auxiliary predicate names unique across the whole program.
    """
    out = RewrittenComponent()
    for index, rule in rules:
        plain = tuple(b for b in rule.body if not isinstance(b, Aggregate))
        body = list(rule.body)
        for position, b in enumerate(rule.body):
            if not isinstance(b, Aggregate):
                continue
            stem = f"{index}_{position}"
            site = AggregateSite(
                index,
                position,
                b,
                tuple(aggregate_globals(rule, b)),
                f"{ALPHA}_{stem}",
                f"{ETA}_{stem}",
                tuple(f"{EPS}_{stem}_{k}" for k in range(len(b.elements))),
            )
            out.sites[site.alpha] = site
            glob = tuple(Variable(v) for v in site.globals)
            body[position] = Literal(site.alpha_atom())
            empty = Comparison(Integer(0), b.rel, b.bound)
            out.eta_rules.append((Rule(Atom(site.eta, glob), (empty,) + plain), site))
            for k, e in enumerate(b.elements):
                head = Atom(site.eps[k], tuple(e.terms) + glob)
                cond = tuple(Literal(a) for a in e.condition)
                out.eps_rules.append((Rule(head, cond + plain), site, k))
        out.alpha_rules.append(Rule(rule.head, tuple(body)))
    return out


@dataclass
class _Gathered:
    """Ground empty-set and element instances collected per aggregate site."""

    empty: dict[str, dict[tuple, None]] = field(default_factory=dict)
    elements: dict[str, dict[tuple, dict[ElementInstance, None]]] = field(default_factory=dict)

    def add_empty(self, site: AggregateSite, key: tuple) -> None:
        self.empty.setdefault(site.alpha, {})[key] = None

    def add_element(self, site: AggregateSite, key: tuple, element: ElementInstance) -> None:
        self.elements.setdefault(site.alpha, {}).setdefault(key, {})[element] = None


def aggr_empty(site: AggregateSite, gathered: _Gathered, key: tuple) -> bool:
    return key in gathered.empty.get(site.alpha, ())


def aggr_elem(site: AggregateSite, gathered: _Gathered, key: tuple) -> list[ElementInstance]:
    return list(gathered.elements.get(site.alpha, {}).get(key, {}))


def propagate(
    sites: Iterable[AggregateSite],
    gathered: _Gathered,
    interp_i: AbstractSet,
    interp_j: AbstractSet,
    cap: int | None = DEFAULT_SUBSET_SUM_CAP,
    over: bool = True,
) -> dict[Atom, None]:
    """Auxiliary aggregate atoms whose restricted translations hold in the reduct."""
    out: dict[Atom, None] = {}
    for site in sites:
        keys = dict.fromkeys(gathered.empty.get(site.alpha, ()))
        keys.update(dict.fromkeys(gathered.elements.get(site.alpha, {})))
        for key in keys:
            agg = site.ground(key, aggr_elem(site, gathered, key))
            if propagate_check(agg, interp_i, interp_j, cap=cap, over=over):
                out[Atom(site.alpha, key)] = None
    return out


def assemble(
    rules: Iterable[GroundRule], sites: dict[str, AggregateSite], gathered: _Gathered
) -> list[GroundRule]:
    """Replace auxiliary aggregate atoms by ground aggregates over the gathered elements."""
    out = []
    for r in rules:
        body = []
        for b in r.body:
            if isinstance(b, Atom) and b.predicate.startswith(ALPHA):
                site = sites.get(b.predicate)
                if site is None:
                    raise RuntimeError(f"no aggregate recorded for {b}")
                body.append(Agg(site.ground(b.args, aggr_elem(site, gathered, b.args))))
            else:
                body.append(b)
        out.append(GroundRule(r.head, tuple(body)))
    return out


@dataclass
class _Budget:
    limit: int | None = None
    used: int = 0

    def spend(self) -> None:
        self.used += 1
        if self.limit is not None and self.used > self.limit:
            raise BudgetExhausted(f"step budget of {self.limit} rule instantiations exhausted")


def ground_component(
    rules: Sequence[tuple[int, Rule]],
    interp_i: AbstractSet,
    interp_j: AbstractSet,
    cap: int | None = DEFAULT_SUBSET_SUM_CAP,
    budget: _Budget | None = None,
    over: bool = True,
) -> list[GroundRule]:
    """Ground one component against negative context ``interp_i`` and positive context ``interp_j``.

    Returns the assembled ground rules; their heads are the atoms derived by
    the component.  ``over`` selects how capped aggregate checks err: set it
    when computing possible atoms and clear it when computing certain ones.
    """
    budget = budget or _Budget()
    rw = rewrite_aggregates(rules)
    neg = interp_i if isinstance(interp_i, (set, frozenset, dict)) else set(interp_i)
    # element and empty-set rules see both contexts so that the reduct check
    # can account for tuples whose conditions are only in the negative context
    wide = AtomIndex(interp_i)
    narrow = AtomIndex()
    for a in interp_j:
        wide.add(a)
        narrow.add(a)
    gathered = _Gathered()
    produced: dict[GroundRule, None] = {}
    alpha_old: dict[Atom, None] = {}
    delta_wide: dict | None = None
    delta_narrow: dict | None = None
    while True:
        for rule, site in rw.eta_rules:
            budget.spend()
            for s in instantiate(rule, neg, wide, delta_wide):
                gathered.add_empty(site, site.key(s))
        for rule, site, k in rw.eps_rules:
            budget.spend()
            element = site.aggregate.elements[k]
            for s in instantiate(rule, neg, wide, delta_wide):
                terms = tuple(substitute_term(t, s) for t in element.terms)
                cond = tuple(substitute_atom(a, s) for a in element.condition)
                gathered.add_element(site, site.key(s), (terms, cond))
        alpha = propagate(rw.sites.values(), gathered, neg, narrow, cap, over)
        new_alpha = {a: None for a in alpha if a not in alpha_old}
        for a in new_alpha:
            narrow.add(a)
        delta = None if delta_narrow is None else {**delta_narrow, **new_alpha}
        for rule in rw.alpha_rules:
            budget.spend()
            for s in instantiate(rule, neg, narrow, delta):
                produced.setdefault(ground_instance(rule, s), None)
        alpha_old = alpha
        delta_narrow = {r.head: None for r in produced if r.head not in narrow}
        delta_wide = {a: None for a in delta_narrow if a not in wide}
        for a in delta_narrow:
            narrow.add(a)
            wide.add(a)
        if not delta_narrow:
            break
    return assemble(produced, rw.sites, gathered)


@dataclass
class ComponentTrace:
    index: tuple[int, ...]
    certain: frozenset
    possible: frozenset


@dataclass
class GroundProgramOut:
    rules: list[GroundRule]
    model: Interp4
    trace: list[ComponentTrace]

    def text(self) -> str:
        return "".join(f"{r}\n" for r in self.rules)


def ground_program(
    program: Program,
    refine: bool = True,
    cap: int | None = DEFAULT_SUBSET_SUM_CAP,
    max_steps: int | None = None,
    on_component: Callable[[ComponentTrace], None] | None = None,
) -> GroundProgramOut:
    """Ground ``program`` component by component with separate certain and possible passes."""
    check_program(program)
    seq = instantiation_sequence(program)
    if refine:
        seq = refine_sequence(seq)
    budget = _Budget(max_steps)
    certain: dict[Atom, None] = {}
    possible: dict[Atom, None] = {}
    emitted: dict[GroundRule, None] = {}
    trace = []
    for comp in seq:
        rules = [(k, program.rules[k]) for k in comp.rules]
        pruned = [(k, r) for k, r in rules if not (negative_predicates(r) & comp.external)]
        sure = {r.head: None for r in ground_component(pruned, possible, certain, cap, budget, over=False)}
        certain.update(sure)
        ground = ground_component(rules, certain, possible, cap, budget)
        maybe = {r.head: None for r in ground}
        possible.update(maybe)
        for r in ground:
            emitted.setdefault(r, None)
        entry = ComponentTrace(comp.index, frozenset(sure), frozenset(maybe))
        trace.append(entry)
        if on_component is not None:
            on_component(entry)
    ordered = [r for r in emitted if r.is_fact] + [r for r in emitted if not r.is_fact]
    return GroundProgramOut(ordered, Interp4(frozenset(certain), frozenset(possible)), trace)
