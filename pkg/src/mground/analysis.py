"""Safety, rule dependencies and instantiation sequences."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import networkx as nx

from .aggregates import MONOTONE, classify_aggregate
from .syntax import Aggregate, Atom, BodyLiteral, Comparison, Literal, Program, Rule, term_variables

Signature = tuple[str, int]

POSITIVE = "+"
NEGATIVE = "-"


def body_occurrences(b: BodyLiteral) -> tuple[list[Atom], list[Atom]]:
    """Positive and negative atom occurrences of a body literal."""
    if isinstance(b, Literal):
        return ([], [b.atom]) if b.negated else ([b.atom], [])
    if isinstance(b, Comparison):
        return [], []
    conditions = [a for e in b.elements for a in e.condition]
    if classify_aggregate(b) == MONOTONE:
        return conditions, []
    return conditions, list(conditions)


def positive_predicates(rule: Rule) -> set[Signature]:
    return {a.signature for b in rule.body for a in body_occurrences(b)[0]}


def negative_predicates(rule: Rule) -> set[Signature]:
    return {a.signature for b in rule.body for a in body_occurrences(b)[1]}


# ---------------------------------------------------------------------------
# Safety


class SafetyError(ValueError):
    def __init__(self, variable: str, location: str):
        super().__init__(f"unsafe variable {variable} in {location}")
        self.variable = variable
        self.location = location


def global_variables(rule: Rule) -> list[str]:
    """Variables of the head, of literals, comparisons and aggregate bounds."""
    seen = dict.fromkeys(rule.head.variables())
    for b in rule.body:
        if isinstance(b, Aggregate):
            seen.update(dict.fromkeys(term_variables(b.bound)))
        else:
            seen.update(dict.fromkeys(b.variables()))
    return list(seen)


def aggregate_globals(rule: Rule, agg: Aggregate) -> list[str]:
    """Rule-global variables of ``agg`` in order of first occurrence."""
    glob = set(global_variables(rule))
    return [v for v in dict.fromkeys(agg.variables()) if v in glob]


def _occurrences(rule: Rule) -> Iterator[tuple[str, object]]:
    # (variable, enclosing element or None) in textual order
    for v in rule.head.variables():
        yield v, None
    for b in rule.body:
        if isinstance(b, Aggregate):
            for e in b.elements:
                for v in e.variables():
                    yield v, e
            for v in term_variables(b.bound):
                yield v, None
        else:
            for v in b.variables():
                yield v, None


def check_safety(rule: Rule) -> None:
    """Raise :class:`SafetyError` naming the first unsafe variable of ``rule``."""
    glob = set(global_variables(rule))
    bound = {
        v for b in rule.body if isinstance(b, Literal) and not b.negated for v in b.atom.variables()
    }
    for v, element in _occurrences(rule):
        if v in glob:
            if v not in bound:
                raise SafetyError(v, f"rule '{rule}'")
        elif v not in {w for a in element.condition for w in a.variables()}:
            raise SafetyError(v, f"aggregate element '{element}' of rule '{rule}'")


def check_program(program: Program) -> None:
    for r in program.rules:
        check_safety(r)


# ---------------------------------------------------------------------------
# Dependencies


@dataclass
class DependencyGraph:
    size: int
    edges: set[tuple[int, int, str]] = field(default_factory=set)

    def successors(self, r: int) -> Iterator[tuple[int, str]]:
        for a, b, s in self.edges:
            if a == r:
                yield b, s


def build_dependency_graph(program: Program) -> DependencyGraph:
    """Edge ``(r1, r2, sign)`` whenever rule ``r1`` depends on rule ``r2``."""
    by_head: dict[Signature, list[int]] = {}
    for i, r in enumerate(program.rules):
        by_head.setdefault(r.head.signature, []).append(i)
    graph = DependencyGraph(len(program.rules))
    for i, r in enumerate(program.rules):
        for sig in positive_predicates(r):
            for j in by_head.get(sig, ()):
                graph.edges.add((i, j, POSITIVE))
        for sig in negative_predicates(r):
            for j in by_head.get(sig, ()):
                graph.edges.add((i, j, NEGATIVE))
    return graph


@dataclass(frozen=True)
class Component:
    index: tuple[int, ...]
    rules: tuple[int, ...]
    stratified: bool
    external: frozenset = frozenset()
    refined: tuple[tuple[int, ...], ...] = ()


@dataclass(frozen=True)
class ComponentSequence:
    program: Program
    graph: DependencyGraph
    components: tuple[Component, ...]

    def __iter__(self):
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)


def _ordered_sccs(nodes: list[int], edges: list[tuple[int, int]]) -> list[tuple[int, ...]]:
    # edges (a, b): a depends on b, so b must come first
    g = nx.DiGraph()
    g.add_nodes_from(nodes)
    g.add_edges_from((b, a) for a, b in edges)
    cond = nx.condensation(g)
    members = {c: tuple(sorted(cond.nodes[c]["members"])) for c in cond.nodes}
    order = nx.lexicographical_topological_sort(cond, key=lambda c: members[c][0])
    return [members[c] for c in order]


def _external_sets(program: Program, groups: list[tuple[int, ...]]) -> list[frozenset]:
    last_head: dict[Signature, int] = {}
    for k, group in enumerate(groups):
        for r in group:
            last_head[program.rules[r].head.signature] = k
    out = []
    for k, group in enumerate(groups):
        neg = {sig for r in group for sig in negative_predicates(program.rules[r])}
        out.append(frozenset(sig for sig in neg if last_head.get(sig, -1) >= k))
    return out


def instantiation_sequence(program: Program) -> ComponentSequence:
    """Strongly connected components of the dependency graph in topological order.

    Ties between independent components are broken by their smallest rule index.
    """
    graph = build_dependency_graph(program)
    groups = _ordered_sccs(list(range(graph.size)), [(a, b) for a, b, _ in graph.edges])
    where = {r: k for k, grp in enumerate(groups) for r in grp}
    outgoing: dict[int, list[tuple[int, str]]] = {}
    for a, b, sign in graph.edges:
        outgoing.setdefault(a, []).append((b, sign))
    stratified: list[bool] = []
    for k, grp in enumerate(groups):
        ok = True
        for a, b, sign in ((a, b, s) for a in grp for b, s in outgoing.get(a, ())):
            if where[b] == k and sign == NEGATIVE:
                ok = False
            elif where[b] != k and not stratified[where[b]]:
                ok = False
        stratified.append(ok)
    external = _external_sets(program, groups)
    components = []
    for k, grp in enumerate(groups):
        members = set(grp)
        positive = [(a, b) for a in grp for b, s in outgoing.get(a, ()) if s == POSITIVE and b in members]
        refined = tuple(_ordered_sccs(list(grp), positive))
        components.append(Component((k + 1,), grp, stratified[k], external[k], refined))
    return ComponentSequence(program, graph, tuple(components))


def refine_sequence(seq: ComponentSequence) -> ComponentSequence:
    """Flatten each component into its positive-dependency subcomponents."""
    entries = []
    for comp in seq.components:
        for j, sub in enumerate(comp.refined or (comp.rules,)):
            entries.append((comp.index + (j + 1,), sub, comp.stratified))
    external = _external_sets(seq.program, [sub for _, sub, _ in entries])
    components = tuple(
        Component(index, sub, strat, ext) for (index, sub, strat), ext in zip(entries, external)
    )
    return ComponentSequence(seq.program, seq.graph, components)
