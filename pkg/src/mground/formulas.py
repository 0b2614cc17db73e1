"""Ground formulas, ground aggregates and ground rules."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from .syntax import Atom, Comparison, Term, eval_comparison


@dataclass(frozen=True, slots=True)
class Top:
    def __str__(self) -> str:
        return "#true"


@dataclass(frozen=True, slots=True)
class Bottom:
    def __str__(self) -> str:
        return "#false"


TRUE = Top()
FALSE = Bottom()


@dataclass(frozen=True, slots=True)
class Not:
    arg: Formula

    def __str__(self) -> str:
        return f"not {self.arg}"


@dataclass(frozen=True, slots=True)
class And:
    args: tuple[Formula, ...]

    def __str__(self) -> str:
        return "(" + " & ".join(str(a) for a in self.args) + ")" if self.args else "#true"


@dataclass(frozen=True, slots=True)
class Or:
    args: tuple[Formula, ...]

    def __str__(self) -> str:
        return "(" + " | ".join(str(a) for a in self.args) + ")" if self.args else "#false"


@dataclass(frozen=True, slots=True)
class Implies:
    antecedent: Formula
    consequent: Formula

    def __str__(self) -> str:
        return f"({self.antecedent} -> {self.consequent})"


@dataclass(frozen=True, slots=True)
class Compare:
    """A ground comparison kept for display; evaluates to its truth value."""

    comparison: Comparison

    @property
    def value(self) -> bool:
        return eval_comparison(self.comparison)

    def __str__(self) -> str:
        return str(self.comparison)


ElementInstance = tuple[tuple[Term, ...], tuple[Atom, ...]]


@dataclass(frozen=True, slots=True)
class GroundAggregate:
    """An aggregate atom together with its restricted set of element instances."""

    func: str
    rel: str
    bound: Term
    elements: tuple[ElementInstance, ...] = ()

    @staticmethod
    def build(func: str, rel: str, bound: Term, elements: Iterable[ElementInstance]) -> GroundAggregate:
        return GroundAggregate(func, rel, bound, tuple(dict.fromkeys(elements)))

    def condition_atoms(self) -> Iterator[Atom]:
        for _, cond in self.elements:
            yield from cond

    def __str__(self) -> str:
        parts = []
        for terms, cond in self.elements:
            head = ",".join(str(t) for t in terms)
            if cond:
                body = ", ".join(str(a) for a in cond)
                parts.append(f"{head} : {body}" if head else f": {body}")
            else:
                parts.append(head if head else ":")
        inner = f" {'; '.join(parts)} " if parts else " "
        return f"#{self.func} {{{inner}}} {self.rel} {self.bound}"


@dataclass(frozen=True, slots=True)
class Agg:
    aggregate: GroundAggregate

    def __str__(self) -> str:
        return str(self.aggregate)


Formula = Union[Atom, Top, Bottom, Not, And, Or, Implies, Compare, Agg]


def conj(args: Iterable[Formula]) -> Formula:
    """Conjunction with constant folding of truth constants."""
    items = []
    for a in args:
        if isinstance(a, Bottom):
            return FALSE
        if not isinstance(a, Top):
            items.append(a)
    if not items:
        return TRUE
    if len(items) == 1:
        return items[0]
    return And(tuple(items))


def disj(args: Iterable[Formula]) -> Formula:
    """Disjunction with constant folding of truth constants."""
    items = []
    for a in args:
        if isinstance(a, Top):
            return TRUE
        if not isinstance(a, Bottom):
            items.append(a)
    if not items:
        return FALSE
    if len(items) == 1:
        return items[0]
    return Or(tuple(items))


def contains_implication(f: Formula) -> bool:
    if isinstance(f, Implies):
        return True
    if isinstance(f, Not):
        return contains_implication(f.arg)
    if isinstance(f, (And, Or)):
        return any(contains_implication(a) for a in f.args)
    return False


def is_r_formula(f: Formula) -> bool:
    """True if no implication occurs inside the antecedent of an implication."""
    if isinstance(f, Implies):
        return not contains_implication(f.antecedent) and is_r_formula(f.consequent)
    if isinstance(f, Not):
        return not contains_implication(f.arg)
    if isinstance(f, (And, Or)):
        return all(is_r_formula(a) for a in f.args)
    return True


def formula_atoms(f: Formula) -> Iterator[Atom]:
    if isinstance(f, Atom):
        yield f
    elif isinstance(f, Not):
        yield from formula_atoms(f.arg)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            yield from formula_atoms(a)
    elif isinstance(f, Implies):
        yield from formula_atoms(f.antecedent)
        yield from formula_atoms(f.consequent)
    elif isinstance(f, Agg):
        yield from f.aggregate.condition_atoms()


@dataclass(frozen=True, slots=True)
class GroundRule:
    head: Atom
    body: tuple[Formula, ...] = ()

    @property
    def is_fact(self) -> bool:
        return not self.body

    def atoms(self) -> Iterator[Atom]:
        yield self.head
        for b in self.body:
            yield from formula_atoms(b)

    def positive_body(self) -> Iterator[Atom]:
        """Atoms occurring as plain positive body conjuncts."""
        for b in self.body:
            if isinstance(b, Atom):
                yield b

    def __str__(self) -> str:
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(str(b) for b in self.body)}."


def render_ground(rules: Iterable[GroundRule]) -> str:
    """Render ground rules as program text, one rule per line."""
    return "".join(f"{r}\n" for r in rules)
