"""One-sided matching and semi-naive instantiation of normal rules."""

from __future__ import annotations

from typing import AbstractSet, Iterable, Sequence

from .formulas import Compare, Formula, GroundRule, Not
from .syntax import (
    Atom,
    BodyLiteral,
    Comparison,
    Function,
    Literal,
    Rule,
    Term,
    Variable,
    eval_comparison,
    substitute_atom,
    substitute_term,
)

Substitution = dict[str, Term]


class AtomIndex:
    """Ground atoms grouped by predicate signature, in insertion order."""

    def __init__(self, atoms: Iterable[Atom] = ()):
        self._by_sig: dict[tuple[str, int], dict[Atom, None]] = {}
        for a in atoms:
            self.add(a)

    def add(self, atom: Atom) -> bool:
        bucket = self._by_sig.setdefault(atom.signature, {})
        if atom in bucket:
            return False
        bucket[atom] = None
        return True

    def __contains__(self, atom: Atom) -> bool:
        return atom in self._by_sig.get(atom.signature, ())

    def atoms(self, signature: tuple[str, int]) -> Iterable[Atom]:
        return self._by_sig.get(signature, {}).keys()

    def signatures(self) -> set[tuple[str, int]]:
        return {s for s, b in self._by_sig.items() if b}

    def __iter__(self):
        for bucket in self._by_sig.values():
            yield from bucket

    def __len__(self) -> int:
        return sum(len(b) for b in self._by_sig.values())


def _match_term(pattern: Term, ground: Term, sigma: Substitution) -> bool:
    if isinstance(pattern, Variable):
        bound = sigma.get(pattern.name)
        if bound is None:
            sigma[pattern.name] = ground
            return True
        return bound == ground
    if isinstance(pattern, Function) and pattern.args:
        if (
            not isinstance(ground, Function)
            or ground.name != pattern.name
            or len(ground.args) != len(pattern.args)
        ):
            return False
        return all(_match_term(p, g, sigma) for p, g in zip(pattern.args, ground.args))
    return pattern == ground


def match(pattern: Atom, ground: Atom, sigma: Substitution | None = None) -> Substitution | None:
    """Extend ``sigma`` to the matcher of ``pattern`` onto ``ground``, if any."""
    if pattern.signature != ground.signature:
        return None
    out = dict(sigma) if sigma else {}
    for p, g in zip(pattern.args, ground.args):
        if not _match_term(p, g, out):
            return None
    return out


def _is_ground_under(lit: BodyLiteral, sigma: Substitution) -> bool:
    return all(v in sigma for v in lit.variables())


def matches(
    lit: BodyLiteral,
    interp_i: AbstractSet,
    interp_j,
    sigma: Substitution,
) -> list[Substitution]:
    """Substitutions extending ``sigma`` under which ``lit`` can hold.

    ``interp_j`` may be an :class:`AtomIndex` or any collection of atoms.
    """
    if isinstance(lit, Literal) and not lit.negated:
        pattern = substitute_atom(lit.atom, sigma)
        if isinstance(interp_j, AtomIndex):
            candidates = interp_j.atoms(pattern.signature)
        else:
            candidates = (a for a in interp_j if a.signature == pattern.signature)
        out = []
        for g in candidates:
            s = match(pattern, g, sigma)
            if s is not None:
                out.append(s)
        return out
    if not _is_ground_under(lit, sigma):
        raise ValueError(f"literal {lit} is not ground under the substitution")
    if isinstance(lit, Literal):
        return [] if substitute_atom(lit.atom, sigma) in interp_i else [sigma]
    if isinstance(lit, Comparison):
        ground = Comparison(substitute_term(lit.left, sigma), lit.rel, substitute_term(lit.right, sigma))
        return [sigma] if eval_comparison(ground) else []
    raise TypeError(f"cannot match {lit!r}; aggregates must be rewritten first")


def select(
    sigma: Substitution,
    remaining: Sequence[int],
    body: Sequence[BodyLiteral],
    recursive: AbstractSet = frozenset(),
    preferred: int | None = None,
) -> int:
    """Pick the position of the next literal to match.

    Ground negative literals and comparisons come first, then ``preferred``,
    then positive atoms over ``recursive`` predicates, then the positive atom
    with the most unbound variables; ties go to the leftmost literal.
    """
    best, best_key = None, None
    for k in remaining:
        lit = body[k]
        if isinstance(lit, Literal) and not lit.negated:
            unbound = len({v for v in lit.variables() if v not in sigma})
            rank = 1 if k == preferred else 2 if lit.atom.signature in recursive else 3
            key = (rank, -unbound)
        elif _is_ground_under(lit, sigma):
            key = (0, 0)
        else:
            continue
        if best_key is None or key < best_key:
            best, best_key = k, key
    if best is None:
        raise ValueError("no literal can be selected; the rule is unsafe")
    return best


def instantiate(
    rule: Rule,
    interp_i: AbstractSet,
    index: AtomIndex,
    delta: AbstractSet | None = None,
    sigma: Substitution | None = None,
    literals: Sequence[int] | None = None,
) -> list[Substitution]:
    """Substitutions for the body literals of ``rule`` selected by ``literals``.

    ``delta`` holds the atoms that are new since the previous pass; when it is
    given, only substitutions using at least one of them in a positive literal
    are returned.  ``None`` means every instance is new.
    """
    body = rule.body
    positions = tuple(range(len(body))) if literals is None else tuple(literals)
    positives = [k for k in range(len(body)) if isinstance(body[k], Literal) and not body[k].negated]
    preferred = None
    recursive: AbstractSet = frozenset()
    delta_index = None
    if delta is not None and set(positives) <= set(positions):
        recursive = {a.signature for a in delta}
        touching = [k for k in positives if body[k].atom.signature in recursive]
        if not touching:
            return []
        if len(touching) == 1:
            # old-only instances are filtered anyway, so the single literal
            # that can see new atoms may iterate over the delta alone
            preferred = touching[0]
            delta_index = AtomIndex(delta)

    results: list[Substitution] = []
    stack = [(dict(sigma) if sigma else {}, positions)]
    while stack:
        s, remaining = stack.pop()
        if not remaining:
            if delta is None or any(substitute_atom(body[k].atom, s) in delta for k in positives):
                results.append(s)
            continue
        k = select(s, remaining, body, recursive, preferred)
        source = delta_index if k == preferred else index
        rest = tuple(p for p in remaining if p != k)
        for s2 in reversed(matches(body[k], interp_i, source, s)):
            stack.append((s2, rest))
    return results


def ground_body(rule: Rule, sigma: Substitution) -> tuple[Formula, ...]:
    body: list[Formula] = []
    for lit in rule.body:
        if isinstance(lit, Literal):
            atom = substitute_atom(lit.atom, sigma)
            body.append(Not(atom) if lit.negated else atom)
        elif isinstance(lit, Comparison):
            body.append(
                Compare(Comparison(substitute_term(lit.left, sigma), lit.rel, substitute_term(lit.right, sigma)))
            )
        else:
            raise TypeError("aggregates must be rewritten before grounding")
    return tuple(body)


def ground_instance(rule: Rule, sigma: Substitution) -> GroundRule:
    return GroundRule(substitute_atom(rule.head, sigma), ground_body(rule, sigma))


def ground_rule(
    rule: Rule,
    interp_i: AbstractSet,
    interp_j: Iterable[Atom],
    previous: Iterable[Atom] = (),
    sigma: Substitution | None = None,
    literals: Sequence[int] | None = None,
    first: bool = True,
) -> list[GroundRule]:
    """Ground instances of a normal rule whose bodies can hold.

    Unless ``first`` is set, instances whose positive body lies entirely
    within ``previous`` are skipped.
    """
    atoms_j = list(dict.fromkeys(interp_j))
    index = AtomIndex(atoms_j)
    delta = None
    if not first:
        old = set(previous)
        delta = {a: None for a in atoms_j if a not in old}
    out = [ground_instance(rule, s) for s in instantiate(rule, interp_i, index, delta, sigma, literals)]
    return list(dict.fromkeys(out))
