"""Abstract syntax, concrete grammar and term ordering for aggregate programs."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

INT_MIN = -(2**63)
INT_MAX = 2**63 - 1

RESERVED_PREFIX = "__"

RELATIONS = ("<", "<=", ">", ">=", "=", "!=")
AGGREGATE_FUNCTIONS = ("count", "sum", "sum+", "sum-")


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True, slots=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Integer:
    value: int

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True, slots=True)
class Function:
    name: str
    args: tuple[Term, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True, slots=True)
class SupTerm:
    def __str__(self) -> str:
        return "#sup"


@dataclass(frozen=True, slots=True)
class InfTerm:
    def __str__(self) -> str:
        return "#inf"


Term = Union[Variable, Integer, Function, SupTerm, InfTerm]

SUP = SupTerm()
INF = InfTerm()


def constant(name: str) -> Function:
    return Function(name, ())


def term_variables(t: Term) -> Iterator[str]:
    """Yield variable names of ``t`` in left-to-right order (with repeats)."""
    if isinstance(t, Variable):
        yield t.name
    elif isinstance(t, Function):
        for a in t.args:
            yield from term_variables(a)


def is_ground_term(t: Term) -> bool:
    if isinstance(t, Variable):
        return False
    if isinstance(t, Function):
        return all(is_ground_term(a) for a in t.args)
    return True


def _term_key(t: Term) -> tuple:
    if isinstance(t, InfTerm):
        return (0,)
    if isinstance(t, Integer):
        return (1, t.value)
    if isinstance(t, Function):
        return (2, len(t.args), t.name, tuple(_term_key(a) for a in t.args))
    if isinstance(t, SupTerm):
        return (3,)
    raise ValueError(f"term is not ground: {t}")


def term_compare(t1: Term, t2: Term) -> int:
    """Return -1, 0 or 1 according to the total order on ground terms.

    ``#inf`` < integers < function terms < ``#sup``; function terms are
    ordered by arity, then name, then arguments from left to right.
    """
    k1, k2 = _term_key(t1), _term_key(t2)
    return (k1 > k2) - (k1 < k2)


def atom_key(a: Atom) -> tuple:
    """Sort key for ground atoms: predicate, arity, then arguments in term order."""
    return (a.predicate, len(a.args), tuple(_term_key(t) for t in a.args))


def format_atoms(atoms) -> str:
    return "{" + ", ".join(str(a) for a in sorted(atoms, key=atom_key)) + "}"


def compare_holds(left: Term, rel: str, right: Term) -> bool:
    c = term_compare(left, right)
    if rel == "<":
        return c < 0
    if rel == "<=":
        return c <= 0
    if rel == ">":
        return c > 0
    if rel == ">=":
        return c >= 0
    if rel == "=":
        return c == 0
    if rel == "!=":
        return c != 0
    raise ValueError(f"unknown relation {rel!r}")


# ---------------------------------------------------------------------------
# Atoms and body literals


@dataclass(frozen=True, slots=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()

    @property
    def signature(self) -> tuple[str, int]:
        return (self.predicate, len(self.args))

    def variables(self) -> Iterator[str]:
        for a in self.args:
            yield from term_variables(a)

    def is_ground(self) -> bool:
        return all(is_ground_term(a) for a in self.args)

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True, slots=True)
class Literal:
    atom: Atom
    negated: bool = False

    def variables(self) -> Iterator[str]:
        return self.atom.variables()

    def __str__(self) -> str:
        return f"not {self.atom}" if self.negated else str(self.atom)


@dataclass(frozen=True, slots=True)
class Comparison:
    left: Term
    rel: str
    right: Term

    def variables(self) -> Iterator[str]:
        yield from term_variables(self.left)
        yield from term_variables(self.right)

    def __str__(self) -> str:
        return f"{self.left} {self.rel} {self.right}"


@dataclass(frozen=True, slots=True)
class AggregateElement:
    terms: tuple[Term, ...] = ()
    condition: tuple[Atom, ...] = ()

    def variables(self) -> Iterator[str]:
        for t in self.terms:
            yield from term_variables(t)
        for a in self.condition:
            yield from a.variables()

    def __str__(self) -> str:
        head = ",".join(str(t) for t in self.terms)
        if not self.condition:
            return head if self.terms else ":"
        cond = ", ".join(str(a) for a in self.condition)
        return f"{head} : {cond}" if head else f": {cond}"


@dataclass(frozen=True, slots=True)
class Aggregate:
    func: str
    elements: tuple[AggregateElement, ...]
    rel: str
    bound: Term

    def variables(self) -> Iterator[str]:
        for e in self.elements:
            yield from e.variables()
        yield from term_variables(self.bound)

    def __str__(self) -> str:
        elems = "; ".join(str(e) for e in self.elements)
        inner = f" {elems} " if elems else " "
        return f"#{self.func} {{{inner}}} {self.rel} {self.bound}"


BodyLiteral = Union[Literal, Comparison, Aggregate]


@dataclass(frozen=True, slots=True)
class Rule:
    head: Atom
    body: tuple[BodyLiteral, ...] = ()

    def __str__(self) -> str:
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(str(b) for b in self.body)}."


@dataclass(frozen=True, slots=True)
class Program:
    rules: tuple[Rule, ...] = ()

    def __str__(self) -> str:
        return render(self)


def render(program) -> str:
    """Render a program (or any iterable of rules) as re-parseable text."""
    rules = program.rules if isinstance(program, Program) else program
    return "".join(f"{r}\n" for r in rules)


# ---------------------------------------------------------------------------
# Substitution helpers shared by analysis and grounding


def substitute_term(t: Term, sigma: dict[str, Term]) -> Term:
    if isinstance(t, Variable):
        return sigma.get(t.name, t)
    if isinstance(t, Function) and t.args:
        return Function(t.name, tuple(substitute_term(a, sigma) for a in t.args))
    return t


def substitute_atom(a: Atom, sigma: dict[str, Term]) -> Atom:
    if not a.args:
        return a
    return Atom(a.predicate, tuple(substitute_term(t, sigma) for t in a.args))


def eval_comparison(c: Comparison) -> bool:
    """Truth value of a ground comparison."""
    return compare_holds(c.left, c.rel, c.right)


# ---------------------------------------------------------------------------
# Parser


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


_TOKEN_SPEC = [
    ("WS", r"[ \t\r\n]+"),
    ("COMMENT", r"%[^\n]*"),
    ("IF", r":-"),
    ("AGG", r"#(?:count|sum\+|sum-|sum)(?![A-Za-z0-9_])"),
    ("SPECIAL", r"#(?:inf|sup)(?![A-Za-z0-9_])"),
    ("REL", r"<=|>=|!=|<|>|="),
    ("INT", r"-?[0-9]+"),
    ("VAR", r"[A-Z][A-Za-z0-9_']*"),
    ("IDENT", r"[a-z_][A-Za-z0-9_']*"),
    ("PUNCT", r"[().,;:{}]"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{n}>{p})" for n, p in _TOKEN_SPEC))


@dataclass(slots=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        value = m.group()
        if kind not in ("WS", "COMMENT"):
            tokens.append(_Token(kind, value, line, pos - line_start + 1))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
    tokens.append(_Token("EOF", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def error(self, message: str, tok: _Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.column)

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        return self.tok.kind in ("PUNCT", "IF", "REL") and self.tok.text == text

    def expect(self, text: str) -> _Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def program(self) -> Program:
        rules = []
        while self.tok.kind != "EOF":
            rules.append(self.rule())
        return Program(tuple(rules))

    def rule(self) -> Rule:
        head = self.atom()
        body: list[BodyLiteral] = []
        if self.at(":-"):
            self.advance()
            body.append(self.body_literal())
            while self.at(","):
                self.advance()
                body.append(self.body_literal())
        self.expect(".")
        return Rule(head, tuple(body))

    def atom(self) -> Atom:
        tok = self.tok
        if tok.kind != "IDENT" or tok.text == "not":
            raise self.error(f"expected atom, found {tok.text or 'end of input'!r}")
        t = self.term()
        return self._as_atom(t, tok)

    def _as_atom(self, t: Term, tok: _Token) -> Atom:
        if not isinstance(t, Function):
            raise self.error(f"expected atom, found term {t}", tok)
        if t.name.startswith(RESERVED_PREFIX):
            raise self.error(f"predicate name {t.name!r} uses the reserved prefix {RESERVED_PREFIX!r}", tok)
        return Atom(t.name, t.args)

    def body_literal(self) -> BodyLiteral:
        tok = self.tok
        if tok.kind == "IDENT" and tok.text == "not":
            self.advance()
            if self.tok.kind == "AGG":
                raise self.error("negated aggregates are not supported")
            if self.tok.kind == "IDENT" and self.tok.text == "not":
                raise self.error("double negation is not supported")
            return Literal(self.atom(), True)
        if tok.kind == "AGG":
            return self.aggregate()
        left = self.term()
        if self.tok.kind == "REL":
            rel = self.advance().text
            return Comparison(left, rel, self.term())
        return Literal(self._as_atom(left, tok), False)

    def aggregate(self) -> Aggregate:
        func = self.advance().text[1:]
        self.expect("{")
        elements: list[AggregateElement] = []
        if not self.at("}"):
            elements.append(self.element())
            while self.at(";"):
                self.advance()
                elements.append(self.element())
        self.expect("}")
        if self.tok.kind != "REL":
            raise self.error("expected comparison relation after aggregate")
        rel = self.advance().text
        return Aggregate(func, tuple(elements), rel, self.term())

    def element(self) -> AggregateElement:
        terms: list[Term] = []
        if not self.at(":"):
            terms.append(self.term())
            while self.at(","):
                self.advance()
                terms.append(self.term())
        condition: list[Atom] = []
        if self.at(":"):
            self.advance()
            if not (self.at(";") or self.at("}")):
                condition.append(self.atom())
                while self.at(","):
                    self.advance()
                    condition.append(self.atom())
        return AggregateElement(tuple(terms), tuple(condition))

    def term(self) -> Term:
        tok = self.tok
        if tok.kind == "INT":
            self.advance()
            value = int(tok.text)
            if not INT_MIN <= value <= INT_MAX:
                raise self.error(f"integer {tok.text} out of 64-bit range", tok)
            return Integer(value)
        if tok.kind == "VAR":
            self.advance()
            return Variable(tok.text)
        if tok.kind == "SPECIAL":
            self.advance()
            return INF if tok.text == "#inf" else SUP
        if tok.kind == "IDENT":
            if tok.text == "not":
                raise self.error("'not' is a keyword")
            self.advance()
            args: list[Term] = []
            if self.at("("):
                self.advance()
                args.append(self.term())
                while self.at(","):
                    self.advance()
                    args.append(self.term())
                self.expect(")")
            return Function(tok.text, tuple(args))
        raise self.error(f"expected term, found {tok.text or 'end of input'!r}")


def parse_program(text: str) -> Program:
    """Parse program text; raises :class:`ParseError` with a line and column."""
    return _Parser(text).program()
