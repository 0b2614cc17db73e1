"""Random small programs for the oracle comparisons."""

from __future__ import annotations

import random

from mground.syntax import Function, Integer, parse_program

CONSTANTS = ("-1", "1", "2", "a")
UNARY = ("p", "q", "r")
NULLARY = "s"
FUNCTIONS = ("count", "sum", "sum+", "sum-")
RELATIONS = ("<", "<=", ">", ">=", "=", "!=")


def universe():
    return [Integer(int(c)) if c.lstrip("-").isdigit() else Function(c, ()) for c in CONSTANTS]


def _atom(rng: random.Random, arg: str | None) -> str:
    if arg is None or rng.random() < 0.15:
        return NULLARY
    return f"{rng.choice(UNARY)}({arg})"


def _element(rng: random.Random, global_var: str | None) -> str:
    terms, cond = [], []
    kind = rng.random()
    if kind < 0.5:
        terms.append("Y")
        cond.append(f"{rng.choice(UNARY)}(Y)")
    elif kind < 0.7 and global_var:
        terms.append(global_var)
    else:
        terms.append(rng.choice(CONSTANTS))
    if rng.random() < 0.3:
        terms.append(rng.choice(CONSTANTS))
    if not cond or rng.random() < 0.4:
        cond.append(_atom(rng, global_var if global_var and rng.random() < 0.5 else rng.choice(CONSTANTS)))
    return f"{','.join(terms)} : {', '.join(cond)}"


def _aggregate(rng: random.Random, global_var: str | None) -> str:
    n = rng.randint(1, 4)
    elements = "; ".join(_element(rng, global_var) for _ in range(n))
    bound = global_var if global_var and rng.random() < 0.15 else str(rng.randint(-1, 3))
    return f"#{rng.choice(FUNCTIONS)} {{ {elements} }} {rng.choice(RELATIONS)} {bound}"


def _rule(rng: random.Random, with_aggregate: bool) -> str:
    ground = rng.random() < 0.2
    var = None if ground else "X"
    body = []
    if var:
        body.append(f"{rng.choice(UNARY)}(X)")
    for _ in range(rng.randint(1, 2)):
        arg = var if var and rng.random() < 0.7 else rng.choice(CONSTANTS)
        lit = _atom(rng, arg)
        body.append(f"not {lit}" if rng.random() < 0.6 else lit)
    if var and rng.random() < 0.2:
        body.append(f"X {rng.choice(('!=', '<', '>='))} {rng.choice(CONSTANTS)}")
    if with_aggregate:
        body.insert(rng.randint(0, len(body)), _aggregate(rng, var))
    head = _atom(rng, var if var else rng.choice(CONSTANTS))
    return f"{head} :- {', '.join(body)}."


def _choice(rng: random.Random) -> list[str]:
    # an even loop through negation yields several stable models
    domain, left, right = rng.sample(UNARY, 3)
    return [f"{left}(X) :- {domain}(X), not {right}(X).", f"{right}(X) :- {domain}(X), not {left}(X)."]


def random_program_text(rng: random.Random) -> str:
    facts = [f"{_atom(rng, rng.choice(CONSTANTS))}." for _ in range(rng.randint(1, 2))]
    rules = _choice(rng) if rng.random() < 0.4 else []
    n_rules = rng.randint(1, 6 - len(facts) - len(rules))
    agg_at = rng.randrange(n_rules) if rng.random() < 0.6 else -1
    rules += [_rule(rng, k == agg_at) for k in range(n_rules)]
    return "\n".join(facts + rules) + "\n"


def random_program(seed: int):
    text = random_program_text(random.Random(seed))
    return text, parse_program(text)
