"""Random first-order unification problems and the oracle comparison.

Problems live in the term algebra over constants a, b, unary f, binary
g (all universally declared of a single base type D) with existential
variables x1..xk.  Solvable instances are built from a known ground
assignment; corrupted variants are re-judged by the Robinson oracle.
Shared between the unification tests and the acceptance suite.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from cocproof.context import Constraint, Context, Decl, EXISTS, FORALL
from cocproof.reduction import Fuel, nf
from cocproof.term import PROP, Term, Var, app, arrow, spine
from cocproof.unify import SolveResult, solve_first_order

from oracles import FFun, FVar, fo_apply, fo_unify

ARITIES = {"a": 0, "b": 0, "f": 1, "g": 2}


def to_coc(t: object) -> Term:
    match t:
        case FVar(x):
            return Var(x)
        case FFun(name, args):
            return app(Var(name), *[to_coc(a) for a in args])
    raise AssertionError(t)


def to_fo(t: Term) -> object:
    head, args = spine(t)
    assert isinstance(head, Var)
    if head.name in ARITIES:
        return FFun(head.name, tuple(to_fo(a) for a in args))
    assert not args
    return FVar(head.name)


def ground_term(rng: random.Random, depth: int) -> object:
    if depth == 0:
        return FFun(rng.choice(["a", "b"]), ())
    name = rng.choice(["a", "b", "f", "g"])
    return FFun(name, tuple(ground_term(rng, depth - 1) for _ in range(ARITIES[name])))


def _subterms(t: object) -> list:
    out = [t]
    if isinstance(t, FFun):
        for a in t.args:
            out.extend(_subterms(a))
    return out


def _lift(rng: random.Random, t: object, solution: dict[str, object]) -> object:
    """Replace random subtrees of a ground term by variables whose
    assigned value equals that subtree."""
    if rng.random() < 0.35:
        hits = [x for x, v in solution.items() if v == t]
        if hits:
            return FVar(rng.choice(hits))
    if isinstance(t, FFun) and t.args:
        return FFun(t.name, tuple(_lift(rng, a, solution) for a in t.args))
    return t


@dataclass(frozen=True)
class Problem:
    variables: tuple[str, ...]
    pairs: tuple[tuple[object, object], ...]


def random_problem(rng: random.Random) -> Problem:
    k = rng.randint(1, 4)
    variables = tuple(f"x{i}" for i in range(1, k + 1))
    solution = {x: ground_term(rng, rng.randint(1, 2)) for x in variables}
    pairs: list[tuple[object, object]] = []
    for x in variables:
        rhs = _lift(rng, solution[x], solution)
        lhs: object = FVar(x)
        if rng.random() < 0.4:  # wrap both sides to exercise decomposition
            c = ground_term(rng, 0)
            lhs, rhs = FFun("g", (lhs, c)), FFun("g", (rhs, c))
        pairs.append((lhs, rhs) if rng.random() < 0.5 else (rhs, lhs))
    if rng.random() < 0.5:  # corrupt: often (not always) unsolvable
        i = rng.randrange(len(pairs))
        lhs, rhs = pairs[i]
        pairs[i] = (lhs, FFun("f", (rhs,)))
    rng.shuffle(pairs)
    return Problem(variables, tuple(pairs))


def problem_context(p: Problem) -> Context:
    items: list = [
        Decl(FORALL, "D", PROP),
        Decl(FORALL, "a", Var("D")),
        Decl(FORALL, "b", Var("D")),
        Decl(FORALL, "f", arrow(Var("D"), Var("D"))),
        Decl(FORALL, "g", arrow(Var("D"), arrow(Var("D"), Var("D")))),
    ]
    for x in p.variables:
        items.append(Decl(EXISTS, x, Var("D")))
    for lhs, rhs in p.pairs:
        items.append(Constraint(to_coc(lhs), to_coc(rhs)))
    return Context(tuple(items), len(items))


@dataclass(frozen=True)
class Comparison:
    verdict: str  # "solved" | "clash" | "postponed"
    oracle_solvable: bool
    instances_match: bool | None


def _instances_match(p: Problem, result: SolveResult, osub: dict) -> bool:
    """Our solved instance equals the oracle's up to variable renaming."""
    env = result.context.items
    renaming: dict[str, str] = {}
    for x in p.variables:
        ours = to_fo(nf(env, Var(x), Fuel()))
        theirs = fo_apply(osub, FVar(x))
        if not _match(ours, theirs, renaming):
            return False
    return True


def _match(ours: object, theirs: object, renaming: dict[str, str]) -> bool:
    match ours, theirs:
        case FVar(x), FVar(y):
            if x in renaming:
                return renaming[x] == y
            if y in renaming.values():
                return False
            renaming[x] = y
            return True
        case FFun(f, fa), FFun(g, ga):
            return f == g and len(fa) == len(ga) and all(
                _match(a, b, renaming) for a, b in zip(fa, ga)
            )
        case _:
            return False


def compare(p: Problem) -> Comparison:
    result = solve_first_order(problem_context(p), 200_000)
    osub = fo_unify(list(p.pairs))
    remaining = [it for it in result.context.items if isinstance(it, Constraint)]
    if result.failed:
        return Comparison("clash", osub is not None, None)
    if not remaining:
        return Comparison("solved", osub is not None, _instances_match(p, result, osub or {}))
    return Comparison("postponed", osub is not None, None)
