"""Constraint simplification, the solvable fragments, and agreement
with the textbook Robinson unifier on random first-order problems."""

from __future__ import annotations

import random

import pytest

from cocproof.context import Constraint, Context, Decl, EXISTS, FORALL
from cocproof.errors import FailureContext, NotExistential
from cocproof.reduction import Fuel, convertible
from cocproof.term import PROP, Var, alpha_eq, subst_map
from cocproof.unify import (
    Clash,
    Decomposed,
    Postponed,
    Solved,
    instantiate_raw,
    propose_substitution,
    simplify,
    solve_first_order,
    solve_pattern,
    solve_trivial,
)

import fo
from conftest import constraint_scenario, t


def ctx(*items) -> Context:
    return Context(tuple(items), len(items))


def constraints_of(c: Context) -> list[Constraint]:
    return [it for it in c.items if isinstance(it, Constraint)]


@pytest.fixture
def delta(antisym_session):
    """The antisymmetry declarations as plain items."""
    return antisym_session.ps.items


class TestSimplify:
    def test_rigid_spine_decomposition(self, delta):
        items = delta + (
            Decl(EXISTS, "h1", Var("T")),
            Decl(EXISTS, "h2", Var("T")),
            Constraint(t("(Eq h1 h2)"), t("(Eq a b)")),
        )
        out = simplify(Context(items, len(items)), items[-1])
        assert isinstance(out, Decomposed)
        (p1, p2) = out.constraints
        assert p1 == (Var("h1"), Var("a")) and p2 == (Var("h2"), Var("b"))

    def test_arrow_decomposition(self):
        items = (
            Decl(FORALL, "A", PROP),
            Decl(EXISTS, "X", PROP),
            Constraint(t("X -> X"), t("X -> A")),
        )
        out = simplify(Context(items, len(items)), items[-1])
        assert isinstance(out, Decomposed)
        assert out.constraints == ((Var("X"), Var("X")), (Var("X"), Var("A")))

    def test_delta_unfolding_before_decomposition(self, tarski_session):
        items = tarski_session.ps.items + (
            Decl(FORALL, "x", Var("T")),
            Decl(FORALL, "y", Var("T")),
            Constraint(t("(Pre (f M))"), t("(R (f x) (f y))")),
        )
        out = simplify(Context(items, len(items)), items[-1])
        assert isinstance(out, Decomposed)
        (p1, p2) = out.constraints
        assert alpha_eq(p1[0], t("(f M)")) and alpha_eq(p1[1], t("(f x)"))
        assert alpha_eq(p2[0], t("(f (f M))")) and alpha_eq(p2[1], t("(f y)"))

    def test_alpha_equal_sides_solved(self):
        c = Constraint(t("(P:Prop)(P -> P)"), t("(Q:Prop)(Q -> Q)"))
        assert isinstance(simplify(ctx(c), c), Solved)

    def test_rigid_head_clash(self, delta):
        c = Constraint(t("(R a b)"), t("(Eq a b)"))
        assert isinstance(simplify(Context(delta + (c,), len(delta) + 1), c), Clash)

    def test_flexible_head_postponed(self, delta):
        items = delta + (
            Decl(EXISTS, "h", t("T -> Prop")),
            Constraint(t("(h a)"), t("(R a b)")),
        )
        # not in a solvable fragment for simplify itself; it defers
        assert isinstance(simplify(Context(items, len(items)), items[-1]), Postponed)


class TestSolveTrivial:
    def test_first_order_pair(self, delta):
        items = delta + (
            Decl(EXISTS, "h1", Var("T")),
            Decl(EXISTS, "h2", Var("T")),
            Constraint(Var("h1"), Var("a")),
            Constraint(Var("h2"), Var("b")),
        )
        out, sub = solve_trivial(Context(items, len(items)))
        assert sub == {"h1": Var("a"), "h2": Var("b")}
        assert not constraints_of(out)

    def test_occurs_check_blocks(self, tarski_session):
        items = tarski_session.ps.items + (
            Decl(EXISTS, "x", Var("T")),
            Constraint(Var("x"), t("(f x)")),
        )
        out, sub = solve_trivial(Context(items, len(items)))
        assert sub == {}
        assert len(constraints_of(out)) == 1

    def test_empty_is_identity(self):
        out, sub = solve_trivial(Context())
        assert sub == {} and out.items == ()

    def test_scope_check_blocks_later_names(self, delta):
        # the solution would smuggle a name declared after the variable
        items = delta + (
            Decl(EXISTS, "h", Var("T")),
            Decl(FORALL, "w", Var("T")),
            Constraint(Var("h"), Var("w")),
        )
        out, sub = solve_trivial(Context(items, len(items)))
        assert sub == {}


class TestSolvePattern:
    def test_argument_restricted_equation(self, delta):
        items = delta + (
            Decl(EXISTS, "h", t("T -> Prop")),
            Decl(FORALL, "x", Var("T")),
            Constraint(t("(h x)"), t("(R x x)")),
        )
        out, sub = solve_pattern(Context(items, len(items)))
        assert set(sub) == {"h"}
        assert alpha_eq(sub["h"], t("[x:T](R x x)"))
        # substitute back: the solved equation's sides are convertible
        assert convertible(
            out.items,
            subst_map(t("(h x)"), sub),
            t("(R x x)"),
            Fuel(),
        )
        assert not constraints_of(out)

    def test_repeated_argument_not_applicable(self, delta):
        items = delta + (
            Decl(EXISTS, "h", t("T -> T -> Prop")),
            Decl(FORALL, "x", Var("T")),
            Constraint(t("(h x x)"), t("(R x x)")),
        )
        _, sub = solve_pattern(Context(items, len(items)))
        assert sub == {}

    def test_left_declared_argument_not_applicable(self, delta):
        # a is declared before h: "declared on the right" is violated
        items = delta + (
            Decl(EXISTS, "h", t("T -> Prop")),
            Constraint(t("(h a)"), t("(R a a)")),
        )
        _, sub = solve_pattern(Context(items, len(items)))
        assert sub == {}


class TestSolveFirstOrder:
    def test_apply_scenario_residue(self, delta):
        # Δ[∃h1..h4; (Eq h1 h2) = (Eq a b)]: the equation decomposes and
        # h1, h2 solve, leaving the two relational obligations
        items = delta + (
            Decl(EXISTS, "h1", Var("T")),
            Decl(EXISTS, "h2", Var("T")),
            Decl(EXISTS, "h3", t("(R h1 h2)")),
            Decl(EXISTS, "h4", t("(R h2 h1)")),
            Constraint(t("(Eq h1 h2)"), t("(Eq a b)")),
        )
        result = solve_first_order(Context(items, len(items)))
        assert not result.failed
        live = [
            it for it in result.context.items
            if isinstance(it, Decl) and it.quant is EXISTS
        ]
        assert len(live) == 2
        assert alpha_eq(live[0].type, t("(R a b)"))
        assert alpha_eq(live[1].type, t("(R b a)"))
        assert not constraints_of(result.context)
        assert dict(result.substitution)["h1"] == Var("a")
        assert dict(result.substitution)["h2"] == Var("b")

    def test_identity_instantiation_empties_constraints(self):
        c = constraint_scenario()
        pos = 2  # y's declaration
        mid = instantiate_raw(c, pos, t("[x:X]x"), Fuel())
        kept = constraints_of(mid)
        assert len(kept) == 1
        # recorded as declared-type = register-type
        assert alpha_eq(kept[0].lhs, t("X -> A"))
        assert alpha_eq(kept[0].rhs, t("X -> X"))
        result = solve_first_order(mid)
        assert not result.failed
        assert not constraints_of(result.context)
        assert dict(result.substitution)["X"] == Var("A")

    def test_ground_clash_fails(self, delta):
        items = delta + (Constraint(t("(R a b)"), t("(R b a)")),)
        result = solve_first_order(Context(items, len(items)))
        assert result.failed

    def test_substitution_soundness(self, delta):
        items = delta + (
            Decl(EXISTS, "h1", Var("T")),
            Decl(EXISTS, "h2", Var("T")),
            Constraint(t("(Eq h1 h2)"), t("(Eq a b)")),
        )
        result = solve_first_order(Context(items, len(items)))
        sub = dict(result.substitution)
        env = result.context.items
        assert convertible(
            env, subst_map(t("(Eq h1 h2)"), sub), t("(Eq a b)"), Fuel()
        )


class TestPropose:
    def test_guided_identity(self):
        out = propose_substitution(constraint_scenario(), "y", t("[x:X]x"))
        assert not constraints_of(out)
        x_def = next(it for it in out.items if getattr(it, "name", None) == "X")
        assert x_def.body == Var("A")

    def test_universal_rejected(self):
        with pytest.raises(NotExistential):
            propose_substitution(constraint_scenario(), "A", PROP)

    def test_ill_typed_proposal_is_failure(self):
        with pytest.raises(FailureContext):
            propose_substitution(constraint_scenario(), "y", PROP)


class TestAgainstRobinsonOracle:
    def test_random_problem_suite(self):
        rng = random.Random(2024)
        decided = 0
        solved = clashed = 0
        for _ in range(650):
            p = fo.random_problem(rng)
            outcome = fo.compare(p)
            if outcome.verdict == "clash":
                assert not outcome.oracle_solvable, p
                decided += 1
                clashed += 1
            elif outcome.verdict == "solved":
                assert outcome.oracle_solvable, p
                assert outcome.instances_match, p
                decided += 1
                solved += 1
            # postponed problems carry no solvability claim
        assert decided >= 500
        assert solved >= 100 and clashed >= 100  # both outcomes well-sampled
