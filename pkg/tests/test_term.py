"""Term syntax: alpha equality, substitution, free variables, printing."""

from __future__ import annotations

import hypothesis.strategies as st
from hypothesis import given, settings

from cocproof.term import (
    App,
    Lambda,
    PROP,
    Product,
    TYPE,
    Var,
    alpha_eq,
    app,
    arrow,
    free_vars,
    hygienize,
    pp,
    spine,
    subst,
    subst_map,
)
from cocproof.vernacular import parse_term

from conftest import t

NAMES = ["x", "y", "z", "P", "Q", "f"]


def terms(max_depth: int = 4):
    leaf = st.one_of(
        st.sampled_from([PROP, TYPE]),
        st.sampled_from(NAMES).map(Var),
    )

    def extend(children):
        return st.one_of(
            st.tuples(children, children).map(lambda p: App(*p)),
            st.tuples(st.sampled_from(NAMES), children, children).map(
                lambda p: Lambda(*p)
            ),
            st.tuples(st.sampled_from(NAMES), children, children).map(
                lambda p: Product(*p)
            ),
        )

    return st.recursive(leaf, extend, max_leaves=2 ** max_depth)


class TestAlphaEq:
    def test_renamed_identity(self):
        assert alpha_eq(t("[P:Prop][x:P]x"), t("[Q:Prop][y:Q]y"))

    def test_reflexive_on_sample(self):
        u = t("(x:T)(y:T)(R x y) -> (R y x) -> (Eq x y)")
        assert alpha_eq(u, u)

    def test_distinct_bodies(self):
        assert not alpha_eq(t("[x:P]x"), t("[x:P]P"))

    def test_free_names_matter(self):
        assert not alpha_eq(Var("a"), Var("b"))

    def test_lambda_product_distinct(self):
        assert not alpha_eq(Lambda("x", PROP, Var("x")), Product("x", PROP, Var("x")))

    @given(terms())
    @settings(max_examples=300)
    def test_reflexive(self, u):
        assert alpha_eq(u, u)

    @given(terms(), terms())
    @settings(max_examples=300)
    def test_symmetric(self, u, v):
        assert alpha_eq(u, v) == alpha_eq(v, u)

    @given(terms(), st.sampled_from(NAMES), st.sampled_from(NAMES))
    @settings(max_examples=300)
    def test_transitive_through_renaming(self, u, a, b):
        # u ~ hygienize(u) and hygienize(u) ~ hygienize(hygienize(u)),
        # so transitivity demands u ~ the doubly renamed term
        v = hygienize(u, frozenset({a}))
        w = hygienize(v, frozenset({b}))
        assert alpha_eq(u, v)
        assert alpha_eq(v, w)
        assert alpha_eq(u, w)


class TestSubst:
    def test_spine_substitution(self):
        assert subst(t("(Eq h1 h2)"), "h1", Var("a")) == t("(Eq a h2)")

    def test_bound_occurrence_untouched(self):
        assert subst(t("[x:P]x"), "x", Var("q")) == t("[x:P]x")

    def test_capture_avoided(self):
        out = subst(t("[y:T](f x)"), "x", Var("y"))
        assert alpha_eq(out, t("[z:T](f y)"))
        assert out != t("[y:T](f y)")

    def test_simultaneous(self):
        out = subst_map(t("(Eq h1 h2)"), {"h1": Var("h2"), "h2": Var("h1")})
        assert out == t("(Eq h2 h1)")

    @given(terms(), st.sampled_from(NAMES))
    @settings(max_examples=300)
    def test_identity_substitution(self, u, x):
        assert alpha_eq(subst(u, x, Var(x)), u)

    @given(terms(), st.sampled_from(NAMES), terms())
    @settings(max_examples=300)
    def test_free_vars_bound(self, u, x, v):
        out = free_vars(subst(u, x, v))
        assert out <= (free_vars(u) - {x}) | free_vars(v)


class TestFreeVars:
    def test_closed_term(self):
        assert free_vars(t("[P:Prop][x:P]x")) == frozenset()

    def test_application_spine(self):
        assert free_vars(t("(Antisym a b ax1 ax2)")) == {
            "Antisym", "a", "b", "ax1", "ax2",
        }

    def test_binder_removes(self):
        assert free_vars(t("(x:T)(R x y)")) == {"T", "R", "y"}


class TestPrinting:
    def test_arrow_sugar(self):
        assert pp(t("T -> T -> Prop")) == "T -> T -> Prop"

    def test_dependent_product(self):
        assert pp(t("(P:Prop)(P -> P)")) == "(P:Prop)P -> P"

    def test_application(self):
        assert pp(t("(Antisym a b ax1 ax2)")) == "(Antisym a b ax1 ax2)"

    @given(terms())
    @settings(max_examples=300)
    def test_parse_print_round_trip(self, u):
        assert alpha_eq(parse_term(pp(u)), u)


class TestSpine:
    def test_decompose(self):
        head, args = spine(t("(f a b)"))
        assert head == Var("f") and args == [Var("a"), Var("b")]

    def test_rebuild(self):
        assert app(Var("f"), Var("a"), Var("b")) == t("(f a b)")

    def test_arrow_is_product(self):
        u = arrow(Var("A"), Var("B"))
        assert isinstance(u, Product) and "A -> B" == pp(u)
