"""Shared fixtures: corpus locations, prebuilt signatures, and parsing
shortcuts used across the whole test suite."""

from __future__ import annotations

import pathlib

import pytest

from cocproof.context import Context, Decl, EXISTS, FORALL
from cocproof.term import Term
from cocproof.vernacular import Session, parse_term

ROOT = pathlib.Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"

CORPUS_SCRIPTS = sorted(p.name for p in CORPUS.glob("*.v") if "bad" not in p.name)


def t(src: str) -> Term:
    return parse_term(src)


def run_corpus(name: str, session: Session | None = None) -> Session:
    session = session or Session()
    session.execute((CORPUS / name).read_text())
    return session


@pytest.fixture
def session() -> Session:
    return Session()


@pytest.fixture
def antisym_session() -> Session:
    """Declarations of the antisymmetry example, nothing proved yet."""
    return run_corpus("antisym_signature.v")


@pytest.fixture
def tarski_session() -> Session:
    """The Tarski fixed-point signature with Pre defined."""
    return run_corpus("tarski_signature.v")


def constraint_scenario() -> Context:
    """[forall A:Prop; exists X:Prop; exists y:X -> A]"""
    items = (
        Decl(FORALL, "A", t("Prop")),
        Decl(EXISTS, "X", t("Prop")),
        Decl(EXISTS, "y", t("X -> A")),
    )
    return Context(items, len(items))
