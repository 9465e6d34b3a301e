"""Core term syntax of the Calculus of Constructions.

Terms are immutable; all operations return fresh values.  The concrete
syntax follows the classic presentation: `[x:T]t` for abstraction,
`(x:T)B` for a dependent product (with `A -> B` sugar when the binder
does not occur in `B`) and `(f a b)` for application.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

Name = str

ARROW_BINDER: Name = "_"


@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Sort(Term):
    name: str  # "Prop" or "Type"


PROP = Sort("Prop")
TYPE = Sort("Type")


@dataclass(frozen=True)
class Var(Term):
    name: Name


@dataclass(frozen=True)
class Const(Var):
    """Reference to a context-level constant.

    Behaves exactly like a free variable; the distinction is purely
    informative, so `alpha_eq` identifies `Const(n)` with `Var(n)`.
    """


@dataclass(frozen=True)
class App(Term):
    fun: Term
    arg: Term


@dataclass(frozen=True)
class Lambda(Term):
    binder: Name
    type: Term
    body: Term


@dataclass(frozen=True)
class Product(Term):
    binder: Name
    type: Term
    body: Term


def memoize_hash(cls: type) -> type:
    """Cache the structural hash on each node.

    Terms are deep immutable trees and the lru caches downstream hash
    them constantly; recomputing the hash recursively on every lookup
    dominates the profile without this.
    """
    compute = cls.__hash__

    def cached(self):  # type: ignore[no-untyped-def]
        h = self.__dict__.get("_hash")
        if h is None:
            h = compute(self)
            object.__setattr__(self, "_hash", h)
        return h

    cls.__hash__ = cached
    return cls


for _cls in (Sort, Var, Const, App, Lambda, Product):
    memoize_hash(_cls)


def app(fun: Term, *args: Term) -> Term:
    t = fun
    for a in args:
        t = App(t, a)
    return t


def arrow(dom: Term, cod: Term) -> Term:
    return Product(ARROW_BINDER, dom, cod)


def spine(t: Term) -> tuple[Term, list[Term]]:
    """Decompose nested applications into head and argument list."""
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


@lru_cache(maxsize=65536)
def free_vars(t: Term) -> frozenset[Name]:
    match t:
        case Var(name):
            return frozenset({name})
        case App(f, a):
            return free_vars(f) | free_vars(a)
        case Lambda(x, ty, b) | Product(x, ty, b):
            return free_vars(ty) | (free_vars(b) - {x})
        case _:
            return frozenset()


def binders_of(t: Term) -> frozenset[Name]:
    """All binder names occurring anywhere in t."""
    match t:
        case App(f, a):
            return binders_of(f) | binders_of(a)
        case Lambda(x, ty, b) | Product(x, ty, b):
            return frozenset({x}) | binders_of(ty) | binders_of(b)
        case _:
            return frozenset()


def prime(name: Name, avoid: frozenset[Name] | set[Name]) -> Name:
    fresh = name
    while fresh in avoid:
        fresh = fresh + "'"
    return fresh


def alpha_eq(t: Term, u: Term) -> bool:
    """Equality up to renaming of bound variables."""

    def go(t: Term, u: Term, env_t: dict[Name, int], env_u: dict[Name, int], depth: int) -> bool:
        match t, u:
            case Sort(a), Sort(b):
                return a == b
            case Var(x), Var(y):
                bx, by = env_t.get(x), env_u.get(y)
                if bx is None and by is None:
                    return x == y
                return bx == by
            case App(f1, a1), App(f2, a2):
                return go(f1, f2, env_t, env_u, depth) and go(a1, a2, env_t, env_u, depth)
            case (Lambda(x, ty1, b1), Lambda(y, ty2, b2)) | (Product(x, ty1, b1), Product(y, ty2, b2)):
                if type(t).__name__ != type(u).__name__:
                    return False
                if not go(ty1, ty2, env_t, env_u, depth):
                    return False
                return go(b1, b2, {**env_t, x: depth}, {**env_u, y: depth}, depth + 1)
            case _:
                return False

    return go(t, u, {}, {}, 0)


def subst_map(t: Term, mapping: dict[Name, Term]) -> Term:
    """Simultaneous capture-avoiding substitution of free variables."""
    if not mapping:
        return t
    avoid = frozenset().union(*(free_vars(v) for v in mapping.values()))

    def go(t: Term, mapping: dict[Name, Term]) -> Term:
        match t:
            case Var(x):
                return mapping.get(x, t)
            case App(f, a):
                return App(go(f, mapping), go(a, mapping))
            case Lambda(x, ty, b) | Product(x, ty, b):
                cls = type(t)
                ty2 = go(ty, mapping)
                inner = {k: v for k, v in mapping.items() if k != x}
                if not inner:
                    return cls(x, ty2, b)
                if x in avoid and any(k in free_vars(b) for k in inner):
                    x2 = prime(x, avoid | free_vars(b) | binders_of(b) | set(inner))
                    b = go(b, {x: Var(x2)})
                    x = x2
                return cls(x, ty2, go(b, inner))
            case _:
                return t

    return go(t, mapping)


def subst(t: Term, x: Name, u: Term) -> Term:
    """Replace every free occurrence of x in t by u, avoiding capture."""
    return subst_map(t, {x: u})


def hygienize(t: Term, taken: frozenset[Name] = frozenset()) -> Term:
    """Rename binders so no binder shadows a name bound above it."""
    match t:
        case App(f, a):
            return App(hygienize(f, taken), hygienize(a, taken))
        case Lambda(x, ty, b) | Product(x, ty, b):
            cls = type(t)
            ty2 = hygienize(ty, taken)
            if x in taken:
                x2 = prime(x, taken | free_vars(b) | binders_of(b))
                b = subst(b, x, Var(x2))
                x = x2
            return cls(x, ty2, hygienize(b, taken | {x}))
        case _:
            return t


def pp(t: Term) -> str:
    """Print a term in the concrete syntax this engine parses."""
    match t:
        case Sort(s):
            return s
        case Var(x):
            return x
        case App():
            head, args = spine(t)
            return "(" + " ".join(pp(u) for u in [head] + args) + ")"
        case Lambda(x, ty, b):
            return f"[{x}:{pp(ty)}]{pp(b)}"
        case Product(x, ty, b):
            if x in free_vars(b):
                return f"({x}:{pp(ty)}){pp(b)}"
            dom = pp(ty)
            if isinstance(ty, (Lambda, Product)):
                dom = f"({dom})"
            return f"{dom} -> {pp(b)}"
    raise AssertionError(f"unprintable term {t!r}")
