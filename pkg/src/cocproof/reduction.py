"""Beta reduction, delta unfolding of context definitions, eta-long
forms and fuel-bounded normalization.

All functions here take an `env`: the tuple of context items *before*
the point where the term lives.  Local binders are handled by extending
that tuple with temporary universal declarations, so name lookup always
resolves the nearest binding and never unfolds a shadowed definition.
"""

from __future__ import annotations

from dataclasses import dataclass

from .context import Decl, FORALL, Items, try_lookup
from .errors import FuelExhausted, TypingError, UnboundName
from .term import (
    App,
    Lambda,
    Name,
    Product,
    Sort,
    TYPE,
    Term,
    Var,
    app,
    binders_of,
    free_vars,
    prime,
    spine,
    subst,
)

DEFAULT_FUEL = 100_000


@dataclass
class Fuel:
    """Reduction-step budget; exhaustion raises, never truncates silently."""

    limit: int = DEFAULT_FUEL
    used: int = 0

    def tick(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.limit:
            raise FuelExhausted(f"exceeded {self.limit} reduction steps")


def make_fuel(fuel: "Fuel | int | None") -> Fuel:
    if fuel is None:
        return Fuel()
    if isinstance(fuel, int):
        return Fuel(limit=fuel)
    return fuel


def push_binder(env: Items, name: Name, ty: Term) -> Items:
    return env + (Decl(FORALL, name, ty),)


def whnf(
    env: Items,
    t: Term,
    fuel: Fuel,
    unfold: frozenset[Name] | None = None,
) -> Term:
    """Weak-head beta-delta normal form."""
    while True:
        head, args = spine(t)
        if isinstance(head, Lambda) and args:
            fuel.tick()
            t = app(subst(head.body, head.binder, args[0]), *args[1:])
            continue
        if isinstance(head, Var):
            e = try_lookup(env, len(env), head.name)
            if e is not None and e.value is not None and (
                unfold is None or head.name in unfold
            ):
                fuel.tick()
                t = app(e.value, *args)
                continue
        return t


def nf(
    env: Items,
    t: Term,
    fuel: Fuel,
    unfold: frozenset[Name] | None = None,
) -> Term:
    """Full beta-delta normal form."""
    t = whnf(env, t, fuel, unfold)
    match t:
        case Lambda(x, ty, b) | Product(x, ty, b):
            cls = type(t)
            ty2 = nf(env, ty, fuel, unfold)
            b2 = nf(push_binder(env, x, ty2), b, fuel, unfold)
            return cls(x, ty2, b2)
        case App():
            head, args = spine(t)
            return app(head, *[nf(env, a, fuel, unfold) for a in args])
        case _:
            return t


def infer_shape(env: Items, t: Term, fuel: Fuel) -> Term:
    """Type of a beta-normal, well-typed term, without conversion checks.

    Just enough typing to direct eta-expansion; full checking lives in
    the typecheck module.
    """
    match t:
        case Sort("Prop"):
            return TYPE
        case Sort("Type"):
            raise TypingError("Type has no type")
        case Var(x):
            e = try_lookup(env, len(env), x)
            if e is None:
                raise UnboundName(x)
            return e.type
        case App():
            head, args = spine(t)
            ty = infer_shape(env, head, fuel)
            for a in args:
                ty = whnf(env, ty, fuel)
                if not isinstance(ty, Product):
                    raise TypingError(f"over-application in {t}")
                ty = subst(ty.body, ty.binder, a)
            return ty
        case Lambda(x, ty, b):
            return Product(x, ty, infer_shape(push_binder(env, x, ty), b, fuel))
        case Product(x, ty, b):
            return infer_shape(push_binder(env, x, ty), b, fuel)
    raise TypingError(f"cannot type {t!r}")


def eta_long(env: Items, t: Term, ty: Term, fuel: Fuel) -> Term:
    """Eta-expand a beta-delta-normal term at the given type."""
    ty_w = whnf(env, ty, fuel)
    if isinstance(ty_w, Product):
        if isinstance(t, Lambda):
            env2 = push_binder(env, t.binder, t.type)
            body_ty = subst(ty_w.body, ty_w.binder, Var(t.binder))
            ann = nf(env, t.type, fuel)
            ann_e = eta_long(env, ann, infer_shape(env, ann, fuel), fuel)
            return Lambda(t.binder, ann_e, eta_long(env2, t.body, body_ty, fuel))
        dom = nf(env, ty_w.type, fuel)
        dom_e = eta_long(env, dom, infer_shape(env, dom, fuel), fuel)
        x = prime(ty_w.binder if ty_w.binder != "_" else "x", free_vars(t) | binders_of(t))
        while try_lookup(env, len(env), x) is not None:
            x = x + "'"
        env2 = push_binder(env, x, dom)
        body = whnf(env2, App(t, Var(x)), fuel)
        return Lambda(x, dom_e, eta_long(env2, body, subst(ty_w.body, ty_w.binder, Var(x)), fuel))
    match t:
        case Sort():
            return t
        case Product(x, dom, cod):
            dom_n = nf(env, dom, fuel)
            dom_e = eta_long(env, dom_n, infer_shape(env, dom_n, fuel), fuel)
            env2 = push_binder(env, x, dom_n)
            cod_e = eta_long(env2, cod, infer_shape(env2, cod, fuel), fuel)
            return Product(x, dom_e, cod_e)
        case Lambda():
            # ill-typed at a non-functional type; leave untouched
            return t
        case _:
            head, args = spine(t)
            head_ty = infer_shape(env, head, fuel)
            out: list[Term] = []
            for a in args:
                head_ty = whnf(env, head_ty, fuel)
                if not isinstance(head_ty, Product):
                    return app(head, *out, *args[len(out):])
                out.append(eta_long(env, a, head_ty.type, fuel))
                head_ty = subst(head_ty.body, head_ty.binder, a)
            return app(head, *out)


def normalize(env: Items, t: Term, ty: Term, fuel: Fuel) -> Term:
    """Beta-delta normal then eta-long form of t at type ty."""
    return eta_long(env, nf(env, t, fuel), nf(env, ty, fuel), fuel)


def _alpha_eta(t: Term, u: Term, supply: list[int]) -> bool:
    """Alpha comparison of normal forms, modulo eta."""

    def fresh() -> Name:
        supply[0] += 1
        return f"#e{supply[0]}"

    match t, u:
        case Sort(a), Sort(b):
            return a == b
        case Var(x), Var(y):
            return x == y
        case Lambda(x, ty1, b1), Lambda(y, ty2, b2):
            z = fresh()
            return _alpha_eta(ty1, ty2, supply) and _alpha_eta(
                subst(b1, x, Var(z)), subst(b2, y, Var(z)), supply
            )
        case Product(x, ty1, b1), Product(y, ty2, b2):
            z = fresh()
            return _alpha_eta(ty1, ty2, supply) and _alpha_eta(
                subst(b1, x, Var(z)), subst(b2, y, Var(z)), supply
            )
        case Lambda(x, _, b), _:
            z = fresh()
            return _alpha_eta(subst(b, x, Var(z)), App(u, Var(z)), supply)
        case _, Lambda(y, _, b):
            z = fresh()
            return _alpha_eta(App(t, Var(z)), subst(b, y, Var(z)), supply)
        case App(f1, a1), App(f2, a2):
            return _alpha_eta(f1, f2, supply) and _alpha_eta(a1, a2, supply)
        case _:
            return False


def beta_eta_eq(t: Term, u: Term) -> bool:
    return _alpha_eta(t, u, [0])


def convertible(env: Items, t: Term, u: Term, fuel: Fuel) -> bool:
    """Beta-delta-eta convertibility within the fuel budget."""
    return beta_eta_eq(nf(env, t, fuel), nf(env, u, fuel))
