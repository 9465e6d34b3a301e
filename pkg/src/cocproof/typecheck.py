"""CoC typing where conversion is replaced by equivalence modulo the
context's constraints.

Sorts are exactly Prop : Type; Type itself has no type; a product lives
in the sort of its codomain (impredicative Prop).  The equivalence
`equiv` is the congruence closure of beta-delta-eta convertibility and
the constraint pairs recorded in the context; it is sound but
incomplete for non-normalizable terms, which is why every entry point
is fuel-guarded.
"""

from __future__ import annotations

from functools import lru_cache

from .context import (
    Begin,
    Classification,
    Constraint,
    Context,
    Decl,
    Def,
    End,
    Item,
    Items,
    check_sections_balanced,
    classify,
    lookup,
)
from .errors import (
    FuelExhausted,
    IllFormed,
    Mismatch,
    OutOfScope,
    TypingError,
    UnboundName,
)
from .reduction import Fuel, convertible, make_fuel, nf, normalize, push_binder, whnf
from .term import (
    App,
    Lambda,
    Product,
    Sort,
    TYPE,
    Term,
    Var,
    alpha_eq,
    pp,
    subst,
)

_CLOSURE_NODE_CAP = 200


def env_of(ctx: Context) -> Items:
    return ctx.items[: ctx.index]


def constraint_pairs(env: Items) -> tuple[tuple[Term, Term], ...]:
    return tuple((it.lhs, it.rhs) for it in env if isinstance(it, Constraint))


def _subterms(t: Term, acc: list[Term]) -> None:
    acc.append(t)
    match t:
        case App(f, a):
            _subterms(f, acc)
            _subterms(a, acc)
        case Lambda(_, ty, _) | Product(_, ty, _):
            # bodies live under a binder; they are not closure nodes
            _subterms(ty, acc)
        case _:
            pass


def equiv(env: Items, t: Term, u: Term, fuel: Fuel, use_constraints: bool = True) -> bool:
    """t and u related by conversion plus the context's constraints."""
    if alpha_eq(t, u):
        return True
    if convertible(env, t, u, fuel):
        return True
    if not use_constraints:
        return False
    pairs = constraint_pairs(env)
    if not pairs:
        return False

    nodes: list[Term] = []
    for a, b in pairs:
        _subterms(a, nodes)
        _subterms(b, nodes)
    _subterms(t, nodes)
    _subterms(u, nodes)
    nodes = nodes[:_CLOSURE_NODE_CAP]
    if t not in nodes:
        nodes.append(t)
    if u not in nodes:
        nodes.append(u)

    parent = list(range(len(nodes)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> None:
        parent[find(i)] = find(j)

    nfs: list[Term | None] = []
    for n in nodes:
        try:
            nfs.append(nf(env, n, fuel))
        except (FuelExhausted, TypingError, UnboundName, OutOfScope):
            nfs.append(None)

    index: dict[int, int] = {}
    for i, n in enumerate(nodes):
        for j in range(i):
            if find(i) != find(j) and alpha_eq(n, nodes[j]):
                union(i, j)
                break
        index[id(n)] = i

    def node_id(x: Term) -> int | None:
        for i, n in enumerate(nodes):
            if n is x or alpha_eq(n, x):
                return i
        return None

    for a, b in pairs:
        ia, ib = node_id(a), node_id(b)
        if ia is not None and ib is not None:
            union(ia, ib)

    changed = True
    while changed:
        changed = False
        # convertibility merges
        for i in range(len(nodes)):
            for j in range(i):
                if find(i) == find(j):
                    continue
                if nfs[i] is not None and nfs[j] is not None and alpha_eq(nfs[i], nfs[j]):
                    union(i, j)
                    changed = True
        # congruence on application structure
        for i, n in enumerate(nodes):
            if not isinstance(n, App):
                continue
            for j, m in enumerate(nodes):
                if j >= i or not isinstance(m, App) or find(i) == find(j):
                    continue
                fi, fj = node_id(n.fun), node_id(m.fun)
                ai, aj = node_id(n.arg), node_id(m.arg)
                if None in (fi, fj, ai, aj):
                    continue
                if find(fi) == find(fj) and find(ai) == find(aj):
                    union(i, j)
                    changed = True

    it, iu = node_id(t), node_id(u)
    return it is not None and iu is not None and find(it) == find(iu)


def infer_env(env: Items, t: Term, fuel: Fuel, use_constraints: bool = True) -> Term:
    """Type of t; the result is beta-delta-normalized."""
    ty = _infer(env, t, fuel, use_constraints)
    try:
        return nf(env, ty, fuel)
    except FuelExhausted:
        return ty


def _infer(env: Items, t: Term, fuel: Fuel, use_constraints: bool) -> Term:
    match t:
        case Sort("Prop"):
            return TYPE
        case Sort("Type"):
            raise TypingError("Type has no type")
        case Var(x):
            return lookup(env, len(env), x).type
        case App(f, a):
            f_ty = whnf(env, _infer(env, f, fuel, use_constraints), fuel)
            if not isinstance(f_ty, Product):
                raise TypingError(f"applying non-function {pp(f)} : {pp(f_ty)}")
            a_ty = _infer(env, a, fuel, use_constraints)
            if not equiv(env, a_ty, f_ty.type, fuel, use_constraints):
                raise Mismatch(pp(a_ty), pp(f_ty.type))
            return subst(f_ty.body, f_ty.binder, a)
        case Lambda(x, ty, b):
            _sort_of(env, ty, fuel, use_constraints)
            b_ty = _infer(push_binder(env, x, ty), b, fuel, use_constraints)
            return Product(x, ty, b_ty)
        case Product(x, ty, b):
            _sort_of(env, ty, fuel, use_constraints)
            s2 = _sort_of(push_binder(env, x, ty), b, fuel, use_constraints)
            return s2
    raise TypingError(f"cannot type {t!r}")


def _sort_of(env: Items, ty: Term, fuel: Fuel, use_constraints: bool) -> Sort:
    s = whnf(env, _infer(env, ty, fuel, use_constraints), fuel)
    if not isinstance(s, Sort):
        raise TypingError(f"{pp(ty)} is not a type (its type is {pp(s)})")
    return s


def infer(ctx: Context, t: Term, fuel: Fuel | int | None = None) -> Term:
    return infer_env(env_of(ctx), t, make_fuel(fuel))


def check_env(env: Items, t: Term, ty: Term, fuel: Fuel, use_constraints: bool = True) -> None:
    inferred = _infer(env, t, fuel, use_constraints)
    if not equiv(env, inferred, ty, fuel, use_constraints):
        raise Mismatch(pp(inferred), pp(ty))


def check(ctx: Context, t: Term, ty: Term, fuel: Fuel | int | None = None) -> None:
    check_env(env_of(ctx), t, ty, make_fuel(fuel))


@lru_cache(maxsize=8192)
def _greedy_step(kept: Items, item: Item) -> Items:
    """Extend a greedy constraint-free prefix by one item."""
    match item:
        case Begin() | End():
            return kept + (item,)
        case Constraint():
            return kept
        case Decl(_, _, ty):
            try:
                _sort_of(kept, ty, Fuel(), use_constraints=False)
                return kept + (item,)
            except (TypingError, UnboundName, OutOfScope, FuelExhausted, IllFormed):
                return kept
        case Def(_, body, ty):
            try:
                check_env(kept, body, ty, Fuel(), use_constraints=False)
                return kept + (item,)
            except (TypingError, UnboundName, OutOfScope, FuelExhausted, IllFormed):
                return kept
    return kept


def greedy_delta(items: Items) -> Items:
    """The greedy constraint-free subcontext: scan left to right, keep
    every non-constraint item that typechecks in the kept prefix."""
    kept: Items = ()
    for item in items:
        kept = _greedy_step(kept, item)
    return kept


def typable_without_constraints(ctx: Context, t: Term, fuel: Fuel | int | None = None) -> Term | None:
    """Type of t in the greedy constraint-free subcontext, or None."""
    delta = greedy_delta(env_of(ctx))
    try:
        return infer_env(delta, t, make_fuel(fuel), use_constraints=False)
    except (TypingError, UnboundName, OutOfScope, FuelExhausted, IllFormed):
        return None


def check_well_formed(ctx: Context, fuel: Fuel | int | None = None) -> None:
    """Raise IllFormed unless every item obeys the extended typing rules."""
    fuel = make_fuel(fuel)
    items = ctx.items
    check_sections_balanced(items)
    seen: set[str] = set()
    for i, item in enumerate(items):
        env = items[:i]
        try:
            match item:
                case Decl(_, name, ty):
                    if name in seen:
                        raise IllFormed(f"duplicate name {name}")
                    seen.add(name)
                    _sort_of(env, ty, fuel, use_constraints=True)
                case Def(name, body, ty):
                    if name in seen:
                        raise IllFormed(f"duplicate name {name}")
                    seen.add(name)
                    check_env(env, body, ty, fuel, use_constraints=True)
                case Constraint(a, b):
                    ta = _infer(env, a, fuel, use_constraints=True)
                    tb = _infer(env, b, fuel, use_constraints=True)
                    if not equiv(env, ta, tb, fuel, use_constraints=True):
                        raise IllFormed(
                            f"constraint sides have no common type: {pp(ta)} vs {pp(tb)}"
                        )
                case _:
                    pass
        except IllFormed:
            raise
        except (TypingError, UnboundName, OutOfScope) as exc:
            raise IllFormed(f"item {i}: {exc}") from exc


@lru_cache(maxsize=8192)
def _normalize_item(env: Items, item: Item) -> Item | None:
    """The normalized replacement for one item in front of a normalized
    prefix; None drops the item (a constraint that became trivial)."""
    match item:
        case Decl(q, name, ty):
            try:
                fuel = Fuel()
                s = _sort_of(greedy_delta(env), ty, fuel, use_constraints=False)
                return Decl(q, name, normalize(env, ty, s, fuel))
            except (TypingError, UnboundName, OutOfScope, FuelExhausted):
                return item
        case Constraint(a, b):
            delta = greedy_delta(env)
            try:
                fuel = Fuel()
                ta = infer_env(delta, a, fuel, use_constraints=False)
                tb = infer_env(delta, b, fuel, use_constraints=False)
                a = normalize(env, a, ta, fuel)
                b = normalize(env, b, tb, fuel)
            except (TypingError, UnboundName, OutOfScope, FuelExhausted):
                pass
            if alpha_eq(a, b):
                return None
            return Constraint(a, b)
    return item


def normalize_context(ctx: Context, fuel: Fuel | int | None = None) -> Context:
    """Normalize Decl types and constraint sides that are typable
    without the constraints; drop constraints whose sides become
    alpha-equal.  Other items are left untouched."""
    out: list = []
    new_index = ctx.index
    for i, item in enumerate(ctx.items):
        if i == ctx.index:
            new_index = len(out)
        replacement = _normalize_item(tuple(out), item)
        if replacement is not None:
            out.append(replacement)
    if ctx.index >= len(ctx.items):
        new_index = len(out)
    return Context(tuple(out), new_index)


def classify_normalized(ctx: Context, fuel: Fuel | int | None = None) -> Classification:
    return classify(normalize_context(ctx, fuel))
