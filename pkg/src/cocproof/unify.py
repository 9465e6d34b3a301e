"""Constraint simplification and the automatically solvable fragments.

First-order trivial equations `x = t` and argument-restricted (pattern)
equations `(x c1 ... cn) = t` are solved automatically; everything else
is postponed for the user, who guides unification by proposing
substitutions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .context import (
    Constraint,
    Context,
    Decl,
    Def,
    EXISTS,
    FORALL,
    Items,
    declared_names,
    decl_index,
    try_lookup,
    visible_entries,
)
from .errors import (
    FuelExhausted,
    NotExistential,
    OutOfScope,
    TypingError,
    UnboundName,
)
from .reduction import Fuel, make_fuel, whnf
from .term import (
    Lambda,
    Name,
    Product,
    Sort,
    Term,
    Var,
    alpha_eq,
    free_vars,
    prime,
    spine,
    subst,
)
from .typecheck import infer_env, normalize_context


@dataclass(frozen=True)
class Decomposed:
    constraints: tuple[tuple[Term, Term], ...]
    fresh: tuple[Decl, ...] = ()


@dataclass(frozen=True)
class Solved:
    substitution: tuple[tuple[Name, Term], ...]


@dataclass(frozen=True)
class Clash:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Postponed:
    pass


SimplificationOutcome = Decomposed | Solved | Clash | Postponed


def _is_existential(env: Items, name: Name) -> bool:
    e = try_lookup(env, len(env), name)
    return e is not None and e.quant is EXISTS


def _head_flexible(env: Items, t: Term) -> bool:
    head, _ = spine(t)
    return isinstance(head, Var) and _is_existential(env, head.name)


def simplify(ctx: Context, c: Constraint, fuel: Fuel | int | None = None, pos: int | None = None) -> SimplificationOutcome:
    """One simplification step on a constraint of the context."""
    fuel = make_fuel(fuel)
    if pos is None:
        pos = next(
            (i for i, it in enumerate(ctx.items) if it is c or it == c),
            len(ctx.items),
        )
    env = ctx.items[:pos]
    a = whnf(env, c.lhs, fuel)
    b = whnf(env, c.rhs, fuel)
    if alpha_eq(a, b):
        return Solved(())
    if _head_flexible(env, a) or _head_flexible(env, b):
        return Postponed()
    match a, b:
        case Sort(), Sort():
            return Clash(a, b)  # equal sorts were caught by alpha_eq
        case Product(x, t1, b1), Product(y, t2, b2):
            if x not in free_vars(b1) and y not in free_vars(b2):
                return Decomposed(((t1, t2), (b1, b2)))
            z = prime("z", declared_names(ctx.items) | free_vars(b1) | free_vars(b2))
            decl = Decl(FORALL, z, t1)
            return Decomposed(
                ((t1, t2), (subst(b1, x, Var(z)), subst(b2, y, Var(z)))),
                fresh=(decl,),
            )
        case Lambda(x, t1, b1), Lambda(y, t2, b2):
            z = prime("z", declared_names(ctx.items) | free_vars(b1) | free_vars(b2))
            decl = Decl(FORALL, z, t1)
            return Decomposed(
                ((t1, t2), (subst(b1, x, Var(z)), subst(b2, y, Var(z)))),
                fresh=(decl,),
            )
        case (Lambda(), _) | (_, Lambda()):
            return Postponed()  # eta mismatch; renormalization handles it
        case _:
            ha, args_a = spine(a)
            hb, args_b = spine(b)
            if isinstance(ha, Var) and isinstance(hb, Var):
                if ha.name != hb.name:
                    return Clash(a, b)
                if len(args_a) != len(args_b):
                    return Postponed()
                return Decomposed(tuple(zip(args_a, args_b)))
            # rigid structural mismatch (sort vs application, product vs
            # application, ...)
            return Clash(a, b)


def _scope_names_at(items: Items, pos: int) -> frozenset[Name]:
    return frozenset(e.name for e in visible_entries(items, pos))


def instantiate_raw(
    ctx: Context,
    pos: int,
    r: Term,
    fuel: Fuel,
    declared_type: Term | None = None,
) -> Context:
    """The bare instantiate step: erase the existential declaration at
    `pos`, record the constraint between its type and the type of r,
    insert the definition, and renormalize.  No automatic solving."""
    item = ctx.items[pos]
    if not (isinstance(item, Decl) and item.quant is EXISTS):
        raise NotExistential(f"item at {pos} is not an existential declaration")
    env = ctx.items[:pos]
    u = infer_env(env, r, fuel)
    t = declared_type if declared_type is not None else item.type
    new = (Constraint(t, u), Def(item.name, r, t))
    items = ctx.items[:pos] + new + ctx.items[pos + 1 :]
    index = ctx.index + 1 if ctx.index > pos else ctx.index
    return normalize_context(Context(items, index), fuel)


def _solvable_trivial(ctx: Context, pos: int, c: Constraint, fuel: Fuel) -> tuple[Name, Term] | None:
    env = ctx.items[:pos]
    for x_side, t_side in ((c.lhs, c.rhs), (c.rhs, c.lhs)):
        if not isinstance(x_side, Var):
            continue
        x = x_side.name
        if not _is_existential(env, x):
            continue
        if x in free_vars(t_side):
            continue  # occurs check
        try:
            decl_pos = decl_index(ctx.items, x)
        except UnboundName:
            continue
        in_scope = _scope_names_at(ctx.items, decl_pos)
        if not free_vars(t_side) <= in_scope:
            continue
        return x, t_side
    return None


def solve_trivial(ctx: Context, fuel: Fuel | int | None = None) -> tuple[Context, dict[Name, Term]]:
    """Repeatedly solve equations `x = t` with x existential."""
    fuel = make_fuel(fuel)
    substitution: dict[Name, Term] = {}
    progress = True
    while progress:
        progress = False
        for i, item in enumerate(ctx.items):
            if not isinstance(item, Constraint):
                continue
            found = _solvable_trivial(ctx, i, item, fuel)
            if found is None:
                continue
            x, t = found
            decl_pos = decl_index(ctx.items, x)
            without = Context(
                ctx.items[:i] + ctx.items[i + 1 :],
                ctx.index - 1 if ctx.index > i else ctx.index,
            )
            try:
                ctx = instantiate_raw(without, decl_pos, t, fuel)
            except (TypingError, UnboundName, OutOfScope, FuelExhausted):
                continue
            substitution = {k: subst(v, x, t) for k, v in substitution.items()}
            substitution[x] = t
            progress = True
            break
    return ctx, substitution


def _pattern_solution(ctx: Context, pos: int, c: Constraint, fuel: Fuel) -> tuple[Name, Term] | None:
    env = ctx.items[:pos]
    for lhs, rhs in ((c.lhs, c.rhs), (c.rhs, c.lhs)):
        head, args = spine(lhs)
        if not args or not isinstance(head, Var):
            continue
        x = head.name
        if not _is_existential(env, x):
            continue
        if x in free_vars(rhs):
            continue  # occurs check
        try:
            x_pos = decl_index(ctx.items, x)
        except UnboundName:
            continue
        if not all(isinstance(a, Var) for a in args):
            continue
        names = [a.name for a in args]
        if len(set(names)) != len(names):
            continue  # heads must be distinct
        arg_entries = []
        ok = True
        for n in names:
            e = try_lookup(env, len(env), n)
            if e is None or e.quant is not FORALL or e.pos <= x_pos:
                ok = False  # must be universals declared on the right of x
                break
            arg_entries.append(e)
        if not ok:
            continue
        in_scope = _scope_names_at(ctx.items, x_pos)
        allowed = in_scope | set(names)
        if not free_vars(rhs) <= allowed:
            continue
        lam = rhs
        ok = True
        for n, e in zip(reversed(names), reversed(arg_entries)):
            ty_free = free_vars(e.type)
            if not ty_free <= allowed:
                ok = False
                break
            lam = Lambda(n, e.type, lam)
        if not ok:
            continue
        return x, lam
    return None


def solve_pattern(ctx: Context, fuel: Fuel | int | None = None) -> tuple[Context, dict[Name, Term]]:
    """Solve argument-restricted equations `(x c1 ... cn) = t`."""
    fuel = make_fuel(fuel)
    substitution: dict[Name, Term] = {}
    progress = True
    while progress:
        progress = False
        for i, item in enumerate(ctx.items):
            if not isinstance(item, Constraint):
                continue
            found = _pattern_solution(ctx, i, item, fuel)
            if found is None:
                continue
            x, lam = found
            decl_pos = decl_index(ctx.items, x)
            without = Context(
                ctx.items[:i] + ctx.items[i + 1 :],
                ctx.index - 1 if ctx.index > i else ctx.index,
            )
            try:
                ctx = instantiate_raw(without, decl_pos, lam, fuel)
            except (TypingError, UnboundName, OutOfScope, FuelExhausted):
                continue
            substitution = {k: subst(v, x, lam) for k, v in substitution.items()}
            substitution[x] = lam
            progress = True
            break
    return ctx, substitution


@dataclass(frozen=True)
class SolveResult:
    context: Context
    clash: Constraint | None
    substitution: tuple[tuple[Name, Term], ...]

    @property
    def failed(self) -> bool:
        return self.clash is not None


def solve_first_order(ctx: Context, fuel: Fuel | int | None = None) -> SolveResult:
    """Fixpoint of {normalize; simplify; solve trivial; solve pattern}."""
    fuel = make_fuel(fuel)
    substitution: dict[Name, Term] = {}
    while True:
        ctx = normalize_context(ctx, fuel)
        changed = False
        i = 0
        while i < len(ctx.items):
            item = ctx.items[i]
            if isinstance(item, Constraint):
                outcome = simplify(ctx, item, fuel, pos=i)
                match outcome:
                    case Clash():
                        return SolveResult(ctx, item, tuple(substitution.items()))
                    case Solved(()):
                        ctx = Context(
                            ctx.items[:i] + ctx.items[i + 1 :],
                            ctx.index - 1 if ctx.index > i else ctx.index,
                        )
                        changed = True
                        continue
                    case Decomposed(pairs, fresh):
                        new = tuple(fresh) + tuple(Constraint(a, b) for a, b in pairs)
                        items = ctx.items[:i] + new + ctx.items[i + 1 :]
                        index = ctx.index + len(new) - 1 if ctx.index > i else ctx.index
                        ctx = Context(items, index)
                        changed = True
                        i += len(new)
                        continue
                    case Postponed():
                        pass
            i += 1
        ctx, sub = solve_trivial(ctx, fuel)
        if sub:
            changed = True
            substitution = {k: _apply(sub, v) for k, v in substitution.items()} | sub
        ctx, sub = solve_pattern(ctx, fuel)
        if sub:
            changed = True
            substitution = {k: _apply(sub, v) for k, v in substitution.items()} | sub
        if not changed:
            return SolveResult(ctx, None, tuple(substitution.items()))


def _apply(mapping: dict[Name, Term], t: Term) -> Term:
    from .term import subst_map

    return subst_map(t, dict(mapping))


def propose_substitution(ctx: Context, x: Name, t: Term, fuel: Fuel | int | None = None) -> Context:
    """User-guided instantiation of an existential variable."""
    from .engine import EngineState, instantiate

    fuel = make_fuel(fuel)
    pos = decl_index(ctx.items, x)
    item = ctx.items[pos]
    if not (isinstance(item, Decl) and item.quant is EXISTS):
        raise NotExistential(x)
    env = ctx.items[:pos]
    state = EngineState(Context(ctx.items, pos + 1), register=(t, infer_env(env, t, fuel)))
    state = instantiate(state, fuel)
    return state.context.at_end()
