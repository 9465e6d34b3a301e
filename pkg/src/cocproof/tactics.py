"""Goal management and the tactic layer.

Every goal is an existential variable wrapped in its own little
section, so the introduction tactic can move product binders into the
section as universal locals while the outside view of the goal is
unchanged.  Applying a head term declares fresh existentials for its
telescope, instantiates the goal with the head applied to them, and
lets first-order solving dispatch what it can; remaining proposition
obligations become subgoals in place.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .context import (
    Begin,
    Constraint,
    Context,
    Decl,
    Def,
    End,
    EXISTS,
    FORALL,
    Items,
    declared_names,
    decl_index,
    section_span,
    visible_entries,
)
from .engine import EngineState, declare, instantiate, load
from .errors import (
    FailureContext,
    GoalNotProduct,
    GoalsRemain,
    Mismatch,
    NameClash,
    NoGoalAccepts,
    NotExact,
    OutOfScope,
    ProverError,
    TypingError,
    UnboundName,
)
from .reduction import Fuel, make_fuel, nf, whnf
from .term import PROP, Name, Product, Term, Var, app, pp, subst
from .typecheck import check_env, infer_env
from .unify import propose_substitution as unify_propose


@dataclass(frozen=True)
class Scope:
    """An open theorem, remark, anonymous goal, or explicit section."""

    name: Name
    kind: str  # "theorem" | "remark" | "goal" | "section"
    label: Name  # section label; distinct from the root goal's label
    goals: tuple[Name, ...] = ()
    has_statement: bool = False
    root_goal: Name | None = None


@dataclass(frozen=True)
class ProofState:
    context: Context = Context()
    scopes: tuple[Scope, ...] = ()
    counter: int = 0

    @property
    def items(self) -> Items:
        return self.context.items

    def current_scope(self) -> Scope | None:
        return self.scopes[-1] if self.scopes else None

    def current_goals(self) -> tuple[Name, ...]:
        s = self.current_scope()
        return s.goals if s else ()


@dataclass(frozen=True)
class TacticResult:
    state: ProofState
    solved: tuple[Name, ...] = ()
    subgoals: tuple[Name, ...] = ()
    saved: tuple[Name, Term, Term] | None = None  # constant exported on auto-save
    messages: tuple[str, ...] = ()


def fresh_name(ps: ProofState, base: str = "x") -> tuple[Name, ProofState]:
    counter = ps.counter
    taken = declared_names(ps.items)
    while True:
        counter += 1
        name = f"{base}{counter}"
        if name not in taken:
            return name, replace(ps, counter=counter)


def _with_context(ps: ProofState, ctx: Context) -> ProofState:
    return replace(ps, context=ctx)


def insertion_point(ps: ProofState) -> int:
    """Where scope-level items (locals, goal sections, remarks) go."""
    for scope in reversed(ps.scopes):
        if scope.goals:
            begin, _ = section_span(ps.items, scope.goals[0])
            return begin
    return len(ps.items)


def goal_position(ps: ProofState, goal: Name) -> int:
    return decl_index(ps.items, goal)


def goal_type(ps: ProofState, goal: Name) -> Term:
    item = ps.items[goal_position(ps, goal)]
    assert isinstance(item, Decl)
    return item.type


def declare_global(ps: ProofState, name: Name, ty: Term, fuel: Fuel) -> ProofState:
    """Parameter/Axiom: a universal declaration at the insertion point."""
    pos = insertion_point(ps)
    state = EngineState(Context(ps.items, pos))
    state = load(state, ty, fuel)
    state = declare(state, FORALL, name, fuel)
    return _with_context(ps, state.context.at_end())


def define_constant(ps: ProofState, name: Name, body: Term, fuel: Fuel) -> tuple[ProofState, Term]:
    from .engine import insert_definition

    pos = insertion_point(ps)
    state = EngineState(Context(ps.items, pos))
    state = insert_definition(state, name, body, fuel)
    item = state.context.items[pos]
    assert isinstance(item, Def)
    return _with_context(ps, state.context.at_end()), item.type


def open_scope(ps: ProofState, name: Name, kind: str) -> ProofState:
    if name in declared_names(ps.items):
        raise NameClash(name)
    # label every scope uniquely; Begin/End labels are never displayed
    ps = replace(ps, counter=ps.counter + 1)
    label = f"{name}#{kind}{ps.counter}"
    pos = insertion_point(ps)
    items = ps.items[:pos] + (Begin(label),) + ps.items[pos:]
    ps = _with_context(ps, Context(items, len(items)))
    return replace(ps, scopes=ps.scopes + (Scope(name, kind, label),))


def add_local(ps: ProofState, name: Name, ty: Term, fuel: Fuel) -> ProofState:
    """Variable/Hypothesis inside an open scope's preamble."""
    pos = insertion_point(ps)
    state = EngineState(Context(ps.items, pos))
    state = load(state, ty, fuel)
    state = declare(state, FORALL, name, fuel)
    return _with_context(ps, state.context.at_end())


def open_goal(ps: ProofState, name: Name, statement: Term, fuel: Fuel) -> ProofState:
    """Create the goal's little section [Begin; ∃name:statement; End]."""
    pos = insertion_point(ps)
    items = ps.items[:pos] + (Begin(name),) + ps.items[pos:]
    state = EngineState(Context(items, pos + 1))
    state = load(state, statement, fuel)
    state = declare(state, EXISTS, name, fuel)
    items = state.context.items
    items = items[: pos + 2] + (End(name),) + items[pos + 2 :]
    return _with_context(ps, Context(items, len(items)))


def set_statement(ps: ProofState, statement: Term, fuel: Fuel) -> ProofState:
    scope = ps.current_scope()
    assert scope is not None and not scope.has_statement
    ps = open_goal(ps, scope.name, statement, fuel)
    scope = replace(scope, goals=(scope.name,), has_statement=True, root_goal=scope.name)
    return replace(ps, scopes=ps.scopes[:-1] + (scope,))


def _live_existentials(items: Items) -> frozenset[Name]:
    return frozenset(
        it.name for it in items if isinstance(it, Decl) and it.quant is EXISTS
    )


def refresh_goals(ps: ProofState) -> tuple[ProofState, tuple[Name, ...]]:
    """Drop goals whose existential was solved; report them."""
    live = _live_existentials(ps.items)
    solved: list[Name] = []
    scopes = []
    for s in ps.scopes:
        keep = tuple(g for g in s.goals if g in live)
        solved.extend(g for g in s.goals if g not in live)
        scopes.append(replace(s, goals=keep))
    return replace(ps, scopes=tuple(scopes)), tuple(solved)


def intro(ps: ProofState, name: Name | None, fuel: Fuel) -> ProofState:
    goals = ps.current_goals()
    if not goals:
        raise GoalsRemain("no goal to introduce into")
    g = goals[0]
    pos = goal_position(ps, g)
    env = ps.items[:pos]
    ty = whnf(env, goal_type(ps, g), fuel)
    if not isinstance(ty, Product):
        raise GoalNotProduct(pp(ty))
    taken = declared_names(ps.items)
    if name is not None:
        if name in taken:
            raise NameClash(name)
        binder = name
    elif ty.binder != "_" and ty.binder not in taken:
        binder = ty.binder
    else:
        binder, ps = fresh_name(ps)
    state = EngineState(Context(ps.items, pos))
    state = load(state, ty.type, fuel)
    state = declare(state, FORALL, binder, fuel)
    items = state.context.items
    new_goal_ty = subst(ty.body, ty.binder, Var(binder))
    old = items[pos + 1]
    assert isinstance(old, Decl) and old.name == g
    items = items[: pos + 1] + (Decl(EXISTS, g, new_goal_ty),) + items[pos + 2 :]
    return _with_context(ps, Context(items, len(items)))


def _telescope(env: Items, ty: Term, fuel: Fuel) -> tuple[list[tuple[Name, Term]], Term]:
    """Unfold a type into binder/domain pairs and a final codomain."""
    tele: list[tuple[Name, Term]] = []
    ty = whnf(env, ty, fuel)
    while isinstance(ty, Product):
        tele.append((ty.binder, ty.type))
        ty = whnf(env, ty.body, fuel)
    return tele, ty


def _apply_to_goal(
    ps: ProofState,
    g: Name,
    head: Term,
    fuel: Fuel,
    auto_solve: bool = True,
) -> tuple[ProofState, tuple[Name, ...]]:
    pos = goal_position(ps, g)
    env = ps.items[:pos]
    head_ty = infer_env(env, head, fuel)
    tele, _ = _telescope(env, head_ty, fuel)

    # fresh existentials for the telescope, each in its own little section
    hs: list[Name] = []
    sub: dict[Name, Term] = {}
    ctx = ps.context
    for binder, dom in tele:
        h, ps = fresh_name(ps)
        dom_i = subst_many(dom, sub)
        pos = goal_position(ps, g)
        items = ctx.items[:pos] + (Begin(h),) + ctx.items[pos:]
        state = EngineState(Context(items, pos + 1))
        state = load(state, dom_i, fuel)
        state = declare(state, EXISTS, h, fuel)
        items = state.context.items
        items = items[: pos + 2] + (End(h),) + items[pos + 2 :]
        ctx = Context(items, len(items))
        ps = _with_context(ps, ctx)
        sub[binder] = Var(h)
        hs.append(h)

    # instantiate the goal with the head applied to the existentials
    pos = goal_position(ps, g)
    state = EngineState(Context(ps.items, pos + 1))
    state = load(state, app(head, *[Var(h) for h in hs]), fuel)
    state = instantiate(state, fuel, auto_solve=auto_solve)
    ps = _with_context(ps, state.context.at_end())

    live = _live_existentials(ps.items)
    subgoals: list[Name] = []
    for h in hs:
        if h not in live:
            continue
        hpos = goal_position(ps, h)
        henv = ps.items[:hpos]
        hty = ps.items[hpos].type
        try:
            sort = whnf(henv, infer_env(henv, hty, fuel), fuel)
        except ProverError:
            continue
        if sort == PROP:
            subgoals.append(h)
    return ps, tuple(subgoals)


def subst_many(t: Term, mapping: dict[Name, Term]) -> Term:
    from .term import subst_map

    return subst_map(t, mapping)


def apply(
    ps: ProofState,
    head: Term,
    fuel: Fuel | int | None = None,
    strict: bool = False,
    auto_solve: bool = True,
) -> TacticResult:
    """First-fit apply: try the front goal, fall through on clash."""
    fuel = make_fuel(fuel)
    goals = ps.current_goals()
    if not goals:
        raise GoalsRemain("no open goal")
    candidates = goals[:1] if strict else goals
    errors: list[str] = []
    for g in candidates:
        try:
            ps2, subgoals = _apply_to_goal(ps, g, head, fuel, auto_solve=auto_solve)
        except (FailureContext, TypingError, Mismatch, UnboundName, OutOfScope) as exc:
            errors.append(f"{g}: {exc}")
            continue
        scope = ps2.current_scope()
        idx = scope.goals.index(g)
        new_goals = scope.goals[:idx] + subgoals + scope.goals[idx + 1 :]
        ps2 = replace(
            ps2, scopes=ps2.scopes[:-1] + (replace(scope, goals=new_goals),)
        )
        ps2, solved = refresh_goals(ps2)
        return TacticResult(ps2, solved=(g,) + solved, subgoals=subgoals)
    raise NoGoalAccepts("; ".join(errors) or "no goal accepts the head")


def assumption(ps: ProofState, name: Name, fuel: Fuel | int | None = None) -> TacticResult:
    """Exact match of a visible name against the front goal."""
    fuel = make_fuel(fuel)
    goals = ps.current_goals()
    if not goals:
        raise GoalsRemain("no open goal")
    g = goals[0]
    before = sum(1 for it in ps.items if isinstance(it, Constraint))
    pos = goal_position(ps, g)
    state = EngineState(Context(ps.items, pos + 1))
    try:
        state = load(state, Var(name), fuel)
        state = instantiate(state, fuel)
    except (FailureContext, TypingError, Mismatch, UnboundName, OutOfScope) as exc:
        raise NotExact(str(exc)) from exc
    ps = _with_context(ps, state.context.at_end())
    after = sum(1 for it in ps.items if isinstance(it, Constraint))
    if after > before:
        raise NotExact(f"{name} does not exactly match the goal")
    ps, solved = refresh_goals(ps)
    return TacticResult(ps, solved=(g,) + solved)


def propose(ps: ProofState, x: Name, t: Term, fuel: Fuel | int | None = None) -> TacticResult:
    """User-guided substitution for a postponed existential."""
    fuel = make_fuel(fuel)
    ctx = unify_propose(ps.context.at_end(), x, t, fuel)
    ps = _with_context(ps, ctx)
    ps, solved = refresh_goals(ps)
    return TacticResult(ps, solved=solved)


def _span_incomplete(items: Items, begin: int, end: int) -> str | None:
    span = items[begin : end + 1]
    for it in span:
        if isinstance(it, Decl) and it.quant is EXISTS:
            return f"existential {it.name} remains"
        if isinstance(it, Constraint):
            return f"live constraint {pp(it.lhs)} = {pp(it.rhs)}"
    return None


def _close_and_export(
    ps: ProofState, scope: Scope, export_name: Name, fuel: Fuel
) -> tuple[ProofState, Name, Term, Term]:
    """Append End, inline the span's definitions into the root constant,
    and replace the whole section by that single definition."""
    items = ps.items
    _, end_g = section_span(items, scope.root_goal)
    items = items[: end_g + 1] + (End(scope.label),) + items[end_g + 1 :]
    begin, end = section_span(items, scope.label)
    problem = _span_incomplete(items, begin, end)
    if problem is not None:
        raise GoalsRemain(problem)
    span = items[begin : end + 1]
    exports = visible_entries(span, len(span))
    entry = next(e for e in exports if e.name == scope.root_goal)
    local_env = items[:begin] + tuple(
        Def(e.name, e.value, e.type) for e in exports if e.value is not None
    )
    unfold = frozenset(e.name for e in exports if e.value is not None)
    value = nf(local_env, entry.value, fuel, unfold=unfold)
    ty = nf(local_env, entry.type, fuel, unfold=unfold - {scope.root_goal})
    # extraction gate: the discharged constant re-checks without constraints
    check_env(items[:begin], value, ty, fuel, use_constraints=False)
    new_items = items[:begin] + (Def(export_name, value, ty),) + items[end + 1 :]
    ps = _with_context(ps, Context(new_items, len(new_items)))
    ps = replace(ps, scopes=ps.scopes[:-1])
    return ps, export_name, value, ty


def save(ps: ProofState, name: Name, fuel: Fuel | int | None = None) -> tuple[ProofState, Term, Term]:
    fuel = make_fuel(fuel)
    scope = ps.current_scope()
    if scope is None or not scope.has_statement:
        raise GoalsRemain("no completed proof to save")
    if scope.goals:
        raise GoalsRemain(f"{len(scope.goals)} open subgoal(s)")
    if name != scope.name and name in declared_names(ps.items):
        raise NameClash(name)
    ps, saved_name, value, ty = _close_and_export(ps, scope, name, fuel)
    return ps, value, ty


def auto_complete(ps: ProofState, fuel: Fuel | int | None = None) -> tuple[ProofState, tuple[TacticResult, ...]]:
    """Close completed theorem/remark scopes from the inside out."""
    fuel = make_fuel(fuel)
    results: list[TacticResult] = []
    while True:
        scope = ps.current_scope()
        if (
            scope is None
            or scope.kind not in ("theorem", "remark")
            or not scope.has_statement
            or scope.goals
        ):
            return ps, tuple(results)
        try:
            ps2, name, value, ty = _close_and_export(ps, scope, scope.name, fuel)
        except GoalsRemain:
            # postponed existentials or constraints remain: stay open
            return ps, tuple(results)
        ps = ps2
        results.append(TacticResult(ps, saved=(name, value, ty)))
        ps, _ = refresh_goals(ps)


def goal_hypotheses(ps: ProofState, goal: Name) -> list[tuple[Name, Term]]:
    """Universal locals of the goal's own section, outermost first."""
    begin, _ = section_span(ps.items, goal)
    pos = goal_position(ps, goal)
    out: list[tuple[Name, Term]] = []
    depth = 0
    for it in ps.items[begin + 1 : pos]:
        if isinstance(it, Begin):
            depth += 1
        elif isinstance(it, End):
            depth -= 1
        elif depth == 0 and isinstance(it, Decl) and it.quant is FORALL:
            out.append((it.name, it.type))
    return out


def render_goals(ps: ProofState) -> str:
    scope = ps.current_scope()
    if scope is None or not scope.has_statement:
        return ""
    goals = scope.goals
    if not goals:
        return "Goal proved!"
    lines = [f"{len(goals)} subgoal" + ("s" if len(goals) > 1 else "")]
    lines.append(f"  {pp(goal_type(ps, goals[0]))}")
    lines.append("  ============================")
    for name, ty in reversed(goal_hypotheses(ps, goals[0])):
        lines.append(f"  {name} : {pp(ty)}")
    for k, g in enumerate(goals[1:], start=2):
        lines.append(f"subgoal {k} is:")
        lines.append(f"  {pp(goal_type(ps, g))}")
    return "\n".join(lines)
