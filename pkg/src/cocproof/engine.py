"""The extended constructive engine.

State is an indexed context plus an optional register holding a term
and its type.  Two invariants are maintained: the whole context is
well-formed, and the register term is well-typed in the prefix left of
the index.  The four basic instructions move the index, load a checked
term, declare a quantified variable of the register's type, and
instantiate an existential with the register, generating a constraint.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .context import (
    Classification,
    Context,
    Decl,
    Def,
    EXISTS,
    Items,
    Quantifier,
    declared_names,
)
from .errors import (
    FailureContext,
    NameClash,
    NotASort,
    NotExistentialAtIndex,
    OutOfBounds,
    RegisterEmpty,
    TypingError,
)
from .reduction import Fuel, make_fuel, whnf
from .term import Name, Sort, Term, free_vars, pp
from .typecheck import check_well_formed, classify_normalized, infer_env
from .unify import SolveResult, instantiate_raw, solve_first_order

Register = tuple[Term, Term] | None


@dataclass(frozen=True)
class EngineState:
    context: Context = Context()
    register: Register = None

    @property
    def prefix(self) -> Items:
        return self.context.items[: self.context.index]


def initial_state() -> EngineState:
    return EngineState()


def move_index(s: EngineState, direction: str, count: int = 1) -> EngineState:
    delta = count if direction == "right" else -count
    index = s.context.index + delta
    if not 0 <= index <= len(s.context.items):
        raise OutOfBounds(f"index {index} outside [0, {len(s.context.items)}]")
    return EngineState(replace(s.context, index=index), register=None)


def load(s: EngineState, t: Term, fuel: Fuel | int | None = None) -> EngineState:
    """Check t in the prefix and put it in the register."""
    fuel = make_fuel(fuel)
    ty = infer_env(s.prefix, t, fuel)
    return replace(s, register=(t, ty))


def declare(
    s: EngineState,
    quant: Quantifier,
    name: Name,
    fuel: Fuel | int | None = None,
) -> EngineState:
    """Insert a declaration of a new variable of the register's type."""
    fuel = make_fuel(fuel)
    if s.register is None:
        raise RegisterEmpty("declare needs a loaded type")
    ty, sort = s.register
    if not isinstance(whnf(s.prefix, sort, fuel), Sort):
        raise NotASort(f"register has type {pp(sort)}, not a sort")
    if name in declared_names(s.context.items):
        raise NameClash(name)
    i = s.context.index
    items = s.context.items[:i] + (Decl(quant, name, ty),) + s.context.items[i:]
    return EngineState(Context(items, i + 1), register=s.register)


def instantiate(
    s: EngineState,
    fuel: Fuel | int | None = None,
    auto_solve: bool = True,
) -> EngineState:
    """Erase the existential at the index, record the constraint between
    its type and the register's type, insert the definition, normalize,
    solve what is automatically solvable, and fail on a failure context."""
    fuel = make_fuel(fuel)
    if s.register is None:
        raise RegisterEmpty("instantiate needs a loaded term")
    i = s.context.index
    if i == 0:
        raise NotExistentialAtIndex("index at start of context")
    item = s.context.items[i - 1]
    if not (isinstance(item, Decl) and item.quant is EXISTS):
        raise NotExistentialAtIndex(f"item at index is {type(item).__name__}")
    r, _ = s.register
    if item.name in free_vars(r):
        raise TypingError(f"{item.name} occurs in the instantiating term")
    ctx = instantiate_raw(s.context, i - 1, r, fuel)
    if auto_solve:
        result: SolveResult = solve_first_order(ctx, fuel)
        if result.failed:
            raise FailureContext(
                f"clash on constraint {pp(result.clash.lhs)} = {pp(result.clash.rhs)}"
            )
        ctx = result.context
    if classify_normalized(ctx, fuel) is Classification.FAILURE:
        raise FailureContext("instantiation produced a failure context")
    return EngineState(ctx, register=None)


def insert_definition(
    s: EngineState,
    name: Name,
    t: Term,
    fuel: Fuel | int | None = None,
) -> EngineState:
    fuel = make_fuel(fuel)
    if name in declared_names(s.context.items):
        raise NameClash(name)
    ty = infer_env(s.prefix, t, fuel)
    i = s.context.index
    items = s.context.items[:i] + (Def(name, t, ty),) + s.context.items[i:]
    return EngineState(Context(items, i + 1), register=s.register)


def check_invariants(s: EngineState, fuel: Fuel | int | None = None) -> None:
    """Assert both engine invariants; used by tests and debug runs."""
    check_well_formed(s.context.at_end(), make_fuel(fuel))
    if s.register is not None:
        t, ty = s.register
        inferred = infer_env(s.prefix, t, make_fuel(fuel))
        from .typecheck import equiv

        assert equiv(s.prefix, inferred, ty, make_fuel(fuel)), (
            f"register term {pp(t)} no longer has type {pp(ty)}"
        )
