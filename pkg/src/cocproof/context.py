"""Constrained quantified contexts with explicit section markers.

A context is an ordered tuple of items plus an index splitting it into
the engine's two parts.  Sections are delimited by Begin/End items;
names inside a closed section are seen from outside through the
discharge operation: local universal variables are abstracted into the
section's constants and existentials, and references between the
section's exports are re-applied to those locals.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from functools import lru_cache

from .errors import IllFormed, OutOfScope, SectionHasExistentials, UnboundName
from .term import (
    Lambda,
    Name,
    Product,
    Term,
    Var,
    alpha_eq,
    app,
    free_vars,
    memoize_hash,
    pp,
    subst_map,
)


class Quantifier(enum.Enum):
    FORALL = "∀"
    EXISTS = "∃"


FORALL = Quantifier.FORALL
EXISTS = Quantifier.EXISTS


@dataclass(frozen=True)
class Item:
    pass


@dataclass(frozen=True)
class Decl(Item):
    quant: Quantifier
    name: Name
    type: Term


@dataclass(frozen=True)
class Def(Item):
    name: Name
    body: Term
    type: Term


@dataclass(frozen=True)
class Constraint(Item):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Begin(Item):
    label: Name


@dataclass(frozen=True)
class End(Item):
    label: Name


for _cls in (Decl, Def, Constraint, Begin, End):
    memoize_hash(_cls)

Items = tuple[Item, ...]


@dataclass(frozen=True)
class Context:
    items: Items = ()
    index: int = 0

    def with_items(self, items: Items) -> "Context":
        return replace(self, items=items, index=min(self.index, len(items)))

    def at_end(self) -> "Context":
        return replace(self, index=len(self.items))


class Classification(enum.Enum):
    SUCCESS = "success"
    FAILURE = "failure"
    IN_PROGRESS = "in-progress"


@dataclass(frozen=True)
class Entry:
    """A name as visible from some position, after discharge."""

    name: Name
    quant: Quantifier | None  # None for definitions
    type: Term
    value: Term | None
    pos: int  # item index this entry originates from


def _discharge_frame(entries: tuple[Entry, ...], pos: int) -> tuple[Entry, ...]:
    """Exports of a closed section: locals abstracted, references fixed."""
    locals_: list[tuple[Name, Term]] = []
    adj: dict[Name, Term] = {}
    exports: list[Entry] = []
    for e in entries:
        ty = subst_map(e.type, adj)
        if e.quant is FORALL and e.value is None:
            locals_.append((e.name, ty))
            adj.pop(e.name, None)
            continue
        val = subst_map(e.value, adj) if e.value is not None else None
        if locals_:
            adj[e.name] = app(Var(e.name), *[Var(n) for n, _ in locals_])
        else:
            adj.pop(e.name, None)
        for n, t in reversed(locals_):
            ty = Product(n, t, ty)
            if val is not None:
                val = Lambda(n, t, val)
        exports.append(Entry(e.name, e.quant, ty, val, pos))
    return tuple(exports)


@lru_cache(maxsize=4096)
def visible_entries(items: Items, pos: int) -> tuple[Entry, ...]:
    """Entries visible from just before item `pos`, in declaration order."""
    stack: list[list[Entry]] = [[]]
    for i, item in enumerate(items[:pos]):
        match item:
            case Begin():
                stack.append([])
            case End():
                if len(stack) < 2:
                    raise IllFormed(f"unmatched End at item {i}")
                frame = stack.pop()
                exports = _discharge_frame(tuple(frame), i)
                stack[-1].extend(exports)
            case Decl(quant, name, ty):
                stack[-1].append(Entry(name, quant, ty, None, i))
            case Def(name, body, ty):
                stack[-1].append(Entry(name, None, ty, body, i))
            case Constraint():
                pass
    flat: list[Entry] = []
    for frame in stack:
        flat.extend(frame)
    return tuple(flat)


@lru_cache(maxsize=4096)
def _entry_map(items: Items, pos: int) -> dict[Name, Entry]:
    # later entries overwrite earlier ones, so the nearest wins
    return {e.name: e for e in visible_entries(items, pos)}


def lookup(items: Items, pos: int, name: Name) -> Entry:
    """Resolve a name at a position; nearest declaration wins."""
    e = _entry_map(items, pos).get(name)
    if e is not None:
        return e
    if _is_buried(items, pos, name):
        raise OutOfScope(f"{name} is local to a closed section")
    raise UnboundName(name)


def try_lookup(items: Items, pos: int, name: Name) -> Entry | None:
    return _entry_map(items, pos).get(name)


def _is_buried(items: Items, pos: int, name: Name) -> bool:
    for item in items[:pos]:
        if isinstance(item, (Decl, Def)) and item.name == name:
            return True
    return False


def declared_names(items: Items) -> frozenset[Name]:
    return frozenset(
        it.name for it in items if isinstance(it, (Decl, Def))
    )


def existential_names(items: Items) -> frozenset[Name]:
    return frozenset(
        it.name for it in items if isinstance(it, Decl) and it.quant is EXISTS
    )


def decl_index(items: Items, name: Name) -> int:
    for i, it in enumerate(items):
        if isinstance(it, (Decl, Def)) and it.name == name:
            return i
    raise UnboundName(name)


def section_span(items: Items, label: Name) -> tuple[int, int]:
    """Indices (begin, end) of the labelled section; end may be missing."""
    begin = None
    for i, it in enumerate(items):
        if isinstance(it, Begin) and it.label == label:
            begin = i
            break
    if begin is None:
        raise UnboundName(f"section {label}")
    depth = 0
    for j in range(begin, len(items)):
        it = items[j]
        if isinstance(it, Begin):
            depth += 1
        elif isinstance(it, End):
            depth -= 1
            if depth == 0:
                return begin, j
    return begin, -1


def classify(ctx: Context) -> Classification:
    """Success / failure classification of a normalized context."""
    items = ctx.items
    existentials = existential_names(items)
    if any(isinstance(it, Decl) and it.quant is EXISTS for it in items):
        success_possible = False
    else:
        success_possible = True
    failure = False
    nontrivial = False
    for it in items:
        if isinstance(it, Constraint):
            if alpha_eq(it.lhs, it.rhs):
                continue
            nontrivial = True
            if not (free_vars(it.lhs) | free_vars(it.rhs)) & existentials:
                failure = True
    if failure:
        return Classification.FAILURE
    if success_possible and not nontrivial:
        return Classification.SUCCESS
    return Classification.IN_PROGRESS


def discharge_view(ctx: Context, name: Name) -> tuple[Term | None, Term]:
    """Value and type of a name as seen from the end of the context."""
    entry = lookup(ctx.items, len(ctx.items), name)
    return entry.value, entry.type


def physical_close(ctx: Context, label: Name) -> Context:
    """Replace a closed, existential-free section by its discharged exports."""
    begin, end = section_span(ctx.items, label)
    if end < 0:
        raise IllFormed(f"section {label} is not closed")
    span = ctx.items[begin : end + 1]
    if any(isinstance(it, Decl) and it.quant is EXISTS for it in span):
        raise SectionHasExistentials(label)
    exports = visible_entries(span, len(span))
    new_items: list[Item] = []
    for e in exports:
        if e.value is None:
            # a universal local of the outermost span frame: impossible,
            # Begin/End wrap the whole span so everything is discharged
            raise IllFormed(f"undischargeable item {e.name} in section {label}")
        new_items.append(Def(e.name, e.value, e.type))
    items = ctx.items[:begin] + tuple(new_items) + ctx.items[end + 1 :]
    return ctx.with_items(items)


def insert_items(ctx: Context, pos: int, new: tuple[Item, ...]) -> Context:
    items = ctx.items[:pos] + new + ctx.items[pos:]
    index = ctx.index + len(new) if ctx.index >= pos else ctx.index
    return Context(items, index)


def render_item(item: Item) -> str:
    match item:
        case Decl(q, name, ty):
            return f"{q.value}{name}:{pp(ty)}"
        case Def(name, body, ty):
            return f"{name} := {pp(body)}:{pp(ty)}"
        case Constraint(a, b):
            return f"{pp(a)} = {pp(b)}"
        case Begin(label):
            return "Begin"
        case End(label):
            return "End"
    raise AssertionError(item)


def render_context(ctx: Context) -> list[str]:
    return [render_item(it) for it in ctx.items]


def check_sections_balanced(items: Items) -> None:
    stack: list[Name] = []
    for i, it in enumerate(items):
        if isinstance(it, Begin):
            stack.append(it.label)
        elif isinstance(it, End):
            if not stack:
                raise IllFormed(f"End without Begin at item {i}")
            label = stack.pop()
            if label != it.label:
                raise IllFormed(f"End {it.label} closes section {label}")
