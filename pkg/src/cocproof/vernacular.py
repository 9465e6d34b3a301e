"""Concrete command language: tokenizer, term parser and executor.

A script is a sequence of commands, each ended by a period.  Terms use
`[x:T]t` for abstraction, `(x:T)B` for products, `A -> B` as sugar for
a non-dependent product and `(f a b)` for application.  Comments are
`(* ... *)` and nest.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .context import End
from .errors import ModeError, ParseError, ProverError
from .reduction import make_fuel
from .term import PROP, Name, Product, Term, TYPE, Var, arrow, app, pp
from .tactics import (
    ProofState,
    add_local,
    apply,
    assumption,
    auto_complete,
    declare_global,
    define_constant,
    fresh_name,
    intro,
    open_scope,
    propose,
    render_goals,
    save,
    set_statement,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "punct" | "eof"
    text: str
    line: int
    col: int


_PUNCT = ("->", ":=", "(", ")", "[", "]", ":", ".", "=")


def tokenize(src: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(src)
    while i < n:
        c = src[i]
        if c == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if c in " \t\r":
            i, col = i + 1, col + 1
            continue
        if src.startswith("(*", i):
            depth, i0, col0, line0 = 1, i, col, line
            i, col = i + 2, col + 2
            while i < n and depth:
                if src.startswith("(*", i):
                    depth, i, col = depth + 1, i + 2, col + 2
                elif src.startswith("*)", i):
                    depth, i, col = depth - 1, i + 2, col + 2
                elif src[i] == "\n":
                    i, line, col = i + 1, line + 1, 1
                else:
                    i, col = i + 1, col + 1
            if depth:
                raise ParseError(line0, col0, "unterminated comment")
            continue
        for p in _PUNCT:
            if src.startswith(p, i):
                toks.append(Token("punct", p, line, col))
                i, col = i + len(p), col + len(p)
                break
        else:
            if c.isalpha():
                j = i
                while j < n and (src[j].isalnum() or src[j] in "_'"):
                    j += 1
                toks.append(Token("ident", src[i:j], line, col))
                col += j - i
                i = j
            else:
                raise ParseError(line, col, f"unexpected character {c!r}")
    toks.append(Token("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.peek()
        if t.kind != "eof":
            self.pos += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.next()
        if t.text != text:
            raise ParseError(t.line, t.col, f"expected {text!r}, found {t.text!r}")
        return t

    def ident(self) -> str:
        t = self.next()
        if t.kind != "ident":
            raise ParseError(t.line, t.col, f"expected a name, found {t.text!r}")
        return t.text

    # -- terms ---------------------------------------------------------

    def term(self) -> Term:
        t = self.operand()
        if self.peek().text == "->":
            self.next()
            return arrow(t, self.term())
        return t

    def operand(self) -> Term:
        t = self.peek()
        if t.kind == "ident":
            self.next()
            if t.text == "Prop":
                return PROP
            if t.text == "Type":
                return TYPE
            return Var(t.text)
        if t.text == "[":
            self.next()
            x = self.ident()
            self.expect(":")
            ty = self.term()
            self.expect("]")
            from .term import Lambda

            return Lambda(x, ty, self.term())
        if t.text == "(":
            self.next()
            if self.peek().kind == "ident" and self.peek(1).text == ":":
                x = self.ident()
                self.expect(":")
                dom = self.term()
                self.expect(")")
                return Product(x, dom, self.term())
            parts = [self.term()]
            while self.peek().text != ")":
                if self.peek().kind == "eof":
                    raise ParseError(t.line, t.col, "unclosed parenthesis")
                parts.append(self.term())
            self.expect(")")
            return parts[0] if len(parts) == 1 else app(parts[0], *parts[1:])
        raise ParseError(t.line, t.col, f"expected a term, found {t.text!r}")

    def done(self) -> bool:
        return self.peek().kind == "eof"


def parse_term(src: str) -> Term:
    p = _Parser(tokenize(src))
    t = p.term()
    if not p.done():
        tok = p.peek()
        raise ParseError(tok.line, tok.col, f"trailing input {tok.text!r}")
    return t


def split_commands(src: str) -> list[list[Token]]:
    """Cut a script into per-command token lists at the periods."""
    toks = tokenize(src)
    commands: list[list[Token]] = []
    current: list[Token] = []
    for t in toks:
        if t.kind == "eof":
            break
        if t.text == ".":
            if current:
                commands.append(current)
                current = []
        else:
            current.append(t)
    if current:
        t = current[0]
        raise ParseError(t.line, t.col, "command is missing its final period")
    return commands


DECLARATION_KEYWORDS = ("Parameter", "Axiom", "Variable", "Hypothesis")


@dataclass
class Session:
    """Mutable interpreter state: proof state, undo history, settings."""

    ps: ProofState = field(default_factory=ProofState)
    fuel_limit: int = 1_000_000
    auto_solve: bool = True
    apply_strict: bool = False
    history: list[tuple[ProofState, Name | None]] = field(default_factory=list)
    pending: Name | None = None  # declaration awaiting its Assumes

    def execute(self, command: str) -> str:
        """Run every command in the given text; return the last display."""
        out = ""
        for toks in split_commands(command):
            out = self._run(toks)
        return out

    # -- helpers -------------------------------------------------------

    def _snapshot(self) -> None:
        self.history.append((self.ps, self.pending))

    def undo(self) -> str:
        if not self.history:
            raise ProverError("nothing to undo")
        self.ps, self.pending = self.history.pop()
        return self._display()

    def _fuel(self):
        return make_fuel(self.fuel_limit)

    def _display(self) -> str:
        return render_goals(self.ps)

    def _after_tactic(self) -> str:
        lines: list[str] = []
        scope = self.ps.current_scope()
        if scope is not None and scope.has_statement and not scope.goals:
            lines.append("Goal proved!")
        self.ps, closed = auto_complete(self.ps, self._fuel())
        for r in closed:
            name, _, ty = r.saved
            lines.append(f"{name} is saved : {pp(ty)}")
        shown = self._display()
        if shown and shown != "Goal proved!":
            lines.append(shown)
        return "\n".join(lines)

    def _require_no_pending(self, toks: list[Token]) -> None:
        if self.pending is not None:
            t = toks[0]
            raise ParseError(
                t.line, t.col, f"declaration {self.pending} still awaits Assumes"
            )

    # -- command dispatch ----------------------------------------------

    def _run(self, toks: list[Token]) -> str:
        head = toks[0]
        if head.kind != "ident":
            raise ParseError(head.line, head.col, f"unexpected {head.text!r}")
        keyword = head.text
        p = _Parser(toks[1:] + [Token("eof", "", head.line, head.col)])
        if keyword != "Assumes":
            self._require_no_pending(toks)
        if keyword in ("Undo", "Show"):
            if keyword == "Undo":
                return self.undo()
            return self._display()
        self._snapshot()
        try:
            return self._dispatch(keyword, p, head)
        except BaseException:
            self.ps, self.pending = self.history.pop()
            raise

    def _dispatch(self, keyword: str, p: _Parser, head: Token) -> str:
        fuel = self._fuel()
        match keyword:
            case kw if kw in DECLARATION_KEYWORDS:
                name = p.ident()
                if p.done():
                    self.pending = name
                    return ""
                p.expect(":")
                ty = p.term()
                self._end(p)
                self.ps = declare_global(self.ps, name, ty, fuel)
                return ""
            case "Assumes":
                if self.pending is None:
                    raise ParseError(head.line, head.col, "no declaration to assume for")
                ty = p.term()
                self._end(p)
                self.ps = add_local(self.ps, self.pending, ty, fuel)
                self.pending = None
                return ""
            case "Definition":
                name = p.ident()
                p.expect("=")
                body = p.term()
                self._end(p)
                self.ps, ty = define_constant(self.ps, name, body, fuel)
                return f"{name} : {pp(ty)}"
            case "Theorem":
                name = p.ident()
                self._end(p)
                self.ps = open_scope(self.ps, name, "theorem")
                return ""
            case "Remark":
                name = p.ident()
                self._end(p)
                self.ps = open_scope(self.ps, name, "remark")
                return ""
            case "Section":
                name = p.ident()
                self._end(p)
                self.ps = open_scope(self.ps, name, "section")
                return ""
            case "Goal":
                stmt = p.term()
                self._end(p)
                name, self.ps = fresh_name(self.ps, "goal")
                self.ps = open_scope(self.ps, name, "goal")
                self.ps = set_statement(self.ps, stmt, fuel)
                return self._display()
            case "Statement":
                stmt = p.term()
                self._end(p)
                scope = self.ps.current_scope()
                if scope is None or scope.has_statement:
                    raise ModeError("Statement needs an open theorem or remark")
                self.ps = set_statement(self.ps, stmt, fuel)
                return self._display()
            case "Proof":
                t = p.term()
                self._end(p)
                return self._proof(t)
            case "Intro":
                name = p.ident() if not p.done() else None
                self._end(p)
                self.ps = intro(self.ps, name, fuel)
                return self._after_tactic()
            case "Apply":
                t = p.term()
                self._end(p)
                res = apply(
                    self.ps, t, fuel,
                    strict=self.apply_strict, auto_solve=self.auto_solve,
                )
                self.ps = res.state
                return self._after_tactic()
            case "Assumption":
                name = p.ident()
                self._end(p)
                res = assumption(self.ps, name, fuel)
                self.ps = res.state
                return self._after_tactic()
            case "Instantiate":
                x = p.ident()
                t = p.term()
                self._end(p)
                res = propose(self.ps, x, t, fuel)
                self.ps = res.state
                return self._after_tactic()
            case "Save":
                name = p.ident()
                self._end(p)
                self.ps, value, ty = save(self.ps, name, fuel)
                return f"{name} is saved : {pp(ty)}"
            case "End":
                name = p.ident()
                self._end(p)
                return self._end_section(name)
            case _:
                raise ParseError(head.line, head.col, f"unknown command {keyword!r}")

    def _end(self, p: _Parser) -> None:
        if not p.done():
            t = p.peek()
            raise ParseError(t.line, t.col, f"trailing input {t.text!r}")

    def _proof(self, t: Term) -> str:
        scope = self.ps.current_scope()
        if scope is None or not scope.has_statement or not scope.goals:
            raise ModeError("Proof needs an open statement")
        g = scope.goals[0]
        res = propose(self.ps, g, t, self._fuel())
        self.ps = res.state
        if g in self.ps.current_goals():
            raise ModeError("the proof term does not prove the statement")
        scope = self.ps.current_scope()
        if scope.goals:
            raise ModeError("the proof term leaves goals open")
        out = self._after_tactic()
        still_open = self.ps.current_scope()
        if (
            still_open is not None
            and still_open.name == scope.name
            and scope.kind in ("theorem", "remark")
        ):
            raise ModeError("the proof leaves unresolved constraints")
        return out

    def _end_section(self, name: str) -> str:
        scope = self.ps.current_scope()
        if scope is None or scope.kind != "section" or scope.name != name:
            raise ModeError(f"no open section named {name}")
        from dataclasses import replace

        from .context import Context

        items = self.ps.items + (End(scope.label),)
        self.ps = replace(
            self.ps,
            context=Context(items, len(items)),
            scopes=self.ps.scopes[:-1],
        )
        return ""
