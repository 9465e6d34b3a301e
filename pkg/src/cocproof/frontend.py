"""Batch checker, REPL, and the line-delimited JSON session service.

The service speaks one JSON object per line in each direction:
request `{id, cmd}`, response `{id, status, message, goals, context,
constraints}`.  Responses are emitted strictly in request order; the
session state is exactly the REPL's, so a recorded command sequence
replays through the batch checker to the same final context.
"""

from __future__ import annotations

import json
import socket
import sys
from typing import TextIO

from .context import Constraint, render_context, render_item
from .errors import ParseError, ProverError
from .tactics import goal_hypotheses, goal_type
from .term import pp
from .vernacular import Session, split_commands


def make_session(
    fuel: int = 1_000_000, auto_solve: bool = True, apply_strict: bool = False
) -> Session:
    return Session(fuel_limit=fuel, auto_solve=auto_solve, apply_strict=apply_strict)


def run_batch(
    path: str,
    session: Session | None = None,
    quiet: bool = False,
    out: TextIO = sys.stdout,
) -> int:
    """Execute a script file; 0 = right, 1 = wrong, 2 = unreadable."""
    try:
        with open(path, encoding="utf-8") as fh:
            src = fh.read()
    except OSError as exc:
        print(f"{path}: {exc.strerror or exc}", file=out)
        return 2
    session = session or make_session()
    try:
        commands = split_commands(src)
    except ParseError as exc:
        print(f"{path}:{exc.line}:{exc.col}: {exc.message}", file=out)
        return 1
    for toks in commands:
        head = toks[0]
        try:
            display = session._run(toks)
        except ParseError as exc:
            print(f"{path}:{exc.line}:{exc.col}: {exc.message}", file=out)
            return 1
        except ProverError as exc:
            print(
                f"{path}:{head.line}:{head.col}: "
                f"{type(exc).__name__}: {exc}",
                file=out,
            )
            return 1
        if display and not quiet:
            print(display, file=out)
    return 0


def repl(
    session: Session | None = None,
    stdin: TextIO = sys.stdin,
    out: TextIO = sys.stdout,
    prompt: str = "> ",
) -> None:
    """Interactive loop; commands may span lines and end with a period."""
    session = session or make_session()
    buffer = ""
    if prompt:
        out.write(prompt)
        out.flush()
    for line in stdin:
        buffer += line
        if "." not in line:
            if prompt:
                out.write(prompt)
                out.flush()
            continue
        try:
            display = session.execute(buffer)
            if display:
                print(display, file=out)
        except ParseError as exc:
            print(f"{exc.line}:{exc.col}: {exc.message}", file=out)
        except ProverError as exc:
            print(f"{type(exc).__name__}: {exc}", file=out)
        buffer = ""
        if prompt:
            out.write(prompt)
            out.flush()


def _goal_views(session: Session) -> list[dict]:
    scope = session.ps.current_scope()
    if scope is None or not scope.has_statement:
        return []
    views = []
    for k, g in enumerate(scope.goals, start=1):
        hyps = [
            f"{n} : {pp(ty)}"
            for n, ty in reversed(goal_hypotheses(session.ps, g))
        ]
        views.append(
            {
                "index": k,
                "statement": pp(goal_type(session.ps, g)),
                "hypotheses": hyps,
            }
        )
    return views


def response_for(session: Session, request: object) -> dict:
    """One protocol response for one decoded request object."""
    if not isinstance(request, dict):
        return _error_response(None, "request must be a JSON object")
    rid = request.get("id")
    cmd = request.get("cmd")
    if not isinstance(cmd, str):
        return _error_response(rid, "request has no cmd")
    try:
        message = session.execute(cmd)
        status = "ok"
    except ParseError as exc:
        message = f"{exc.line}:{exc.col}: {exc.message}"
        status = "error"
    except ProverError as exc:
        message = f"{type(exc).__name__}: {exc}"
        status = "error"
    return {
        "id": rid,
        "status": status,
        "message": message,
        "goals": _goal_views(session),
        "context": render_context(session.ps.context),
        "constraints": [
            render_item(it)
            for it in session.ps.items
            if isinstance(it, Constraint)
        ],
    }


def _error_response(rid: object, message: str) -> dict:
    return {
        "id": rid,
        "status": "error",
        "message": message,
        "goals": [],
        "context": [],
        "constraints": [],
    }


def serve_streams(stdin: TextIO, out: TextIO, session: Session | None = None) -> None:
    """JSON-lines service over a pair of text streams."""
    session = session or make_session()
    for line in stdin:
        if not line.strip():
            continue
        try:
            request = json.loads(line)
        except json.JSONDecodeError as exc:
            response = _error_response(None, f"malformed request: {exc.msg}")
        else:
            response = response_for(session, request)
        out.write(json.dumps(response, separators=(",", ":")) + "\n")
        out.flush()


def serve_tcp(port: int, session: Session | None = None, host: str = "127.0.0.1") -> None:
    """Serve a single connection at a time over TCP."""
    with socket.create_server((host, port)) as server:
        while True:
            conn, _ = server.accept()
            with conn:
                reader = conn.makefile("r", encoding="utf-8")
                writer = conn.makefile("w", encoding="utf-8")
                serve_streams(reader, writer, session or make_session())
