"""Parser for GeoGebra-style construction scripts (``.lcs`` files).

One statement per line::

    C = (2, 3)
    c = Circle[C, 4]
    P = Point[c]
    P' = Midpoint[P, C]
    LocusEquation[P', P]

``#`` starts a comment. Each line is parsed independently so one pass
reports every bad line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from loceq.geom import (
    Affine,
    Circle,
    ComputedPoint,
    ConstructionProgram,
    DynamicPoint,
    FreePoint,
    Intersection,
    Line,
    Midpoint,
    ParallelLine,
    PerpendicularBisector,
    PerpendicularLine,
    PointOnPath,
    Ray,
    Segment,
    Unsupported,
    refs,
)

MAX_DECIMALS = 6

# command -> (object class, arity)
COMMANDS = {
    "Point": (PointOnPath, 1),
    "Midpoint": (Midpoint, 2),
    "Line": (Line, 2),
    "Segment": (Segment, 2),
    "Ray": (Ray, 2),
    "Parallel": (ParallelLine, 2),
    "Perpendicular": (PerpendicularLine, 2),
    "PerpendicularBisector": (PerpendicularBisector, 2),
    "Intersect": (Intersection, 2),
    "Circle": (Circle, 2),
    "DynamicCoordinates": (DynamicPoint, 3),
}
GOALS = {"LocusEquation": "locus", "Locus": "trace", "Envelope": "envelope"}
GOAL_COMMAND = {v: k for k, v in GOALS.items()}
# GeoGebra commands that define objects by formula; accepted but not algebraizable
FORMULA_COMMANDS = {"Function", "Curve", "Conic", "Parabola", "Ellipse", "Hyperbola", "ImplicitCurve"}


@dataclass(frozen=True)
class ParseDiagnostic:
    line: int
    column: int
    message: str
    severity: str = "error"

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


class DSLError(ValueError):
    def __init__(self, diagnostics: list[ParseDiagnostic]):
        super().__init__("\n".join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics


class _LineError(Exception):
    def __init__(self, column: int, message: str):
        super().__init__(message)
        self.column = column
        self.message = message


_TOKEN = re.compile(
    r"(?P<ws>\s+)|(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<id>[A-Za-z][A-Za-z0-9_']*)"
    r"|(?P<op>[=\[\](),+\-*/:])"
)


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


_NAME = r"[A-Za-z][A-Za-z0-9_']*"
_FORMULA_LINES = (
    re.compile(rf"^\s*({_NAME})\s*:(.*)$"),
    re.compile(rf"^\s*({_NAME})\s*=\s*((?:{'|'.join(sorted(FORMULA_COMMANDS))})\s*\[.*)$"),
)


def _lex(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise _LineError(pos + 1, f"lexical error: unexpected character {text[pos]!r}")
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), pos + 1))
        pos = m.end()
    return toks


def _number(tok: _Tok) -> Fraction:
    text = tok.text
    if "." in text:
        decimals = len(text.split(".", 1)[1])
        if decimals > MAX_DECIMALS:
            raise _LineError(
                tok.col,
                f"float literal {text} is not a small exact rational; use a fraction",
            )
    return Fraction(text)


class _LineParser:
    """Recursive descent over the tokens of one statement."""

    def __init__(self, toks: list[_Tok], end_col: int):
        self.toks = toks
        self.i = 0
        self.end_col = end_col

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def at(self, text: str) -> bool:
        t = self.peek()
        return t is not None and t.kind == "op" and t.text == text

    def take(self, text: str | None = None, kind: str | None = None) -> _Tok:
        t = self.peek()
        if t is None:
            want = repr(text) if text else (kind or "token")
            raise _LineError(self.end_col, f"expected {want} at end of line")
        if (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            want = repr(text) if text else kind
            raise _LineError(t.col, f"expected {want}, found {t.text!r}")
        self.i += 1
        return t

    def done(self) -> None:
        t = self.peek()
        if t is not None:
            raise _LineError(t.col, f"unexpected {t.text!r}")

    # affine expressions: expr := term (('+'|'-') term)*
    def expr(self, allow_round: bool = False) -> Affine:
        val = self.term(allow_round)
        while self.at("+") or self.at("-"):
            op = self.take().text
            rhs = self.term(allow_round)
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self, allow_round: bool) -> Affine:
        val = self.unary(allow_round)
        while self.at("*") or self.at("/"):
            op = self.take()
            rhs = self.unary(allow_round)
            if op.text == "*":
                if val.is_constant():
                    val = rhs.scale(val.const)
                elif rhs.is_constant():
                    val = val.scale(rhs.const)
                else:
                    raise _LineError(op.col, "coordinate expression is not affine")
            else:
                if not rhs.is_constant():
                    raise _LineError(op.col, "division by a non-constant")
                if rhs.const == 0:
                    raise _LineError(op.col, "division by zero")
                val = val.scale(1 / rhs.const)
        return val

    def unary(self, allow_round: bool) -> Affine:
        if self.at("-"):
            self.take()
            return -self.unary(allow_round)
        if self.at("+"):
            self.take()
            return self.unary(allow_round)
        return self.primary(allow_round)

    def primary(self, allow_round: bool) -> Affine:
        t = self.peek()
        if t is None:
            raise _LineError(self.end_col, "expected expression at end of line")
        if t.kind == "num":
            self.take()
            return Affine.constant(_number(t))
        if t.kind == "op" and t.text == "(":
            self.take()
            e = self.expr(allow_round)
            self.take(")")
            return e
        if t.kind == "id" and t.text in ("x", "y"):
            self.take()
            self.take("(")
            name = self.take(kind="id")
            self.take(")")
            return Affine.coord(name.text, t.text)
        if t.kind == "id" and t.text == "round":
            if not allow_round:
                raise _LineError(t.col, "round() is only allowed in DynamicCoordinates")
            raise _LineError(t.col, "round() must wrap x(...) or y(...) directly")
        raise _LineError(t.col, f"unexpected {t.text!r} in coordinate expression")

    def args(self) -> list[tuple[_Tok, object]]:
        """Bracketed argument list; each arg is a name or an affine expression."""
        self.take("[")
        out = []
        if self.at("]"):
            self.take()
            return out
        while True:
            out.append(self.arg())
            if self.at(","):
                self.take()
                continue
            self.take("]")
            return out

    def arg(self) -> tuple[_Tok, object]:
        t = self.peek()
        if t is None:
            raise _LineError(self.end_col, "expected argument at end of line")
        nxt = self.toks[self.i + 1] if self.i + 1 < len(self.toks) else None
        ends = nxt is None or (nxt.kind == "op" and nxt.text in (",", "]"))
        if t.kind == "id" and ends:
            self.take()
            return t, t.text
        if t.kind == "id" and t.text == "round":
            self.take()
            self.take("(")
            inner = self.peek()
            e = self.expr()
            self.take(")")
            if len(e.terms) != 1 or e.const or e.terms[0][2] != 1:
                raise _LineError(inner.col, "round() must wrap x(...) or y(...) directly")
            return t, ("round", e)
        return t, self.expr()


def _require_name(tok: _Tok, value) -> str:
    if not isinstance(value, str):
        raise _LineError(tok.col, "expected an object name")
    return value


def _build(name: str, cmd: _Tok, args: list) -> object:
    cls, arity = COMMANDS[cmd.text]
    if len(args) != arity:
        raise _LineError(
            cmd.col,
            f"arity mismatch: {cmd.text} expects {arity} argument"
            f"{'s' if arity != 1 else ''}, got {len(args)}",
        )
    if cls is Circle:
        center = _require_name(*args[0])
        tok, r = args[1]
        if isinstance(r, str):
            return Circle(name, center, r)
        if not r.is_constant():
            raise _LineError(tok.col, "radius must be a name or a number")
        return Circle(name, center, r.const)
    if cls is DynamicPoint:
        src = _require_name(*args[0])
        rounding = []
        for (tok, val), axis in zip(args[1:], ("x", "y")):
            if isinstance(val, tuple) and val[0] == "round":
                expr, rnd = val[1], True
            elif isinstance(val, Affine):
                expr, rnd = val, False
            else:
                raise _LineError(tok.col, f"expected {axis}({src}) or round({axis}({src}))")
            if expr != Affine.coord(src, axis):
                raise _LineError(tok.col, f"expected {axis}({src}) or round({axis}({src}))")
            rounding.append(rnd)
        if rounding[0] != rounding[1]:
            raise _LineError(cmd.col, "both coordinates must be rounded or neither")
        return DynamicPoint(name, src, rounding[0])
    names = [_require_name(*a) for a in args]
    return cls(name, *names)


def _parse_statement(toks: list[_Tok], raw: str, end_col: int):
    """Returns ("obj", object, name_tok) or ("goal", (goal, tracer, mover), tok)."""
    p = _LineParser(toks, end_col)
    first = p.take(kind="id")
    if first.text in GOALS and p.at("["):
        args = p.args()
        p.done()
        if len(args) != 2:
            raise _LineError(first.col, f"arity mismatch: {first.text} expects 2 arguments, got {len(args)}")
        tracer = _require_name(*args[0])
        mover = _require_name(*args[1])
        return "goal", (GOALS[first.text], tracer, mover, args), first
    if p.at(":"):
        colon = p.take()
        text = raw[colon.col :].strip()
        if not text:
            raise _LineError(colon.col, "expected a formula after ':'")
        return "obj", Unsupported(first.text, text), first
    p.take("=")
    t = p.peek()
    if t is None:
        raise _LineError(end_col, "expected a definition after '='")
    if t.kind == "op" and t.text == "(":
        p.take()
        ex = p.expr()
        p.take(",")
        ey = p.expr()
        p.take(")")
        p.done()
        if ex.is_constant() and ey.is_constant():
            return "obj", FreePoint(first.text, ex.const, ey.const), first
        return "obj", ComputedPoint(first.text, ex, ey), first
    cmd = p.take(kind="id")
    if cmd.text in FORMULA_COMMANDS:
        return "obj", Unsupported(first.text, raw[t.col - 1 :].strip()), first
    if cmd.text in GOALS:
        raise _LineError(cmd.col, f"{cmd.text} is a goal statement and cannot be assigned")
    if cmd.text not in COMMANDS:
        raise _LineError(cmd.col, f"unknown command {cmd.text}")
    args = p.args()
    p.done()
    return "obj", _build(first.text, cmd, args), first


def _arg_positions(obj, name_tok: _Tok, line: str) -> dict[str, int]:
    cols = {}
    for r in refs(obj):
        m = re.search(r"(?<![A-Za-z0-9_'])" + re.escape(r) + r"(?![A-Za-z0-9_'])", line[name_tok.col :])
        cols[r] = name_tok.col + m.start() + 1 if m else name_tok.col
    return cols


def parse_with_diagnostics(source: str) -> tuple[ConstructionProgram | None, list[ParseDiagnostic]]:
    diags: list[ParseDiagnostic] = []
    steps = []
    defined: dict[str, int] = {}
    all_names: dict[str, int] = {}
    goals = []
    lines = source.splitlines()
    parsed = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        m = next((m for m in (r.match(line) for r in _FORMULA_LINES) if m and m.group(2).strip()), None)
        if m:
            # formula-defined objects are kept verbatim; their text is not lexed
            name_tok = _Tok("id", m.group(1), m.start(1) + 1)
            parsed.append((lineno, line, ("obj", Unsupported(m.group(1), m.group(2).strip()), name_tok)))
            continue
        try:
            toks = _lex(line)
            if not toks:
                continue
            parsed.append((lineno, line, _parse_statement(toks, line, len(line) + 1)))
        except _LineError as e:
            diags.append(ParseDiagnostic(lineno, e.column, e.message))
    for lineno, _, (kind, obj, tok) in parsed:
        if kind == "obj":
            all_names.setdefault(obj.name, lineno)
    for lineno, line, (kind, obj, tok) in parsed:
        if kind == "goal":
            goals.append((lineno, tok, obj))
            continue
        bad = False
        cols = _arg_positions(obj, tok, line)
        for r in refs(obj):
            if r not in defined:
                if r in all_names and all_names[r] >= lineno:
                    diags.append(ParseDiagnostic(lineno, cols[r], f"forward reference {r}"))
                else:
                    diags.append(ParseDiagnostic(lineno, cols[r], f"undefined name {r}"))
                bad = True
        if obj.name in defined:
            diags.append(
                ParseDiagnostic(lineno, tok.col, f"duplicate name {obj.name} (first defined on line {defined[obj.name]})")
            )
            bad = True
        if not bad:
            steps.append(obj)
            defined[obj.name] = lineno
    goal = tracer = mover = None
    if not goals:
        diags.append(ParseDiagnostic(max(len(lines), 1), 1, "missing goal statement"))
    else:
        for lineno, tok, _ in goals[1:]:
            diags.append(ParseDiagnostic(lineno, tok.col, "more than one goal statement"))
        lineno, tok, (goal, tracer, mover, _) = goals[0]
        for n in (tracer, mover):
            if n not in defined:
                diags.append(ParseDiagnostic(lineno, tok.col, f"undefined name {n}"))
    # a missing goal is reported after the line-level diagnostics
    diags.sort(key=lambda d: (d.message == "missing goal statement", d.line, d.column))
    errs = [d for d in diags if d.severity == "error"]
    program = ConstructionProgram(tuple(steps), goal, tracer, mover)
    return (None if errs else program), diags


def parse(source: str) -> ConstructionProgram:
    program, diags = parse_with_diagnostics(source)
    if program is None:
        raise DSLError([d for d in diags if d.severity == "error"])
    return program


def parse_file(path) -> ConstructionProgram:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


# ---------------------------------------------------------------------------
# printing


def _fmt_num(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_affine(e: Affine) -> str:
    parts: list[str] = []

    def push(sign_neg: bool, body: str) -> None:
        if not parts:
            parts.append(("-" if sign_neg else "") + body)
        else:
            parts.append((" - " if sign_neg else " + ") + body)

    if e.const or not e.terms:
        push(e.const < 0, _fmt_num(abs(e.const)))
    for p, axis, c in e.terms:
        a = abs(c)
        body = f"{axis}({p})" if a == 1 else f"{_fmt_num(a)}*{axis}({p})"
        push(c < 0, body)
    return "".join(parts)


def format_step(obj) -> str:
    if isinstance(obj, FreePoint):
        return f"{obj.name} = ({_fmt_num(obj.x)}, {_fmt_num(obj.y)})"
    if isinstance(obj, ComputedPoint):
        return f"{obj.name} = ({format_affine(obj.x)}, {format_affine(obj.y)})"
    if isinstance(obj, DynamicPoint):
        s = obj.source
        if obj.rounding:
            return f"{obj.name} = DynamicCoordinates[{s}, round(x({s})), round(y({s}))]"
        return f"{obj.name} = DynamicCoordinates[{s}, x({s}), y({s})]"
    if isinstance(obj, Unsupported):
        return f"{obj.name}: {obj.text}"
    if isinstance(obj, Circle):
        r = obj.radius if isinstance(obj.radius, str) else _fmt_num(obj.radius)
        return f"{obj.name} = Circle[{obj.center}, {r}]"
    command = {cls: cmd for cmd, (cls, _) in COMMANDS.items()}[type(obj)]
    return f"{obj.name} = {command}[{', '.join(refs(obj))}]"


def pretty_print(program: ConstructionProgram) -> str:
    lines = [format_step(s) for s in program.steps]
    if program.goal is None:
        lines.append("# missing goal statement")
    else:
        lines.append(f"{GOAL_COMMAND[program.goal]}[{program.tracer}, {program.mover}]")
    return "\n".join(lines) + "\n"
