"""Construction programs and their translation into polynomial systems."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Union

from loceq.poly import MultiPoly, VarRegistry, canonicalize


class GeomError(ValueError):
    """A construction cannot be algebraized; carries the blocking diagnostics."""

    def __init__(self, message: str, diagnostics: list["Diagnostic"] | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


# ---------------------------------------------------------------------------
# construction objects


@dataclass(frozen=True)
class Affine:
    """``const + sum(coef * axis(point))`` with axis in {"x", "y"}."""

    const: Fraction = Fraction(0)
    terms: tuple[tuple[str, str, Fraction], ...] = ()

    @classmethod
    def constant(cls, c) -> "Affine":
        return cls(Fraction(c))

    @classmethod
    def coord(cls, point: str, axis: str) -> "Affine":
        return cls(Fraction(0), ((point, axis, Fraction(1)),))

    def is_constant(self) -> bool:
        return not self.terms

    def points(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(p for p, _, _ in self.terms))

    def __add__(self, other: "Affine") -> "Affine":
        merged: dict[tuple[str, str], Fraction] = {}
        for p, a, c in self.terms + other.terms:
            merged[(p, a)] = merged.get((p, a), Fraction(0)) + c
        return Affine(
            self.const + other.const,
            tuple((p, a, c) for (p, a), c in merged.items() if c),
        )

    def scale(self, k: Fraction) -> "Affine":
        if not k:
            return Affine()
        return Affine(self.const * k, tuple((p, a, c * k) for p, a, c in self.terms))

    def __neg__(self) -> "Affine":
        return self.scale(Fraction(-1))

    def __sub__(self, other: "Affine") -> "Affine":
        return self + (-other)


@dataclass(frozen=True)
class FreePoint:
    name: str
    x: Fraction
    y: Fraction


@dataclass(frozen=True)
class DynamicPoint:
    """Coordinates copied from a free source point, rounded to integers."""

    name: str
    source: str
    rounding: bool = True


@dataclass(frozen=True)
class ComputedPoint:
    name: str
    x: Affine
    y: Affine


@dataclass(frozen=True)
class PointOnPath:
    name: str
    path: str


@dataclass(frozen=True)
class Midpoint:
    name: str
    a: str
    b: str


@dataclass(frozen=True)
class Line:
    name: str
    a: str
    b: str


@dataclass(frozen=True)
class Segment:
    name: str
    a: str
    b: str


@dataclass(frozen=True)
class Ray:
    name: str
    a: str
    b: str


@dataclass(frozen=True)
class ParallelLine:
    name: str
    point: str
    line: str


@dataclass(frozen=True)
class PerpendicularLine:
    name: str
    point: str
    line: str


@dataclass(frozen=True)
class PerpendicularBisector:
    name: str
    a: str
    b: str


@dataclass(frozen=True)
class Circle:
    """Circle by center and a radius given as a number, a point on it, or a segment."""

    name: str
    center: str
    radius: Union[str, Fraction]


@dataclass(frozen=True)
class Intersection:
    name: str
    first: str
    second: str


@dataclass(frozen=True)
class Unsupported:
    """A step given by a raw formula; it has no Euclidean algebraization."""

    name: str
    text: str


GeoObject = Union[
    FreePoint,
    DynamicPoint,
    ComputedPoint,
    PointOnPath,
    Midpoint,
    Line,
    Segment,
    Ray,
    ParallelLine,
    PerpendicularLine,
    PerpendicularBisector,
    Circle,
    Intersection,
    Unsupported,
]

POINT_KINDS = (FreePoint, DynamicPoint, ComputedPoint, PointOnPath, Midpoint, Intersection)
LINE_KINDS = (Line, Segment, Ray, ParallelLine, PerpendicularLine, PerpendicularBisector)
PATH_KINDS = LINE_KINDS + (Circle,)


def refs(obj: GeoObject) -> tuple[str, ...]:
    """Names an object depends on directly."""
    if isinstance(obj, (FreePoint, Unsupported)):
        return ()
    if isinstance(obj, DynamicPoint):
        return (obj.source,)
    if isinstance(obj, ComputedPoint):
        return tuple(dict.fromkeys(obj.x.points() + obj.y.points()))
    if isinstance(obj, PointOnPath):
        return (obj.path,)
    if isinstance(obj, (ParallelLine, PerpendicularLine)):
        return (obj.point, obj.line)
    if isinstance(obj, Circle):
        return (obj.center,) + ((obj.radius,) if isinstance(obj.radius, str) else ())
    if isinstance(obj, Intersection):
        return (obj.first, obj.second)
    return (obj.a, obj.b)


@dataclass(frozen=True)
class ConstructionProgram:
    steps: tuple[GeoObject, ...] = ()
    goal: str | None = None  # "locus" | "trace" | "envelope"
    tracer: str | None = None
    mover: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    @property
    def objects(self) -> dict[str, GeoObject]:
        return {s.name: s for s in self.steps}

    def get(self, name: str) -> GeoObject:
        for s in self.steps:
            if s.name == name:
                return s
        raise KeyError(name)

    def ancestors(self, name: str) -> set[str]:
        objs = self.objects
        seen: set[str] = set()
        stack = [name]
        while stack:
            n = stack.pop()
            if n in seen or n not in objs:
                continue
            seen.add(n)
            stack.extend(refs(objs[n]))
        seen.discard(name)
        return seen

    def replace(self, obj: GeoObject) -> "ConstructionProgram":
        steps = tuple(obj if s.name == obj.name else s for s in self.steps)
        return ConstructionProgram(steps, self.goal, self.tracer, self.mover)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    step: str | None = None

    def __str__(self) -> str:
        where = f" [{self.step}]" if self.step else ""
        return f"{self.severity}{where}: {self.message}"


def _kind_name(obj) -> str:
    return type(obj).__name__


def _constant_coords(obj, objs) -> tuple[Fraction, Fraction] | None:
    if isinstance(obj, FreePoint):
        return obj.x, obj.y
    if isinstance(obj, DynamicPoint):
        src = objs.get(obj.source)
        base = _constant_coords(src, objs) if src is not None else None
        if base is None:
            return None
        if obj.rounding:
            return tuple(Fraction(math.floor(c + Fraction(1, 2))) for c in base)
        return base
    return None


def validate(program: ConstructionProgram) -> list[Diagnostic]:
    """Structural diagnostics; never raises."""
    out: list[Diagnostic] = []
    seen: dict[str, int] = {}
    objs = program.objects
    for pos, step in enumerate(program.steps):
        if step.name in seen:
            out.append(Diagnostic("error", f"duplicate name {step.name}", step.name))
        seen.setdefault(step.name, pos)

    def expect(step, name, kinds, what):
        obj = objs.get(name)
        if obj is not None and not isinstance(obj, kinds):
            out.append(
                Diagnostic("error", f"{name} must be a {what}, got {_kind_name(obj)}", step.name)
            )

    for pos, step in enumerate(program.steps):
        for r in refs(step):
            if r not in seen:
                out.append(Diagnostic("error", f"dangling reference {r}", step.name))
            elif seen[r] >= pos:
                out.append(Diagnostic("error", f"forward reference {r}", step.name))
        if isinstance(step, Unsupported):
            out.append(
                Diagnostic(
                    "error",
                    f"unsupported step kind: object defined by formula '{step.text}'",
                    step.name,
                )
            )
        elif isinstance(step, FreePoint):
            if step.x.denominator != 1 or step.y.denominator != 1:
                out.append(Diagnostic("warning", "non-integer coordinate", step.name))
        elif isinstance(step, DynamicPoint):
            src = objs.get(step.source)
            if src is not None and _constant_coords(src, objs) is None:
                out.append(
                    Diagnostic("error", f"{step.source} must be a free point", step.name)
                )
        elif isinstance(step, ComputedPoint):
            for p in refs(step):
                expect(step, p, POINT_KINDS, "point")
        elif isinstance(step, PointOnPath):
            expect(step, step.path, PATH_KINDS, "line or circle")
        elif isinstance(step, (Midpoint, Line, Segment, Ray, PerpendicularBisector)):
            expect(step, step.a, POINT_KINDS, "point")
            expect(step, step.b, POINT_KINDS, "point")
        elif isinstance(step, (ParallelLine, PerpendicularLine)):
            expect(step, step.point, POINT_KINDS, "point")
            expect(step, step.line, LINE_KINDS, "line")
        elif isinstance(step, Circle):
            expect(step, step.center, POINT_KINDS, "point")
            if isinstance(step.radius, str):
                expect(step, step.radius, POINT_KINDS + (Segment,), "point or segment")
            elif step.radius <= 0:
                out.append(Diagnostic("error", "radius must be positive", step.name))
        elif isinstance(step, Intersection):
            expect(step, step.first, PATH_KINDS, "line or circle")
            expect(step, step.second, PATH_KINDS, "line or circle")

    out.extend(_cycle_diagnostics(program))

    if program.goal is None:
        out.append(Diagnostic("error", "missing goal statement"))
        return out
    mover = objs.get(program.mover) if program.mover else None
    tracer = objs.get(program.tracer) if program.tracer else None
    if mover is None:
        out.append(Diagnostic("error", f"dangling reference {program.mover}"))
    elif not isinstance(mover, PointOnPath):
        out.append(Diagnostic("error", f"mover {mover.name} is not a point on a path"))
    if tracer is None:
        out.append(Diagnostic("error", f"dangling reference {program.tracer}"))
    else:
        if program.goal == "envelope" and not isinstance(tracer, LINE_KINDS):
            out.append(Diagnostic("error", f"envelope tracer {tracer.name} must be a line"))
        if program.goal in ("locus", "trace") and not isinstance(tracer, POINT_KINDS):
            out.append(Diagnostic("error", f"locus tracer {tracer.name} must be a point"))
        if mover is not None and tracer.name != mover.name:
            if mover.name not in program.ancestors(tracer.name):
                out.append(
                    Diagnostic("error", f"tracer {tracer.name} does not depend on mover {mover.name}")
                )
    for step in program.steps:
        if isinstance(step, PointOnPath) and step.name != program.mover:
            out.append(
                Diagnostic(
                    "error",
                    f"extra degree of freedom: {step.name} is on a path but is not the mover",
                    step.name,
                )
            )
    return out


def _cycle_diagnostics(program: ConstructionProgram) -> list[Diagnostic]:
    objs = program.objects
    state: dict[str, int] = {}
    found: list[Diagnostic] = []

    def visit(n: str, path: list[str]) -> None:
        state[n] = 1
        for r in refs(objs[n]):
            if r not in objs:
                continue
            if state.get(r) == 1:
                cyc = path[path.index(r) :] + [r] if r in path else [n, r]
                found.append(Diagnostic("error", "cyclic reference " + " -> ".join(cyc), n))
            elif r not in state:
                visit(r, path + [r])
        state[n] = 2

    for n in objs:
        if n not in state:
            visit(n, [n])
    return found


def errors(diags: list[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diags if d.severity == "error"]


# ---------------------------------------------------------------------------
# algebraization


@dataclass(frozen=True)
class AlgebraicSystem:
    polynomials: tuple[MultiPoly, ...]
    registry: VarRegistry
    retained: tuple[str, ...]
    eliminated: tuple[str, ...]
    point_vars: dict = field(compare=False)
    tracer_poly: MultiPoly | None = None

    @property
    def constraints(self) -> tuple[MultiPoly, ...]:
        """Every polynomial except the traced line's incidence."""
        if self.tracer_poly is None:
            return self.polynomials
        return tuple(p for p in self.polynomials if p is not self.tracer_poly)


@dataclass
class _LineRep:
    incidence: Callable[[MultiPoly, MultiPoly], MultiPoly]
    dx: MultiPoly
    dy: MultiPoly


@dataclass
class _CircleRep:
    cx: MultiPoly
    cy: MultiPoly
    r2: MultiPoly

    def incidence(self, X: MultiPoly, Y: MultiPoly) -> MultiPoly:
        return (X - self.cx) ** 2 + (Y - self.cy) ** 2 - self.r2


def point_var_names(name: str) -> tuple[str, str]:
    return f"x_{name}", f"y_{name}"


def _through(px, py, dx, dy) -> Callable:
    return lambda X, Y: dx * (Y - py) - dy * (X - px)


def algebraize(program: ConstructionProgram) -> AlgebraicSystem:
    """Polynomial constraints for every step; tracer coordinates become x, y."""
    problems = errors(validate(program))
    if problems:
        raise GeomError("; ".join(d.message for d in problems), problems)

    locus = program.goal in ("locus", "trace")
    names: list[str] = []
    point_vars: dict[str, tuple[str, str]] = {}
    for step in program.steps:
        if isinstance(step, POINT_KINDS):
            if locus and step.name == program.tracer:
                point_vars[step.name] = ("x", "y")
            else:
                point_vars[step.name] = point_var_names(step.name)
                names.extend(point_vars[step.name])
    names.extend(["x", "y"])
    registry = VarRegistry(names)
    V = {n: MultiPoly.var(registry, n) for n in names}
    objs = program.objects

    def P(name: str) -> tuple[MultiPoly, MultiPoly]:
        xv, yv = point_vars[name]
        return V[xv], V[yv]

    def affine(expr: Affine) -> MultiPoly:
        out = MultiPoly.const(registry, expr.const)
        for p, axis, c in expr.terms:
            out = out + P(p)[0 if axis == "x" else 1] * c
        return out

    reps: dict[str, object] = {}
    polys: list[MultiPoly] = []

    def emit(p: MultiPoly) -> MultiPoly | None:
        if p.is_zero():
            return None
        c = canonicalize(p)
        polys.append(c)
        return c

    for step in program.steps:
        if isinstance(step, POINT_KINDS):
            X, Y = P(step.name)
        if isinstance(step, FreePoint):
            emit(X - step.x)
            emit(Y - step.y)
        elif isinstance(step, DynamicPoint):
            cx, cy = _constant_coords(step, objs)
            emit(X - cx)
            emit(Y - cy)
        elif isinstance(step, ComputedPoint):
            emit(X - affine(step.x))
            emit(Y - affine(step.y))
        elif isinstance(step, Midpoint):
            (ax, ay), (bx, by) = P(step.a), P(step.b)
            emit(X * 2 - ax - bx)
            emit(Y * 2 - ay - by)
        elif isinstance(step, PointOnPath):
            emit(reps[step.path].incidence(X, Y))
        elif isinstance(step, Intersection):
            emit(reps[step.first].incidence(X, Y))
            emit(reps[step.second].incidence(X, Y))
        elif isinstance(step, (Line, Segment, Ray)):
            (ax, ay), (bx, by) = P(step.a), P(step.b)
            dx, dy = bx - ax, by - ay
            reps[step.name] = _LineRep(_through(ax, ay, dx, dy), dx, dy)
        elif isinstance(step, ParallelLine):
            px, py = P(step.point)
            base = reps[step.line]
            reps[step.name] = _LineRep(_through(px, py, base.dx, base.dy), base.dx, base.dy)
        elif isinstance(step, PerpendicularLine):
            px, py = P(step.point)
            base = reps[step.line]
            dx, dy = -base.dy, base.dx
            reps[step.name] = _LineRep(_through(px, py, dx, dy), dx, dy)
        elif isinstance(step, PerpendicularBisector):
            (ax, ay), (bx, by) = P(step.a), P(step.b)

            def bis(X, Y, ax=ax, ay=ay, bx=bx, by=by):
                return (X - ax) ** 2 + (Y - ay) ** 2 - (X - bx) ** 2 - (Y - by) ** 2

            reps[step.name] = _LineRep(bis, ay - by, bx - ax)
        elif isinstance(step, Circle):
            cx, cy = P(step.center)
            if not isinstance(step.radius, str):
                r2 = MultiPoly.const(registry, Fraction(step.radius) ** 2)
            elif isinstance(objs[step.radius], Segment):
                seg = objs[step.radius]
                (ax, ay), (bx, by) = P(seg.a), P(seg.b)
                r2 = (bx - ax) ** 2 + (by - ay) ** 2
            else:
                qx, qy = P(step.radius)
                r2 = (qx - cx) ** 2 + (qy - cy) ** 2
            reps[step.name] = _CircleRep(cx, cy, r2)

    tracer_poly = None
    if program.goal == "envelope":
        tracer_poly = emit(reps[program.tracer].incidence(V["x"], V["y"]))
        if tracer_poly is None:
            raise GeomError(f"traced line {program.tracer} has an identically zero equation")

    polys = list(dict.fromkeys(polys))
    retained = ("x", "y")
    return AlgebraicSystem(
        polynomials=tuple(polys),
        registry=registry,
        retained=retained,
        eliminated=tuple(n for n in names if n not in retained),
        point_vars=point_vars,
        tracer_poly=tracer_poly,
    )


def degrees_of_freedom(system: AlgebraicSystem) -> int:
    """Point variables minus point constraints; 1 for a well-posed construction."""
    point_names = {v for pair in system.point_vars.values() for v in pair}
    return len(point_names) - len(system.constraints)
