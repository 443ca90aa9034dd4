"""Floating-point forward evaluation of constructions.

Every intersection with two solutions forks the evaluation, so one mover
position yields one configuration per branch combination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from loceq.geom import (
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
    _constant_coords,
)

EPS = 1e-12
MAX_BRANCHES = 64


@dataclass(frozen=True)
class NPoint:
    x: float
    y: float


@dataclass(frozen=True)
class NLine:
    """Point (px, py) with direction (dx, dy)."""

    px: float
    py: float
    dx: float
    dy: float

    def coefficients(self) -> tuple[float, float, float]:
        """(a, b, c) with a*x + b*y + c = 0."""
        a, b = -self.dy, self.dx
        return a, b, -(a * self.px + b * self.py)


@dataclass(frozen=True)
class NCircle:
    cx: float
    cy: float
    r: float


def _line_line(l1: NLine, l2: NLine) -> list[NPoint]:
    det = l1.dx * (-l2.dy) - l1.dy * (-l2.dx)
    scale = math.hypot(l1.dx, l1.dy) * math.hypot(l2.dx, l2.dy)
    if scale < EPS or abs(det) < 1e-12 * scale:
        return []
    rx, ry = l2.px - l1.px, l2.py - l1.py
    s = (rx * (-l2.dy) - ry * (-l2.dx)) / det
    return [NPoint(l1.px + s * l1.dx, l1.py + s * l1.dy)]


def _line_circle(l: NLine, c: NCircle) -> list[NPoint]:
    a = l.dx * l.dx + l.dy * l.dy
    if a < EPS:
        return []
    fx, fy = l.px - c.cx, l.py - c.cy
    b = 2 * (fx * l.dx + fy * l.dy)
    cc = fx * fx + fy * fy - c.r * c.r
    disc = b * b - 4 * a * cc
    if disc < -1e-12 * max(1.0, b * b):
        return []
    disc = max(disc, 0.0)
    root = math.sqrt(disc)
    sols = [(-b - root) / (2 * a), (-b + root) / (2 * a)]
    if root == 0.0:
        sols = sols[:1]
    return [NPoint(l.px + s * l.dx, l.py + s * l.dy) for s in sols]


def _circle_circle(c1: NCircle, c2: NCircle) -> list[NPoint]:
    dx, dy = c2.cx - c1.cx, c2.cy - c1.cy
    d2 = dx * dx + dy * dy
    if d2 < EPS:
        return []
    # radical line: 2 dx X + 2 dy Y = r1^2 - r2^2 + |c2|^2 - |c1|^2, shifted to c1
    k = (c1.r**2 - c2.r**2 + d2) / 2
    px, py = c1.cx + dx * k / d2, c1.cy + dy * k / d2
    return _line_circle(NLine(px, py, -dy, dx), c1)


def intersect(a, b) -> list[NPoint]:
    if isinstance(a, NLine) and isinstance(b, NLine):
        return _line_line(a, b)
    if isinstance(a, NLine):
        return _line_circle(a, b)
    if isinstance(b, NLine):
        return _line_circle(b, a)
    return _circle_circle(a, b)


def place_on_path(path, t: float) -> NPoint:
    if isinstance(path, NCircle):
        return NPoint(path.cx + path.r * math.cos(t), path.cy + path.r * math.sin(t))
    return NPoint(path.px + t * path.dx, path.py + t * path.dy)


def evaluate(program: ConstructionProgram, t: float, max_branches: int = MAX_BRANCHES) -> list[dict]:
    """All branch configurations with the mover at path parameter t.

    Circles are parametrized by angle, lines by ``base + t * direction``.
    Configurations hitting a degenerate step are dropped.
    """
    configs: list[dict] = [{}]
    objs = program.objects
    for step in program.steps:
        nxt: list[dict] = []
        for env in configs:
            for val in _step_values(step, env, objs, program, t):
                e = dict(env)
                e[step.name] = val
                nxt.append(e)
                if len(nxt) >= max_branches:
                    break
            if len(nxt) >= max_branches:
                break
        configs = nxt
        if not configs:
            return []
    return configs


def _step_values(step, env, objs, program, t):
    def pt(n):
        return env[n]

    if isinstance(step, FreePoint):
        return [NPoint(float(step.x), float(step.y))]
    if isinstance(step, DynamicPoint):
        cx, cy = _constant_coords(step, objs)
        return [NPoint(float(cx), float(cy))]
    if isinstance(step, ComputedPoint):
        def ev(expr):
            v = float(expr.const)
            for p, axis, c in expr.terms:
                q = pt(p)
                v += float(c) * (q.x if axis == "x" else q.y)
            return v

        return [NPoint(ev(step.x), ev(step.y))]
    if isinstance(step, Midpoint):
        a, b = pt(step.a), pt(step.b)
        return [NPoint((a.x + b.x) / 2, (a.y + b.y) / 2)]
    if isinstance(step, PointOnPath):
        if step.name != program.mover:
            raise ValueError(f"{step.name} is on a path but is not the mover")
        return [place_on_path(env[step.path], t)]
    if isinstance(step, Intersection):
        return intersect(env[step.first], env[step.second])
    if isinstance(step, (Line, Segment, Ray)):
        a, b = pt(step.a), pt(step.b)
        if math.hypot(b.x - a.x, b.y - a.y) < EPS:
            return []
        return [NLine(a.x, a.y, b.x - a.x, b.y - a.y)]
    if isinstance(step, ParallelLine):
        p, l = pt(step.point), env[step.line]
        return [NLine(p.x, p.y, l.dx, l.dy)]
    if isinstance(step, PerpendicularLine):
        p, l = pt(step.point), env[step.line]
        return [NLine(p.x, p.y, -l.dy, l.dx)]
    if isinstance(step, PerpendicularBisector):
        a, b = pt(step.a), pt(step.b)
        if math.hypot(b.x - a.x, b.y - a.y) < EPS:
            return []
        return [NLine((a.x + b.x) / 2, (a.y + b.y) / 2, a.y - b.y, b.x - a.x)]
    if isinstance(step, Circle):
        c = pt(step.center)
        if isinstance(step.radius, str):
            other = env[step.radius]
            if isinstance(other, NLine):
                # a segment used as radius: its defining points are stored on it
                seg = objs[step.radius]
                a, b = pt(seg.a), pt(seg.b)
                r = math.hypot(b.x - a.x, b.y - a.y)
            else:
                r = math.hypot(other.x - c.x, other.y - c.y)
        else:
            r = float(step.radius)
        return [NCircle(c.x, c.y, r)]
    raise ValueError(f"cannot evaluate {type(step).__name__}")


def path_range(program: ConstructionProgram) -> tuple[float, float]:
    """Parameter interval sampled for the mover's path."""
    path = program.objects[program.objects[program.mover].path]
    if isinstance(path, Circle):
        return 0.0, 2 * math.pi
    if isinstance(path, Segment):
        return 0.0, 1.0
    if isinstance(path, Ray):
        return 0.0, 3.0
    return -2.0, 3.0
