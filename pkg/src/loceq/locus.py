"""Implicit equations of point loci."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import numpy as np

from loceq import numeric
from loceq.geom import ConstructionProgram, GeomError, algebraize, errors, validate
from loceq.groebner import Budget, eliminate
from loceq.poly import (
    MultiPoly,
    VarRegistry,
    canonicalize,
    divides,
    format_poly,
    gcd,
    product,
    squarefree_part,
)

XY = VarRegistry(["x", "y"])


class EmptyLocus(ValueError):
    """The construction is inconsistent, or its locus is a finite point set."""

    def __init__(self, message: str, basis: list[MultiPoly] | None = None):
        super().__init__(message)
        self.basis = basis or []


class NonAlgebraicLocus(ValueError):
    """The elimination ideal is zero: the locus fills the plane."""


@dataclass(frozen=True)
class ImplicitCurve:
    poly: MultiPoly

    def __post_init__(self):
        if self.poly.is_zero():
            raise ValueError("implicit curve of the zero polynomial")
        if set(self.poly.registry.names) != {"x", "y"}:
            raise ValueError("implicit curves live in the variables x, y")
        object.__setattr__(self, "poly", canonicalize(self.poly.embed(XY)))

    @property
    def degree(self) -> int:
        return self.poly.total_degree()

    @property
    def equation(self) -> str:
        return f"{format_poly(self.poly)} = 0"

    def __str__(self) -> str:
        return self.equation


@dataclass(frozen=True)
class LocusResult:
    curve: ImplicitCurve
    known_factors: tuple[ImplicitCurve, ...]
    quotient: MultiPoly
    superset_warning: bool = True
    timings: dict = field(default_factory=dict, compare=False)

    @property
    def degree(self) -> int:
        return self.curve.degree

    @property
    def equation(self) -> str:
        return self.curve.equation

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "equation": self.equation,
            "degree": self.degree,
            "factors": [f.equation for f in self.known_factors],
            "superset_warning": self.superset_warning,
            "timings": {k: round(v, 6) for k, v in self.timings.items()},
        }


def curve_from_elimination(gens: list[MultiPoly]) -> MultiPoly:
    """Squarefree canonical curve polynomial from an elimination-ideal basis."""
    if not gens:
        raise NonAlgebraicLocus("elimination ideal is zero; the locus is not a curve")
    if any(g.is_constant() for g in gens):
        raise EmptyLocus("construction is inconsistent (elimination ideal contains 1)", gens)
    g = reduce(gcd, gens)
    if g.is_constant():
        raise EmptyLocus("locus is a finite set of points, not a curve", gens)
    return squarefree_part(g)


def _rational_roots(coeffs: list[Fraction], max_den: int) -> list[Fraction]:
    """Exact rational roots with denominator <= max_den (coeffs: highest first)."""
    while coeffs and coeffs[0] == 0:
        coeffs = coeffs[1:]
    if len(coeffs) < 2:
        return []
    found = set()
    if coeffs[-1] == 0:
        found.add(Fraction(0))
    approx = np.roots([float(c) for c in coeffs])
    for r in approx:
        if abs(r.imag) > 1e-3 * max(1.0, abs(r.real)):
            continue
        cand = Fraction(float(r.real)).limit_denominator(max_den)
        val = sum(c * cand**k for k, c in enumerate(reversed(coeffs)))
        if val == 0:
            found.add(cand)
    return sorted(found)


def _restrict(poly: MultiPoly, fixed: str, value: int) -> list[Fraction]:
    """Coefficients (highest first) of poly with one variable fixed."""
    other = "y" if fixed == "x" else "x"
    i, j = XY.index(fixed), XY.index(other)
    coeffs: dict[int, Fraction] = {}
    for m, c in poly.terms.items():
        coeffs[m[j]] = coeffs.get(m[j], Fraction(0)) + c * value ** m[i]
    deg = max(coeffs) if coeffs else 0
    return [coeffs.get(k, Fraction(0)) for k in range(deg, -1, -1)]


def _slice_roots(poly: MultiPoly, fixed: str, max_den: int) -> tuple[int, list[Fraction]] | None:
    for v in (0, 1, -1, 2, -2, 3, -3, 5, 7, 11):
        coeffs = _restrict(poly, fixed, v)
        if any(coeffs):
            return v, _rational_roots(coeffs, max_den)
    return None


def probe_linear_factors(curve: ImplicitCurve | MultiPoly, bound: int = 8, c_bound: int = 200) -> list[ImplicitCurve]:
    """Factors a*y + b*x + c (|a|, |b| <= bound, |c| <= c_bound) dividing the curve.

    Candidates come from exact rational roots of the curve restricted to a
    vertical (or horizontal) slice; each is confirmed by exact division.
    """
    poly = curve.poly if isinstance(curve, ImplicitCurve) else canonicalize(curve.embed(XY))
    x, y = XY.vars()
    candidates: list[MultiPoly] = []
    vert = _slice_roots(poly, "x", bound)
    if vert is not None:
        x0, roots = vert
        for a in range(1, bound + 1):
            for b in range(-bound, bound + 1):
                if math.gcd(a, b) != 1:
                    continue
                for s in roots:
                    c = -a * s - b * x0
                    if c.denominator == 1 and abs(c) <= c_bound:
                        candidates.append(y * a + x * b + c)
    horiz = _slice_roots(poly, "y", 1)
    if horiz is not None:
        _, roots = horiz
        for r in roots:
            if r.denominator == 1 and abs(r) <= c_bound:
                candidates.append(x - r)
    found: list[ImplicitCurve] = []
    seen = set()
    for cand in candidates:
        cand = canonicalize(cand)
        if cand in seen:
            continue
        seen.add(cand)
        ok, _ = divides(cand, poly)
        if ok:
            found.append(ImplicitCurve(cand))
    found.sort(key=lambda f: sorted(f.poly.terms.items(), reverse=True), reverse=True)
    return found


def split_known_factors(poly: MultiPoly) -> tuple[tuple[ImplicitCurve, ...], MultiPoly]:
    factors = probe_linear_factors(poly)
    quotient = poly
    for f in factors:
        ok, q = divides(f.poly, quotient)
        while ok:
            quotient = q
            ok, q = divides(f.poly, quotient)
    return tuple(factors), quotient


def result_from_poly(poly: MultiPoly, timings: dict | None = None) -> LocusResult:
    curve = ImplicitCurve(poly)
    factors, quotient = split_known_factors(curve.poly)
    return LocusResult(curve, factors, quotient, True, dict(timings or {}))


def check_program(program: ConstructionProgram, goal: set[str]) -> None:
    problems = errors(validate(program))
    if problems:
        raise GeomError("; ".join(d.message for d in problems), problems)
    if program.goal not in goal:
        raise GeomError(f"program goal is {program.goal!r}, expected one of {sorted(goal)}")


def locus_equation(
    program: ConstructionProgram,
    budget: Budget | None = None,
    staged: bool = True,
    batch: int = 1,
) -> LocusResult:
    """Implicit equation of the curve traced by the tracer point.

    ``staged`` eliminates ``batch`` variables at a time, later construction
    steps first, instead of all at once under one block order.
    """
    check_program(program, {"locus", "trace"})
    t0 = time.perf_counter()
    system = algebraize(program)
    t1 = time.perf_counter()
    gens = eliminate(list(system.polynomials), system.retained, budget=budget, staged=staged, batch=batch)
    t2 = time.perf_counter()
    poly = curve_from_elimination(gens)
    result = result_from_poly(
        poly, {"algebraize": t1 - t0, "eliminate": t2 - t1}
    )
    result.timings["total"] = time.perf_counter() - t0
    return result


def sample_parameters(program: ConstructionProgram, samples: int, seed: int = 0) -> list[float]:
    """Uniform grid on the mover's path, the last (up to) three jittered at random."""
    if samples <= 0:
        return []
    lo, hi = numeric.path_range(program)
    rng = random.Random(seed)
    n_grid = samples - min(3, samples // 2)
    step = (hi - lo) / max(n_grid, 1)
    ts = [lo + (k + 0.5) * step for k in range(n_grid)]
    ts += [rng.uniform(lo, hi) for _ in range(samples - n_grid)]
    return ts


def numeric_trace(
    program: ConstructionProgram, samples: int, seed: int = 0
) -> list[tuple[float, float]]:
    """Tracer positions for sampled mover positions, every intersection branch."""
    if not program.steps or program.mover is None or program.tracer is None:
        return []
    points = []
    for t in sample_parameters(program, samples, seed):
        for env in numeric.evaluate(program, t):
            p = env[program.tracer]
            points.append((p.x, p.y))
    return points
