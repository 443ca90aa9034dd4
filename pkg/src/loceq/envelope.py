"""Envelopes of one-parameter families of lines.

The general route adjoins the vanishing Jacobian determinant of
(constraints, traced line) with respect to the auxiliary variables and
eliminates them. When linear constraints collapse the family to a single
parameter t, the classical F = dF/dt = 0 route is available too.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from loceq import numeric
from loceq.geom import AlgebraicSystem, ConstructionProgram, GeomError, algebraize
from loceq.groebner import Budget, ResourceLimitExceeded, eliminate
from loceq.locus import (
    XY,
    ImplicitCurve,
    LocusResult,
    check_program,
    curve_from_elimination,
    result_from_poly,
    sample_parameters,
)
from loceq.poly import MultiPoly, VarRegistry, canonicalize, partial_derivative

MAX_JACOBIAN = 8


class EnvelopeError(ValueError):
    """The family is not a proper one-parameter family of lines."""


class ReductionError(EnvelopeError):
    """The family cannot be written with a single free parameter."""


def _linear_definition(p: MultiPoly, candidates: list[str]) -> tuple[str, MultiPoly] | None:
    """(v, h) when p = c*(v - h) for a candidate v absent from h, c constant."""
    for v in candidates:
        if p.degree_in(v) != 1:
            continue
        coeffs = p.coefficients_in(v)
        if not coeffs[1].is_constant():
            continue
        c = coeffs[1].constant_value()
        return v, (MultiPoly.var(p.registry, v) * c - p) / c
    return None


@dataclass(frozen=True)
class FamilySpec:
    """Constraints on auxiliary variables plus the traced line L(x, y, aux)."""

    program: ConstructionProgram
    registry: VarRegistry
    constraints: tuple[MultiPoly, ...]
    line: MultiPoly
    aux: tuple[str, ...]
    mover_vars: tuple[str, ...]

    @property
    def dimension(self) -> int:
        return len(self.aux) - len(self.constraints)


def prepare_family(program: ConstructionProgram) -> FamilySpec:
    """Algebraize, then substitute away every linearly defined auxiliary variable."""
    check_program(program, {"envelope"})
    system: AlgebraicSystem = algebraize(program)
    reg = system.registry
    constraints = list(system.constraints)
    line = system.tracer_poly
    aux = [n for n in system.eliminated]
    # Substituting a linearly defined variable drops one row and one column
    # of the Jacobian and scales its determinant by a nonzero constant.
    # Later construction steps go first so the mover's own variables survive.
    while True:
        for p in constraints:
            found = _linear_definition(p, [v for v in reversed(aux) if v not in ("x", "y")])
            if found is not None:
                break
        else:
            break
        v, value = found
        constraints = [
            canonicalize(s) for q in constraints if q is not p
            for s in [q.substitute(v, value)] if not s.is_zero()
        ]
        line = line.substitute(v, value)
        aux.remove(v)
    if line.is_zero():
        raise EnvelopeError("traced line vanishes identically")
    live = set()
    for p in constraints + [line]:
        live |= p.variables()
    aux_order = tuple(n for n in reg.names if n in set(aux) and n in live)
    # constraints left with no live variable are either 0 = 0 or contradictions
    for p in constraints:
        if p.is_constant():
            raise EnvelopeError("construction is inconsistent")
    mover_vars = tuple(v for v in system.point_vars[program.mover] if v in aux_order)
    return FamilySpec(program, reg, tuple(constraints), canonicalize(line), aux_order, mover_vars)


def _as_spec(spec) -> FamilySpec:
    return spec if isinstance(spec, FamilySpec) else prepare_family(spec)


def _check_family(spec: FamilySpec) -> None:
    if not (spec.line.variables() & set(spec.aux)):
        raise EnvelopeError("degenerate family: the traced line does not depend on the mover")
    if spec.dimension != 1:
        raise EnvelopeError(
            f"non-square Jacobian: {len(spec.aux)} auxiliary variables, "
            f"{len(spec.constraints)} constraints (family must be 1-dimensional)"
        )


def determinant(rows: list[list[MultiPoly]]) -> MultiPoly:
    """Cofactor expansion along the first row, skipping zero entries."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = MultiPoly.zero(rows[0][0].registry)
    for j, entry in enumerate(rows[0]):
        if entry.is_zero():
            continue
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        term = entry * determinant(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def jacobian_system(spec: FamilySpec | ConstructionProgram) -> tuple[list[MultiPoly], MultiPoly]:
    """(constraints + line + det J, det J)."""
    spec = _as_spec(spec)
    _check_family(spec)
    if len(spec.aux) > MAX_JACOBIAN:
        raise ResourceLimitExceeded(
            f"Jacobian of size {len(spec.aux)} exceeds the limit of {MAX_JACOBIAN}"
        )
    rows = [[partial_derivative(f, v) for v in spec.aux] for f in spec.constraints + (spec.line,)]
    det = determinant(rows)
    polys = list(spec.constraints) + [spec.line]
    if not det.is_zero():
        polys.append(canonicalize(det))
    return polys, det


def single_parameter_reduce(spec: FamilySpec | ConstructionProgram) -> MultiPoly:
    """F(x, y, t) whose zero set at t = t0 is the family member at t0.

    Constraints that define an auxiliary variable linearly are substituted
    away (variables of later steps first) until one parameter remains.
    """
    spec = _as_spec(spec)
    _check_family(spec)
    constraints = list(spec.constraints)
    line = spec.line
    order = [v for v in reversed(spec.aux) if v not in spec.mover_vars] + list(spec.mover_vars)
    remaining = list(spec.aux)
    while constraints:
        for p in constraints:
            pivot = None
            for v in order:
                if v not in remaining or p.degree_in(v) != 1:
                    continue
                c = p.coefficients_in(v)[1]
                if c.is_constant():
                    pivot = (v, c.constant_value())
                    break
            if pivot is not None:
                break
        else:
            raise ReductionError(
                "family cannot be reduced to a single parameter (a constraint is not linear)"
            )
        v, c = pivot
        value = (MultiPoly.var(spec.registry, v) * c - p) / c
        constraints = [
            canonicalize(s) for q in constraints if q is not p
            for s in [q.substitute(v, value)] if not s.is_zero()
        ]
        line = line.substitute(v, value)
        remaining.remove(v)
    params = [v for v in remaining if line.degree_in(v) > 0]
    if len(params) != 1:
        raise ReductionError("family constant in its parameter" if not params else "more than one parameter")
    reg = VarRegistry(["x", "y", "t"])
    return canonicalize(line.embed(reg, {params[0]: "t"}))


def envelope_of_parametric(F: MultiPoly, budget: Budget | None = None) -> MultiPoly:
    """Curve polynomial eliminating t from {F, dF/dt}."""
    dF = partial_derivative(F, "t")
    if dF.is_zero():
        raise ReductionError("family constant in t")
    gens = eliminate([F, dF], ["x", "y"], budget=budget)
    return curve_from_elimination(gens)


def envelope_equation(
    spec: FamilySpec | ConstructionProgram,
    budget: Budget | None = None,
    method: str = "jacobian",
    staged: bool = True,
    batch: int = 1,
) -> LocusResult:
    """Implicit equation of the envelope of the traced line.

    ``method`` is "jacobian", "single" (single-parameter route only) or
    "auto" (single when the family reduces, else Jacobian).
    """
    t0 = time.perf_counter()
    spec = _as_spec(spec)
    t1 = time.perf_counter()
    if method not in ("jacobian", "single", "auto"):
        raise ValueError(f"unknown envelope method {method!r}")
    poly = None
    if method in ("single", "auto"):
        try:
            F = single_parameter_reduce(spec)
        except ReductionError:
            if method == "single":
                raise
        else:
            poly = envelope_of_parametric(F, budget)
    if poly is None:
        polys, _ = jacobian_system(spec)
        gens = eliminate(polys, ["x", "y"], budget=budget, staged=staged, batch=batch)
        poly = curve_from_elimination(gens)
    t2 = time.perf_counter()
    result = result_from_poly(poly, {"algebraize": t1 - t0, "eliminate": t2 - t1})
    result.timings["total"] = time.perf_counter() - t0
    return result


def tangency_discriminant(curve: ImplicitCurve | MultiPoly, line=None):
    """Discriminant in (a, b) of the curve restricted to the line y = a*x + b.

    The curve is used as given (not rescaled), so the result is exact for
    that normalization. Zero exactly when the line touches the curve. With
    ``line=(a, b)`` given, the discriminant is evaluated there.
    """
    poly = curve.poly if isinstance(curve, ImplicitCurve) else curve
    if set(poly.registry.names) != {"x", "y"}:
        raise ValueError("curve must be a polynomial in x, y")
    reg = VarRegistry(["x", "a", "b"])
    x, a, b = reg.vars()
    lifted = poly.embed(VarRegistry(["x", "y", "a", "b"]))
    xx, yy, aa, bb = lifted.registry.vars()
    sub = lifted.substitute("y", aa * xx + bb).embed(reg)
    coeffs = sub.coefficients_in("x")
    if max(coeffs) != 2:
        raise ValueError("substitution is not quadratic in x")
    A = coeffs[2]
    B = coeffs.get(1, MultiPoly.zero(reg))
    C = coeffs.get(0, MultiPoly.zero(reg))
    disc = (B * B - A * C * 4).embed(VarRegistry(["a", "b"]))
    if line is not None:
        return disc.evaluate([Fraction(line[0]), Fraction(line[1])])
    return disc


def envelope_trace(
    program: ConstructionProgram, samples: int, seed: int = 0, h: float = 1e-3
) -> list[tuple[float, float]]:
    """Numeric contact points: L(t) = 0 and dL/dt = 0 at sampled t, every branch.

    dL/dt comes from a five-point central difference of the line
    coefficients; samples where the two lines are nearly parallel are skipped.
    """
    points = []
    for t in sample_parameters(program, samples, seed):
        stencil = [numeric.evaluate(program, t + k * h) for k in (-2, -1, 0, 1, 2)]
        if len({len(s) for s in stencil}) != 1:
            continue
        for b in range(len(stencil[2])):
            L = [np.array(cfg[b][program.tracer].coefficients()) for cfg in stencil]
            dL = (L[0] - 8 * L[1] + 8 * L[3] - L[4]) / (12 * h)
            M = np.array([L[2][:2], dL[:2]])
            scale = np.linalg.norm(M[0]) * np.linalg.norm(M[1])
            if scale == 0 or abs(np.linalg.det(M)) < 1e-6 * scale:
                continue
            x, y = np.linalg.solve(M, -np.array([L[2][2], dL[2]]))
            points.append((float(x), float(y)))
    return points
