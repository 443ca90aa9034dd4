import time

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import from_sympy, to_sympy
from loceq.groebner import (
    Budget,
    MonomialOrder,
    PolySystem,
    ResourceLimitExceeded,
    buchberger,
    eliminate,
    is_groebner,
    reduce_poly,
    s_polynomial,
    substitute_linear,
)
from loceq.poly import VarRegistry, canonicalize, parse_poly

XYZ = VarRegistry(["x", "y", "z"])
XY = VarRegistry(["x", "y"])

ORDERS = [MonomialOrder.lex(), MonomialOrder.grlex(), MonomialOrder.block(1), MonomialOrder.block(2)]
monos = st.tuples(*[st.integers(0, 4)] * 3)


@pytest.mark.parametrize("order", ORDERS, ids=lambda o: f"{o.kind}{o.k}")
@given(a=monos, b=monos, c=monos)
@settings(max_examples=80, deadline=None)
def test_order_axioms(order, a, b, c):
    # total, compatible with multiplication, well-founded (1 is smallest)
    assert order.compare(a, b) == -order.compare(b, a)
    one = (0, 0, 0)
    assert order.compare(a, one) >= 0
    if order.compare(a, b) < 0:
        ac = tuple(i + j for i, j in zip(a, c))
        bc = tuple(i + j for i, j in zip(b, c))
        assert order.compare(ac, bc) < 0
        if order.compare(b, c) < 0:
            assert order.compare(a, c) < 0


def P(text, reg=XYZ):
    return parse_poly(text, reg)


# small fixtures shared by the oracle comparisons and the acceptance suite
FIXTURES = [
    ["x^2 + y^2 - 1", "x - y"],
    ["x^2 - y", "xy - 1"],
    ["x^2 + y + z - 1", "x + y^2 + z - 1", "x + y + z^2 - 1"],
    ["xy - z", "yz - x", "zx - y"],
    ["x^3 - 2xy", "x^2y - 2y^2 + x"],
]


def sympy_basis(gens, order):
    syms = sympy.symbols(XYZ.names)
    g = sympy.groebner([to_sympy(p) for p in gens], *syms, order=order)
    return {canonicalize(from_sympy(e, XYZ)) for e in g.exprs}


@pytest.mark.parametrize("fixture", FIXTURES, ids=range(len(FIXTURES)))
@pytest.mark.parametrize("order", ["lex", "grlex"])
def test_buchberger_matches_sympy(fixture, order):
    gens = [P(t) for t in fixture]
    mo = MonomialOrder(order)
    basis = buchberger(PolySystem(tuple(gens), XYZ, mo))
    assert set(basis.generators) == sympy_basis(gens, order)
    assert is_groebner(basis)
    for g in gens:
        assert reduce_poly(g, basis).is_zero()


def test_reduce_and_spoly_examples():
    lex = MonomialOrder.lex()
    sysm = PolySystem((parse_poly("x - y", XY),), XY, lex)
    assert reduce_poly(parse_poly("xy - 1", XY), sysm) == parse_poly("y^2 - 1", XY)
    s = s_polynomial(parse_poly("x^2 - y", XY), parse_poly("xy - 1", XY), lex)
    assert canonicalize(s) == canonicalize(parse_poly("x - y^2", XY))


def test_linear_system_basis():
    basis = buchberger(PolySystem((parse_poly("x - y", XY), parse_poly("x + y", XY)), XY, MonomialOrder.lex()))
    assert set(basis.generators) == {parse_poly("x", XY), parse_poly("y", XY)}


def test_inconsistent_system_gives_one():
    basis = buchberger(PolySystem((parse_poly("x", XY), parse_poly("x - 1", XY)), XY))
    assert [str(g) for g in basis.generators] == ["1"]


CIRCLE_MIDPOINT = VarRegistry(["x", "y", "u", "v"])


def circle_midpoint_system():
    r = CIRCLE_MIDPOINT
    return [parse_poly(t, r) for t in ("(x-2)^2 + (y-3)^2 - 16", "2u - x - 2", "2v - y - 3")]


@pytest.mark.parametrize("substitute", [True, False])
@pytest.mark.parametrize("staged", [True, False])
def test_eliminate_circle_midpoint(substitute, staged):
    out = eliminate(circle_midpoint_system(), ["u", "v"], substitute=substitute, staged=staged, batch=1)
    assert [str(g) for g in out] == ["u^2 - 4u + v^2 - 6v + 9"]


def test_elimination_purity_and_membership():
    gens = [P(t) for t in FIXTURES[2]]
    out = eliminate(gens, ["z"], substitute=False)
    assert out and all(g.variables() <= {"z"} for g in out)
    # every eliminant lies in the original ideal
    lex = buchberger(PolySystem(tuple(gens), XYZ, MonomialOrder.lex()))
    for g in out:
        assert reduce_poly(g.embed(XYZ), lex).is_zero()
    # and generates the same elimination ideal as sympy's lex basis
    oracle = {g for g in lex.generators if g.variables() <= {"z"}}
    assert {g.embed(XYZ) for g in out} == oracle


def test_eliminate_parabola():
    out = eliminate([parse_poly("y - x^2", XY), parse_poly("y - 1", XY)], ["x"])
    assert [str(g) for g in out] == ["x^2 - 1"]


def test_substitute_linear_preserves_elimination_ideal():
    gens = circle_midpoint_system()
    rest, left = substitute_linear(gens, ["x", "y"])
    assert left == []
    assert [str(g) for g in rest] == ["u^2 - 4u + v^2 - 6v + 9"]


def test_zero_elimination_ideal():
    assert eliminate([parse_poly("x - y", XY)], ["y"]) == []


def test_step_budget():
    gens = [P(t) for t in FIXTURES[2]]
    with pytest.raises(ResourceLimitExceeded):
        buchberger(PolySystem(tuple(gens), XYZ, MonomialOrder.lex()), Budget(max_steps=5))


def test_budget_monotonicity():
    gens = [P(t) for t in FIXTURES[2]]
    b = Budget()
    buchberger(PolySystem(tuple(gens), XYZ, MonomialOrder.lex()), b)
    needed = b.steps
    ok = buchberger(PolySystem(tuple(gens), XYZ, MonomialOrder.lex()), Budget(max_steps=needed))
    again = buchberger(PolySystem(tuple(gens), XYZ, MonomialOrder.lex()), Budget(max_steps=2 * needed))
    assert ok.generators == again.generators


def test_unit_fixtures_are_fast():
    t0 = time.perf_counter()
    for fixture in FIXTURES:
        for order in (MonomialOrder.lex(), MonomialOrder.grlex()):
            buchberger(PolySystem(tuple(P(t) for t in fixture), XYZ, order))
    assert time.perf_counter() - t0 < 5
