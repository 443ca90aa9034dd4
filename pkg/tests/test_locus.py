import random

import pytest

from conftest import CORPUS
from loceq.dsl import parse, parse_file
from loceq.locus import (
    XY,
    EmptyLocus,
    ImplicitCurve,
    NonAlgebraicLocus,
    curve_from_elimination,
    locus_equation,
    numeric_trace,
    probe_linear_factors,
)
from loceq.poly import canonicalize, divides, parse_poly, product

LOCUS_FILES = [p for p in sorted(CORPUS.glob("*.lcs")) if "LocusEquation" in p.read_text() and "agnesi_24" not in p.name]


def P(t):
    return parse_poly(t, XY)


def circle_program(a, b, r=4):
    return parse(f"C = ({a}, {b})\nc = Circle[C, {r}]\nP = Point[c]\nM = Midpoint[P, C]\nLocusEquation[M, P]\n")


def orthocenter_program(p, q, b, c):
    return parse(
        f"""P = {p}
Q = {q}
B = {b}
C = {c}
f = Line[P, Q]
A = Point[f]
a = Line[B, C]
ha = Perpendicular[A, a]
bb = Line[A, C]
hb = Perpendicular[B, bb]
D = Intersect[ha, hb]
LocusEquation[D, A]
"""
    )


@pytest.mark.parametrize("a,b", [(0, 0), (2, 3), (3, 2), (-4, 1), (5, -7)])
def test_translated_centres(a, b):
    result = locus_equation(circle_program(a, b))
    expected = canonicalize(P(f"x^2 - 2*({a})x + y^2 - 2*({b})y + ({a * a + b * b - 4})"))
    assert result.curve.poly == expected


@pytest.mark.parametrize("path", LOCUS_FILES, ids=lambda p: p.stem)
def test_soundness_on_sampled_configurations(path):
    prog = parse_file(path)
    result = locus_equation(prog)
    pts = numeric_trace(prog, 20, seed=3)
    assert len(pts) >= 20
    assert max(result.curve.poly.relative_residual(list(p)) for p in pts) < 1e-9


def test_orthocenter_factors_reconstruct_the_curve():
    result = locus_equation(orthocenter_program("(1, 1)", "(2, 0)", "(3, -1)", "(3, 1)"))
    assert result.curve.poly == canonicalize(P("-xy - x + y^2 + 3y + 2"))
    factors = {f.poly for f in result.known_factors}
    assert factors == {canonicalize(P("y + 1")), canonicalize(P("y - x + 2"))}
    assert product([f.poly for f in result.known_factors], XY) * result.quotient == result.curve.poly
    assert result.quotient.is_constant()


def test_orthocenter_degree_property():
    rng = random.Random(7)
    done = 0
    while done < 5:
        p = (rng.randint(-4, 4), rng.randint(-4, 4))
        q = (rng.randint(-4, 4), rng.randint(-4, 4))
        b = (rng.randint(-4, 4), rng.randint(-4, 4))
        k = rng.choice([-2, -1, 1, 2])
        c = (b[0] + k * (q[0] - p[0]), b[1] + k * (q[1] - p[1]))
        cross = (q[0] - p[0]) * (b[1] - p[1]) - (q[1] - p[1]) * (b[0] - p[0])
        if p == q or cross == 0:
            continue
        result = locus_equation(orthocenter_program(str(p), str(q), str(b), str(c)))
        assert result.degree <= 2
        done += 1


def test_probe_finds_known_lines():
    curve = ImplicitCurve(P("(x - 3)*(2y + x - 5)*(x^2 + y^2 + 1)"))
    found = {f.poly for f in probe_linear_factors(curve)}
    assert found == {canonicalize(P("x - 3")), canonicalize(P("2y + x - 5"))}
    assert probe_linear_factors(ImplicitCurve(P("x^2 + y^2 - 4"))) == []


def test_probe_factors_divide():
    curve = ImplicitCurve(P("y*(x^2*y + y - 1)"))
    for f in probe_linear_factors(curve):
        assert divides(f.poly, curve.poly)[0]


def test_elimination_edge_cases():
    with pytest.raises(NonAlgebraicLocus):
        curve_from_elimination([])
    with pytest.raises(EmptyLocus):
        curve_from_elimination([P("1")])
    with pytest.raises(EmptyLocus, match="finite set"):
        curve_from_elimination([P("x - 1"), P("y - 2")])


def test_inconsistent_construction():
    prog = parse(
        """O = (0, 0)
U = (1, 0)
V = (0, 5)
W = (1, 5)
a = Line[O, U]
b = Line[V, W]
c = Circle[O, 1]
P = Point[c]
X = Intersect[a, b]
M = Midpoint[X, P]
LocusEquation[M, P]
"""
    )
    with pytest.raises(EmptyLocus):
        locus_equation(prog)


def test_json_shape():
    data = locus_equation(circle_program(2, 3)).to_json()
    assert data["schema"] == 1
    assert set(data) == {"schema", "equation", "degree", "factors", "superset_warning", "timings"}
    assert data["equation"] == "x^2 - 4x + y^2 - 6y + 9 = 0"
