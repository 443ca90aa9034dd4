import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from loceq.locus import XY, ImplicitCurve
from loceq.poly import parse_poly
from loceq.render import Viewport, emit_csv, emit_svg, evaluate_array, rasterize

SVG_NS = "{http://www.w3.org/2000/svg}"


def curve(text):
    return ImplicitCurve(parse_poly(text, XY))


def circle_error(grid):
    paths = rasterize(curve("x^2 + y^2 - 4"), Viewport(-3, 3, -3, 3, grid))
    return max(abs(math.hypot(x, y) - 2) for poly in paths.polylines for x, y in poly)


def test_circle_is_one_closed_polyline_within_bound():
    vp = Viewport(-3, 3, -3, 3)
    paths = rasterize(curve("x^2 + y^2 - 4"), vp)
    assert len(paths) == 1 and paths.closed == [True]
    assert circle_error(512) < 2 * (6 / 512)


def test_grid_doubling_converges():
    errs = [circle_error(g) for g in (32, 64, 128, 256)]
    for coarse, fine in zip(errs, errs[1:]):
        assert fine <= coarse / 2


def test_empty_real_locus():
    assert len(rasterize(curve("x^2 + y^2 + 1"), Viewport(-5, 5, -5, 5))) == 0


def test_axis_is_one_open_polyline():
    paths = rasterize(curve("y"), Viewport(-1, 1, -1, 1))
    assert len(paths) == 1 and paths.closed == [False]
    assert all(abs(y) < 1e-12 for _, y in paths.polylines[0])


def test_vertices_stay_inside_their_cells():
    vp = Viewport(-4, 4, -4, 4, 64)
    c = curve("x^3 - 3xy^2 - 2y + 1")
    h = 8 / 64
    for poly in rasterize(c, vp).polylines:
        for x, y in poly:
            assert -4 <= x <= 4 and -4 <= y <= 4
            i = min(int((x + 4) / h), 63)
            j = min(int((y + 4) / h), 63)
            sx = np.linspace(-4 + i * h, -4 + (i + 1) * h, 5)
            sy = np.linspace(-4 + j * h, -4 + (j + 1) * h, 5)
            cell = np.abs(evaluate_array(c.poly, sx[None, :], sy[:, None])).max()
            assert abs(evaluate_array(c.poly, np.array(x), np.array(y))) <= cell + 1e-12
        for (x0, y0), (x1, y1) in zip(poly, poly[1:]):
            assert abs(x1 - x0) <= h + 1e-9 and abs(y1 - y0) <= h + 1e-9


def paths_in(svg_bytes):
    root = ET.fromstring(svg_bytes)
    return root.findall(f"{SVG_NS}path"), root.findall(f"{SVG_NS}text")


def test_svg_structure_and_determinism():
    vp = Viewport(-3, 3, -3, 3, 128)
    c = curve("x^2 + y^2 - 4")
    a = emit_svg(rasterize(c, vp), vp, "x^2 + y^2 - 4 = 0")
    b = emit_svg(rasterize(c, vp), vp, "x^2 + y^2 - 4 = 0")
    assert a == b
    paths, texts = paths_in(a)
    assert len(paths) == 1 and paths[0].get("d").endswith("Z")
    assert texts[0].text == "x^2 + y^2 - 4 = 0"


def test_svg_empty_paths_keep_annotation():
    vp = Viewport(-1, 1, -1, 1)
    paths, texts = paths_in(emit_svg(rasterize(curve("x^2 + y^2 + 1"), vp), vp, "none"))
    assert paths == [] and texts[0].text == "none"


def test_degenerate_product_has_two_paths():
    vp = Viewport(-5, 5, -5, 5, 256)
    paths, _ = paths_in(emit_svg(rasterize(curve("xy + x - y^2 - 3y - 2"), vp), vp, ""))
    assert len(paths) >= 2


def test_csv_rows():
    vp = Viewport(-3, 3, -3, 3, 16)
    text = emit_csv(rasterize(curve("x^2 + y^2 - 4"), vp)).decode()
    lines = text.strip().splitlines()
    assert lines[0] == "x,y,path_id"
    assert all(line.endswith(",0") for line in lines[1:])


@pytest.mark.parametrize("bad", ["0,0,0,1", "1,2,3", "0,0,a,1"])
def test_viewport_validation(bad):
    with pytest.raises(ValueError):
        Viewport.parse(bad)
    with pytest.raises(ValueError):
        Viewport(0, 1, 0, 1, grid=4)
