"""Marching-squares rasterization of implicit curves, with SVG and CSV output."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from fractions import Fraction
from xml.sax.saxutils import escape

import numpy as np

from loceq.locus import ImplicitCurve
from loceq.poly import MultiPoly

DEFAULT_GRID = 512


@dataclass(frozen=True)
class Viewport:
    xmin: Fraction
    xmax: Fraction
    ymin: Fraction
    ymax: Fraction
    grid: int = DEFAULT_GRID

    def __post_init__(self):
        for name in ("xmin", "xmax", "ymin", "ymax"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise ValueError("viewport needs xmin < xmax and ymin < ymax")
        if self.grid < 8:
            raise ValueError("viewport grid must be at least 8")

    @classmethod
    def parse(cls, bbox: str, grid: int = DEFAULT_GRID) -> "Viewport":
        """From ``"xmin,ymin,xmax,ymax"``."""
        parts = [p.strip() for p in bbox.split(",")]
        if len(parts) != 4:
            raise ValueError("bbox must be xmin,ymin,xmax,ymax")
        xmin, ymin, xmax, ymax = (Fraction(p) for p in parts)
        return cls(xmin, xmax, ymin, ymax, grid)

    def xs(self) -> np.ndarray:
        return np.linspace(float(self.xmin), float(self.xmax), self.grid + 1)

    def ys(self) -> np.ndarray:
        return np.linspace(float(self.ymin), float(self.ymax), self.grid + 1)


@dataclass
class CurvePaths:
    polylines: list[list[tuple[float, float]]] = field(default_factory=list)
    closed: list[bool] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.polylines)


def _as_poly(curve) -> MultiPoly:
    return curve.poly if isinstance(curve, ImplicitCurve) else curve


def evaluate_array(poly: MultiPoly, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Values at broadcastable coordinate arrays, Horner in x over polynomials in y."""
    ix, iy = poly.registry.index("x"), poly.registry.index("y")
    by_x: dict[int, dict[int, float]] = {}
    for m, c in poly.terms.items():
        by_x.setdefault(m[ix], {})[m[iy]] = float(c)
    X, Y = np.broadcast_arrays(np.asarray(X, float), np.asarray(Y, float))
    out = np.zeros(X.shape)
    for k in range(max(by_x, default=0), -1, -1):
        coeffs = by_x.get(k, {})
        cy = np.zeros(X.shape)
        for j in range(max(coeffs, default=0), -1, -1):
            cy = cy * Y + coeffs.get(j, 0.0)
        out = out * X + cy
    return out


def evaluate_grid(poly: MultiPoly, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Values on the grid, indexed [row j (y), column i (x)]."""
    return evaluate_array(poly, xs[None, :], ys[:, None])


# edges of a cell: 0 bottom, 1 right, 2 top, 3 left; corners 0 bl, 1 br, 2 tr, 3 tl
_EDGE_CORNERS = ((0, 1), (1, 2), (3, 2), (0, 3))


def _edge_key(i: int, j: int, e: int) -> tuple[int, int, int]:
    """Global id (orientation, i, j): 0 horizontal from (i, j), 1 vertical from (i, j)."""
    if e == 0:
        return (0, i, j)
    if e == 1:
        return (1, i + 1, j)
    if e == 2:
        return (0, i, j + 1)
    return (1, i, j)


def _cell_segments(case: int, center_inside: bool) -> list[tuple[int, int]]:
    if case in (5, 10):
        # diagonal corners inside: cell centre decides whether they connect
        if (case == 5) == center_inside:
            return [(0, 1), (2, 3)]  # corners 1 and 3 cut off
        return [(3, 0), (1, 2)]  # corners 0 and 2 cut off
    edges = []
    for e, (a, b) in enumerate(_EDGE_CORNERS):
        if ((case >> a) & 1) != ((case >> b) & 1):
            edges.append(e)
    return [(edges[0], edges[1])] if len(edges) == 2 else []


def rasterize(curve, vp: Viewport) -> CurvePaths:
    """Contour of the sign change f > 0 versus f <= 0 over the viewport grid."""
    poly = _as_poly(curve)
    if poly.is_zero():
        raise ValueError("cannot rasterize the zero polynomial")
    xs, ys = vp.xs(), vp.ys()
    f = evaluate_grid(poly, xs, ys)
    inside = f > 0
    case = (
        inside[:-1, :-1].astype(np.int8)
        | inside[:-1, 1:].astype(np.int8) << 1
        | inside[1:, 1:].astype(np.int8) << 2
        | inside[1:, :-1].astype(np.int8) << 3
    )
    active = np.argwhere((case != 0) & (case != 15))
    saddles = [(j, i) for j, i in active if case[j, i] in (5, 10)]
    centre = {}
    if saddles:
        cx = np.array([(xs[i] + xs[i + 1]) / 2 for _, i in saddles])
        cy = np.array([(ys[j] + ys[j + 1]) / 2 for j, _ in saddles])
        vals = evaluate_array(poly, cx, cy)
        centre = {s: v > 0 for s, v in zip(saddles, vals)}

    def vertex(key) -> tuple[float, float]:
        o, i, j = key
        i2, j2 = (i + 1, j) if o == 0 else (i, j + 1)
        fa, fb = f[j, i], f[j2, i2]
        t = 0.5 if fa == fb else fa / (fa - fb)
        t = min(max(t, 0.0), 1.0)
        return (float(xs[i] + t * (xs[i2] - xs[i])), float(ys[j] + t * (ys[j2] - ys[j])))

    adj: dict[tuple, list[tuple]] = {}
    for j, i in active:
        c = int(case[j, i])
        for ea, eb in _cell_segments(c, centre.get((j, i), False)):
            ka, kb = _edge_key(int(i), int(j), ea), _edge_key(int(i), int(j), eb)
            adj.setdefault(ka, []).append(kb)
            adj.setdefault(kb, []).append(ka)

    paths = CurvePaths()
    seen: set[tuple] = set()

    def walk(start):
        chain = [start]
        seen.add(start)
        prev, cur = None, start
        while True:
            nxt = [n for n in adj[cur] if n != prev and n not in seen]
            if not nxt:
                closed = len(chain) > 2 and start in adj[cur] and prev is not None
                return chain, closed
            prev, cur = cur, nxt[0]
            seen.add(cur)
            chain.append(cur)

    for start in sorted(k for k, v in adj.items() if len(v) == 1):
        if start not in seen:
            chain, _ = walk(start)
            paths.polylines.append([vertex(k) for k in chain])
            paths.closed.append(False)
    for start in sorted(adj):
        if start not in seen:
            chain, closed = walk(start)
            paths.polylines.append([vertex(k) for k in chain])
            paths.closed.append(closed)
    return paths


def _fmt(v: float) -> str:
    s = f"{v:.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def emit_svg(
    paths: CurvePaths,
    vp: Viewport,
    annotation: str = "",
    size: int = 512,
    points: list[tuple[float, float]] = (),
) -> bytes:
    """Standalone SVG 1.1; ``points`` are drawn as dots (numeric traces)."""
    w = float(vp.xmax - vp.xmin)
    h = float(vp.ymax - vp.ymin)
    scale = size / max(w, h)
    width, height = w * scale, h * scale

    def px(p):
        return _fmt((p[0] - float(vp.xmin)) * scale), _fmt((float(vp.ymax) - p[1]) * scale)

    out = io.StringIO()
    out.write('<?xml version="1.0" encoding="UTF-8"?>\n')
    out.write(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(width)}" height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">\n'
    )
    out.write(f'<rect width="{_fmt(width)}" height="{_fmt(height)}" fill="white"/>\n')
    for poly, closed in zip(paths.polylines, paths.closed):
        pts = [px(p) for p in poly]
        d = "M" + " L".join(f"{x},{y}" for x, y in pts) + (" Z" if closed else "")
        out.write(f'<path d="{d}" fill="none" stroke="blue" stroke-width="1.5"/>\n')
    for p in points:
        if vp.xmin <= p[0] <= vp.xmax and vp.ymin <= p[1] <= vp.ymax:
            x, y = px(p)
            out.write(f'<circle cx="{x}" cy="{y}" r="1.5" fill="red"/>\n')
    if annotation:
        out.write(
            f'<text x="8" y="20" font-family="sans-serif" font-size="14" fill="black">'
            f"{escape(annotation)}</text>\n"
        )
    out.write("</svg>\n")
    return out.getvalue().encode("utf-8")


def emit_csv(paths: CurvePaths) -> bytes:
    lines = ["x,y,path_id"]
    for pid, poly in enumerate(paths.polylines):
        lines.extend(f"{x!r},{y!r},{pid}" for x, y in poly)
    return ("\n".join(lines) + "\n").encode("utf-8")
