"""Render every corpus construction to SVG next to a summary table.

    python scripts/render_gallery.py corpus --out gallery --bbox=-3,-3,3,3
"""

from __future__ import annotations

import argparse
import time
from pathlib import Path

from loceq.cli import compute
from loceq.dsl import parse_file
from loceq.groebner import Budget
from loceq.render import Viewport, emit_svg, rasterize


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("corpus", type=Path)
    ap.add_argument("--out", type=Path, default=Path("gallery"))
    ap.add_argument("--bbox", default="-12,-12,12,12")
    ap.add_argument("--grid", type=int, default=512)
    ap.add_argument("--budget", type=float, default=120.0)
    args = ap.parse_args()

    vp = Viewport.parse(args.bbox, args.grid)
    args.out.mkdir(parents=True, exist_ok=True)
    print(f"{'case':<24} {'deg':>3} {'paths':>5} {'seconds':>8}  equation")
    for lcs in sorted(args.corpus.glob("*.lcs")):
        program = parse_file(lcs)
        if program.goal == "trace":
            continue
        t0 = time.perf_counter()
        result = compute(program, Budget(timeout=args.budget))
        paths = rasterize(result.curve, vp)
        elapsed = time.perf_counter() - t0
        (args.out / f"{lcs.stem}.svg").write_bytes(emit_svg(paths, vp, result.equation))
        print(f"{lcs.stem:<24} {result.degree:>3} {len(paths):>5} {elapsed:8.2f}  {result.equation}")


if __name__ == "__main__":
    main()
