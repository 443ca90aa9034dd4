"""Command-line entry point: ``loceq solve`` and ``loceq corpus``."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from loceq.dsl import DSLError, parse
from loceq.envelope import EnvelopeError, envelope_equation
from loceq.geom import ConstructionProgram, GeomError
from loceq.groebner import Budget, ResourceLimitExceeded
from loceq.locus import XY, EmptyLocus, LocusResult, NonAlgebraicLocus, locus_equation, numeric_trace
from loceq.poly import PolyError, canonicalize, divides, format_poly, parse_poly
from loceq.render import DEFAULT_GRID, CurvePaths, Viewport, emit_csv, emit_svg, rasterize

EXIT_OK, EXIT_DIAGNOSTICS, EXIT_RESOURCE = 0, 1, 2
FORMATS = ("text", "json", "svg", "csv")
DEFAULT_BBOX = "-10,-10,10,10"
DEFAULT_STEPS = 1_000_000
TRACE_SAMPLES = 200


@dataclass(frozen=True)
class RunConfig:
    input: Path
    format: str = "text"
    viewport: Viewport = Viewport.parse(DEFAULT_BBOX)
    time_budget: float | None = None
    step_budget: int = DEFAULT_STEPS
    method: str = "auto"

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {', '.join(FORMATS)}")
        if self.time_budget is not None and self.time_budget <= 0:
            raise ValueError("time budget must be positive")
        if self.step_budget <= 0:
            raise ValueError("step budget must be positive")

    def budget(self) -> Budget:
        return Budget(max_steps=self.step_budget, timeout=self.time_budget)


def compute(program: ConstructionProgram, budget: Budget | None = None, method: str = "auto") -> LocusResult:
    """Locus or envelope equation, depending on the program's goal."""
    if program.goal == "envelope":
        return envelope_equation(program, budget=budget, method=method)
    return locus_equation(program, budget=budget)


# module-qualified error prefixes
_ERROR_MODULES = (
    (DSLError, "dsl"),
    (EnvelopeError, "envelope"),
    (GeomError, "geom"),
    (EmptyLocus, "locus"),
    (NonAlgebraicLocus, "locus"),
    (PolyError, "poly"),
)


def _qualify(exc: Exception) -> str:
    for cls, mod in _ERROR_MODULES:
        if isinstance(exc, cls):
            return f"{mod}: {exc}"
    return f"error: {exc}"


def solve(config: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout.buffer
    err = err or sys.stderr
    try:
        source = Path(config.input).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"cli: cannot read {config.input}: {exc.strerror}", file=err)
        return EXIT_DIAGNOSTICS
    try:
        program = parse(source)
        if program.goal == "trace":
            out.write(_trace_output(program, config))
            out.flush()
            return EXIT_OK
        result = compute(program, config.budget(), config.method)
    except DSLError as exc:
        for d in exc.diagnostics:
            print(f"dsl: {config.input}:{d}", file=err)
        return EXIT_DIAGNOSTICS
    except ResourceLimitExceeded as exc:
        print(f"groebner: resource limit: {exc}", file=err)
        return EXIT_RESOURCE
    except (GeomError, EnvelopeError, EmptyLocus, NonAlgebraicLocus, PolyError) as exc:
        print(_qualify(exc), file=err)
        return EXIT_DIAGNOSTICS

    if config.format == "text":
        data = (result.equation + "\n").encode()
    elif config.format == "json":
        data = (json.dumps(result.to_json(), indent=2) + "\n").encode()
    else:
        paths = rasterize(result.curve, config.viewport)
        if config.format == "svg":
            data = emit_svg(paths, config.viewport, result.equation)
        else:
            data = emit_csv(paths)
    out.write(data)
    out.flush()
    return EXIT_OK


def _trace_output(program: ConstructionProgram, config: RunConfig) -> bytes:
    """Numeric trace only: the goal was ``Locus``, not ``LocusEquation``."""
    points = numeric_trace(program, TRACE_SAMPLES)
    if config.format == "json":
        return (json.dumps({"schema": 1, "points": points}) + "\n").encode()
    if config.format == "csv":
        return emit_csv(CurvePaths([points], [False]))
    if config.format == "svg":
        return emit_svg(CurvePaths(), config.viewport, f"Locus[{program.tracer}, {program.mover}]", points=points)
    return "".join(f"{x!r} {y!r}\n" for x, y in points).encode()


# ---------------------------------------------------------------------------
# golden corpus


@dataclass(frozen=True)
class CaseResult:
    name: str
    status: str  # pass | fail | skip | error
    detail: str
    seconds: float


def load_expectation(lcs: Path) -> dict:
    sidecar = lcs.with_suffix(".expect.json")
    if not sidecar.exists():
        return {}
    return json.loads(sidecar.read_text(encoding="utf-8"))


def compare(result: LocusResult, expect: dict) -> tuple[bool, str]:
    mode = expect.get("mode", "exact")
    ours = result.curve.poly
    if mode == "degree":
        ok = result.degree == expect["degree"]
        return ok, f"degree {result.degree}, expected {expect['degree']}"
    theirs = canonicalize(parse_poly(expect["equation"], XY))
    if mode == "exact":
        ok = ours == theirs
    elif mode == "divides":
        ok, _ = divides(theirs, ours)
    elif mode == "divided-by":
        ok, _ = divides(ours, theirs)
    else:
        return False, f"unknown comparison mode {mode!r}"
    if ok and "degree" in expect and result.degree != expect["degree"]:
        return False, f"degree {result.degree}, expected {expect['degree']}"
    verdict = "ok" if ok else f"got {format_poly(ours)}"
    return ok, f"{mode}: {verdict}"


def run_case(path: str, default_budget: float | None = None) -> CaseResult:
    lcs = Path(path)
    t0 = time.perf_counter()
    try:
        expect = load_expectation(lcs)
        program = parse(lcs.read_text(encoding="utf-8"))
        timeout = expect.get("time_budget", default_budget)
        result = compute(program, Budget(timeout=timeout), expect.get("method", "auto"))
    except ResourceLimitExceeded as exc:
        return CaseResult(lcs.stem, "error", f"resource limit: {exc}", time.perf_counter() - t0)
    except Exception as exc:  # a broken case is a report row, not a crash
        return CaseResult(lcs.stem, "error", _qualify(exc), time.perf_counter() - t0)
    elapsed = time.perf_counter() - t0
    if not expect:
        return CaseResult(lcs.stem, "fail", "no .expect.json sidecar", elapsed)
    ok, detail = compare(result, expect)
    return CaseResult(lcs.stem, "pass" if ok else "fail", detail, elapsed)


def run_corpus(
    directory, include_stretch: bool = False, workers: int | None = None, default_budget: float | None = None
) -> list[CaseResult]:
    files = sorted(Path(directory).glob("*.lcs"))
    todo, rows = [], {}
    for f in files:
        try:
            stretch = load_expectation(f).get("stretch", False)
        except (OSError, ValueError):
            stretch = False
        if stretch and not include_stretch:
            rows[f.stem] = CaseResult(f.stem, "skip", "stretch case (use --stretch)", 0.0)
        else:
            todo.append(str(f))
    if todo:
        workers = workers or min(len(todo), os.cpu_count() or 1)
        if workers == 1:
            done = [run_case(p, default_budget) for p in todo]
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                done = list(pool.map(run_case, todo, [default_budget] * len(todo)))
        rows.update({r.name: r for r in done})
    return [rows[f.stem] for f in files]


def format_report(rows: list[CaseResult]) -> str:
    if not rows:
        return "no corpus cases found\n"
    width = max(len(r.name) for r in rows)
    lines = [f"{'case':<{width}}  status  seconds  detail"]
    for r in rows:
        lines.append(f"{r.name:<{width}}  {r.status:<6}  {r.seconds:7.2f}  {r.detail}")
    counts = {s: sum(r.status == s for r in rows) for s in ("pass", "fail", "error", "skip")}
    lines.append(", ".join(f"{n} {s}" for s, n in counts.items()))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------


def _env_budget() -> float | None:
    raw = os.environ.get("LOCEQ_TIME_BUDGET")
    return float(raw) if raw else None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="loceq", description="Exact locus and envelope equations.")
    sub = ap.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve", help="compute the equation for one construction script")
    s.add_argument("file", type=Path)
    s.add_argument("--format", choices=FORMATS, default="text")
    s.add_argument("--bbox", default=DEFAULT_BBOX, help="xmin,ymin,xmax,ymax for svg/csv")
    s.add_argument("--grid", type=int, default=DEFAULT_GRID)
    s.add_argument("--time-budget", type=float, default=None, help="seconds (default $LOCEQ_TIME_BUDGET)")
    s.add_argument("--step-budget", type=int, default=DEFAULT_STEPS)
    s.add_argument("--method", choices=("auto", "jacobian", "single"), default="auto")
    c = sub.add_parser("corpus", help="run the golden corpus")
    c.add_argument("directory", type=Path)
    c.add_argument("--stretch", action="store_true", help="also run stretch cases")
    c.add_argument("--workers", type=int, default=None)
    c.add_argument("--time-budget", type=float, default=None)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    budget = args.time_budget if args.time_budget is not None else _env_budget()
    if args.command == "solve":
        try:
            config = RunConfig(
                input=args.file,
                format=args.format,
                viewport=Viewport.parse(args.bbox, args.grid),
                time_budget=budget,
                step_budget=args.step_budget,
                method=args.method,
            )
        except ValueError as exc:
            print(f"cli: {exc}", file=sys.stderr)
            return EXIT_DIAGNOSTICS
        return solve(config)
    if not args.directory.is_dir():
        print(f"cli: corpus directory {args.directory} not found", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    rows = run_corpus(args.directory, args.stretch, args.workers, budget)
    sys.stdout.write(format_report(rows))
    return EXIT_OK if all(r.status in ("pass", "skip") for r in rows) else EXIT_DIAGNOSTICS


if __name__ == "__main__":
    sys.exit(main())
