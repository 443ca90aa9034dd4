from fractions import Fraction
from pathlib import Path

import pytest
import sympy

from loceq.poly import MultiPoly, VarRegistry

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"


def to_sympy(p: MultiPoly):
    syms = sympy.symbols(p.registry.names)
    if len(p.registry.names) == 1:
        syms = (syms,) if not isinstance(syms, tuple) else syms
    expr = sympy.Integer(0)
    for mono, c in p.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for s, e in zip(syms, mono):
            term *= s**e
        expr += term
    return expr


def from_sympy(expr, registry: VarRegistry) -> MultiPoly:
    poly = sympy.Poly(sympy.expand(expr), *sympy.symbols(registry.names))
    terms = {}
    for mono, c in poly.terms():
        c = sympy.Rational(c)
        terms[tuple(mono)] = Fraction(int(c.p), int(c.q))
    return MultiPoly(registry, terms)


@pytest.fixture
def corpus_dir():
    return CORPUS


# one summary line per acceptance criterion, printed even when output is captured
_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None or (report.when != "call" and report.outcome == "passed"):
        return
    number, title = marker
    if report.skipped:
        status = "SKIP"
    elif report.failed:
        status = "FAIL"
    else:
        status = "PASS"
    prev = _CRITERIA.get(number)
    if prev is None or prev[0] == "PASS":
        _CRITERIA[number] = (status, title)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    m = item.get_closest_marker("criterion")
    if m is not None:
        outcome.get_result().criterion = m.args


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        status, title = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {title}")
