"""Sparse multivariate polynomials over Q.

Coefficients are :class:`fractions.Fraction` values, monomials are exponent
tuples whose length equals the size of the owning :class:`VarRegistry`.
Values are immutable after construction.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Sequence, Union

Monomial = tuple[int, ...]
Number = Union[int, Fraction]


class PolyError(ValueError):
    """Raised for registry mismatches, unknown variables and zero inputs."""


@dataclass(frozen=True)
class VarRegistry:
    """Ordered variable names. The order is the elimination-order context."""

    names: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise PolyError(f"duplicate variable names in {names}")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise PolyError(f"unknown variable {name!r}") from None

    def var(self, name: str) -> "MultiPoly":
        return MultiPoly.var(self, name)

    def vars(self) -> tuple["MultiPoly", ...]:
        return tuple(MultiPoly.var(self, n) for n in self.names)


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"coefficient must be int or Fraction, got {type(c).__name__}")


class MultiPoly:
    """A polynomial as a map ``exponent tuple -> nonzero Fraction``."""

    __slots__ = ("registry", "terms", "_hash")

    def __init__(self, registry: VarRegistry, terms: Mapping[Monomial, Number] | None = None):
        n = len(registry)
        clean: dict[Monomial, Fraction] = {}
        for mono, c in (terms or {}).items():
            if len(mono) != n:
                raise PolyError(f"monomial {mono} does not match registry of size {n}")
            c = _as_fraction(c)
            if c:
                clean[tuple(mono)] = c
        self.registry = registry
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, registry: VarRegistry, terms: dict) -> "MultiPoly":
        # trusted constructor: terms already canonical
        p = object.__new__(cls)
        p.registry = registry
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, registry: VarRegistry) -> "MultiPoly":
        return cls._raw(registry, {})

    @classmethod
    def const(cls, registry: VarRegistry, c: Number) -> "MultiPoly":
        c = _as_fraction(c)
        return cls._raw(registry, {(0,) * len(registry): c} if c else {})

    @classmethod
    def var(cls, registry: VarRegistry, name: str) -> "MultiPoly":
        e = [0] * len(registry)
        e[registry.index(name)] = 1
        return cls._raw(registry, {tuple(e): Fraction(1)})

    # -- basic queries ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((0,) * len(self.registry), Fraction(0))

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    def degree_in(self, name: str) -> int:
        i = self.registry.index(name)
        if not self.terms:
            return -1
        return max(m[i] for m in self.terms)

    def variables(self) -> set[str]:
        used = set()
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    used.add(self.registry.names[i])
        return used

    def lex_leading(self) -> tuple[Monomial, Fraction]:
        if not self.terms:
            raise PolyError("zero polynomial has no leading term")
        m = max(self.terms)
        return m, self.terms[m]

    def __len__(self) -> int:
        return len(self.terms)

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: "MultiPoly") -> None:
        if self.registry.names != other.registry.names:
            raise PolyError(
                f"registry mismatch: {self.registry.names} vs {other.registry.names}"
            )

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.const(self.registry, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return MultiPoly._raw(self.registry, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._raw(self.registry, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return MultiPoly.zero(self.registry)
            return MultiPoly._raw(self.registry, {m: c * other for m, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return MultiPoly._raw(self.registry, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("polynomial division by zero")
            return self * (1 / Fraction(other))
        return NotImplemented

    def __pow__(self, k: int) -> "MultiPoly":
        if not isinstance(k, int) or k < 0:
            raise PolyError("exponent must be a non-negative integer")
        result = MultiPoly.const(self.registry, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def mul_term(self, mono: Monomial, c: Fraction) -> "MultiPoly":
        return MultiPoly._raw(
            self.registry,
            {tuple(a + b for a, b in zip(m, mono)): v * c for m, v in self.terms.items()},
        )

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.terms == MultiPoly.const(self.registry, other).terms
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.registry.names == other.registry.names and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.registry.names, frozenset(self.terms.items())))
        return self._hash

    # -- evaluation and substitution -------------------------------------

    def evaluate(self, values: Mapping[str, Number] | Sequence[Number]):
        """Evaluate exactly (Fractions in, Fraction out) or in floats."""
        if isinstance(values, Mapping):
            vals = [values[n] for n in self.registry.names]
        else:
            vals = list(values)
        as_float = any(isinstance(v, float) for v in vals)
        total = 0.0 if as_float else Fraction(0)
        for m, c in self.terms.items():
            t = float(c) if as_float else c
            for v, e in zip(vals, m):
                if e:
                    t = t * v**e
            total += t
        return total

    def abs_term_sum(self, values: Sequence[float]) -> float:
        """Sum of |term| at a point; the scale used for relative residuals."""
        s = 0.0
        for m, c in self.terms.items():
            t = abs(float(c))
            for v, e in zip(values, m):
                if e:
                    t *= abs(v) ** e
            s += t
        return s

    def relative_residual(self, values: Sequence[float]) -> float:
        vals = [float(v) for v in values]
        scale = self.abs_term_sum(vals)
        if scale == 0.0:
            return 0.0
        return abs(float(self.evaluate(vals))) / scale

    def substitute(self, name: str, value: "MultiPoly | Number") -> "MultiPoly":
        """Replace variable ``name`` by a polynomial (same registry) or a number."""
        i = self.registry.index(name)
        if not isinstance(value, MultiPoly):
            value = MultiPoly.const(self.registry, value)
        self._check(value)
        by_power: dict[int, dict[Monomial, Fraction]] = {}
        for m, c in self.terms.items():
            k = m[i]
            rest = m[:i] + (0,) + m[i + 1 :]
            by_power.setdefault(k, {})[rest] = c
        out = MultiPoly.zero(self.registry)
        powers = {0: MultiPoly.const(self.registry, 1)}
        for k in sorted(by_power):
            if k not in powers:
                powers[k] = value ** k
            out = out + MultiPoly._raw(self.registry, by_power[k]) * powers[k]
        return out

    def embed(self, registry: VarRegistry, rename: Mapping[str, str] | None = None) -> "MultiPoly":
        """Move to another registry; every used variable must exist there."""
        rename = rename or {}
        target = []
        for n in self.registry.names:
            target.append(registry._index.get(rename.get(n, n)))
        out = {}
        for m, c in self.terms.items():
            e = [0] * len(registry)
            for src, k in enumerate(m):
                if k:
                    j = target[src]
                    if j is None:
                        raise PolyError(
                            f"variable {self.registry.names[src]!r} missing from target registry"
                        )
                    e[j] += k
            out[tuple(e)] = c
        return MultiPoly._raw(registry, out)

    def coefficients_in(self, name: str) -> dict[int, "MultiPoly"]:
        """View as a univariate polynomial in ``name``: power -> coefficient."""
        i = self.registry.index(name)
        parts: dict[int, dict] = {}
        for m, c in self.terms.items():
            parts.setdefault(m[i], {})[m[:i] + (0,) + m[i + 1 :]] = c
        return {k: MultiPoly._raw(self.registry, t) for k, t in parts.items()}

    # -- text -------------------------------------------------------------

    def to_string(self) -> str:
        return format_poly(self)

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"MultiPoly({format_poly(self)!r})"


# ---------------------------------------------------------------------------
# functional API


def add(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    p._check(q)
    return p + q


def mul(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    p._check(q)
    return p * q


def partial_derivative(p: MultiPoly, v: str) -> MultiPoly:
    i = p.registry.index(v)
    out = {}
    for m, c in p.terms.items():
        k = m[i]
        if k:
            out[m[:i] + (k - 1,) + m[i + 1 :]] = c * k
    return MultiPoly._raw(p.registry, out)


def integer_content(p: MultiPoly) -> Fraction:
    """Positive rational c with p / c integral and primitive."""
    if p.is_zero():
        raise PolyError("zero polynomial has no content")
    den = reduce(math.lcm, (c.denominator for c in p.terms.values()), 1)
    num = reduce(math.gcd, (int(c * den) for c in p.terms.values()), 0)
    return Fraction(abs(num), den)


def canonicalize(p: MultiPoly) -> MultiPoly:
    """Integer, primitive, and positive on the lexicographically greatest monomial."""
    if p.is_zero():
        raise PolyError("cannot canonicalize the zero polynomial")
    c = integer_content(p)
    if p.terms[max(p.terms)] < 0:
        c = -c
    return MultiPoly._raw(p.registry, {m: v / c for m, v in p.terms.items()})


def is_canonical(p: MultiPoly) -> bool:
    return not p.is_zero() and canonicalize(p) == p


def _divides_mono(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def divides(p: MultiPoly, q: MultiPoly) -> tuple[bool, MultiPoly | None]:
    """Exact divisibility test; returns ``(True, h)`` with ``q == p * h`` when it holds."""
    p._check(q)
    if p.is_zero():
        raise PolyError("division by the zero polynomial")
    lm, lc = p.lex_leading()
    rem = dict(q.terms)
    quot: dict[Monomial, Fraction] = {}
    p_terms = list(p.terms.items())
    while rem:
        m = max(rem)
        if not _divides_mono(lm, m):
            return False, None
        shift = tuple(a - b for a, b in zip(m, lm))
        c = rem[m] / lc
        quot[shift] = c
        for pm, pc in p_terms:
            t = tuple(a + b for a, b in zip(pm, shift))
            v = rem.get(t, 0) - c * pc
            if v:
                rem[t] = v
            else:
                rem.pop(t, None)
    return True, MultiPoly._raw(q.registry, quot)


def exact_quotient(q: MultiPoly, p: MultiPoly) -> MultiPoly:
    ok, h = divides(p, q)
    if not ok:
        raise PolyError(f"{p} does not divide {q}")
    return h


def pseudo_remainder(a: MultiPoly, b: MultiPoly, v: str) -> MultiPoly:
    """lc_v(b)^(deg_v a - deg_v b + 1) * a reduced modulo b as polynomials in v."""
    db = b.degree_in(v)
    if db < 0:
        raise PolyError("pseudo-division by zero")
    x = MultiPoly.var(a.registry, v)
    lcb = b.coefficients_in(v)[db]
    r = a
    e = a.degree_in(v) - db + 1
    if e <= 0:
        return a
    while not r.is_zero() and r.degree_in(v) >= db:
        dr = r.degree_in(v)
        lcr = r.coefficients_in(v)[dr]
        r = r * lcb - lcr * b * x ** (dr - db)
        e -= 1
    return r * lcb**e if e > 0 else r


def _main_variable(*polys: MultiPoly) -> str | None:
    used = set()
    for p in polys:
        used |= p.variables()
    if not used:
        return None
    names = polys[0].registry.names
    return max(used, key=names.index)


def content_in(p: MultiPoly, v: str) -> MultiPoly:
    """gcd of the coefficients of p viewed as a polynomial in v (canonical)."""
    return reduce(gcd, p.coefficients_in(v).values(), MultiPoly.zero(p.registry))


def gcd(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    """Greatest common divisor over Q, canonicalized; gcd(0, 0) = 0.

    Recursive primitive pseudo-remainder sequence on the highest variable.
    """
    p._check(q)
    if p.is_zero():
        return canonicalize(q) if not q.is_zero() else q
    if q.is_zero():
        return canonicalize(p)
    v = _main_variable(p, q)
    if v is None:
        return MultiPoly.const(p.registry, 1)
    if p.degree_in(v) <= 0:
        return gcd(p, content_in(q, v))
    if q.degree_in(v) <= 0:
        return gcd(content_in(p, v), q)
    cp, cq = content_in(p, v), content_in(q, v)
    a, b = exact_quotient(p, cp), exact_quotient(q, cq)
    if a.degree_in(v) < b.degree_in(v):
        a, b = b, a
    while True:
        r = pseudo_remainder(a, b, v)
        if r.is_zero():
            g = exact_quotient(b, content_in(b, v))
            break
        if r.degree_in(v) == 0:
            g = MultiPoly.const(p.registry, 1)
            break
        a, b = b, exact_quotient(r, content_in(r, v))
    return canonicalize(g * gcd(cp, cq))


def squarefree_part(p: MultiPoly, v: str | None = None) -> MultiPoly:
    """Canonical squarefree part.

    With ``v`` given, the part of p that is primitive in v is reduced as
    ``p / gcd(p, dp/dv)``; the content in v (factors free of v) is reduced
    recursively so no factor is lost. Without ``v`` every variable is used.
    """
    if p.is_zero():
        raise PolyError("zero polynomial has no squarefree part")
    if p.is_constant():
        return MultiPoly.const(p.registry, 1)
    if v is None:
        g = p
        for name in p.variables():
            g = gcd(g, partial_derivative(p, name))
        return canonicalize(exact_quotient(p, g))
    p.registry.index(v)
    if p.degree_in(v) <= 0:
        return squarefree_part(p)
    c = content_in(p, v)
    pp = exact_quotient(p, c)
    core = exact_quotient(pp, gcd(pp, partial_derivative(pp, v)))
    if c.is_constant():
        return canonicalize(core)
    return canonicalize(core * squarefree_part(c))


def product(polys: Iterable[MultiPoly], registry: VarRegistry) -> MultiPoly:
    return reduce(lambda a, b: a * b, polys, MultiPoly.const(registry, 1))


# ---------------------------------------------------------------------------
# text format


def _fmt_coeff(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def format_poly(p: MultiPoly) -> str:
    """Terms in descending lex order, e.g. ``x^2 - 6x + y^2 - 4y + 9``."""
    if p.is_zero():
        return "0"
    names = p.registry.names
    sep = "" if all(len(n) == 1 for n in names) else "*"
    parts = []
    for m in sorted(p.terms, reverse=True):
        c = p.terms[m]
        factors = []
        for n, e in zip(names, m):
            if e == 1:
                factors.append(n)
            elif e > 1:
                factors.append(f"{n}^{e}")
        mono = sep.join(factors)
        a = abs(c)
        if not mono:
            body = _fmt_coeff(a)
        elif a == 1:
            body = mono
        elif a.denominator != 1:
            body = f"{_fmt_coeff(a)}*{mono}"
        else:
            body = f"{_fmt_coeff(a)}{sep}{mono}"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<id>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>[-+*/^()=]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolyError(f"unexpected character {text[pos:].strip()[:1]!r} at {pos}")
        kind = m.lastgroup
        toks.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return toks


class _PolyParser:
    def __init__(self, text: str, registry: VarRegistry | None):
        self.toks = _tokenize(text)
        self.i = 0
        self.open = registry is None
        self.names: list[str] = list(registry.names) if registry else []
        self.registry = registry

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, -1)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            raise PolyError(f"expected {value or 'token'} at position {tok[2]}")
        self.i += 1
        return tok

    # Expressions are built as {monomial-dict: Fraction} keyed by variable
    # name so the registry can grow while parsing in open mode.
    def resolve(self, ident: str) -> list[str]:
        if ident in self.names:
            return [ident]
        if not self.open:
            split = self.split(ident)
            if split is None:
                raise PolyError(f"unknown variable {ident!r}")
            return split
        self.names.append(ident)
        return [ident]

    def split(self, ident: str) -> list[str] | None:
        if not ident:
            return []
        for n in sorted(self.names, key=len, reverse=True):
            if ident.startswith(n):
                rest = self.split(ident[len(n) :])
                if rest is not None:
                    return [n] + rest
        return None

    def expr(self):
        sign = 1
        if self.peek()[1] in ("+", "-"):
            sign = -1 if self.take()[1] == "-" else 1
        acc = _scale(self.term(), sign)
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            acc = _padd(acc, _scale(self.term(), -1 if op == "-" else 1))
        return acc

    def term(self):
        acc = self.factor()
        while True:
            kind, val, _ = self.peek()
            if val == "*":
                self.take()
                acc = _pmul(acc, self.factor())
            elif val == "/":
                self.take()
                d = self.factor()
                if set(d) - {frozenset()}:
                    raise PolyError("division by a non-constant")
                c = d.get(frozenset(), Fraction(0))
                if not c:
                    raise PolyError("division by zero")
                acc = _scale(acc, 1 / c)
            elif kind == "id" or val == "(":
                acc = _pmul(acc, self.factor())
            else:
                return acc

    def factor(self):
        # in juxtaposed names like "yz^2" the exponent binds to the last name only
        head, base = self.base()
        if self.peek()[1] == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "num" or not val.isdigit():
                raise PolyError(f"exponent must be a non-negative integer at {pos}")
            out = {frozenset(): Fraction(1)}
            for _ in range(int(val)):
                out = _pmul(out, base)
            base = out
        return _pmul(head, base)

    def base(self):
        """(cofactor, powered part) of the next primary."""
        one = {frozenset(): Fraction(1)}
        kind, val, pos = self.take()
        if kind == "num":
            return one, {frozenset(): Fraction(val)}
        if kind == "id":
            names = self.resolve(val)
            head = one
            for n in names[:-1]:
                head = _pmul(head, {frozenset({(n, 1)}): Fraction(1)})
            return head, {frozenset({(names[-1], 1)}): Fraction(1)}
        if val == "(":
            e = self.expr()
            self.take(")")
            return one, e
        raise PolyError(f"unexpected {val!r} at position {pos}")


def _scale(a, c):
    return {m: v * c for m, v in a.items() if v * c}


def _padd(a, b):
    out = dict(a)
    for m, v in b.items():
        s = out.get(m, 0) + v
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    return out


def _pmul(a, b):
    out: dict = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            d = dict(m1)
            for n, e in m2:
                d[n] = d.get(n, 0) + e
            m = frozenset(d.items())
            out[m] = out.get(m, 0) + c1 * c2
    return {m: c for m, c in out.items() if c}


def parse_poly(text: str, registry: VarRegistry | None = None) -> MultiPoly:
    """Parse polynomial text. ``lhs = rhs`` yields ``lhs - rhs``.

    With a registry, juxtaposed names such as ``xy`` are split into known
    variables. Without one, each identifier is a variable, in order of
    first appearance.
    """
    parser = _PolyParser(text, registry)
    val = parser.expr()
    if parser.peek()[1] == "=":
        parser.take()
        val = _padd(val, _scale(parser.expr(), -1))
    if parser.peek()[0] is not None:
        raise PolyError(f"trailing input at position {parser.peek()[2]}")
    reg = registry or VarRegistry(parser.names)
    out = {}
    for m, c in val.items():
        e = [0] * len(reg)
        for n, k in m:
            e[reg.index(n)] += k
        out[tuple(e)] = c
    return MultiPoly(reg, out)
