"""Buchberger's algorithm and elimination ideals.

The engine works on integer-coefficient dictionaries internally
(fraction-free reduction, primitive parts after every normal form) and
converts back to :class:`MultiPoly` at the boundary.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

from loceq.poly import (
    Monomial,
    MultiPoly,
    PolyError,
    VarRegistry,
    canonicalize,
)


class ResourceLimitExceeded(RuntimeError):
    """The computation exceeded its step or wall-clock budget."""


@dataclass(frozen=True)
class MonomialOrder:
    kind: str = "grlex"
    k: int = 0

    def __post_init__(self):
        if self.kind not in ("lex", "grlex", "block"):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.kind == "block" and self.k < 0:
            raise ValueError("block size must be non-negative")

    @classmethod
    def lex(cls) -> "MonomialOrder":
        return cls("lex")

    @classmethod
    def grlex(cls) -> "MonomialOrder":
        return cls("grlex")

    @classmethod
    def block(cls, k: int) -> "MonomialOrder":
        return cls("block", k)

    def key(self, m: Monomial) -> tuple:
        """Sort key; larger key means larger monomial."""
        if self.kind == "lex":
            return m
        if self.kind == "grlex":
            return (sum(m),) + m
        head, tail = m[: self.k], m[self.k :]
        return (sum(head),) + head + (sum(tail),) + tail

    def compare(self, a: Monomial, b: Monomial) -> int:
        ka, kb = self.key(a), self.key(b)
        return (ka > kb) - (ka < kb)


@dataclass(frozen=True)
class PolySystem:
    generators: tuple[MultiPoly, ...]
    registry: VarRegistry
    order: MonomialOrder = field(default_factory=MonomialOrder.grlex)

    def __post_init__(self):
        gens = []
        for g in self.generators:
            if g.registry.names != self.registry.names:
                raise PolyError("generator registry does not match system registry")
            if not g.is_zero():
                gens.append(canonicalize(g))
        object.__setattr__(self, "generators", tuple(gens))


@dataclass
class Budget:
    """Reduction-step and wall-clock limits shared by one computation."""

    max_steps: int = 1_000_000
    timeout: float | None = None
    steps: int = 0
    started: float = field(default_factory=time.monotonic)

    def tick(self, n: int = 1) -> None:
        self.steps += n
        if self.steps > self.max_steps:
            raise ResourceLimitExceeded(
                f"step budget of {self.max_steps} reduction steps exceeded"
            )
        if self.timeout is not None and (self.steps & 63) == 0:
            self.check_time()

    def check_time(self) -> None:
        if self.timeout is not None and time.monotonic() - self.started > self.timeout:
            raise ResourceLimitExceeded(f"time budget of {self.timeout:g} s exceeded")


# ---------------------------------------------------------------------------
# public single-step operations (exact rational arithmetic)


def leading_term(p: MultiPoly, order: MonomialOrder) -> tuple[Monomial, Fraction]:
    if p.is_zero():
        raise PolyError("zero polynomial has no leading term")
    m = max(p.terms, key=order.key)
    return m, p.terms[m]


def _mono_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _basis_of(basis: PolySystem | Sequence[MultiPoly]) -> tuple[list[MultiPoly], MonomialOrder | None]:
    if isinstance(basis, PolySystem):
        return list(basis.generators), basis.order
    return list(basis), None


def reduce_poly(
    p: MultiPoly,
    basis: PolySystem | Sequence[MultiPoly],
    order: MonomialOrder | None = None,
) -> MultiPoly:
    """Remainder of multivariate division of p by the basis."""
    gens, sys_order = _basis_of(basis)
    order = order or sys_order or MonomialOrder.grlex()
    heads = []
    for g in gens:
        p._check(g)
        if g.is_zero():
            raise PolyError("basis contains the zero polynomial")
        heads.append((g,) + leading_term(g, order))
    rem: dict[Monomial, Fraction] = {}
    work = dict(p.terms)
    while work:
        m = max(work, key=order.key)
        c = work[m]
        for g, lm, lc in heads:
            if _mono_divides(lm, m):
                shift = tuple(a - b for a, b in zip(m, lm))
                q = c / lc
                for gm, gc in g.terms.items():
                    t = tuple(a + b for a, b in zip(gm, shift))
                    v = work.get(t, 0) - q * gc
                    if v:
                        work[t] = v
                    else:
                        work.pop(t, None)
                break
        else:
            rem[m] = c
            del work[m]
    return MultiPoly(p.registry, rem)


def s_polynomial(p: MultiPoly, q: MultiPoly, order: MonomialOrder) -> MultiPoly:
    p._check(q)
    mp, cp = leading_term(p, order)
    mq, cq = leading_term(q, order)
    lcm = tuple(max(a, b) for a, b in zip(mp, mq))
    sp = p.mul_term(tuple(a - b for a, b in zip(lcm, mp)), 1 / cp)
    sq = q.mul_term(tuple(a - b for a, b in zip(lcm, mq)), 1 / cq)
    return sp - sq


# ---------------------------------------------------------------------------
# integer engine


def _primitive(terms: dict[Monomial, int]) -> dict[Monomial, int]:
    g = 0
    for c in terms.values():
        g = math.gcd(g, c)
        if g == 1:
            return terms
    if g > 1:
        return {m: c // g for m, c in terms.items()}
    return terms


def _to_int_terms(p: MultiPoly) -> dict[Monomial, int]:
    den = reduce(math.lcm, (c.denominator for c in p.terms.values()), 1)
    return _primitive({m: int(c * den) for m, c in p.terms.items()})


class _Gen:
    __slots__ = ("terms", "lm", "lc", "deg")

    def __init__(self, terms: dict[Monomial, int], key):
        self.terms = terms
        self.lm = max(terms, key=key)
        self.lc = terms[self.lm]
        self.deg = sum(self.lm)


def _neg_key(key):
    return lambda m: tuple(-x for x in key(m))


def _normal_form(
    f: dict[Monomial, int],
    basis: Sequence[_Gen],
    key,
    budget: Budget,
    tail_only: bool = False,
) -> dict[Monomial, int]:
    """Full reduction of f by basis, scaled by an integer unit; primitive result."""
    f = dict(f)
    rem: dict[Monomial, int] = {}
    nk = _neg_key(key)
    heap = [(nk(m), m) for m in f]
    heapq.heapify(heap)
    skip_first = tail_only
    while heap:
        _, m = heapq.heappop(heap)
        c = f.get(m)
        if c is None:
            continue
        reducer = None
        if not skip_first:
            for g in basis:
                if _mono_divides(g.lm, m):
                    reducer = g
                    break
        skip_first = False
        if reducer is None:
            rem[m] = c
            del f[m]
            continue
        budget.tick()
        a = reducer.lc
        gg = math.gcd(a, c)
        fa, fc = a // gg, c // gg
        if fa < 0:
            fa, fc = -fa, -fc
        if fa != 1:
            for k in f:
                f[k] *= fa
            for k in rem:
                rem[k] *= fa
        shift = tuple(x - y for x, y in zip(m, reducer.lm))
        for gm, gc in reducer.terms.items():
            t = tuple(x + y for x, y in zip(gm, shift))
            old = f.get(t)
            if old is None:
                f[t] = -fc * gc
                heapq.heappush(heap, (nk(t), t))
            else:
                v = old - fc * gc
                if v:
                    f[t] = v
                else:
                    del f[t]
    return _primitive(rem)


def _spoly_int(g1: _Gen, g2: _Gen) -> dict[Monomial, int]:
    lcm = tuple(max(a, b) for a, b in zip(g1.lm, g2.lm))
    gg = math.gcd(g1.lc, g2.lc)
    c1, c2 = g2.lc // gg, g1.lc // gg
    s1 = tuple(a - b for a, b in zip(lcm, g1.lm))
    s2 = tuple(a - b for a, b in zip(lcm, g2.lm))
    out: dict[Monomial, int] = {}
    for m, c in g1.terms.items():
        t = tuple(a + b for a, b in zip(m, s1))
        out[t] = out.get(t, 0) + c * c1
    for m, c in g2.terms.items():
        t = tuple(a + b for a, b in zip(m, s2))
        out[t] = out.get(t, 0) - c * c2
    return {m: c for m, c in out.items() if c}


def _lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def _coprime(a: Monomial, b: Monomial) -> bool:
    return all(not (x and y) for x, y in zip(a, b))


def _is_unit(terms: dict[Monomial, int]) -> bool:
    return len(terms) == 1 and not any(next(iter(terms)))


def _groebner_int(
    polys: Iterable[dict[Monomial, int]], order: MonomialOrder, budget: Budget
) -> list[dict[Monomial, int]]:
    key = order.key
    gens: list[_Gen] = []
    active: list[int] = []
    pairs: set[tuple[int, int]] = set()
    heap: list = []

    def push_pair(i: int, j: int) -> None:
        lcm = _lcm(gens[i].lm, gens[j].lm)
        heapq.heappush(heap, (sum(lcm), key(lcm), i, j))

    def update(h: int) -> None:
        # Gebauer-Moeller installation of Buchberger's two criteria
        hl = gens[h].lm
        cands = list(active)
        kept: list[int] = []
        while cands:
            g = cands.pop(0)
            gl = gens[g].lm
            l = _lcm(hl, gl)
            if _coprime(hl, gl) or not any(
                _mono_divides(_lcm(hl, gens[o].lm), l) for o in cands + kept
            ):
                kept.append(g)
        new_pairs = [(g, h) for g in kept if not _coprime(hl, gens[g].lm)]
        for p in sorted(pairs):
            i, j = p
            l = _lcm(gens[i].lm, gens[j].lm)
            if (
                _mono_divides(hl, l)
                and _lcm(gens[i].lm, hl) != l
                and _lcm(gens[j].lm, hl) != l
            ):
                pairs.discard(p)
        for p in new_pairs:
            pairs.add(p)
            push_pair(*p)
        active[:] = [g for g in active if not _mono_divides(hl, gens[g].lm)]
        active.append(h)

    def add(terms: dict[Monomial, int]) -> bool:
        g = _Gen(terms, key)
        gens.append(g)
        update(len(gens) - 1)
        return _is_unit(terms)

    start = [p for p in polys if p]
    start.sort(key=lambda t: key(max(t, key=key)))
    for p in start:
        h = _normal_form(p, [gens[i] for i in active], key, budget)
        if h:
            if add(h):
                return [h]
    while pairs:
        budget.check_time()
        _, _, i, j = heapq.heappop(heap)
        if (i, j) not in pairs:
            continue
        pairs.discard((i, j))
        s = _spoly_int(gens[i], gens[j])
        if not s:
            continue
        h = _normal_form(s, [gens[k] for k in active], key, budget)
        if h:
            if add(h):
                return [h]
    return _interreduce([gens[i] for i in active], key, budget)


def _interreduce(basis: list[_Gen], key, budget: Budget) -> list[dict[Monomial, int]]:
    basis = sorted(basis, key=lambda g: key(g.lm))
    minimal = []
    for g in basis:
        if not any(_mono_divides(h.lm, g.lm) for h in minimal):
            minimal.append(g)
    out: list[_Gen] = []
    for i, g in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1 :]
        r = _normal_form(g.terms, others, key, budget, tail_only=True)
        out.append(_Gen(r, key))
    out.sort(key=lambda g: key(g.lm), reverse=True)
    return [g.terms for g in out]


def _from_int(terms: dict[Monomial, int], registry: VarRegistry) -> MultiPoly:
    return canonicalize(MultiPoly(registry, terms))


def groebner_basis(
    polys: Sequence[MultiPoly],
    order: MonomialOrder,
    budget: Budget | None = None,
) -> list[MultiPoly]:
    if not polys:
        return []
    registry = polys[0].registry
    budget = budget or Budget()
    ints = [_to_int_terms(p) for p in polys if not p.is_zero()]
    if not ints:
        return []
    result = _groebner_int(ints, order, budget)
    return [_from_int(t, registry) for t in result]


def buchberger(system: PolySystem, budget: Budget | None = None) -> PolySystem:
    """Reduced Groebner basis of the system's ideal, canonicalized generators."""
    if not system.generators:
        raise ValueError("buchberger needs a nonempty system")
    basis = groebner_basis(list(system.generators), system.order, budget)
    return PolySystem(tuple(basis), system.registry, system.order)


def is_groebner(basis: PolySystem) -> bool:
    """Every pairwise S-polynomial reduces to zero."""
    gens = basis.generators
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            s = s_polynomial(gens[i], gens[j], basis.order)
            if not reduce_poly(s, basis).is_zero():
                return False
    return True


# ---------------------------------------------------------------------------
# elimination


def _linear_pivot(p: MultiPoly, candidates: Sequence[int]) -> int | None:
    """Index of a candidate variable occurring in p only as c*v with constant c."""
    for i in candidates:
        occ = [m for m in p.terms if m[i]]
        if len(occ) == 1:
            m = occ[0]
            if m[i] == 1 and sum(m) == 1:
                return i
    return None


def substitute_linear(
    polys: Sequence[MultiPoly], eliminate: Sequence[str]
) -> tuple[list[MultiPoly], list[str]]:
    """Exactly eliminate variables that some generator defines linearly.

    A generator ``c*v - h`` with constant c and v absent from h lets v be
    replaced by h/c everywhere; the elimination ideal is unchanged.
    Returns the remaining generators and the variables still to eliminate.
    """
    if not polys:
        return [], list(eliminate)
    registry = polys[0].registry
    remaining = [registry.index(v) for v in eliminate]
    current = [canonicalize(p) for p in polys if not p.is_zero()]
    progress = True
    while progress and remaining:
        progress = False
        # prefer the sparsest defining generator for a stable, small fill-in
        for p in sorted(current, key=lambda q: (len(q.terms), q.total_degree())):
            i = _linear_pivot(p, remaining)
            if i is None:
                continue
            name = registry.names[i]
            e = [0] * len(registry)
            e[i] = 1
            c = p.terms[tuple(e)]
            value = (MultiPoly.var(registry, name) * c - p) / c
            nxt = []
            for q in current:
                if q is p:
                    continue
                r = q.substitute(name, value) if q.degree_in(name) > 0 else q
                if not r.is_zero():
                    nxt.append(canonicalize(r))
            current = list(dict.fromkeys(nxt))
            remaining.remove(i)
            progress = True
            break
    return current, [registry.names[i] for i in remaining]


def elimination_registry(registry: VarRegistry, keep: Iterable[str]) -> tuple[VarRegistry, int]:
    keep = set(keep)
    for v in keep:
        registry.index(v)
    elim = [n for n in registry.names if n not in keep]
    kept = [n for n in registry.names if n in keep]
    return VarRegistry(elim + kept), len(elim)


def eliminate(
    system: PolySystem | Sequence[MultiPoly],
    keep: Iterable[str],
    budget: Budget | None = None,
    substitute: bool = True,
    staged: bool = False,
    batch: int = 2,
) -> list[MultiPoly]:
    """Groebner basis of the elimination ideal ``I ∩ Q[keep]``.

    Polynomials are returned over a registry holding only the kept
    variables, in their original order. An empty list means the
    elimination ideal is zero.
    """
    gens = list(system.generators) if isinstance(system, PolySystem) else list(system)
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise ValueError("eliminate needs a nonempty system")
    registry = gens[0].registry
    keep = [n for n in registry.names if n in set(keep)]
    missing = set(keep) - set(registry.names)
    if missing:
        raise PolyError(f"unknown variables {sorted(missing)}")
    budget = budget or Budget()
    to_elim = [n for n in registry.names if n not in keep]
    if substitute:
        gens, to_elim = substitute_linear(gens, to_elim)
    # dependent-first: variables created later in the construction go first
    stages = [to_elim]
    if staged and len(to_elim) > batch:
        rev = to_elim[::-1]
        stages = [rev[i : i + batch] for i in range(0, len(rev), batch)]
    current_reg = registry
    for stage in stages:
        if not gens:
            break
        live = [n for n in current_reg.names if n not in stage]
        reg, k = elimination_registry(current_reg, live)
        moved = [g.embed(reg) for g in gens]
        basis = groebner_basis(moved, MonomialOrder.block(k), budget)
        free = [b for b in basis if all(not any(m[:k]) for m in b.terms)]
        current_reg = VarRegistry(live)
        gens = [b.embed(current_reg) for b in free]
        if staged and len(stages) > 1 and substitute:
            gens, _ = substitute_linear(gens, [])
    out_reg = VarRegistry(keep)
    final = [g.embed(out_reg) for g in gens]
    if not final:
        return []
    if len(stages) > 1 or len(final) > 1:
        final = groebner_basis(final, MonomialOrder.grlex(), budget)
    return final
