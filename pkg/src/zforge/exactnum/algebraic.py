"""Algebraic numbers as (primitive minimal polynomial, isolated root)."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import poly
from .enclosure import Ball, RealEnclosure, UndecidableError, log_enclosure, round_up, sqrt_lower
from .rational import GaussianRational, frac_str, parse_frac, parse_gaussian

REFINE_CAP_BITS = 1 << 16


class AmbiguousRootError(ValueError):
    pass


class _RootCache:
    """Isolating disks for every root of one irreducible polynomial.

    Disks only ever shrink; the cache is an implementation detail of value
    objects that are otherwise immutable.
    """

    def __init__(self, minpoly: tuple[int, ...]):
        self.minpoly = minpoly
        self._lock = threading.Lock()
        isolated = poly.isolate_roots(minpoly)
        self.disks = [b for b, _ in isolated]
        self.real = [r for _, r in isolated]

    def disk(self, k: int, bits: int | None = None) -> Ball:
        if bits is None:
            return self.disks[k]
        target = Fraction(1, 1 << bits) if bits >= 0 else Fraction(1 << -bits)
        d = self.disks[k]
        if d.rad > target:
            d = poly.refine_root(self.minpoly, d, bits, self.real[k])
            with self._lock:
                if d.rad < self.disks[k].rad:
                    self.disks[k] = d
        return d


_CACHES: dict[tuple[int, ...], _RootCache] = {}
_CACHES_LOCK = threading.Lock()


def _cache_for(minpoly: tuple[int, ...]) -> _RootCache:
    # memo of immutable facts (isolating disks only shrink); keyed by polynomial
    with _CACHES_LOCK:
        c = _CACHES.get(minpoly)
    if c is None:
        c = _RootCache(minpoly)
        with _CACHES_LOCK:
            c = _CACHES.setdefault(minpoly, c)
    return c


@dataclass(frozen=True)
class AlgebraicNumber:
    minpoly: tuple[int, ...]
    index: int
    _cache: _RootCache = field(compare=False, repr=False, hash=False, default=None)

    def __post_init__(self):
        if self._cache is None:
            object.__setattr__(self, "_cache", _cache_for(self.minpoly))

    # -- constructors ------------------------------------------------------
    @classmethod
    def roots_of(cls, minpoly: Sequence[int]) -> list["AlgebraicNumber"]:
        mp = tuple(poly.primitive_part(minpoly))
        cache = _cache_for(mp)
        return [cls(mp, k, cache) for k in range(len(cache.disks))]

    @classmethod
    def from_rational(cls, q) -> "AlgebraicNumber":
        q = Fraction(q)
        return cls((-q.numerator, q.denominator), 0)

    @classmethod
    def from_gaussian(cls, g) -> "AlgebraicNumber":
        g = parse_gaussian(g)
        if g.im == 0:
            return cls.from_rational(g.re)
        # (x - a)^2 + b^2
        coeffs = poly.clear_denominators([g.re ** 2 + g.im ** 2, -2 * g.re, Fraction(1)])
        return make_algebraic(coeffs, g, abs(g.im) / 2)

    @classmethod
    def i(cls) -> "AlgebraicNumber":
        return cls.from_gaussian(GaussianRational(0, 1))

    # -- basic data ----------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1

    @property
    def height_H(self) -> int:
        return poly.height(self.minpoly)

    @property
    def leading(self) -> int:
        return self.minpoly[-1]

    @property
    def is_real(self) -> bool:
        return self._cache.real[self.index]

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    def rational_value(self) -> Fraction:
        if self.degree != 1:
            raise ValueError("not rational")
        return Fraction(-self.minpoly[0], self.minpoly[1])

    def gaussian_value(self) -> GaussianRational | None:
        """Exact value when the number lies in Q(i), else None."""
        if self.degree == 1:
            return GaussianRational(self.rational_value())
        if self.degree == 2 and not self.is_real:
            c, b, a = self.minpoly
            re = Fraction(-b, 2 * a)
            im2 = Fraction(c, a) - re * re
            num, den = im2.numerator, im2.denominator
            import math
            rn, rd = math.isqrt(num), math.isqrt(den)
            if rn * rn == num and rd * rd == den:
                im = Fraction(rn, rd)
                return GaussianRational(re, im if self.ball(8).im > 0 else -im)
        return None

    def ball(self, bits: int | None = None) -> Ball:
        return self._cache.disk(self.index, bits)

    def conjugates(self) -> list["AlgebraicNumber"]:
        return [AlgebraicNumber(self.minpoly, k, self._cache) for k in range(self.degree)]

    def conjugate(self) -> "AlgebraicNumber":
        """Complex conjugate (same minimal polynomial)."""
        if self.is_real:
            return self
        bits = 16
        while bits <= REFINE_CAP_BITS:
            mine = self.ball(bits).conj()
            hits = [k for k in range(self.degree)
                    if k != self.index and not self._cache.real[k]
                    and self._cache.disk(k, bits).overlaps(mine)]
            if len(hits) == 1:
                return AlgebraicNumber(self.minpoly, hits[0], self._cache)
            bits *= 2
        raise UndecidableError("conjugate root not separated")

    def is_zero(self) -> bool:
        return self.minpoly == (0, 1)

    def abs_enclosure(self, bits: int = 64) -> RealEnclosure:
        return self.ball(bits).abs_enclosure()

    def __str__(self):
        g = self.gaussian_value()
        if g is not None:
            return str(g)
        b = self.ball()
        return f"root of {list(self.minpoly)} near {float(b.re):.6g}{float(b.im):+.6g}i"

    def to_json(self) -> dict:
        b = self.ball(64)
        re, im = round_up(b.re, 48), round_up(b.im, 48)
        rad = round_up(b.rad + abs(re - b.re) + abs(im - b.im), 24)
        return {"minpoly": list(self.minpoly),
                "approx": {"re": frac_str(re), "im": frac_str(im)},
                "radius": frac_str(max(rad, Fraction(1, 1 << 60)))}

    @classmethod
    def from_json(cls, rec) -> "AlgebraicNumber":
        if not isinstance(rec, dict) or "minpoly" not in rec:
            return cls.from_gaussian(parse_gaussian(rec))
        approx = rec.get("approx", {"re": "0", "im": "0"})
        if isinstance(approx, dict):
            approx = GaussianRational(parse_frac(approx.get("re", 0)), parse_frac(approx.get("im", 0)))
        else:
            approx = parse_gaussian(str(approx))
        return make_algebraic(rec["minpoly"], approx, parse_frac(rec.get("radius", "1")))


def make_algebraic(minpoly: Sequence[int], approx, radius) -> AlgebraicNumber:
    """The unique root of ``minpoly`` inside the closed disk (approx, radius).

    Reducible inputs are factored over Z and the irreducible factor owning
    that root is kept.
    """
    if not any(int(c) for c in minpoly):
        raise ValueError("zero polynomial")
    approx = parse_gaussian(approx)
    target = Ball(approx.re, approx.im, Fraction(radius))
    if target.rad <= 0:
        raise ValueError("radius must be positive")
    candidates = [r for f in poly.factor(minpoly) for r in AlgebraicNumber.roots_of(f)]
    bits = 16
    while bits <= 4096:
        inside, unknown = [], 0
        for r in candidates:
            d = r.ball(bits)
            if d.inside(target):
                inside.append(r)
            elif d.overlaps(target):
                unknown += 1
        if unknown == 0:
            if len(inside) == 1:
                return inside[0]
            if not inside:
                raise ValueError("no root of the polynomial in the given disk")
            raise AmbiguousRootError(f"{len(inside)} roots in the given disk")
        bits *= 2
    raise AmbiguousRootError("root selection undecided at refinement cap")


# --------------------------------------------------------------------------
# heights

def height_H(a: AlgebraicNumber) -> int:
    return a.height_H


def log_height_h(a: AlgebraicNumber, width=Fraction(1, 1 << 40)) -> RealEnclosure:
    """Enclosure of the absolute logarithmic height, narrower than ``width``."""
    width = Fraction(width)
    d = a.degree
    lead = log_enclosure(abs(a.leading), prec=200)
    bits = 32
    while bits <= REFINE_CAP_BITS:
        total = lead
        for c in a.conjugates():
            absr = c.ball(bits).abs_enclosure()
            if absr.hi <= 1:
                continue
            total = total + log_enclosure(max(Fraction(1), absr.lo), absr.hi, prec=bits + 40)
        h = RealEnclosure(total.lo / d, total.hi / d)
        if h.width <= width:
            return h
        bits *= 2
    raise UndecidableError("height enclosure did not reach requested width")


def conversion_bounds(a: AlgebraicNumber) -> tuple[RealEnclosure, RealEnclosure]:
    """Enclosures of (1/d) log H - log 2 and (1/d) log H + (1/2d) log(d+1)."""
    d = a.degree
    lh = log_enclosure(a.height_H, prec=200)
    lower = lh * Fraction(1, d) - log_enclosure(2, prec=200)
    upper = lh * Fraction(1, d) + log_enclosure(d + 1, prec=200) * Fraction(1, 2 * d)
    return lower, upper


def check_conversion(a: AlgebraicNumber, width=Fraction(1, 1 << 40)) -> bool:
    h = log_height_h(a, width)
    lower, upper = conversion_bounds(a)
    return lower.hi <= h.lo and h.hi <= upper.lo


# --------------------------------------------------------------------------
# Liouville-type separation

def bombieri_lower_bound(a1: AlgebraicNumber, a2: AlgebraicNumber) -> Fraction:
    """(4 n1 n2)^(-3 n1 n2) H1^(-n2) H2^(-n1) for distinct a1, a2."""
    if a1 == a2:
        raise ValueError("bound requires distinct algebraic numbers")
    n1, n2 = a1.degree, a2.degree
    m = n1 * n2
    return Fraction(1, (4 * m) ** (3 * m) * a1.height_H ** n2 * a2.height_H ** n1)


def distance_lower(a1: AlgebraicNumber, a2: AlgebraicNumber, bits: int) -> Fraction:
    b1, b2 = a1.ball(bits), a2.ball(bits)
    dr, di = b1.re - b2.re, b1.im - b2.im
    return max(Fraction(0), sqrt_lower(dr * dr + di * di, bits + 16) - b1.rad - b2.rad)


def certify_separation(a1: AlgebraicNumber, a2: AlgebraicNumber, bound: Fraction) -> Fraction:
    """Refine until |a1 - a2| > bound is proved; return the certified lower bound."""
    if a1 == a2:
        raise ValueError("equal inputs")
    bits = 32
    while bits <= REFINE_CAP_BITS:
        lo = distance_lower(a1, a2, bits)
        if lo > bound:
            return lo
        bits *= 2
    raise UndecidableError("separation not certified at refinement cap")
