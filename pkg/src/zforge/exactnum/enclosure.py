"""Rigorous real and complex enclosures with rational endpoints.

Every endpoint is an exact ``Fraction``.  Rounding only ever happens
outward: lower bounds are rounded down and upper bounds up, so each
enclosure is guaranteed to contain the value it describes.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from mpmath.ctx_iv import MPIntervalContext

Number = Union[int, Fraction]

# Private interval context so callers' mpmath precision is never touched.
_IV = MPIntervalContext()
_IV_LOCK = threading.RLock()

LOG2_UPPER = Fraction(6931471805599453094172321215, 10**28) + Fraction(1, 10**27)
LOG2_LOWER = Fraction(6931471805599453094172321214, 10**28)


class UndecidableError(ArithmeticError):
    """A comparison could not be resolved before the refinement cap."""


def floor_div_pow2(q: Fraction, bits: int) -> Fraction:
    return Fraction(math.floor(q * (1 << bits)), 1 << bits) if bits >= 0 else Fraction(
        math.floor(q / (1 << -bits)) * (1 << -bits))


def ceil_div_pow2(q: Fraction, bits: int) -> Fraction:
    return -floor_div_pow2(-q, bits)


def _exponent(q: Fraction) -> int:
    """floor(log2 |q|) for q != 0 (exact)."""
    n, d = abs(q.numerator), q.denominator
    e = n.bit_length() - d.bit_length()
    if (n << max(0, -e)) < (d << max(0, e)):
        e -= 1
    return e


def round_sig(q: Fraction, prec: int) -> tuple[Fraction, Fraction]:
    """Round q to ``prec`` significant bits; return (rounded, error bound)."""
    if q == 0:
        return q, Fraction(0)
    shift = prec - _exponent(q)
    scaled = q * (Fraction(1 << shift) if shift >= 0 else Fraction(1, 1 << -shift))
    if scaled.denominator == 1:
        return q, Fraction(0)
    r = round(scaled)
    out = Fraction(r) / (Fraction(1 << shift) if shift >= 0 else Fraction(1, 1 << -shift))
    return out, abs(out - q)


def round_up(q: Fraction, prec: int = 40) -> Fraction:
    """Upper bound of q with at most ``prec`` significant bits."""
    r, _ = round_sig(q, prec)
    if r >= q:
        return r
    return r + Fraction(2) ** (_exponent(q) - prec + 1)


def round_down(q: Fraction, prec: int = 40) -> Fraction:
    return -round_up(-q, prec)


def sqrt_upper(q: Fraction, prec: int = 64) -> Fraction:
    if q <= 0:
        return Fraction(0)
    n, d = q.numerator, q.denominator
    k = max(0, prec - (n * d).bit_length() // 2 + 2)
    s = math.isqrt(n * d << (2 * k))
    if s * s != n * d << (2 * k):
        s += 1
    return Fraction(s, d << k)


def sqrt_lower(q: Fraction, prec: int = 64) -> Fraction:
    if q <= 0:
        return Fraction(0)
    n, d = q.numerator, q.denominator
    k = max(0, prec - (n * d).bit_length() // 2 + 2)
    return Fraction(math.isqrt(n * d << (2 * k)), d << k)


# --------------------------------------------------------------------------
# mpmath interval bridge

def _raw_to_fraction(raw) -> Fraction:
    sign, man, exp, _ = raw
    if man == 0:
        if exp != 0:
            raise ArithmeticError("non-finite interval endpoint")
        return Fraction(0)
    v = Fraction(int(man)) * (Fraction(2) ** exp)
    return -v if sign else v


def _to_iv(lo: Fraction, hi: Fraction):
    a = _IV.mpf(lo.numerator) / _IV.mpf(lo.denominator)
    b = _IV.mpf(hi.numerator) / _IV.mpf(hi.denominator)
    return _IV.make_mpf((a._mpi_[0], b._mpi_[1]))


def _from_iv(x) -> tuple[Fraction, Fraction]:
    lo, hi = x._mpi_
    return _raw_to_fraction(lo), _raw_to_fraction(hi)


def iv_apply(fn_name: str, lo: Number, hi: Number, prec: int = 96) -> tuple[Fraction, Fraction]:
    """Enclosure of the image of [lo, hi] under a monotone mpmath.iv function."""
    with _IV_LOCK:
        old = _IV.prec
        _IV.prec = prec
        try:
            x = _to_iv(Fraction(lo), Fraction(hi))
            return _from_iv(getattr(_IV, fn_name)(x))
        finally:
            _IV.prec = old


def log_enclosure(lo: Number, hi: Number | None = None, prec: int = 96) -> "RealEnclosure":
    lo = Fraction(lo)
    hi = lo if hi is None else Fraction(hi)
    if lo <= 0:
        raise ValueError("log of a non-positive enclosure")
    if lo == hi == 1:
        return RealEnclosure(Fraction(0), Fraction(0))
    a, b = iv_apply("log", lo, hi, prec)
    return RealEnclosure(a, b)


def exp_enclosure(lo: Number, hi: Number | None = None, prec: int = 96) -> "RealEnclosure":
    lo = Fraction(lo)
    hi = lo if hi is None else Fraction(hi)
    if lo == hi == 0:
        return RealEnclosure(Fraction(1), Fraction(1))
    a, b = iv_apply("exp", lo, hi, prec)
    return RealEnclosure(a, b)


def log_upper(q: Number, prec: int = 96) -> Fraction:
    return log_enclosure(q, prec=prec).hi


def log_lower(q: Number, prec: int = 96) -> Fraction:
    return log_enclosure(q, prec=prec).lo


# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RealEnclosure:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty enclosure [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, q: Number) -> "RealEnclosure":
        return cls(Fraction(q), Fraction(q))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __add__(self, other):
        if not isinstance(other, RealEnclosure):
            other = RealEnclosure.point(other)
        return RealEnclosure(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return RealEnclosure(-self.hi, -self.lo)

    def __sub__(self, other):
        if not isinstance(other, RealEnclosure):
            other = RealEnclosure.point(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, RealEnclosure):
            other = RealEnclosure.point(other)
        ps = [self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi]
        return RealEnclosure(min(ps), max(ps))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, RealEnclosure):
            other = RealEnclosure.point(other)
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("enclosure straddles zero")
        return self * RealEnclosure(1 / other.hi, 1 / other.lo)

    def contains(self, q: Number) -> bool:
        return self.lo <= q <= self.hi

    def overlaps(self, other: "RealEnclosure") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def certainly_lt(self, other) -> bool:
        other_lo = other.lo if isinstance(other, RealEnclosure) else Fraction(other)
        return self.hi < other_lo

    def certainly_le(self, other) -> bool:
        other_lo = other.lo if isinstance(other, RealEnclosure) else Fraction(other)
        return self.hi <= other_lo

    def coarsen(self, prec: int = 64) -> "RealEnclosure":
        return RealEnclosure(round_down(self.lo, prec), round_up(self.hi, prec))


# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Ball:
    """Closed complex disk ``{w : |w - (re + i im)| <= rad}``."""

    re: Fraction
    im: Fraction
    rad: Fraction = Fraction(0)

    @classmethod
    def exact(cls, re: Number, im: Number = 0) -> "Ball":
        return cls(Fraction(re), Fraction(im), Fraction(0))

    def center_abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def abs_upper(self) -> Fraction:
        return sqrt_upper(self.center_abs2()) + self.rad

    def abs_lower(self) -> Fraction:
        return max(Fraction(0), sqrt_lower(self.center_abs2()) - self.rad)

    def abs_enclosure(self) -> RealEnclosure:
        return RealEnclosure(self.abs_lower(), self.abs_upper())

    def real_part(self) -> RealEnclosure:
        return RealEnclosure(self.re - self.rad, self.re + self.rad)

    def imag_part(self) -> RealEnclosure:
        return RealEnclosure(self.im - self.rad, self.im + self.rad)

    def rounded(self, prec: int) -> "Ball":
        re, e1 = round_sig(self.re, prec)
        im, e2 = round_sig(self.im, prec)
        rad = self.rad + e1 + e2
        if rad:
            rad = round_up(rad, 32)
        return Ball(re, im, rad)

    def __add__(self, other):
        other = _as_ball(other)
        return Ball(self.re + other.re, self.im + other.im, self.rad + other.rad)

    __radd__ = __add__

    def __neg__(self):
        return Ball(-self.re, -self.im, self.rad)

    def __sub__(self, other):
        return self + (-_as_ball(other))

    def __rsub__(self, other):
        return _as_ball(other) - self

    def __mul__(self, other):
        other = _as_ball(other)
        re = self.re * other.re - self.im * other.im
        im = self.re * other.im + self.im * other.re
        rad = Fraction(0)
        if self.rad or other.rad:
            a1 = sqrt_upper(self.center_abs2(), 32)
            a2 = sqrt_upper(other.center_abs2(), 32)
            rad = a1 * other.rad + a2 * self.rad + self.rad * other.rad
        return Ball(re, im, rad)

    __rmul__ = __mul__

    def inverse(self) -> "Ball":
        n2 = self.center_abs2()
        if n2 == 0:
            raise ZeroDivisionError("ball centred at zero")
        if self.rad == 0:
            return Ball(self.re / n2, -self.im / n2)
        a_lo = sqrt_lower(n2, 64)
        if a_lo <= self.rad:
            raise ZeroDivisionError("ball contains zero")
        return Ball(self.re / n2, -self.im / n2, self.rad / (a_lo * (a_lo - self.rad)))

    def __truediv__(self, other):
        return self * _as_ball(other).inverse()

    def __rtruediv__(self, other):
        return _as_ball(other) * self.inverse()

    def __pow__(self, n: int) -> "Ball":
        if n < 0:
            return self.inverse() ** (-n)
        out, base = Ball(Fraction(1), Fraction(0)), self
        while n:
            if n & 1:
                out = (out * base).rounded(160)
            n >>= 1
            if n:
                base = (base * base).rounded(160)
        return out

    def conj(self) -> "Ball":
        return Ball(self.re, -self.im, self.rad)

    def contains_point(self, re: Number, im: Number = 0) -> bool:
        dr, di = Fraction(re) - self.re, Fraction(im) - self.im
        return dr * dr + di * di <= self.rad * self.rad

    def overlaps(self, other: "Ball") -> bool:
        dr, di = self.re - other.re, self.im - other.im
        s = self.rad + other.rad
        return dr * dr + di * di <= s * s

    def inside(self, other: "Ball") -> bool:
        """True when this disk is certainly contained in ``other``."""
        if other.rad < self.rad:
            return False
        dr, di = self.re - other.re, self.im - other.im
        s = other.rad - self.rad
        return dr * dr + di * di <= s * s


def _as_ball(x) -> Ball:
    if isinstance(x, Ball):
        return x
    if isinstance(x, (int, Fraction)):
        return Ball(Fraction(x), Fraction(0))
    re = getattr(x, "re", None)
    if re is not None:
        return Ball(Fraction(x.re), Fraction(x.im))
    raise TypeError(f"cannot coerce {type(x).__name__} to Ball")
