"""Digit expansions of Lemma 3 in a base α with 0 < |α| < 1.

Real bases use the greedy 1/α-expansion; non-real bases use the
interleaved expansion  β = Σ b_k α^(2k) + Σ c_k α^(2k+1)  obtained by
repeatedly writing the residual as x + yα with real x, y.

A target is either an exact field element or an enclosure oracle
``bits -> Ball`` (used by the Gaussian steering construction, where the
target involves the value of an infinite series).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

from .exactnum import (AlgebraicNumber, Ball, FieldElement, NumberField, UndecidableError, floor_real,
                       from_generators, parse_gaussian)
from .exactnum.enclosure import round_up

Oracle = Callable[[int], Ball]
MAX_ORACLE_BITS = 1 << 16


class BaseError(ValueError):
    pass


@dataclass(frozen=True)
class BaseContext:
    alpha: FieldElement            # the base actually used (α² for negative real α)
    original: FieldElement
    squared: bool
    is_real: bool
    K: Fraction | None
    digit_bound: Fraction
    abs2_upper: Fraction           # rational upper bound for |alpha|^2

    @property
    def field(self) -> NumberField:
        return self.alpha.field

    def to_json(self) -> dict:
        out = {"is_real": self.is_real, "squared": self.squared,
               "digit_bound": f"{self.digit_bound.numerator}/{self.digit_bound.denominator}"}
        if self.K is not None:
            out["K"] = f"{self.K.numerator}/{self.K.denominator}"
        return out


def _alpha_element(alpha) -> FieldElement:
    if isinstance(alpha, FieldElement):
        return alpha
    if isinstance(alpha, AlgebraicNumber):
        if alpha.is_rational:
            return NumberField.rationals().from_rational(alpha.rational_value())
        g = alpha.gaussian_value()
        if g is not None:
            return NumberField.gaussian().from_gaussian(g)
        field, (a,) = from_generators([alpha], with_i=not alpha.is_real)
        return a
    g = parse_gaussian(alpha)
    if g.im == 0:
        return NumberField.rationals().from_rational(g.re)
    return NumberField.gaussian().from_gaussian(g)


def _upper(e: FieldElement) -> Fraction:
    if e.is_rational():
        return e.coords[0]
    b = e.ball(64)
    return round_up(b.re + b.rad, 48)


def _lower(e: FieldElement) -> Fraction:
    if e.is_rational():
        return e.coords[0]
    b = e.ball(64)
    return -round_up(-(b.re - b.rad), 48)


def make_context(alpha) -> BaseContext:
    a = _alpha_element(alpha)
    if a.is_zero():
        raise BaseError("base must be non-zero")
    if a.abs_cmp(1) >= 0:
        raise BaseError("base must satisfy |alpha| < 1")
    original = a
    if a.is_real():
        squared = a.sign() < 0
        if squared:
            a = a * a
        inv = a.inverse()
        bound = Fraction(-floor_real(-inv))
        return BaseContext(a, original, squared, True, None, bound, _upper(a * a))
    if not a.field.has_conjugation:
        raise BaseError("field lacks conjugation closure")
    abs2 = a.abs2()
    re = a.real_part() if a.field.contains_i else None
    im = a.imag_part() if a.field.contains_i else None
    if re is not None and re.is_rational() and im.is_rational():
        re_abs, im_abs = abs(re.coords[0]), abs(im.coords[0])
        K = max(1 + re_abs / im_abs, 1 / im_abs)
    else:
        b = a.ball(64)
        re_u = abs(b.re) + b.rad
        im_l = abs(b.im) - b.rad
        K = round_up(max(1 + re_u / im_l, 1 / im_l), 32)
    abs2_lower = _lower(abs2)
    return BaseContext(a, original, False, False, K, 2 * K / abs2_lower + 1, _upper(abs2))


def decompose(z: FieldElement, ctx: BaseContext) -> tuple[FieldElement, FieldElement]:
    """Real x, y with z = x + y·α, and |x|, |y| <= K|z| checked exactly."""
    if ctx.is_real:
        raise BaseError("decompose needs a non-real base")
    a = ctx.alpha
    z = ctx.field.coerce(z)
    y = (z - z.conj()) / (a - a.conj())
    x = z - y * a
    if not z.is_zero():
        bound = z.abs2() * (ctx.K * ctx.K)
        if (x.abs2() - bound).sign() > 0 or (y.abs2() - bound).sign() > 0:
            raise ArithmeticError("decomposition bound |x|,|y| <= K|z| violated")
    return x, y


class DigitStream:
    """Lazily extended digits of a target in base ``ctx.alpha``.

    Real case: digits[k] = a_k.  Complex case: digits[2m] = b_m and
    digits[2m+1] = c_m.  A *block* is one a_k or one pair (b_m, c_m).
    """

    def __init__(self, ctx: BaseContext, target: FieldElement | None = None,
                 oracle: Oracle | None = None):
        if (target is None) == (oracle is None):
            raise ValueError("give exactly one of target / oracle")
        self.ctx = ctx
        if target is not None and ctx.is_real and not target.is_real():
            raise BaseError("real base needs a real target")
        self.target = None if target is None else ctx.field.coerce(target)
        self.oracle = oracle
        if self.target is not None and ctx.is_real and not self.target.is_real():
            raise BaseError("real base needs a real target")
        self.digits: list[int] = []
        self._partial = ctx.field.zero()      # value of all produced blocks
        self._scale = ctx.field.one()         # alpha^(blocks) (real) / alpha^(2 blocks) (complex)
        self._residual = self.target          # exact residual, scaled to unit size

    @property
    def lazy(self) -> bool:
        return self.oracle is not None

    @property
    def step(self) -> FieldElement:
        a = self.ctx.alpha
        return a if self.ctx.is_real else a * a

    def blocks(self) -> int:
        return len(self.digits) if self.ctx.is_real else len(self.digits) // 2

    def block(self, k: int):
        if self.ctx.is_real:
            return self.digits[k]
        return self.digits[2 * k], self.digits[2 * k + 1]

    # -- digit production -------------------------------------------------------
    def extend(self, nblocks: int) -> "DigitStream":
        while self.blocks() < nblocks:
            if self.lazy:
                self._next_lazy()
            else:
                self._next_exact()
        return self

    def _block_value(self, digits) -> FieldElement:
        if self.ctx.is_real:
            return self.ctx.field.from_rational(digits[0])
        return digits[0] + self.ctx.alpha * digits[1]

    def _push(self, digits):
        value = self._block_value(digits)
        self._partial = self._partial + value * self._scale
        self._scale = self._scale * self.step
        self.digits.extend(digits)
        return value

    def _next_exact(self):
        z = self._residual
        k = self.blocks()
        if self.ctx.is_real:
            if k == 0:
                a0 = floor_real(z)
                self._push([a0])
                self._residual = z - a0
            else:
                q = z / self.ctx.alpha
                a = floor_real(q)
                self._push([a])
                self._residual = q - a
            return
        if k > 0:
            z = z / self.step
        x, y = decompose(z, self.ctx)
        b, c = floor_real(x), floor_real(y)
        self._push([b, c])
        self._residual = (x - b) + (y - c) * self.ctx.alpha

    def _next_lazy(self):
        a = self.ctx.alpha
        # residual after k blocks, scaled: (theta - partial) / scale
        bits = 24 + self._scale_bits()
        inv_scale = None if self._scale == 1 else self._scale.inverse()
        while bits <= MAX_ORACLE_BITS:
            t = self.oracle(bits) - self._partial.ball(bits)
            if inv_scale is not None:
                t = t * inv_scale.ball(bits)
            if self.ctx.is_real:
                lo, hi = t.re - t.rad, t.re + t.rad
                if hi - lo < Fraction(1, 4):
                    self._push([math.floor(hi)])
                    return
            else:
                ab = a.ball(bits)
                im = ab.imag_part()
                yr = RealBox(t.im - t.rad, t.im + t.rad) / im
                xr = RealBox(t.re - t.rad, t.re + t.rad) - yr * ab.real_part()
                if yr.width < Fraction(1, 4) and xr.width < Fraction(1, 4):
                    self._push([math.floor(xr.hi), math.floor(yr.hi)])
                    return
            bits *= 2
        raise UndecidableError("lazy digit undecided at precision cap")

    def _scale_bits(self) -> int:
        # precision lost when dividing by alpha^(blocks); a heuristic, the loop doubles anyway
        step_abs = float(self.step.ball(32).abs_lower()) or 1e-300
        return int(self.blocks() * -math.log2(step_abs)) + 8

    # -- values and bounds ------------------------------------------------------------
    def partial_value(self, n: int) -> FieldElement:
        """Exact value of blocks 0..n."""
        self.extend(n + 1)
        acc = self.ctx.field.zero()
        scale = self.ctx.field.one()
        for k in range(n + 1):
            acc = acc + self._block_value(self._block_digits(k)) * scale
            scale = scale * self.step
        return acc

    def _block_digits(self, k):
        return [self.digits[k]] if self.ctx.is_real else [self.digits[2 * k], self.digits[2 * k + 1]]

    def remainder_bound(self, n: int) -> Fraction:
        """Rational upper bound for |target - partial_value(n)|.

        Complex: 2|α|^(2n) (eq. erest).  Real: α^n (residual in [0,1) or,
        for lazy targets, in (-1, 1)).
        """
        if self.ctx.is_real:
            return _upper(self.ctx.alpha) ** n
        return 2 * self.ctx.abs2_upper ** n

    def certify(self, n: int) -> bool:
        """Check |target - partial_value(n)| <= remainder_bound(n)."""
        bound = self.remainder_bound(n)
        p = self.partial_value(n)
        if not self.lazy:
            d = self.target - p
            if d.is_zero():
                return True
            return d.abs_cmp(bound) <= 0
        bits = 32
        while bits <= MAX_ORACLE_BITS:
            diff = (self.oracle(bits) - p.ball(bits)).abs_upper()
            if diff <= bound:
                return True
            bits *= 2
        return False

    def is_exact(self) -> bool:
        """True when the produced digits reproduce the target exactly."""
        return not self.lazy and self._residual is not None and self._residual.is_zero()

    def check_digit_bounds(self) -> bool:
        ctx = self.ctx
        if ctx.is_real:
            bound = ctx.digit_bound
            rest = self.digits[1:]
            if self.lazy:
                return all(abs(d) <= bound for d in rest)
            return all(0 <= d <= bound for d in rest) and (
                not self.digits or self.target is None or self.digits[0] == floor_real(self.target))
        if not self.digits:
            return True
        b0, c0 = self.digits[0], self.digits[1]
        if self.lazy:
            mag = self.oracle(32).abs_upper()
        else:
            mag = _upper_abs(self.target)
        first = ctx.K * mag + 1
        ok = abs(b0) <= first and abs(c0) <= first
        return ok and all(abs(d) <= ctx.digit_bound for d in self.digits[2:])


class RealBox:
    """Closed real interval (local helper for lazy digit extraction)."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        self.lo, self.hi = Fraction(lo), Fraction(hi)

    @property
    def width(self):
        return self.hi - self.lo

    def __sub__(self, o):
        return RealBox(self.lo - o.hi, self.hi - o.lo)

    def __mul__(self, o):
        ps = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi]
        return RealBox(min(ps), max(ps))

    def __truediv__(self, o):
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("interval contains zero")
        return self * RealBox(1 / o.hi, 1 / o.lo)


def _upper_abs(e: FieldElement) -> Fraction:
    if e.is_zero():
        return Fraction(0)
    return e.ball(64).abs_upper()


def expand(beta, ctx: BaseContext, n: int) -> DigitStream:
    """Digit stream with blocks 0..n produced."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if callable(beta) and not isinstance(beta, FieldElement):
        return DigitStream(ctx, oracle=beta).extend(n + 1)
    target = ctx.field.coerce(beta if isinstance(beta, FieldElement) else parse_gaussian(beta))
    return DigitStream(ctx, target=target).extend(n + 1)


def partial_value(stream: DigitStream, n: int) -> FieldElement:
    return stream.partial_value(n)


Target = Union[FieldElement, Oracle]
