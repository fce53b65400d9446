"""Integer polynomials: factoring, evaluation and certified root isolation.

Polynomials are coefficient lists with the constant term first.
Root disks are certified with the classical bound that some root of a
degree-d polynomial lies within d*|P(z)/P'(z)| of any point z; when the
d disks obtained this way are pairwise disjoint each holds exactly one root.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Sequence

import mpmath
import sympy

from .enclosure import Ball, UndecidableError, _raw_to_fraction, round_sig, sqrt_upper

MAX_ISOLATION_DPS = 4000
_X = sympy.Symbol("x")


def trim(coeffs: Sequence) -> list:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return c


def degree(coeffs: Sequence) -> int:
    return len(trim(coeffs)) - 1


def primitive_part(coeffs: Sequence[int]) -> list[int]:
    """Content-free integer polynomial with positive leading coefficient."""
    c = trim(int(v) for v in coeffs)
    if not c:
        raise ValueError("zero polynomial")
    g = reduce(gcd, c)
    c = [v // g for v in c]
    if c[-1] < 0:
        c = [-v for v in c]
    return c


def clear_denominators(coeffs: Sequence[Fraction]) -> list[int]:
    den = reduce(lambda a, b: a * b // gcd(a, b), (Fraction(v).denominator for v in coeffs), 1)
    return primitive_part([int(Fraction(v) * den) for v in coeffs])


def horner(coeffs: Sequence, x):
    """Evaluate at ``x`` for any ring element supporting + and * (constant first)."""
    acc = 0 * x
    for c in reversed(list(coeffs)):
        acc = acc * x + c
    return acc


def derivative(coeffs: Sequence[int]) -> list[int]:
    return [k * c for k, c in enumerate(coeffs)][1:]


def length(coeffs: Sequence[int]) -> int:
    """Sum of absolute values of the coefficients."""
    return sum(abs(int(c)) for c in coeffs)


def height(coeffs: Sequence[int]) -> int:
    return max(abs(int(c)) for c in coeffs)


def mul(p: Sequence, q: Sequence) -> list:
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def to_sympy(coeffs: Sequence[int]) -> sympy.Poly:
    return sympy.Poly(list(reversed([int(c) for c in coeffs])), _X)


def from_sympy(p: sympy.Poly) -> list[int]:
    return [int(c) for c in reversed(p.all_coeffs())]


def factor(coeffs: Sequence[int]) -> list[list[int]]:
    """Distinct irreducible factors over Z (primitive, positive leading coefficient)."""
    _, facs = sympy.factor_list(to_sympy(coeffs))
    out = [primitive_part(from_sympy(f)) for f, _ in facs if f.degree() > 0]
    out.sort(key=lambda f: (len(f), f))
    return out


def is_irreducible(coeffs: Sequence[int]) -> bool:
    return to_sympy(coeffs).is_irreducible


def count_real_roots(coeffs: Sequence[int]) -> int:
    return int(to_sympy(coeffs).count_roots())


# --------------------------------------------------------------------------
# exact evaluation at Gaussian-rational points

def _eval_complex(coeffs: Sequence[int], re: Fraction, im: Fraction) -> tuple[Fraction, Fraction]:
    ar, ai = Fraction(0), Fraction(0)
    for c in reversed(coeffs):
        ar, ai = ar * re - ai * im + c, ar * im + ai * re
    return ar, ai


def certified_radius(coeffs: Sequence[int], re: Fraction, im: Fraction) -> Fraction | None:
    """Radius of a disk about (re, im) guaranteed to contain a root, or None."""
    d = degree(coeffs)
    pr, pi = _eval_complex(coeffs, re, im)
    dr, di = _eval_complex(derivative(coeffs), re, im)
    den = dr * dr + di * di
    if den == 0:
        return None
    num = pr * pr + pi * pi
    if num == 0:
        return Fraction(0)
    return d * sqrt_upper(num / den, 40)


def mpf_to_fraction(x) -> Fraction:
    raw = getattr(x, "_mpf_", None)
    if raw is None:
        raw = mpmath.mpf(x)._mpf_
    return _raw_to_fraction(raw)


def _mpf(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


def _mpc_to_exact(z, bits: int) -> tuple[Fraction, Fraction]:
    re = mpf_to_fraction(z.real)
    im = mpf_to_fraction(z.imag)
    return round_sig(re, bits)[0], round_sig(im, bits)[0]


def _disjoint(balls: list[Ball]) -> bool:
    for i in range(len(balls)):
        for j in range(i + 1, len(balls)):
            if balls[i].overlaps(balls[j]):
                return False
    return True


def isolate_roots(coeffs: Sequence[int]) -> list[tuple[Ball, bool]]:
    """Pairwise-disjoint disks, one per root, for a square-free integer polynomial.

    Returns ``(disk, is_real)`` pairs sorted by (real part, imaginary part).
    Real roots get disks centred on the real axis.
    """
    c = trim(int(v) for v in coeffs)
    d = len(c) - 1
    if d < 1:
        return []
    if d == 1:
        return [(Ball(Fraction(-c[0], c[1]), Fraction(0)), True)]
    nreal = count_real_roots(c)
    dps = 30
    while dps <= MAX_ISOLATION_DPS:
        with mpmath.workdps(dps):
            try:
                approx = mpmath.polyroots(list(reversed(c)), maxsteps=50 + 10 * d,
                                          extraprec=4 * dps + 10 * d)
            except mpmath.libmp.NoConvergence:
                dps *= 2
                continue
            bits = int(dps * 3.33) + 8
            balls = []
            for z in approx:
                re, im = _mpc_to_exact(mpmath.mpc(z), bits)
                r = certified_radius(c, re, im)
                if r is None:
                    break
                balls.append(Ball(re, im, r))
        if len(balls) == d and _disjoint(balls):
            crossing = [k for k, b in enumerate(balls) if abs(b.im) <= b.rad]
            if len(crossing) == nreal:
                out = []
                for k, b in enumerate(balls):
                    if k in crossing:
                        out.append((Ball(b.re, Fraction(0), b.rad), True))
                    else:
                        out.append((b, False))
                if _disjoint([b for b, _ in out]):
                    out.sort(key=lambda t: (t[0].re, t[0].im))
                    return out
        dps *= 2
    raise UndecidableError("root isolation failed at precision cap")


def refine_root(coeffs: Sequence[int], disk: Ball, bits: int, real: bool = False) -> Ball:
    """Shrink an isolating disk to radius <= 2**-bits (exactly one root kept)."""
    target = Fraction(1, 1 << bits) if bits >= 0 else Fraction(1 << -bits)
    if disk.rad <= target:
        return disk
    c = trim(int(v) for v in coeffs)
    deriv = derivative(c)
    hi_first = list(reversed(c))
    dhi_first = list(reversed(deriv))
    prec = bits + 40
    while prec <= 1 << 16:
        with mpmath.workprec(prec):
            z = _mpf(disk.re) if real else mpmath.mpc(_mpf(disk.re), _mpf(disk.im))
            for _ in range(200):
                step = mpmath.polyval(hi_first, z) / mpmath.polyval(dhi_first, z)
                z -= step
                if step == 0 or abs(step) < mpmath.mpf(2) ** (-prec + 8) * max(1, abs(z)):
                    break
            z = mpmath.mpc(z)
        re, im = _mpc_to_exact(z, prec)
        if real:
            im = Fraction(0)
        r = certified_radius(c, re, im)
        if r is not None:
            cand = Ball(re, im, r)
            if cand.inside(disk) and r <= target:
                return cand
        prec *= 2
    raise UndecidableError("root refinement exceeded the precision cap")
