"""Rationals and Gaussian rationals."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import sympy

Rational = Fraction


def frac_str(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_frac(s: Union[str, int, Fraction]) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    return Fraction(str(s).strip())


@dataclass(frozen=True)
class GaussianRational:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(Fraction(x))
        if isinstance(x, str):
            return parse_gaussian(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to GaussianRational")

    def __add__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def conj(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def inverse(self) -> "GaussianRational":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * GaussianRational.coerce(other).inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = GaussianRational(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return self.im == 0

    def __str__(self):
        if self.im == 0:
            return frac_str(self.re)
        sign = "-" if self.im < 0 else "+"
        return f"{frac_str(self.re)}{sign}{frac_str(abs(self.im))}i"

    def to_json(self) -> dict:
        return {"re": frac_str(self.re), "im": frac_str(self.im)}


def parse_gaussian(s: Union[str, int, Fraction, dict]) -> GaussianRational:
    """Parse ``"1/3"``, ``"i/2"``, ``"(1+i)/3"``, ``"-2/5+1/7i"`` and similar."""
    if isinstance(s, GaussianRational):
        return s
    if isinstance(s, (int, Fraction)):
        return GaussianRational(Fraction(s))
    if isinstance(s, dict):
        return GaussianRational(parse_frac(s["re"]), parse_frac(s.get("im", 0)))
    text = str(s).strip().replace("I", "i").replace("j", "i")
    # "2/3i" is read as (2/3)*i, matching the frac_str-based output format
    text = _implicit_i(text)
    expr = sympy.sympify(text, locals={"i": sympy.I}, rational=True)
    re, im = sympy.expand(expr).as_real_imag()
    if not (re.is_Rational and im.is_Rational):
        raise ValueError(f"not a Gaussian rational: {s!r}")
    return GaussianRational(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))


def _implicit_i(text: str) -> str:
    out = []
    for k, ch in enumerate(text):
        if ch == "i" and k > 0 and text[k - 1] == ")":
            out.append("*i")
        elif ch == "i" and k > 0 and text[k - 1].isdigit():
            # wrap the preceding rational literal so "2/3i" means (2/3)*i
            j = len(out)
            while j > 0 and (out[j - 1].isdigit() or out[j - 1] in "/."):
                j -= 1
            out.insert(j, "(")
            out.append(")*i")
        else:
            out.append(ch)
    return "".join(out)
