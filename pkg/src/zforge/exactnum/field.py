"""Number fields given by a primitive element, and their elements.

A field is Q(θ) for an algebraic θ; elements are exact rational coordinate
vectors in the power basis 1, θ, …, θ^(n-1).  Fields built by
``from_generators`` also know complex conjugation (as a linear map) and, when
requested, the element i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import sympy

from . import poly
from .algebraic import REFINE_CAP_BITS, AlgebraicNumber
from .enclosure import Ball, UndecidableError
from .linalg import column_kernel
from .rational import GaussianRational, parse_gaussian

# --------------------------------------------------------------------------
# dense polynomials over Q (constant term first)


def _qtrim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _qdivmod(a: Sequence, b: Sequence) -> tuple[list, list]:
    a = _qtrim(list(a))
    b = _qtrim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    lead = b[-1]
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        c = a[-1] / lead
        q[k] = c
        for j, v in enumerate(b):
            a[k + j] -= c * v
        a.pop()
        _qtrim(a)
    return _qtrim(q), a


def _qsub(a: Sequence, b: Sequence) -> list:
    n = max(len(a), len(b))
    return _qtrim([(a[k] if k < len(a) else 0) - (b[k] if k < len(b) else 0) for k in range(n)])


# --------------------------------------------------------------------------


_STANDARD: dict = {}


class NumberField:
    """Q(θ) for an algebraic number θ.

    ``conj_image`` holds the coordinates of conj(θ) when the field is known
    to be closed under complex conjugation; ``i_image`` the coordinates of i.
    """

    def __init__(self, theta: AlgebraicNumber, conj_image: Sequence | None = None,
                 i_image: Sequence | None = None):
        self.theta = theta
        self.degree = theta.degree
        lc = theta.minpoly[-1]
        self._monic = tuple(Fraction(c, lc) for c in theta.minpoly[:-1])
        if conj_image is None and theta.is_real:
            conj_image = [0, 1] if self.degree > 1 else [theta.rational_value()]
        self._conj_matrix = None
        if conj_image is not None:
            img = self.element(conj_image)
            cols, acc = [], self.one()
            for _ in range(self.degree):
                cols.append(acc.coords)
                acc = acc * img
            self._conj_matrix = tuple(cols)
        self._i = self.element(i_image) if i_image is not None else None

    # -- constructors --------------------------------------------------------
    @classmethod
    def rationals(cls) -> "NumberField":
        if "Q" not in _STANDARD:
            _STANDARD["Q"] = cls(AlgebraicNumber((0, 1), 0))
        return _STANDARD["Q"]

    @classmethod
    def gaussian(cls) -> "NumberField":
        if "Q(i)" not in _STANDARD:
            _STANDARD["Q(i)"] = cls(AlgebraicNumber.i(), conj_image=[0, -1], i_image=[0, 1])
        return _STANDARD["Q(i)"]

    @property
    def minpoly(self) -> tuple[int, ...]:
        return self.theta.minpoly

    @property
    def has_conjugation(self) -> bool:
        return self._conj_matrix is not None

    @property
    def i(self) -> "FieldElement":
        if self._i is None:
            raise ValueError("field was not built with i")
        return self._i

    @property
    def contains_i(self) -> bool:
        return self._i is not None

    def element(self, coords: Sequence) -> "FieldElement":
        c = [Fraction(v) for v in coords]
        if len(c) > self.degree:
            c = self._reduce(c)
        c += [Fraction(0)] * (self.degree - len(c))
        return FieldElement(self, tuple(c))

    def zero(self) -> "FieldElement":
        return self.element([])

    def one(self) -> "FieldElement":
        return self.element([1])

    def gen(self) -> "FieldElement":
        if self.degree == 1:
            return self.element([self.theta.rational_value()])
        return self.element([0, 1])

    def from_rational(self, q) -> "FieldElement":
        return self.element([Fraction(q)])

    def from_gaussian(self, g) -> "FieldElement":
        g = parse_gaussian(g)
        if g.im == 0:
            return self.from_rational(g.re)
        return self.from_rational(g.re) + self.i * g.im

    def coerce(self, x) -> "FieldElement":
        if isinstance(x, FieldElement):
            if x.field is not self:
                raise ValueError("element belongs to a different field")
            return x
        if isinstance(x, (int, Fraction)):
            return self.from_rational(x)
        if isinstance(x, (GaussianRational, str)):
            return self.from_gaussian(x)
        raise TypeError(f"cannot coerce {type(x).__name__} into the field")

    # -- internal arithmetic -------------------------------------------------
    def _reduce(self, p: list) -> list:
        n = self.degree
        m = self._monic
        for k in range(len(p) - 1, n - 1, -1):
            c = p[k]
            if c:
                base = k - n
                for j in range(n):
                    p[base + j] -= c * m[j]
        return p[:n]

    def _mul(self, a: tuple, b: tuple) -> tuple:
        n = self.degree
        out = [Fraction(0)] * (2 * n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] += x * y
        return tuple(self._reduce(out))

    def _conj(self, a: tuple) -> tuple:
        if self._conj_matrix is None:
            raise ValueError("field is not known to be closed under complex conjugation")
        out = [Fraction(0)] * self.degree
        for x, col in zip(a, self._conj_matrix):
            if x:
                for k, v in enumerate(col):
                    out[k] += x * v
        return tuple(out)

    def _inverse(self, a: tuple) -> tuple:
        modulus = list(self._monic) + [Fraction(1)]
        r0, r1 = modulus, _qtrim(list(a))
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = _qdivmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _qsub(s0, poly.mul(q, s1))
        if not r1:
            raise ZeroDivisionError("inverse of zero field element")
        c = r1[0]
        return tuple(self.element([v / c for v in s1]).coords)

    def __repr__(self):
        return f"NumberField(minpoly={list(self.minpoly)}, degree={self.degree})"


@dataclass(frozen=True, eq=False)
class FieldElement:
    field: NumberField
    coords: tuple

    def _other(self, o) -> tuple:
        return self.field.coerce(o).coords

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return other.field is self.field and other.coords == self.coords
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coords[0] == other
        return NotImplemented

    def __hash__(self):
        return hash((id(self.field), self.coords))

    def __add__(self, o):
        return FieldElement(self.field, tuple(a + b for a, b in zip(self.coords, self._other(o))))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.coords))

    def __sub__(self, o):
        return self + (-self.field.coerce(o))

    def __rsub__(self, o):
        return self.field.coerce(o) - self

    def __mul__(self, o):
        if isinstance(o, (int, Fraction)):
            return FieldElement(self.field, tuple(a * o for a in self.coords))
        return FieldElement(self.field, self.field._mul(self.coords, self._other(o)))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field._inverse(self.coords))

    def __truediv__(self, o):
        if isinstance(o, (int, Fraction)):
            if o == 0:
                raise ZeroDivisionError("division by zero")
            return FieldElement(self.field, tuple(a / o for a in self.coords))
        return self * self.field.coerce(o).inverse()

    def __rtruediv__(self, o):
        return self.field.coerce(o) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = self.field.one(), self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    # -- predicates ------------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.coords)

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.coords[0]

    def conj(self) -> "FieldElement":
        return FieldElement(self.field, self.field._conj(self.coords))

    def is_real(self) -> bool:
        if self.is_rational():
            return True
        return self.conj() == self

    def real_part(self) -> "FieldElement":
        return (self + self.conj()) / 2

    def imag_part(self) -> "FieldElement":
        return (self - self.conj()) / (2 * self.field.i)

    def abs2(self) -> "FieldElement":
        """|e|^2 as a (real) field element."""
        return self * self.conj()

    def gaussian_value(self) -> GaussianRational | None:
        """Exact value in Q(i) when the element is a Gaussian rational."""
        if self.is_rational():
            return GaussianRational(self.coords[0])
        if not self.field.contains_i:
            return None
        re, im = self.real_part(), self.imag_part()
        if re.is_rational() and im.is_rational():
            return GaussianRational(re.coords[0], im.coords[0])
        return None

    # -- enclosures --------------------------------------------------------------
    def ball(self, bits: int = 64) -> Ball:
        """Disk of radius <= 2**-bits containing the complex value."""
        if self.is_rational():
            return Ball(self.coords[0], Fraction(0))
        target = Fraction(1, 1 << bits) if bits >= 0 else Fraction(1 << -bits)
        scale = max(1, max(abs(c) for c in self.coords))
        b = bits + int(math.log2(scale)) + 8 + 2 * self.field.degree
        while b <= REFINE_CAP_BITS:
            t = self.field.theta.ball(b)
            acc = Ball(Fraction(0), Fraction(0))
            for c in reversed(self.coords):
                acc = (acc * t + c).rounded(b + 32)
            if acc.rad <= target:
                return acc
            b *= 2
        raise UndecidableError("field element enclosure exceeded the refinement cap")

    def sign(self) -> int:
        """Exact sign of a real element."""
        if self.is_rational():
            c = self.coords[0]
            return (c > 0) - (c < 0)
        if self.field.has_conjugation and not self.is_real():
            raise ValueError("sign of a non-real element")
        bits = 32
        while bits <= REFINE_CAP_BITS:
            b = self.ball(bits)
            if b.re - b.rad > 0:
                return 1
            if b.re + b.rad < 0:
                return -1
            bits *= 2
        raise UndecidableError("sign undecided at refinement cap")

    def abs_cmp(self, other) -> int:
        """Sign of |self| - |other| (other may be a rational or field element)."""
        if isinstance(other, (int, Fraction)):
            return (self.abs2() - Fraction(other) ** 2).sign()
        return (self.abs2() - self.field.coerce(other).abs2()).sign()

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __repr__(self):
        g = self.gaussian_value()
        if g is not None:
            return f"FieldElement({g})"
        return f"FieldElement({[str(c) for c in self.coords]})"


def floor_real(e: FieldElement) -> int:
    """Exact floor of a real field element."""
    if e.is_rational():
        return math.floor(e.coords[0])
    if e.field.has_conjugation and not e.is_real():
        raise ValueError("floor of a non-real element")
    bits = 32
    while bits <= REFINE_CAP_BITS:
        b = e.ball(bits)
        lo, hi = math.floor(b.re - b.rad), math.floor(b.re + b.rad)
        if lo == hi:
            return lo
        bits *= 2
    raise UndecidableError("floor undecided at refinement cap")


def element_min_poly(e: FieldElement) -> AlgebraicNumber:
    """Minimal polynomial of e from the first linear dependence among its powers."""
    if e.is_rational():
        return AlgebraicNumber.from_rational(e.coords[0])
    n = e.field.degree
    cols, acc = [], e.field.one()
    for _ in range(n + 1):
        cols.append(acc.coords)
        acc = acc * e
    kernel = column_kernel(cols)
    mp = tuple(poly.clear_denominators(poly.trim(kernel[0])))
    return select_root(AlgebraicNumber.roots_of(mp), e.ball)


def select_root(candidates: list[AlgebraicNumber], target) -> AlgebraicNumber:
    """The unique candidate whose disk meets ``target(bits)`` after refinement."""
    if len(candidates) == 1:
        return candidates[0]
    bits = 16
    while bits <= REFINE_CAP_BITS:
        t = target(bits)
        hits = [c for c in candidates if c.ball(bits).overlaps(t)]
        if len(hits) == 1:
            return hits[0]
        if not hits:
            raise ArithmeticError("no candidate root matches the target enclosure")
        candidates = hits
        bits *= 2
    raise UndecidableError("root selection undecided at refinement cap")


# --------------------------------------------------------------------------
# primitive elements


def _lift_poly(field: NumberField, coeffs: Sequence) -> list[FieldElement]:
    return [field.coerce(Fraction(c)) if not isinstance(c, FieldElement) else c for c in coeffs]


def _fpoly_trim(p: list) -> list:
    while p and p[-1].is_zero():
        p.pop()
    return p


def _fpoly_mul(a: list, b: list, field: NumberField) -> list:
    out = [field.zero() for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
    return out


def _fpoly_gcd(a: list, b: list) -> list:
    a, b = _fpoly_trim(list(a)), _fpoly_trim(list(b))
    while b:
        r = list(a)
        inv = b[-1].inverse()
        while len(r) >= len(b) and r:
            k = len(r) - len(b)
            c = r[-1] * inv
            for j, v in enumerate(b):
                r[k + j] = r[k + j] - c * v
            r.pop()
            _fpoly_trim(r)
        a, b = b, r
    inv = a[-1].inverse()
    return [v * inv for v in a]


def _adjoin(field: NumberField, b: AlgebraicNumber):
    """Return (L, θ_old in L, b in L, c) with L = Q(θ + c b) = field(b)."""
    if b.is_rational:
        return field, field.gen(), field.from_rational(b.rational_value()), 0
    if field.degree == 1:
        new = NumberField(b)
        return new, new.from_rational(field.theta.rational_value()), new.gen(), None
    z, y = sympy.symbols("z y")
    pk = field.minpoly
    pb = sum(int(v) * y ** k for k, v in enumerate(b.minpoly))
    for c in range(1, 64):
        shifted = sum(int(v) * (z - c * y) ** k for k, v in enumerate(pk))
        res = sympy.Poly(sympy.resultant(shifted, pb, y), z)
        coeffs = [int(v) for v in reversed(res.all_coeffs())]
        cands = [r for f in poly.factor(coeffs) for r in AlgebraicNumber.roots_of(f)]
        theta_new = select_root(cands, lambda bits, c=c: field.theta.ball(bits + 8) + c * b.ball(bits + 8))
        new = NumberField(theta_new)
        # gcd(P_K(θ' - c y), P_b(y)) over the new field
        lin = [new.gen(), new.from_rational(-c)]
        acc = [new.zero()]
        for v in reversed(pk):
            acc = _fpoly_mul(acc, lin, new)
            acc[0] = acc[0] + v
        g = _fpoly_gcd(acc, _lift_poly(new, b.minpoly))
        if len(g) == 2:
            b_rep = -g[0]
            return new, new.gen() - b_rep * c, b_rep, c
    raise ArithmeticError("no primitive element found")


def from_generators(numbers: Sequence[AlgebraicNumber], with_i: bool = False,
                    close_conjugation: bool = True):
    """Build Q(numbers, conj(numbers), i) with a primitive generator.

    Returns ``(field, elements)`` where ``elements[k]`` represents
    ``numbers[k]`` in the field.
    """
    gens: list[AlgebraicNumber] = []

    def add(a):
        if a not in gens:
            gens.append(a)

    for a in numbers:
        add(a)
        if close_conjugation and not a.is_real:
            add(a.conjugate())
    if with_i:
        add(AlgebraicNumber.i())

    field = NumberField.rationals()
    reps: list[FieldElement] = []
    lin = [0] * len(gens)
    for k, g in enumerate(gens):
        new, theta_old, g_rep, c = _adjoin(field, g)
        if new is not field:
            reps = [poly.horner(list(r.coords), theta_old) for r in reps]
        reps.append(g_rep)
        if c is None:
            lin = [0] * len(gens)
            lin[k] = 1
        elif c:
            lin[k] += c
        field = new

    ii = AlgebraicNumber.i()

    def conj_rep(j):
        g = gens[j]
        if g.is_real:
            return reps[j]
        if g == ii:
            return -reps[j]
        cj = g.conjugate()
        return reps[gens.index(cj)] if cj in gens else None

    conj_image = None
    images = {j: conj_rep(j) for j, m in enumerate(lin) if m}
    if all(v is not None for v in images.values()):
        img = field.zero()
        for j, v in images.items():
            img = img + v * lin[j]
        conj_image = img.coords
    i_image = None
    if ii in gens:
        i_image = reps[gens.index(ii)].coords
    final = NumberField(field.theta, conj_image=conj_image, i_image=i_image)
    out = [final.element(reps[gens.index(a)].coords) for a in numbers]
    return final, out
