import math
from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zforge.basexp import BaseError, DigitStream, decompose, expand, make_context
from zforge.exactnum import AlgebraicNumber, GaussianRational, NumberField, make_algebraic

QI = NumberField.gaussian()


def greedy_oracle(beta: F, alpha: F, n: int) -> list[int]:
    """Plain-Fraction greedy 1/α-expansion, written independently of basexp."""
    a0 = math.floor(beta)
    digits, r = [a0], beta - a0
    for _ in range(n):
        q = r / alpha
        d = math.floor(q)
        digits.append(d)
        r = q - d
    return digits


def mp_value(digits, alpha: complex, dps=50):
    with mpmath.workdps(dps):
        a = mpmath.mpc(alpha)
        return sum(mpmath.mpf(d) * a ** k for k, d in enumerate(digits))


def test_context_examples():
    c = make_context("i/2")
    assert (c.K, c.digit_bound) == (2, 17)
    assert not c.is_real
    c = make_context("1/2")
    assert c.is_real and c.digit_bound == 2
    c = make_context("-1/3")
    assert c.squared and c.alpha.rational_value() == F(1, 9) and c.digit_bound == 9
    c = make_context("1/3+1/3i")
    assert c.K == 3 and c.digit_bound == 28


@pytest.mark.parametrize("bad", ["0", "1", "1+i", "-2"])
def test_context_rejects(bad):
    with pytest.raises(BaseError):
        make_context(bad)


def test_decompose_examples():
    c = make_context("i/2")
    for z, xy in (("i", (0, 2)), ("0", (0, 0)), ("1+i", (1, 2))):
        x, y = decompose(QI.from_gaussian(z), c)
        assert (x.rational_value(), y.rational_value()) == xy


@given(st.fractions(-3, 3, max_denominator=20), st.fractions(-3, 3, max_denominator=20))
def test_decompose_recombines(re, im):
    c = make_context("1/3+1/3i")
    z = QI.from_gaussian(GaussianRational(re, im))
    x, y = decompose(z, c)
    assert x.is_real() and y.is_real()
    assert x + y * c.alpha == z


def test_real_examples():
    c = make_context("1/2")
    s = expand("5/2", c, 3)
    assert s.digits == [2, 1, 0, 0] and s.is_exact()
    assert s.partial_value(2).rational_value() == F(5, 2)
    s = expand("1/3", c, 6)
    assert s.digits == [0, 0, 1, 0, 1, 0, 1]
    p4 = s.partial_value(4).rational_value()
    assert p4 == F(5, 16) and F(1, 3) - p4 == F(1, 48) <= F(1, 16)


def test_complex_examples():
    c = make_context("i/2")
    s = expand("i", c, 3)
    assert s.digits[:4] == [0, 2, 0, 0] and s.is_exact()
    s = expand("1/3+1/3i", c, 1)
    assert s.digits[:4] == [0, 0, -2, -3]
    assert s.remainder_bound(1) == F(1, 2)
    assert s.certify(1)
    assert s.partial_value(0) == QI.zero()


@pytest.mark.parametrize("beta, alpha", [(F(5, 7), F(2, 5)), (F(-13, 11), F(1, 3)), (F(22, 7), F(3, 4))])
def test_greedy_matches_oracle(beta, alpha):
    s = expand(str(beta), make_context(str(alpha)), 12)
    assert s.digits == greedy_oracle(beta, alpha, 12)
    assert s.check_digit_bounds()


@settings(max_examples=30, deadline=None)
@given(st.fractions(-2, 2, max_denominator=30), st.fractions(-2, 2, max_denominator=30),
       st.sampled_from(["i/2", "1/3+1/3i", "-1/4+1/2i"]))
def test_complex_remainder_against_mpmath(re, im, base):
    c = make_context(base)
    s = expand(str(GaussianRational(re, im)), c, 6)
    assert s.check_digit_bounds()
    g = GaussianRational.coerce(GaussianRational(re, im))
    alpha = complex(float(c.alpha.real_part().rational_value()), float(c.alpha.imag_part().rational_value()))
    for n in range(7):
        approx = mp_value(s.digits[:2 * n + 2], alpha)
        err = abs(approx - mpmath.mpc(float(g.re), float(g.im)))
        assert err <= float(s.remainder_bound(n)) * (1 + 1e-9) + 1e-12
        assert s.certify(n)


def test_lazy_matches_exact():
    for base, target in (("1/3+1/3i", "1/5-2/7i"), ("2/5", "3/7")):
        c = make_context(base)
        exact = expand(target, c, 8)
        tgt = c.field.from_gaussian(target)
        lazy = DigitStream(c, oracle=lambda bits, t=tgt: t.ball(bits)).extend(9)
        assert lazy.digits == exact.digits
        assert lazy.certify(8)


def test_irrational_real_base():
    r = make_algebraic([-1, 0, 2], "707/1000", F(1, 100))       # √2/2
    c = make_context(r)
    s = expand(c.field.coerce(c.alpha - F(1, 3)), c, 10)
    assert s.check_digit_bounds()
    assert all(s.certify(n) for n in range(10))


def test_real_base_needs_real_target():
    with pytest.raises(BaseError):
        DigitStream(make_context("1/2"), target=QI.from_gaussian("i"))
