import random
from fractions import Fraction as F

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from zforge.exactnum import Ball, NumberField
from zforge.series import (GrowthCertificate, IntegerPowerSeries, check_micro_inequalities, coefficient_bound,
                           combine, eval_enclosure, micro_check_4_over_e2, pow_upper, tail_bound)

QI = NumberField.gaussian()


def dense_conv(a, b, n):
    out = [0] * n
    for i in range(min(n, len(a))):
        for j in range(min(n - i, len(b))):
            out[i + j] += a[i] * b[j]
    return out


def test_combine_examples():
    s = combine("shift", IntegerPowerSeries.polynomial([1, 1]), t=3)
    assert s.terms == ((3, 1), (4, 1))
    one = combine("mul", IntegerPowerSeries.polynomial([1, -1]), IntegerPowerSeries.geometric(20))
    assert one.coefficients(20) == [1] + [0] * 19
    z = IntegerPowerSeries.polynomial([0, 1])
    assert combine("add", z, IntegerPowerSeries.polynomial([0, -1])).is_zero()


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=1, max_size=40), st.lists(st.integers(-9, 9), min_size=1, max_size=40))
def test_mul_add_match_convolution_oracle(a, b):
    pa, pb = IntegerPowerSeries.polynomial(a), IntegerPowerSeries.polynomial(b)
    n = len(a) + len(b)
    assert combine("mul", pa, pb).coefficients(n - 1) == dense_conv(a, b, n - 1)
    s = combine("add", pa, pb)
    m = max(len(a), len(b))
    assert s.coefficients(m) == [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(m)]


def test_horizon_64_convolution():
    rng = random.Random(5)
    a = [rng.randint(-3, 3) for _ in range(64)]
    sa = IntegerPowerSeries.from_terms(dict(enumerate(a)), 64, GrowthCertificate.inv(3, 1))
    prod = combine("mul", sa, IntegerPowerSeries.geometric(64))
    assert prod.horizon == 64
    assert prod.coefficients(64) == dense_conv(a, [1] * 64, 64)


def test_coefficient_bound_examples():
    inv1 = GrowthCertificate.inv(1, 1)
    assert coefficient_bound(inv1, 1) == 4
    assert coefficient_bound(inv1, 0) <= 2
    assert coefficient_bound(GrowthCertificate.poly(7), 12) == 7
    # any valid Cauchy bound dominates the true coefficient 1 of 1/(1-z)
    assert all(coefficient_bound(inv1, k) >= 1 for k in range(30))


def test_tail_bound_geometric_example():
    g = IntegerPowerSeries.geometric(11)
    b = tail_bound(g, F(1, 2), 10)
    k = sympy.Symbol("k", integer=True)
    ref = sympy.summation(4 * (k + 1) * sympy.Rational(1, 2) ** k, (k, 11, sympy.oo))
    assert F(1, 1024) <= b <= F(int(ref.p), int(ref.q))
    assert tail_bound(IntegerPowerSeries.zero(), F(1, 2), 3) == 0
    assert tail_bound(g, F(0), 0) == 0


def test_tail_bound_monotone_and_vanishing():
    g = IntegerPowerSeries.geometric(5)
    prev = None
    for N in (5, 10, 20, 40, 80, 160):
        s = g.truncate(N + 1) if N + 1 < g.horizon else IntegerPowerSeries.from_terms(
            {e: 1 for e in range(N + 1)}, N + 1, g.certificate)
        b = tail_bound(s, F(3, 4), N)
        if prev is not None:
            assert b <= prev
        prev = b
    assert prev < F(1, 10 ** 15)


def test_eval_examples():
    z = IntegerPowerSeries.polynomial([0, 1])
    e = eval_enclosure(z, F(1, 2))
    assert e.prefix == F(1, 2) and e.tail == 0
    g = IntegerPowerSeries.from_terms({k: 1 for k in range(21)}, 21, GrowthCertificate.inv(1, 1))
    assert eval_enclosure(g, F(1, 3), 20).contains(F(3, 2))


def test_eval_contains_closed_forms_random_points():
    rng = random.Random(11)
    g = IntegerPowerSeries.from_terms({k: 1 for k in range(60)}, 60, GrowthCertificate.inv(1, 1))
    poly = IntegerPowerSeries.polynomial([3, -1, 0, 2])
    for _ in range(100):
        while True:
            re, im = F(rng.randint(-75, 75), 100), F(rng.randint(-75, 75), 100)
            if re * re + im * im <= F(9, 16):
                break
        z = QI.from_gaussian(f"{re}+{im}i") if im else QI.from_rational(re)
        val = (1 - z).inverse()
        assert eval_enclosure(g, z, 59).contains(val)
        pv = z * z * z * 2 - z + 3
        enc = eval_enclosure(poly, z)
        assert enc.tail == 0 and enc.contains(pv)
    # ball input, checked against mpmath
    b = Ball(F(1, 5), F(-1, 3), F(1, 10 ** 6))
    enc = eval_enclosure(g, b, 59)
    ref = 1 / (1 - mpmath.mpc(0.2, -1 / 3))
    assert enc.ball.contains_point(F(str(ref.real)), F(str(ref.imag))) or \
        abs(complex(float(enc.ball.re), float(enc.ball.im)) - complex(ref)) <= float(enc.ball.rad) + 1e-15


def test_eval_rejects_outside_disk():
    with pytest.raises(ValueError):
        eval_enclosure(IntegerPowerSeries.geometric(10), F(1), 5)


def test_certificate_algebra():
    a, b = GrowthCertificate.inv(2, 1), GrowthCertificate.inv(3, 3)
    assert a.mul(b).C == 6 and a.mul(b).m == 4
    assert a.add(b).C == 5 and a.add(b).m == 3
    r = F(1, 2)
    assert a.mul(b).M(r) >= a.M(r) * b.M(r)
    e = a.mul(b).as_exp2()
    for r in (F(1, 10), F(1, 2), F(9, 10)):
        assert float(e.M(r)) >= float(a.mul(b).M(r))
    assert GrowthCertificate.from_json(e.to_json()) == e


def test_series_json_roundtrip():
    s = IntegerPowerSeries.from_terms({0: 1, 7: -3, 40: 12}, 50, GrowthCertificate.inv(F(16, 3), 3))
    assert IntegerPowerSeries.from_json(s.to_json()) == s


def test_pow_upper_is_upper():
    for x, e in ((F(2, 3), 17), (F(1, 3), 200), (F(99, 100), 1000)):
        assert pow_upper(x, e) >= x ** e
    assert pow_upper(F(1, 2), 10 ** 8) > 0


def test_micro_examples():
    assert micro_check_4_over_e2()
    rep = check_micro_inequalities(samples=300)
    assert rep.ok
    assert set(rep.results) >= {"log_lower", "peak_bound", "xlog2_bound", "exp_dominates", "k_of_z"}
