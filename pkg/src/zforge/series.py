"""Integer power series with growth certificates and certified tail bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .exactnum import Ball, FieldElement, RealEnclosure, exp_enclosure, log_enclosure
from .exactnum.enclosure import round_up, round_down
from .exactnum.rational import frac_str, parse_frac

PROFILES = ("POLY", "INV1", "INV3", "EXP2", "INV")
GRID = 64
BOUND_PREC = 64
TINY = Fraction(1, 1 << 4096)   # upper bounds below this are clamped to it


def pow_upper(x: Fraction, e: int, prec: int = BOUND_PREC) -> Fraction:
    """Upper bound of x**e for 0 <= x, rounded to ``prec`` bits at each step."""
    out, base = Fraction(1), Fraction(x)
    small = base < 1
    while e:
        if e & 1:
            out = round_up(out * base, prec)
            if small and 0 < out < TINY:
                return TINY
        e >>= 1
        if e:
            base = round_up(base * base, prec)
            if small and 0 < base < TINY:
                base = TINY
    return out


@dataclass(frozen=True)
class GrowthCertificate:
    """|f(z)| <= M(|z|) on the unit disk.

    POLY: M = C.  INV1/INV3/INV: M = C/(1-r)^m.  EXP2: M = C·exp(2/(1-r)^2).
    """

    profile: str
    C: Fraction
    m: int = 0

    def __post_init__(self):
        if self.profile not in PROFILES:
            raise ValueError(f"unknown profile {self.profile}")
        object.__setattr__(self, "C", Fraction(self.C))
        m = {"POLY": 0, "INV1": 1, "INV3": 3}.get(self.profile, self.m)
        object.__setattr__(self, "m", m)

    @classmethod
    def poly(cls, L) -> "GrowthCertificate":
        return cls("POLY", L)

    @classmethod
    def inv(cls, C, m: int) -> "GrowthCertificate":
        name = {0: "POLY", 1: "INV1", 3: "INV3"}.get(m, "INV")
        return cls(name, C, m)

    @classmethod
    def exp2(cls, C) -> "GrowthCertificate":
        return cls("EXP2", C)

    def M(self, r: Fraction) -> Fraction:
        """Rational upper bound of the profile at radius r < 1."""
        r = Fraction(r)
        if self.profile == "EXP2":
            return round_up(self.C * exp_enclosure(2 / (1 - r) ** 2, prec=BOUND_PREC + 8).hi, BOUND_PREC)
        if self.m == 0:
            return self.C
        return round_up(self.C / (1 - r) ** self.m, BOUND_PREC)

    def as_exp2(self) -> "GrowthCertificate":
        """Dominating EXP2 certificate: x^m <= K_m e^(2x^2) for x >= 1."""
        if self.profile == "EXP2":
            return self
        # max over x >= 1 of x^m e^(-2x^2) is at most max(1, (m/4)^(m/2))
        sq = Fraction(self.m, 4) ** self.m
        k = math.isqrt(math.ceil(sq)) + 1 if sq > 1 else 1
        return GrowthCertificate.exp2(self.C * k)

    def add(self, other: "GrowthCertificate") -> "GrowthCertificate":
        if "EXP2" in (self.profile, other.profile):
            return GrowthCertificate.exp2(self.as_exp2().C + other.as_exp2().C)
        return GrowthCertificate.inv(self.C + other.C, max(self.m, other.m))

    def mul(self, other: "GrowthCertificate") -> "GrowthCertificate":
        if "EXP2" in (self.profile, other.profile):
            raise ValueError("EXP2 products are not tracked")
        return GrowthCertificate.inv(self.C * other.C, self.m + other.m)

    def to_json(self) -> dict:
        out = {"profile": self.profile, "C": frac_str(self.C)}
        if self.profile == "INV":
            out["m"] = self.m
        return out

    @classmethod
    def from_json(cls, d: Mapping) -> "GrowthCertificate":
        return cls(d["profile"], parse_frac(d["C"]), int(d.get("m", 0)))


def _grid():
    return [Fraction(j, GRID) for j in range(1, GRID)]


def coefficient_bound(cert: GrowthCertificate, k: int) -> Fraction:
    """Cauchy bound min_r M(r)/r^k over the grid r = j/64."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if cert.profile == "POLY":
        return cert.C
    return min(round_up(cert.M(r) / r ** k, BOUND_PREC) for r in _grid())


@dataclass(frozen=True)
class IntegerPowerSeries:
    """Sparse exact prefix of an integer power series.

    ``terms`` maps exponent -> coefficient for every non-zero coefficient
    with exponent < ``horizon``.  ``horizon is None`` means the series is a
    polynomial and ``terms`` is complete.
    """

    terms: tuple
    horizon: int | None
    certificate: GrowthCertificate

    @classmethod
    def from_terms(cls, terms, horizon: int | None, certificate: GrowthCertificate) -> "IntegerPowerSeries":
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean = {}
        for e, c in items:
            if c and (horizon is None or e < horizon):
                clean[int(e)] = clean.get(int(e), 0) + int(c)
        return cls(tuple(sorted((e, c) for e, c in clean.items() if c)), horizon, certificate)

    @classmethod
    def polynomial(cls, coeffs: Iterable[int]) -> "IntegerPowerSeries":
        coeffs = [int(c) for c in coeffs]
        L = sum(abs(c) for c in coeffs)
        return cls.from_terms(enumerate(coeffs), None, GrowthCertificate.poly(L))

    @classmethod
    def zero(cls) -> "IntegerPowerSeries":
        return cls((), None, GrowthCertificate.poly(0))

    @classmethod
    def geometric(cls, horizon: int) -> "IntegerPowerSeries":
        return cls.from_terms([(k, 1) for k in range(horizon)], horizon, GrowthCertificate.inv(1, 1))

    @property
    def complete(self) -> bool:
        return self.horizon is None

    def coefficient(self, e: int) -> int:
        if self.horizon is not None and e >= self.horizon:
            raise ValueError(f"coefficient {e} beyond horizon {self.horizon}")
        return dict(self.terms).get(e, 0)

    def coefficients(self, n: int) -> list[int]:
        """Dense list of the coefficients of exponents 0..n-1."""
        if self.horizon is not None and n > self.horizon:
            raise ValueError("requested beyond horizon")
        out = [0] * n
        for e, c in self.terms:
            if e < n:
                out[e] = c
        return out

    def valuation(self) -> int | None:
        if self.terms:
            return self.terms[0][0]
        return self.horizon

    def max_exponent(self) -> int:
        return self.terms[-1][0] if self.terms else -1

    def is_zero(self) -> bool:
        return not self.terms and self.horizon is None

    def truncate(self, horizon: int) -> "IntegerPowerSeries":
        h = horizon if self.horizon is None else min(horizon, self.horizon)
        if self.horizon is None and self.max_exponent() < horizon:
            return self
        return IntegerPowerSeries.from_terms(self.terms, h, self.certificate)

    def __eq__(self, other):
        if not isinstance(other, IntegerPowerSeries):
            return NotImplemented
        return self.terms == other.terms and self.horizon == other.horizon

    def __hash__(self):
        return hash((self.terms, self.horizon))

    # -- evaluation ------------------------------------------------------------
    def prefix_value(self, z, N: int | None = None):
        """Exact sum of the terms with exponent <= N (all known terms if None)."""
        acc = None
        power, last = None, 0
        for e, c in self.terms:
            if N is not None and e > N:
                break
            step = z ** (e - last) if power is not None else z ** e
            power = step if power is None else power * step
            last = e
            acc = power * c if acc is None else acc + power * c
        if acc is None:
            return 0 * z if not isinstance(z, (int, Fraction)) else Fraction(0)
        return acc

    def to_json(self) -> dict:
        return {"terms": [[e, str(c)] for e, c in self.terms], "horizon": self.horizon,
                "certificate": self.certificate.to_json()}

    @classmethod
    def from_json(cls, d: Mapping) -> "IntegerPowerSeries":
        return cls.from_terms([(int(e), int(c)) for e, c in d["terms"]], d.get("horizon"),
                              GrowthCertificate.from_json(d["certificate"]))


def _horizon_of_product(s1: IntegerPowerSeries, s2: IntegerPowerSeries) -> int | None:
    if s1.complete and s2.complete:
        return None
    cands = []
    if not s1.complete:
        v2 = s2.valuation()
        cands.append(s1.horizon + (v2 if v2 is not None else s1.horizon))
    if not s2.complete:
        v1 = s1.valuation()
        cands.append(s2.horizon + (v1 if v1 is not None else s2.horizon))
    if s1.is_zero() or s2.is_zero():
        return None
    return min(cands)


def combine(op: str, s1: IntegerPowerSeries, s2: IntegerPowerSeries | None = None, t: int = 0,
            limit: int | None = None) -> IntegerPowerSeries:
    """add / mul / shift with conservative certificates; ``limit`` caps the horizon."""
    if op == "shift":
        h = None if s1.horizon is None else s1.horizon + t
        out = IntegerPowerSeries(tuple((e + t, c) for e, c in s1.terms), h, s1.certificate)
    elif op == "add":
        if s1.horizon is None:
            h = s2.horizon
        elif s2.horizon is None:
            h = s1.horizon
        else:
            h = min(s1.horizon, s2.horizon)
        acc: dict[int, int] = {}
        for e, c in s1.terms + s2.terms:
            acc[e] = acc.get(e, 0) + c
        out = IntegerPowerSeries.from_terms(acc, h, s1.certificate.add(s2.certificate))
    elif op == "mul":
        h = _horizon_of_product(s1, s2)
        if limit is not None:
            h = limit if h is None else min(h, limit)
        acc = {}
        for e1, c1 in s1.terms:
            if h is not None and e1 >= h:
                break
            for e2, c2 in s2.terms:
                e = e1 + e2
                if h is not None and e >= h:
                    break
                acc[e] = acc.get(e, 0) + c1 * c2
        out = IntegerPowerSeries.from_terms(acc, h, s1.certificate.mul(s2.certificate))
        return out
    else:
        raise ValueError(f"unknown op {op}")
    if limit is not None:
        out = out.truncate(limit)
    return out


# --------------------------------------------------------------------------
# tails and enclosures


def tail_bound(s: IntegerPowerSeries, z_abs, N: int) -> Fraction:
    """Upper bound on |Σ_{e > N} a_e z^e| for |z| <= z_abs < 1."""
    z = Fraction(z_abs)
    if z >= 1 or z < 0:
        raise ValueError("need 0 <= z_abs < 1")
    total = Fraction(0)
    for e, c in s.terms:
        if e > N:
            total += round_up(abs(c) * pow_upper(z, e), BOUND_PREC)
    if s.complete or z == 0:
        return round_up(total, BOUND_PREC) if total else total
    start = max(N + 1, s.horizon)
    # Σ_{k>=start} M(r) (z/r)^k = M(r) (z/r)^start / (1 - z/r) for z < r < 1
    best = None
    for r in _grid():
        if r <= z:
            continue
        q = z / r
        val = round_up(s.certificate.M(r) * pow_upper(q, start) / (1 - q), BOUND_PREC)
        best = val if best is None or val < best else best
    if best is None:
        # z > 63/64: use radius halfway to 1
        r = (1 + z) / 2
        q = z / r
        best = round_up(s.certificate.M(r) * pow_upper(q, start) / (1 - q), BOUND_PREC)
    return round_up(total + best, BOUND_PREC)


@dataclass(frozen=True)
class SeriesEnclosure:
    ball: Ball
    prefix: object          # exact prefix value (FieldElement / Fraction) or None for ball input
    tail: Fraction

    def contains(self, value) -> bool:
        if isinstance(value, FieldElement):
            if self.prefix is not None and isinstance(self.prefix, FieldElement):
                d = value - self.prefix
                return d.is_zero() or d.abs_cmp(self.tail) <= 0
            vb = value.ball(96)
            return self.ball.overlaps(vb) and Ball(self.ball.re, self.ball.im, self.ball.rad + vb.rad).contains_point(vb.re, vb.im)
        if hasattr(value, "re"):
            return self.ball.contains_point(value.re, value.im)
        return self.ball.contains_point(Fraction(value))


def eval_enclosure(s: IntegerPowerSeries, z, N: int | None = None, bits: int = 96) -> SeriesEnclosure:
    """Prefix value (exponents <= N) plus/minus tail_bound."""
    if N is None:
        N = s.max_exponent() if s.complete else s.horizon - 1
    if s.horizon is not None and N >= s.horizon:
        raise ValueError("N beyond horizon")
    if isinstance(z, Ball):
        zb = z
        zabs = z.abs_upper()
        prefix = None
        pb = s.prefix_value(z, N) if s.terms else Ball(Fraction(0), Fraction(0))
        if not isinstance(pb, Ball):
            pb = Ball(Fraction(pb), Fraction(0))
    else:
        if isinstance(z, FieldElement):
            if z.abs_cmp(1) >= 0:
                raise ValueError("|z| >= 1")
            zabs = z.ball(bits).abs_upper()
            prefix = s.prefix_value(z, N)
            pb = prefix.ball(bits) if isinstance(prefix, FieldElement) else Ball(Fraction(prefix), Fraction(0))
        else:
            zq = Fraction(z)
            zabs = abs(zq)
            prefix = s.prefix_value(zq, N)
            pb = Ball(Fraction(prefix), Fraction(0))
        zb = None
    if zabs >= 1:
        raise ValueError("|z| >= 1")
    tail = tail_bound(s, zabs, N)
    return SeriesEnclosure(Ball(pb.re, pb.im, pb.rad + tail), prefix, tail)


# --------------------------------------------------------------------------
# micro-inequalities of Lemmas 2 and 4


def halton(index: int, base: int) -> Fraction:
    """Radical inverse of ``index`` in ``base`` (exact)."""
    f, r = Fraction(1), Fraction(0)
    i = index
    while i > 0:
        f /= base
        r += f * (i % base)
        i //= base
    return r


@dataclass
class MicroReport:
    results: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v["violations"] == 0 and v["undecided"] == 0 for v in self.results.values())

    def to_json(self) -> dict:
        return {"ok": self.ok, "results": self.results}


def _decide(check, precs=(100, 200, 400, 800)):
    for p in precs:
        v = check(p)
        if v is not None:
            return v
    return None


def _inv_log(rho, p):
    """Enclosure of |log rho| for 0 < rho < 1."""
    return -log_enclosure(rho, prec=p)


def _micro_log(x):
    # |log x| >= 1 - x on (0, 1)
    def chk(p):
        L = _inv_log(x, p)
        if L.lo >= 1 - x:
            return True
        if L.hi < 1 - x:
            return False
        return None
    return _decide(chk)


def _micro_peak(x, rho):
    # x |z|^x <= e^(-1) / |log |z||
    def chk(p):
        L = _inv_log(rho, p)
        lhs = exp_enclosure(-(L * x).hi, -(L * x).lo, prec=p) * x
        rhs = exp_enclosure(-1, prec=p) / L
        if lhs.hi <= rhs.lo:
            return True
        if lhs.lo > rhs.hi:
            return False
        return None
    return _decide(chk)


def _micro_xlog2(x):
    # x log^2 x <= 4/e^2 on (0, 1)
    def chk(p):
        L = log_enclosure(x, prec=p)
        sq = RealEnclosure(min(L.lo * L.lo, L.hi * L.hi), max(L.lo * L.lo, L.hi * L.hi))
        lhs = sq * x
        rhs = exp_enclosure(-2, prec=p) * 4
        if lhs.hi <= rhs.lo:
            return True
        if lhs.lo > rhs.hi:
            return False
        return None
    return _decide(chk)


def _micro_exp(x):
    # x <= exp(x^2 / (2e)) for x >= 1
    def chk(p):
        arg = exp_enclosure(-1, prec=p) * (x * x / 2)
        rhs = exp_enclosure(arg.lo, arg.hi, prec=p)
        if x <= rhs.lo:
            return True
        if x > rhs.hi:
            return False
        return None
    return _decide(chk)


def _micro_kz(rho, j):
    # |z|^k < (1 - |z|)/2 for integer k in (k(z), k(z) + 10]
    def kz(p):
        num = log_enclosure(1 - rho, prec=p) - log_enclosure(2, prec=p)
        den = log_enclosure(rho, prec=p)
        return num / den

    for p in (100, 200, 400, 800):
        e = kz(p)
        if math.floor(e.lo) == math.floor(e.hi):
            k = math.floor(e.lo) + j
            if k <= e.hi:
                continue
            return pow_upper(rho, k, 128) < (1 - rho) / 2
    return None


def micro_check_4_over_e2() -> bool:
    return exp_enclosure(-2, prec=100).hi * 4 < Fraction(4, 7)


def check_micro_inequalities(samples: int = 10_000, offset: int = 1) -> MicroReport:
    """Check the five analytic inequalities at deterministic Halton points."""
    if samples < 1:
        raise ValueError("samples must be positive")
    rep = MicroReport()
    cases = {
        "log_lower": lambda i: _micro_log(_unit(halton(i, 2))),
        "peak_bound": _peak_case,
        "xlog2_bound": lambda i: _micro_xlog2(_unit(halton(i, 3))),
        "exp_dominates": lambda i: _micro_exp(1 + 20 * halton(i, 5)),
        "k_of_z": lambda i: _micro_kz(_unit(halton(i, 2)) * Fraction(99, 100), 1 + i % 10),
    }
    for name, fn in cases.items():
        bad, und, first = 0, 0, None
        for i in range(offset, offset + samples):
            v = fn(i)
            if v is None:
                und += 1
            elif not v:
                bad += 1
                first = first if first is not None else i
        rep.results[name] = {"samples": samples, "violations": bad, "undecided": und,
                             "first_violation_index": first}
    rep.results["four_over_e2_lt_4_7"] = {"samples": 1, "violations": 0 if micro_check_4_over_e2() else 1,
                                          "undecided": 0, "first_violation_index": None}
    return rep


def _unit(u: Fraction) -> Fraction:
    # keep samples strictly inside (0, 1)
    return u if 0 < u < 1 else Fraction(1, 2)


def _peak_case(i: int):
    rho = _unit(halton(i, 2))
    u = _unit(halton(i, 3))
    L = _inv_log(rho, 64)
    x = round_down(10 * u / L.hi, 48)
    if x <= 0:
        x = Fraction(1, 1 << 20)
    return _micro_peak(x, rho)
