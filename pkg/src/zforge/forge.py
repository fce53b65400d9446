"""The §3 construction for a finite exceptional set, plus transcendence evidence.

f(z) = Σ_{k>=1} z^{s_k} f_1(z)⋯f_k(z), with f_j vanishing at the j-th
conjugate pair of S and the schedule s_{n+1} = v_n + bit_n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .claims import Claim, compare, exact_claim
from .basexp import MAX_ORACLE_BITS, BaseContext, DigitStream, make_context
from .exactnum import (AlgebraicNumber, Ball, FieldElement, GaussianRational, RealEnclosure, UndecidableError,
                       element_min_poly, log_enclosure, log_height_h)
from .exactnum.enclosure import round_down, round_up
from .exactnum.poly import horner, length, mul
from .exactnum.rational import frac_str, parse_frac
from .separator import SeparatorComponent, check_separation, minpoly_separator, probe_field
from .series import GrowthCertificate, IntegerPowerSeries, eval_enclosure, pow_upper

EXACT_EXPONENT_CAP = 100_000
DEFAULT_HEIGHT_ASSUMED = 10 ** 9
LOG_PREC = 128


class SpecError(ValueError):
    pass


def field_element_json(e: FieldElement) -> dict:
    out = {"field_minpoly": list(e.field.minpoly), "coords": [frac_str(c) for c in e.coords]}
    g = e.gaussian_value()
    if g is not None:
        out["gaussian"] = str(g)
    return out


@dataclass
class ExceptionalSetSpec:
    alphas: list[AlgebraicNumber]
    probes: list[AlgebraicNumber]
    horizon: int
    bits: str = ""

    def __post_init__(self):
        if not self.alphas:
            raise SpecError("alphas must contain 0")
        if not any(a.is_zero() for a in self.alphas):
            raise SpecError("0 must belong to the exceptional set")
        for a in self.alphas:
            if a.conjugate() not in self.alphas:
                raise SpecError(f"alphas not closed under conjugation: missing conj of {a}")
            _, e = probe_field(a)
            if e.abs_cmp(1) >= 0:
                raise SpecError(f"|alpha| >= 1 for {a}")
        for p in self.probes:
            if p in self.alphas:
                raise SpecError(f"probe {p} lies in the exceptional set")
            _, e = probe_field(p)
            if e.abs_cmp(1) >= 0:
                raise SpecError(f"|probe| >= 1 for {p}")
        if self.horizon < 1:
            raise SpecError("horizon must be positive")
        if any(ch not in "01" for ch in self.bits):
            raise SpecError("bits must be a 0/1 string")
        self.bits = self.bits.ljust(self.horizon + 1, "0")

    def bit(self, n: int) -> int:
        """Choice bit for s_{n+1} (n >= 1)."""
        return int(self.bits[n - 1]) if n - 1 < len(self.bits) else 0

    @property
    def pairs(self) -> list[AlgebraicNumber]:
        """One representative per conjugate pair, 0 first, then in input order."""
        reps: list[AlgebraicNumber] = []
        for a in self.alphas:
            if a not in reps and a.conjugate() not in reps:
                reps.append(a)
        reps.sort(key=lambda a: 0 if a.is_zero() else 1)
        return reps

    def probe(self, i: int) -> AlgebraicNumber | None:
        """β_i (1-based) with the padding rule β_j = β_k for j > k."""
        if not self.probes:
            return None
        return self.probes[min(i, len(self.probes)) - 1]

    def to_json(self) -> dict:
        return {"alphas": [a.to_json() for a in self.alphas], "probes": [p.to_json() for p in self.probes],
                "horizon": self.horizon, "bits": self.bits}


def build_components(spec: ExceptionalSetSpec) -> list[SeparatorComponent]:
    comps = [minpoly_separator(a) for a in spec.pairs]
    for c in comps:
        check_separation(c, spec.probes)
    return comps


def component(comps: Sequence[SeparatorComponent], j: int) -> SeparatorComponent:
    """f_j (1-based) with the finite-S padding f_j = f_1 for j > n."""
    return comps[j - 1] if j <= len(comps) else comps[0]


def product_poly(comps, k: int) -> list[int]:
    """Coefficients of f_1⋯f_k."""
    acc = [1]
    for j in range(1, k + 1):
        acc = mul(acc, list(component(comps, j).coeffs))
    return acc


# --------------------------------------------------------------------------
# schedule


@dataclass
class ForgeSchedule:
    C: list[Fraction]
    e: list[int]
    x: list[int]
    log_x_ceil: list[int]
    v: list[int]
    s: list[int]

    def to_json(self) -> dict:
        return {"C": [frac_str(c) for c in self.C], "e": self.e, "x": [str(v) for v in self.x],
                "log_x_ceil": self.log_x_ceil, "v": [str(v) for v in self.v], "s": [str(v) for v in self.s],
                "v_rule": "v_n = max(n^n max{s_n, ceil(log x_n), e_n}, s_n + 1) for all n >= 1; s_{n+1} = v_n + bit_n"}


def ceil_log(x: int) -> int:
    """⌈log x⌉ for a positive integer x (exact)."""
    if x == 1:
        return 0
    prec = 64
    while True:
        L = log_enclosure(x, prec=prec)
        if math.ceil(L.lo) == math.ceil(L.hi):
            return math.ceil(L.lo)
        prec *= 2


def _x_values(spec, comps, n_max: int) -> list[int]:
    if not spec.probes:
        return [1] * n_max
    heights: dict[tuple[int, int], int] = {}
    out = []
    for n in range(1, n_max + 1):
        best = 1
        for i in range(1, n + 1):
            beta = spec.probe(i)
            for k in range(1, n + 1):
                key = (min(i, len(spec.probes)), k)
                if key not in heights:
                    _, b = probe_field(beta)
                    val = b.field.one()
                    for j in range(1, k + 1):
                        val = val * component(comps, j).evaluate(b)
                    heights[key] = element_min_poly(val).height_H
                best = max(best, heights[key])
        out.append(best)
    return out


def _v(n: int, s_n: int, lx: int, e_n: int) -> int:
    # only n = 1 can give v_n = s_n; bump it so s stays strictly increasing
    return max(n ** n * max(s_n, lx, e_n), s_n + 1)


def build_schedule(spec: ExceptionalSetSpec, comps: Sequence[SeparatorComponent],
                   n_max: int | None = None) -> ForgeSchedule:
    """s_1..s_{n_max+1} (n_max defaults to the spec horizon)."""
    n_max = spec.horizon if n_max is None else n_max
    Cs = [component(comps, j).C for j in range(1, n_max + 2)]
    e, prod = [], Fraction(1)
    for c in Cs:
        prod *= c
        e.append(math.ceil(prod))
    x = _x_values(spec, comps, n_max)
    lx = [ceil_log(v) for v in x]
    s = [1]
    v = []
    for n in range(1, n_max + 1):
        vn = _v(n, s[n - 1], lx[n - 1], e[n - 1])
        v.append(vn)
        s.append(vn + spec.bit(n))
    return ForgeSchedule(Cs, e, x, lx, v, s)


def recompute_schedule(sched: ForgeSchedule, bits: str) -> list[int]:
    """Replay s from the stored x/e values (independent of build_schedule)."""
    s = [1]
    for n in range(1, len(sched.v) + 1):
        b = int(bits[n - 1]) if n - 1 < len(bits) else 0
        s.append(n ** n * max(s[-1], sched.log_x_ceil[n - 1], sched.e[n - 1], 1 + s[-1] // n ** n) + b)
    return s


# --------------------------------------------------------------------------
# the series


def build_f(spec: ExceptionalSetSpec, comps, sched: ForgeSchedule,
            exponent_horizon: int | None = None) -> IntegerPowerSeries:
    """Exact prefix of f; coefficients are exact below the returned horizon."""
    h = len(sched.s) - 1
    # the next unknown term starts at s_{h+2} >= (h+1)^(h+1) s_{h+1}
    known = (h + 1) ** (h + 1) * sched.s[h]
    horizon = known if exponent_horizon is None else min(exponent_horizon, known)
    acc: dict[int, int] = {}
    for k in range(1, h + 2):
        sk = sched.s[k - 1]
        if sk >= horizon:
            break
        for d, c in enumerate(product_poly(comps, k)):
            if c and sk + d < horizon:
                acc[sk + d] = acc.get(sk + d, 0) + c
    E = math.prod(c.C for c in comps)
    return IntegerPowerSeries.from_terms(acc, horizon, GrowthCertificate.inv(E, 1))


def brute_force_prefix(comps, s: Sequence[int], n_terms: int) -> dict[int, int]:
    """Dense expansion of Σ_{k<=n_terms} z^{s_k} f_1⋯f_k by repeated multiplication."""
    dense = [0] * (s[n_terms - 1] + sum(len(component(comps, j).coeffs) for j in range(1, n_terms + 1)))
    for k in range(1, n_terms + 1):
        poly = [0] * s[k - 1] + [1]
        for j in range(1, k + 1):
            poly = mul(poly, list(component(comps, j).coeffs))
        for i, c in enumerate(poly):
            dense[i] += c
    return {i: c for i, c in enumerate(dense) if c}


def value_at_alpha(spec: ExceptionalSetSpec, comps, sched: ForgeSchedule, j: int) -> FieldElement:
    """f(α_j) = Σ_{k<j} α_j^{s_k} f_1(α_j)⋯f_k(α_j) exactly."""
    pairs = spec.pairs
    if not 1 <= j <= len(pairs):
        raise SpecError(f"alpha index {j} out of range")
    if j - 1 > len(sched.s):
        raise SpecError("schedule too short for this alpha")
    if j > 1 and sched.s[j - 2] > EXACT_EXPONENT_CAP:
        raise SpecError("exponent beyond the exact cap")
    _, a = probe_field(pairs[j - 1])
    total = a.field.zero()
    prod = a.field.one()
    for k in range(1, j):
        prod = prod * component(comps, k).evaluate(a)
        total = total + (a ** sched.s[k - 1]) * prod
    return total


# --------------------------------------------------------------------------
# transcendence evidence


@dataclass
class EvidenceRow:
    N: int
    s_N: int
    gamma: dict | None
    degree: int
    log_H_upper: Fraction
    a1_lower: Fraction
    a2_upper: Fraction
    ratio: RealEnclosure
    distinct_next: bool

    def to_json(self) -> dict:
        return {"N": self.N, "s_N": str(self.s_N), "gamma": self.gamma, "degree": self.degree,
                "log_H_upper": frac_str(self.log_H_upper), "a1_lower_log": frac_str(self.a1_lower),
                "a2_upper_log": frac_str(self.a2_upper),
                "ratio": {"lo": frac_str(self.ratio.lo), "hi": frac_str(self.ratio.hi)},
                "distinct_next": self.distinct_next}


@dataclass
class TranscendenceEvidence:
    probe: AlgebraicNumber
    j: int
    r: int
    t_assumed: int
    height_assumed: int
    c_inv: Fraction
    c2: Fraction
    rows: list[EvidenceRow]
    claims: list[Claim] = field(default_factory=list)

    @property
    def witness(self) -> int | None:
        for row in self.rows:
            if row.a2_upper < row.a1_lower:
                return row.N
        return None

    @property
    def ratio_increasing(self) -> bool:
        return all(b.ratio.lo > a.ratio.hi for a, b in zip(self.rows, self.rows[1:]))

    @property
    def gammas_distinct(self) -> bool:
        return all(r.distinct_next for r in self.rows)

    def to_json(self) -> dict:
        return {"probe": self.probe.to_json(), "j": self.j, "r": self.r, "t_assumed": self.t_assumed,
                "height_assumed": str(self.height_assumed), "one_over_c": frac_str(self.c_inv),
                "c2": frac_str(self.c2), "rows": [r.to_json() for r in self.rows], "witness_N": self.witness,
                "ratio_increasing": self.ratio_increasing, "gammas_distinct": self.gammas_distinct,
                "claims": [c.to_json() for c in self.claims]}


def _log_up(x) -> Fraction:
    return log_enclosure(x, prec=LOG_PREC).hi


def _log_lo(x) -> Fraction:
    return log_enclosure(x, prec=LOG_PREC).lo


def choose_c_inv(beta_abs_hi: Fraction) -> Fraction:
    """1/c: midpoint of (|β|, 1) rounded up to denominator 64, kept below 1."""
    mid = (beta_abs_hi + 1) / 2
    c_inv = Fraction(math.ceil(mid * 64), 64)
    if c_inv >= 1 or c_inv <= beta_abs_hi:
        c_inv = mid
    return c_inv


def transcendence_evidence(spec: ExceptionalSetSpec, comps, sched: ForgeSchedule, probe_index: int,
                           t_assumed: int = 1, N_range: Sequence[int] | None = None,
                           height_assumed: int = DEFAULT_HEIGHT_ASSUMED) -> TranscendenceEvidence:
    """Rows for N > j (β = β_j) up to the schedule horizon."""
    j = probe_index
    beta = spec.probes[j - 1]
    h = len(sched.s) - 1
    if N_range is None:
        N_range = range(j + 1, h + 1)
    if any(N > h or N < 1 for N in N_range):
        raise SpecError("N_range exceeds the horizon")
    _, b = probe_field(beta)
    r = beta.degree
    babs = b.ball(96).abs_enclosure()
    c_inv = choose_c_inv(babs.hi)
    cb = babs.hi / c_inv                      # upper bound of |cβ| < 1
    E = Fraction(math.prod(c.C for c in comps))
    c2 = E
    hb = log_height_h(beta, Fraction(1, 1 << 40)).hi
    log2 = _log_up(2)
    log_c2 = _log_up(c2)
    log_cb = _log_up(cb)
    log_1m = _log_lo(1 - cb)
    log_Hass = _log_up(height_assumed)
    rows = []
    gammas: dict[int, FieldElement | None] = {}

    def gamma(N):
        if N in gammas:
            return gammas[N]
        if sched.s[N - 1] > EXACT_EXPONENT_CAP:
            gammas[N] = None
            return None
        total, prod = b.field.zero(), b.field.one()
        for k in range(1, N + 1):
            prod = prod * component(comps, k).evaluate(b)
            total = total + (b ** sched.s[k - 1]) * prod
        gammas[N] = total
        return total

    for N in N_range:
        g = gamma(N)
        if g is not None:
            num = element_min_poly(g)
            m = num.degree
            logH = _log_up(num.height_H)
            gjson = field_element_json(g)
        else:
            # h(γ_N) <= Σ_k (s_k + deg P_k) h(β) + log L(P_k)  +  (N-1) log 2
            hg = Fraction(0)
            for k in range(1, N + 1):
                P = product_poly(comps, k)
                hg += (sched.s[k - 1] + len(P) - 1) * hb + _log_up(length(P))
            hg += (N - 1) * log2
            m = r
            logH = round_up(m * (hg + log2), 64)
            gjson = None
        tm = t_assumed * m
        a1 = -(3 * tm * _log_up(4 * tm) + m * log_Hass + t_assumed * logH)
        s_next = sched.s[N]
        a2 = log_c2 + s_next * log_cb - log_1m
        # divergence ratio s_{N+1} / (N (2r)^{N+1} max{s_N, log x_N})
        lx = log_enclosure(sched.x[N - 1], prec=LOG_PREC) if sched.x[N - 1] > 1 else RealEnclosure(Fraction(0), Fraction(0))
        den_lo = N * (2 * r) ** (N + 1) * max(Fraction(sched.s[N - 1]), lx.lo)
        den_hi = N * (2 * r) ** (N + 1) * max(Fraction(sched.s[N - 1]), lx.hi)
        ratio = RealEnclosure(Fraction(s_next) / den_hi, Fraction(s_next) / den_lo)
        # γ_{N+1} - γ_N = β^{s_{N+1}} f_1(β)⋯f_{N+1}(β)
        nxt = gamma(N + 1) if N + 1 <= h else None
        if g is not None and nxt is not None:
            distinct = g != nxt
        else:
            distinct = not b.is_zero() and not _product_value(comps, b, N + 1).is_zero()
        rows.append(EvidenceRow(N, sched.s[N - 1], gjson, m, logH, a1, a2, ratio, distinct))

    ev = TranscendenceEvidence(beta, j, r, t_assumed, height_assumed, c_inv, c2, rows)
    ev.claims.append(compare("c_inv_gt_abs_beta", c_inv, ">", babs.hi))
    ev.claims.append(compare("c_inv_lt_1", c_inv, "<", 1))
    for a, bb in zip(rows, rows[1:]):
        ev.claims.append(compare(f"ratio_increasing[{a.N}->{bb.N}]", bb.ratio.lo, ">", a.ratio.hi))
    for row in rows:
        ev.claims.append(exact_claim(f"gamma_distinct[{row.N}]", int(row.distinct_next), "==", 1))
    w = ev.witness
    if w is not None:
        row = next(r_ for r_ in rows if r_.N == w)
        ev.claims.append(exact_claim(f"witness_a2_below_a1[{w}]", row.a2_upper, "<", row.a1_lower))
    return ev


def _product_value(comps, b: FieldElement, k: int) -> FieldElement:
    val = b.field.one()
    for j in range(1, k + 1):
        val = val * component(comps, j).evaluate(b)
    return val


# --------------------------------------------------------------------------
# the binary tree


@dataclass
class WitnessReport:
    n: int
    alpha_index: int
    value_1: dict
    value_2: dict
    distinct: bool

    def to_json(self) -> dict:
        return {"n": self.n, "alpha_index": self.alpha_index, "value_1": self.value_1, "value_2": self.value_2,
                "distinct": self.distinct}


def uncountability_witness(spec: ExceptionalSetSpec, b1: str, b2: str) -> WitnessReport:
    """Bits differing first at position n change s_{n+1}, hence f(α_{n+2})."""
    if b1 == b2:
        raise SpecError("bit strings must differ")
    width = max(len(b1), len(b2))
    b1, b2 = b1.ljust(width, "0"), b2.ljust(width, "0")
    n = next((k + 1 for k in range(width) if b1[k] != b2[k]), None)
    if n is None:
        raise SpecError("bit strings must differ")
    if n > spec.horizon:
        raise SpecError("not witnessed at this horizon")
    j = n + 2
    if j > len(spec.pairs):
        raise SpecError(f"spec too small: alpha_{j} needed to expose bit {n}")
    comps = build_components(spec)
    vals = []
    for bits in (b1, b2):
        sp = ExceptionalSetSpec(spec.alphas, spec.probes, spec.horizon, bits)
        sched = build_schedule(sp, comps, n_max=min(spec.horizon, j))
        vals.append(value_at_alpha(sp, comps, sched, j))
    return WitnessReport(n, j, field_element_json(vals[0]), field_element_json(vals[1]), vals[0] != vals[1])


# --------------------------------------------------------------------------
# end-to-end


@dataclass
class ForgeResult:
    spec: ExceptionalSetSpec
    components: list[SeparatorComponent]
    schedule: ForgeSchedule
    series: IntegerPowerSeries
    alpha_values: list[dict]
    evidence: list[TranscendenceEvidence]
    claims: list[Claim]

    @property
    def ok(self) -> bool:
        return all(c.verdict for c in self.claims) and all(
            all(c.verdict for c in ev.claims) for ev in self.evidence)

    def all_claims(self) -> list[Claim]:
        out = list(self.claims)
        for ev in self.evidence:
            out.extend(Claim(f"probe{ev.j}.{c.id}", c.relation, c.lhs, c.rhs, c.verdict) for c in ev.claims)
        return out

    def to_json(self) -> dict:
        return {"spec": self.spec.to_json(), "components": [c.to_json() for c in self.components],
                "schedule": self.schedule.to_json(), "series": self.series.to_json(),
                "alpha_values": self.alpha_values, "evidence": [e.to_json() for e in self.evidence]}


def forge(spec: ExceptionalSetSpec, t_assumed: int = 1, exponent_horizon: int | None = None,
          height_assumed: int = DEFAULT_HEIGHT_ASSUMED) -> ForgeResult:
    comps = build_components(spec)
    sched = build_schedule(spec, comps)
    series = build_f(spec, comps, sched, exponent_horizon)
    claims: list[Claim] = []
    claims.append(exact_claim("s_1", sched.s[0], "==", 1))
    for k in range(1, len(sched.s)):
        claims.append(exact_claim(f"s_increasing[{k}]", sched.s[k], ">", sched.s[k - 1]))
    alpha_values = []
    for j, a in enumerate(spec.pairs, start=1):
        val = value_at_alpha(spec, comps, sched, j)
        rec = {"j": j, "alpha": a.to_json(), "value": field_element_json(val)}
        # independent check: enclosure of the truncated series at α_j contains the value
        N = min(series.horizon - 1, EXACT_EXPONENT_CAP)
        enc = eval_enclosure(series, probe_field(a)[1], N)
        claims.append(exact_claim(f"alpha_value_in_enclosure[{j}]", int(enc.contains(val)), "==", 1))
        rec["tail_bound"] = frac_str(enc.tail)
        alpha_values.append(rec)
    evidence = [transcendence_evidence(spec, comps, sched, i, t_assumed, height_assumed=height_assumed)
                for i in range(1, len(spec.probes) + 1)]
    return ForgeResult(spec, comps, sched, series, alpha_values, evidence, claims)


# --------------------------------------------------------------------------
# Lemma 4: steering probe values into Q(i)*


@dataclass
class GaussianSteering:
    rho: GaussianRational
    theta_exact: FieldElement | None
    stream: DigitStream
    claims: list[Claim]

    def to_json(self) -> dict:
        return {"rho": str(self.rho), "theta_exact": None if self.theta_exact is None else
                field_element_json(self.theta_exact), "claims": [c.to_json() for c in self.claims]}


def _gaussian_ball(g: GaussianRational) -> Ball:
    return Ball(g.re, g.im, Fraction(0))


def _to_field(g: GaussianRational, fld) -> FieldElement | None:
    if g.im == 0:
        return fld.from_rational(g.re)
    if fld.contains_i:
        return fld.from_gaussian(g)
    return None


def _truncate(q: Fraction, D: int) -> Fraction:
    scale = 10 ** D
    return Fraction(int(q * scale), scale)          # toward zero


def steer_to_gaussian(theta_N, product: FieldElement, base) -> GaussianSteering:
    """Pick ρ ∈ Q(i)* with |ρ − θ_N| < |product| and expand θ = (ρ − θ_N)/product in base β.

    ``theta_N`` is an exact FieldElement (in the field of ``product``) or an
    oracle ``bits -> Ball``.
    """
    if product.is_zero():
        raise ValueError("product must be non-zero")
    ctx = base if isinstance(base, BaseContext) else make_context(base)
    fld = product.field
    real = ctx.is_real
    exact = isinstance(theta_N, FieldElement)
    claims: list[Claim] = []
    p_lo = abs(product.rational_value()) if product.is_rational() else product.ball(64).abs_lower()
    rho = None
    if exact and not theta_N.is_zero():
        g = theta_N.gaussian_value()
        if g is not None:
            rho = g
    bits = 64
    while rho is None:
        if bits > MAX_ORACLE_BITS:
            raise UndecidableError("precision cap while locating rho")
        tb = theta_N.ball(bits) if exact else theta_N(bits)
        for D in range(0, bits // 3):
            re, im = _truncate(tb.re, D), Fraction(0) if real else _truncate(tb.im, D)
            err = abs(re - tb.re) + abs(im - tb.im) + 2 * tb.rad
            if err < p_lo / 4:
                cand = GaussianRational(re, im)
                if cand.re == 0 and cand.im == 0:
                    cand = GaussianRational(p_lo / 2 if product.is_rational() else round_down(p_lo / 2, 32), Fraction(0))
                rho = cand
                break
        bits *= 2
    rho_f = _to_field(rho, fld)
    theta_exact = None
    if exact and rho_f is not None:
        theta_exact = (rho_f - theta_N) / product
        claims.append(compare("abs_theta_lt_1", theta_exact.abs2(), "<", 1))
        stream = DigitStream(ctx, target=ctx.field.coerce(theta_exact))
    else:
        inv = product.inverse()
        extra = max(0, int(inv.ball(32).abs_upper()).bit_length()) + 8
        rb = _gaussian_ball(rho)

        def oracle(bits, _tn=theta_N, _inv=inv, _rb=rb, _extra=extra):
            tb = _tn.ball(bits + _extra) if isinstance(_tn, FieldElement) else _tn(bits + _extra)
            return ((_rb - tb) * _inv.ball(bits + _extra)).rounded(bits + 8)

        stream = DigitStream(ctx, oracle=oracle)
        tb = oracle(64)
        claims.append(compare("abs_theta_upper_lt_1", tb.abs_upper(), "<", 1))
    claims.append(exact_claim("rho_nonzero", int(rho.re != 0 or rho.im != 0), "==", 1))
    if real:
        claims.append(exact_claim("rho_real_for_real_base", rho.im, "==", 0))
    return GaussianSteering(rho, theta_exact, stream, claims)


# --------------------------------------------------------------------------
# Lemma 4 composite


class _GTerm:
    """g_k as an integer power series: constant 1 or a digit stream in base β_{k+1}."""

    def __init__(self, steering: GaussianSteering | None):
        self.steering = steering
        self.stream = None if steering is None else steering.stream
        self._evals: dict = {}

    @property
    def d(self) -> Fraction:
        return Fraction(1) if self.stream is None else self.stream.ctx.digit_bound

    def coefficients(self, M: int) -> list[int]:
        """a_0..a_M of g_k."""
        if M < 0:
            return []
        if self.stream is None:
            return [1] + [0] * M
        ctx = self.stream.ctx
        if ctx.is_real:
            step = 2 if ctx.squared else 1
            self.stream.extend(M // step + 1)
            out = [0] * (M + 1)
            for n in range(M // step + 1):
                out[n * step] = self.stream.digits[n]
            return out
        self.stream.extend(M // 2 + 1)
        return list(self.stream.digits[:M + 1])

    def is_polynomial(self) -> bool:
        return self.stream is None or self.stream.is_exact()

    def exact_value(self, b: FieldElement) -> FieldElement:
        cs = self.coefficients(0 if self.stream is None else len(self.stream.digits) * 2)
        return horner(cs, b)

    def enclosure(self, b: FieldElement, babs: Fraction, bits: int) -> Ball:
        """Ball around g_k(b) with radius <= 2^-bits (plus rounding)."""
        lb = -math.log2(float(babs))
        n = max(1, math.ceil((bits + 2 + math.log2(float(self.d)) - math.log2(float(1 - babs))) / lb))
        key = id(b)
        n_done, acc, power = self._evals.get(key, (0, b.field.zero(), b.field.one()))
        if n > n_done:
            cs = self.coefficients(n - 1)
            for e in range(n_done, n):
                if cs[e]:
                    acc = acc + power * cs[e]
                power = power * b
            self._evals[key] = (n, acc, power)
            n_done = n
        tail = round_up(self.d * pow_upper(babs, n_done) / (1 - babs), 64)
        ball = acc.ball(bits + 8)
        return Ball(ball.re, ball.im, ball.rad + tail)


@dataclass
class ProbeCertificate:
    j: int
    probe: AlgebraicNumber
    rho: GaussianRational
    enclosures: list[dict]
    claims: list[Claim]

    @property
    def ok(self) -> bool:
        return all(c.verdict for c in self.claims)

    def to_json(self) -> dict:
        return {"j": self.j, "probe": self.probe.to_json(), "rho": str(self.rho), "enclosures": self.enclosures,
                "claims": [c.to_json() for c in self.claims]}


@dataclass
class GaussianComposite:
    alpha: AlgebraicNumber
    probes: list[AlgebraicNumber]
    components: list[SeparatorComponent]       # f_0 (for α), f_1.. (for β_j)
    t: list[int]
    d: list[Fraction]
    D: list[Fraction]
    terms: list[_GTerm]
    rhos: list[GaussianRational]
    steerings: list[GaussianSteering | None]

    @property
    def bound_C(self) -> Fraction:
        return sum((dk * length(product_poly0(self.components, k)) for k, dk in enumerate(self.d)), Fraction(0))

    @property
    def exp2_C(self) -> Fraction:
        return self.D[0] + 1

    def truncated(self, M: int) -> IntegerPowerSeries:
        """Exact coefficients of f up to z^M (horizon M+1)."""
        acc: dict[int, int] = {}
        for k, term in enumerate(self.terms):
            tk = self.t[k]
            if tk > M:
                continue
            g = term.coefficients(M - tk)
            prod = mul(g, product_poly0(self.components, k))
            for e, c in enumerate(prod):
                if c and tk + e <= M:
                    acc[tk + e] = acc.get(tk + e, 0) + c
        return IntegerPowerSeries.from_terms(acc, M + 1, GrowthCertificate.inv(self.bound_C, 1))

    def certify(self, truncations: Sequence[int] = (50, 100, 200)) -> list[ProbeCertificate]:
        series = {M: self.truncated(M) for M in truncations}
        out = []
        for j, (beta, rho) in enumerate(zip(self.probes, self.rhos), start=1):
            _, b = probe_field(beta)
            claims = [exact_claim("rho_nonzero", int(rho.re != 0 or rho.im != 0), "==", 1)]
            if self.steerings[j - 1] is not None:
                claims.extend(self.steerings[j - 1].claims)
            encs = []
            rho_f = _to_field(rho, b.field)
            for M in truncations:
                enc = eval_enclosure(series[M], b, M)
                if rho_f is not None:
                    diff = rho_f - enc.prefix
                    inside = diff.is_zero() or diff.abs_cmp(enc.tail) <= 0
                else:
                    inside = enc.ball.contains_point(rho.re, rho.im)
                claims.append(exact_claim(f"rho_in_enclosure[M={M}]", int(inside), "==", 1))
                encs.append({"M": M, "radius": frac_str(enc.tail), "contains_rho": inside})
            for a, c in zip(encs, encs[1:]):
                claims.append(exact_claim(f"radius_decreasing[{a['M']}->{c['M']}]", parse_frac(c["radius"]),
                                          "<", parse_frac(a["radius"])))
            out.append(ProbeCertificate(j, beta, rho, encs, claims))
        return out

    def to_json(self) -> dict:
        return {"alpha": self.alpha.to_json(), "probes": [p.to_json() for p in self.probes],
                "components": [c.to_json() for c in self.components], "t": self.t,
                "d": [frac_str(x) for x in self.d], "D": [frac_str(x) for x in self.D],
                "rho": [str(r) for r in self.rhos],
                "certificate": {"profile": "INV1", "C": frac_str(self.bound_C)},
                "paper_exp2_C": frac_str(self.exp2_C),
                "steering": [None if s is None else s.to_json() for s in self.steerings]}


def product_poly0(comps: Sequence[SeparatorComponent], k: int) -> list[int]:
    """f_0⋯f_k (0-based, Lemma 4 indexing)."""
    acc = [1]
    for j in range(k + 1):
        acc = mul(acc, list(comps[j].coeffs))
    return acc


def _composite_probes(probes: Sequence[AlgebraicNumber]) -> list[AlgebraicNumber]:
    out: list[AlgebraicNumber] = []
    for p in probes:
        if p not in out and p.conjugate() not in out:
            out.append(p)
    out.sort(key=lambda p: 0 if p.is_zero() else 1)
    return out


def build_gaussian_composite(spec: ExceptionalSetSpec, alpha_index: int = 1) -> GaussianComposite:
    """The Lemma 4 function for α = α_{alpha_index}, steering every spec probe into Q(i)*."""
    alpha = spec.pairs[alpha_index - 1]
    probes = _composite_probes(spec.probes)
    if not probes:
        raise SpecError("the composite needs at least one probe")
    comps = [minpoly_separator(alpha)] + [minpoly_separator(p) for p in probes]
    for i, c in enumerate(comps):
        others = [p for j, p in enumerate(probes, start=1) if j != i]
        check_separation(c, others)
    fields = [probe_field(p)[1] for p in probes]
    babs = [round_up(b.ball(96).abs_upper(), 64) if not b.is_zero() else Fraction(0) for b in fields]
    ctxs = [None if b.is_zero() else make_context(b) for b in fields]
    d = [Fraction(1) if c is None else c.digit_bound for c in ctxs]
    Cs = [c.C for c in comps]
    D, t = [], []
    for k in range(len(probes)):
        Dk = d[k] * math.prod(Cs[:k + 1])
        D.append(Dk)
        t.append(3 * k * k + (0 if k == 0 else math.ceil(Dk)))
    terms: list[_GTerm] = []
    rhos: list[GaussianRational] = []
    steerings: list[GaussianSteering | None] = []
    for N, b in enumerate(fields):
        # f(β_{N+1}) = θ_N + β^{t_N} f_0(β)⋯f_N(β) g_N(β)
        P = (b ** t[N]) * horner(product_poly0(comps, N), b)
        if b.is_zero():
            # only β_1 may vanish: g_0 = 1 and f(0) = f_0(0) ∈ Z*
            terms.append(_GTerm(None))
            rhos.append(GaussianRational(P.rational_value(), Fraction(0)))
            steerings.append(None)
            continue
        coeffs = [(b ** t[k]) * horner(product_poly0(comps, k), b) for k in range(N)]
        if all(terms[k].is_polynomial() for k in range(N)):
            theta_N = b.field.zero()
            for k in range(N):
                theta_N = theta_N + coeffs[k] * terms[k].exact_value(b)
        else:
            def theta_N(bits, _b=b, _coeffs=coeffs, _N=N, _babs=babs[N]):
                acc = Ball(Fraction(0), Fraction(0), Fraction(0))
                for k in range(_N):
                    scale = _coeffs[k].ball(bits + 16)
                    extra = max(0, int(scale.abs_upper()).bit_length())
                    acc = acc + scale * terms[k].enclosure(_b, _babs, bits + 8 + extra)
                return acc.rounded(bits + 8)
        st = steer_to_gaussian(theta_N, P, ctxs[N])
        terms.append(_GTerm(st))
        rhos.append(st.rho)
        steerings.append(st)
    return GaussianComposite(alpha, probes, comps, t, d, D, terms, rhos, steerings)
