"""Lemma 1/2 components and the Lemma 2 exponent schedule.

Components are minimal polynomials (the desk-scale stand-in for the
series of Lemma 1): they vanish on the whole conjugate set of α, so a
probe that is a conjugate of α cannot be separated and is rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .claims import Claim, compare
from .exactnum import (AlgebraicNumber, FieldElement, NumberField, from_generators, log_enclosure)
from .exactnum.enclosure import RealEnclosure
from .exactnum.poly import horner, length
from .series import GrowthCertificate, IntegerPowerSeries


class SeparationError(ValueError):
    pass


@dataclass(frozen=True)
class SeparatorComponent:
    alpha: AlgebraicNumber
    coeffs: tuple[int, ...]

    @property
    def C(self) -> Fraction:
        return Fraction(max(1, length(self.coeffs)))

    @property
    def body(self) -> IntegerPowerSeries:
        return IntegerPowerSeries.polynomial(self.coeffs)

    def evaluate(self, z: FieldElement) -> FieldElement:
        return horner(list(self.coeffs), z)

    def to_json(self) -> dict:
        return {"alpha": self.alpha.to_json(), "coeffs": list(self.coeffs), "C": str(self.C)}


def minpoly_separator(alpha: AlgebraicNumber) -> SeparatorComponent:
    if _abs_ge_1(alpha):
        raise SeparationError("|alpha| must be < 1")
    if alpha.is_zero():
        return SeparatorComponent(alpha, (0, 1))
    return SeparatorComponent(alpha, tuple(alpha.minpoly))


def _abs_ge_1(a: AlgebraicNumber) -> bool:
    _, e = probe_field(a)
    return e.abs_cmp(1) >= 0


def component_from_poly(coeffs: Sequence[int], alpha: AlgebraicNumber | None = None) -> SeparatorComponent:
    """Arbitrary integer polynomial component (alpha recorded when known)."""
    return SeparatorComponent(alpha if alpha is not None else AlgebraicNumber.from_rational(0),
                              tuple(int(c) for c in coeffs))


_FIELDS: dict = {}


def probe_field(beta: AlgebraicNumber) -> tuple[NumberField, FieldElement]:
    """A conjugation-closed field containing beta, and beta in it."""
    key = (beta.minpoly, beta.index)
    hit = _FIELDS.get(key)
    if hit is not None:
        return hit
    if beta.is_rational:
        f = NumberField.rationals()
        out = (f, f.from_rational(beta.rational_value()))
    else:
        g = beta.gaussian_value()
        if g is not None:
            f = NumberField.gaussian()
            out = (f, f.from_gaussian(g))
        else:
            f, (e,) = from_generators([beta])
            out = (f, e)
    _FIELDS[key] = out
    return out


def check_separation(comp: SeparatorComponent, probes: Sequence[AlgebraicNumber]) -> list[dict]:
    report = []
    for p in probes:
        _, e = probe_field(p)
        v = comp.evaluate(e)
        if v.is_zero():
            raise SeparationError(f"conjugate separation unsupported: probe {p} is a root of the component")
        g = v.gaussian_value()
        report.append({"probe": str(p), "value": str(g) if g is not None else None, "nonzero": True})
    return report


# --------------------------------------------------------------------------
# Lemma 2 schedule


@dataclass
class Lemma2Schedule:
    t_hat: list[int]
    t: list[int]
    ell_shifts: list[tuple[int, int]]
    probes: list[AlgebraicNumber]
    claims: list[Claim] = field(default_factory=list)
    rows: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.verdict for c in self.claims)

    def to_json(self) -> dict:
        return {"t_hat": self.t_hat, "t": self.t, "ell_shifts": [list(x) for x in self.ell_shifts],
                "rows": self.rows, "claims": [c.to_json() for c in self.claims]}


def _abs_enc(e: FieldElement, bits: int = 96) -> RealEnclosure:
    if e.is_rational():
        v = abs(e.coords[0])
        return RealEnclosure(v, v)
    return e.ball(bits).abs_enclosure()


def _abs_log_upper(x: RealEnclosure) -> Fraction:
    L = log_enclosure(x.lo, x.hi, prec=96)
    return max(abs(L.lo), abs(L.hi))


def _ell(beta: FieldElement) -> int:
    """Smallest positive ℓ with |β|^ℓ < 1/4 (exact)."""
    b2 = beta.abs2()
    ell, p = 1, b2
    while (p - Fraction(1, 16)).sign() >= 0:
        ell += 1
        p = p * b2
    return ell


def lemma2_t_hat(components: Sequence[SeparatorComponent], probes: Sequence[AlgebraicNumber]) -> list[int]:
    t_hat = [0]
    worst_log, min_log = Fraction(0), None
    for k in range(2, len(components) + 1):
        _, b = probe_field(probes[k - 1])
        if b.is_zero():
            raise ValueError("probes beta_k must be non-zero for k > 1")
        fb = _abs_enc(components[k - 1].evaluate(b))
        bb = _abs_enc(b)
        worst_log = max(worst_log, _abs_log_upper(fb * (1 - bb)))
        lo_log = -log_enclosure(bb.hi, prec=96).hi
        min_log = lo_log if min_log is None else min(min_log, lo_log)
        Ck = components[k - 1].C
        num = log_enclosure(2, prec=96).hi * k + log_enclosure(Ck, prec=96).hi + worst_log
        step = math.ceil(num / min_log)
        t_hat.append(max(int(Ck) + k if Ck.denominator == 1 else math.ceil(Ck) + k, t_hat[-1] + step))
    return t_hat


def lemma2_schedule(components: Sequence[SeparatorComponent], probes: Sequence[AlgebraicNumber],
                    horizon: int | None = None, initial: Sequence[int] | None = None) -> Lemma2Schedule:
    """t̂ from the paper's formula, then ℓ-shifts until (I) holds at every N <= horizon.

    ``initial`` replaces t̂ as the starting sequence (used to exercise the shift rule).
    """
    n = len(components)
    horizon = n if horizon is None else horizon
    if horizon > n or len(probes) < n:
        raise ValueError("need one probe per component and horizon <= number of components")
    for k, (comp, p) in enumerate(zip(components, probes), start=1):
        _, b = probe_field(p)
        if comp.evaluate(b).is_zero():
            raise SeparationError(f"component {k} vanishes at its probe")
    t_hat = lemma2_t_hat(components, probes) if initial is None else [int(v) for v in initial]
    t = list(t_hat)
    shifts = []
    for N in range(2, horizon + 1):
        _, b = probe_field(probes[N - 1])
        if not _inequality_I(components, t, b, N):
            ell = _ell(b)
            for m in range(N - 1, n):
                t[m] += ell
            shifts.append((N, ell))
            if not _inequality_I(components, t, b, N):
                raise ArithmeticError(f"(I) still fails at N={N} after the ℓ-shift")
    sched = Lemma2Schedule(t_hat, t, shifts, list(probes[:n]))
    _certify(sched, components, horizon)
    return sched


def _partial(components, t, b: FieldElement, lo: int, hi: int) -> FieldElement:
    acc = b.field.zero()
    for k in range(lo, hi + 1):
        acc = acc + (b ** t[k - 1]) * components[k - 1].evaluate(b)
    return acc


def _inequality_I(components, t, b, N) -> bool:
    S = _partial(components, t, b, 1, N)
    P = (b ** t[N - 1]) * components[N - 1].evaluate(b)
    return (S.abs2() - P.abs2() / 4).sign() > 0


def _certify(sched: Lemma2Schedule, components, horizon: int):
    t = sched.t
    n = len(components)
    for k in range(2, n + 1):
        sched.claims.append(compare(f"t_monotone[{k}]", t[k - 1], ">", t[k - 2]))
        sched.claims.append(compare(f"t_ge_C_plus_k[{k}]", t[k - 1], ">=", components[k - 1].C + k))
    for N in range(1, horizon + 1):
        _, b = probe_field(sched.probes[N - 1])
        P = (b ** t[N - 1]) * components[N - 1].evaluate(b)
        P2 = P.abs2()
        S2 = _partial(components, t, b, 1, N).abs2()
        full2 = _partial(components, t, b, 1, n).abs2()
        row = {"N": N, "t_N": t[N - 1]}
        c = compare(f"I[{N}]", S2, ">", P2 / 4)
        sched.claims.append(c)
        row["I"] = c.verdict
        if N > 1:
            tail2 = _partial(components, t, b, N + 1, n).abs2()
            c = compare(f"tail_quarter[{N}]", tail2, "<=", P2 / 16)
            sched.claims.append(c)
            row["tail_exact"] = c.verdict
            # coarse route: Σ_{k>N} |β|^{t_k} C_k  (uses |f_k(β)| <= C_k on the disk)
            bb = _abs_enc(b)
            coarse = sum((bb.hi ** t[k - 1] * components[k - 1].C for k in range(N + 1, n + 1)), Fraction(0))
            c = compare(f"tail_quarter_coarse[{N}]", coarse ** 2, "<=", P2 / 16)
            sched.claims.append(c)
            row["tail_coarse"] = c.verdict
        c = compare(f"lower_bound[{N}]", full2, ">=", P2 / 16)
        sched.claims.append(c)
        row["lower_bound"] = c.verdict
        c = compare(f"nonzero[{N}]", full2, ">", 0)
        sched.claims.append(c)
        sched.rows.append(row)


def assemble(components: Sequence[SeparatorComponent], schedule: Lemma2Schedule | Sequence[int]) -> IntegerPowerSeries:
    """f(z) = Σ z^{t_k} f_k(z) (exact, finite)."""
    t = schedule.t if isinstance(schedule, Lemma2Schedule) else list(schedule)
    acc: dict[int, int] = {}
    for tk, comp in zip(t, components):
        for e, c in enumerate(comp.coeffs):
            if c:
                acc[tk + e] = acc.get(tk + e, 0) + c
    C = sum((comp.C for comp in components), Fraction(0))
    return IntegerPowerSeries.from_terms(acc, None, GrowthCertificate.inv(C, 3))
