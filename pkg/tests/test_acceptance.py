"""Acceptance criteria 1-10. Each prints one PASS/FAIL line (collected in the terminal summary).

Every criterion is a generator returning (ok, detail, certificate); criterion 10 reruns
all of them and compares the serialized certificates byte for byte.
"""

import random
import time
from fractions import Fraction as F
from math import comb, factorial

import pytest
import sympy

from zforge.basexp import expand, make_context
from zforge.certificate import build_certificate, dumps
from zforge.claims import compare, exact_claim
from zforge.detector import DEPENDENT, INDEPENDENT, detect, stabilization_scan
from zforge.exactnum import (AlgebraicNumber, GaussianRational, bombieri_lower_bound, certify_separation,
                             check_conversion, check_h_rules, element_min_poly, frac_str, from_generators,
                             log_enclosure, log_height_h, make_algebraic, parse_gaussian)
from zforge.forge import (ExceptionalSetSpec, brute_force_prefix, build_components, build_gaussian_composite,
                          build_schedule, forge, uncountability_witness, value_at_alpha)
from zforge.separator import assemble, component_from_poly, lemma2_schedule
from zforge.series import check_micro_inequalities, eval_enclosure

X = sympy.Symbol("x")
FIRST_RUN: dict[int, bytes] = {}


def rat(q):
    return AlgebraicNumber.from_rational(F(q))


def gauss(re, im):
    return AlgebraicNumber.from_gaussian(GaussianRational(F(re), F(im)))


def cert(k, inputs, result, claims):
    return dumps(build_certificate(f"acceptance_{k}", inputs, result, claims)).encode()


def finish(k, title, limit, fn, report_line):
    t0 = time.perf_counter()
    ok, detail, blob = fn()
    dt = time.perf_counter() - t0
    FIRST_RUN[k] = blob
    within = limit is None or dt < limit
    verdict = "PASS" if ok and within else "FAIL"
    budget = "" if limit is None else f" (limit {limit} s)"
    report_line(f"criterion {k:>2} {verdict}: {title}; {detail}; {dt:.1f} s{budget}")
    assert ok, detail
    assert within, f"runtime {dt:.1f} s exceeds {limit} s"


# --------------------------------------------------------------------------
# 1. digit-expansion remainder


BASES_1 = ["i/2", "1/3+1/3i", "1/2", "2/5", "-1/3"]


def gen_c1():
    rng = random.Random(101)
    targets = [GaussianRational(F(rng.randint(-99, 99), rng.randint(1, 50)), F(rng.randint(-99, 99), rng.randint(1, 50)))
               for _ in range(50)]
    claims, bad = [], 0
    for base in BASES_1:
        ctx = make_context(base)
        a = parse_gaussian(base)
        abs2 = a.re * a.re + a.im * a.im
        for t_idx, tg in enumerate(targets):
            target = tg if not ctx.is_real else GaussianRational(tg.re)
            s = expand(str(target), ctx, 8)
            beta = ctx.field.coerce(ctx.field.from_gaussian(target))
            for n in range(1, 9):
                diff = beta - s.partial_value(n)
                if ctx.is_real:
                    step = ctx.alpha.rational_value()            # α, or α² for a negative base
                    d = diff.rational_value()
                    c = compare(f"{base}:{t_idx}:rest[{n}]", d, "<", step ** n)
                    ok = c.verdict and d >= 0
                else:
                    # eq. (erest): |β - partial| <= 2|α|^(2n), squared on both sides
                    c = compare(f"{base}:{t_idx}:erest[{n}]", diff.abs2(), "<=", 4 * abs2 ** (2 * n))
                    ok = c.verdict
                claims.append(c)
                bad += not ok
            # digit bounds (ezero)/(ek)
            if ctx.is_real:
                top = 1 / ctx.alpha.rational_value()
                ok = s.digits[0] == (target.re.numerator // target.re.denominator) and \
                    all(0 <= d <= top for d in s.digits[1:])
            else:
                K = ctx.K
                b_abs2 = target.re ** 2 + target.im ** 2
                b0, c0 = s.digits[0], s.digits[1]
                ezero = all(abs(v) <= 1 or (abs(v) - 1) ** 2 <= K * K * b_abs2 for v in (b0, c0))
                ek = all(abs(v) <= 2 * K / abs2 + 1 for v in s.digits[2:])
                ok = ezero and ek
            claims.append(exact_claim(f"{base}:{t_idx}:digit_bounds", int(ok), "==", 1))
            bad += not ok
    ok = bad == 0
    return ok, f"{len(claims)} exact checks, {bad} violations", cert(1, {"seed": 101, "bases": BASES_1},
                                                                      {"violations": bad}, claims)


def test_criterion_1(report_line):
    finish(1, "digit-expansion remainder (erest) and digit bounds (ezero)/(ek)", 60, gen_c1, report_line)


# --------------------------------------------------------------------------
# 2. Liouville / Bombieri


def _random_algebraic(rng):
    while True:
        d = rng.randint(1, 4)
        c = [rng.randint(-50, 50) for _ in range(d + 1)]
        if c[-1] == 0 or c[0] == 0:
            continue
        if not sympy.Poly(list(reversed(c)), X).is_irreducible:
            continue
        return rng.choice(AlgebraicNumber.roots_of(c))


def gen_c2():
    rng = random.Random(202)
    claims, pairs = [], []
    while len(claims) < 100:
        a, b = _random_algebraic(rng), _random_algebraic(rng)
        if a == b:
            continue
        n1, n2 = a.degree, b.degree
        assert a.height_H <= 50 and b.height_H <= 50 and n1 <= 4 and n2 <= 4
        # the bound recomputed here, independently of bombieri_lower_bound
        bound = F(1, (4 * n1 * n2) ** (3 * n1 * n2)) / (F(a.height_H) ** n2 * F(b.height_H) ** n1)
        assert bound == bombieri_lower_bound(a, b)
        lo = certify_separation(a, b, bound)
        claims.append(compare(f"pair[{len(claims)}]", lo, ">", bound))
        pairs.append([list(a.minpoly), a.index, list(b.minpoly), b.index])
    bad = sum(not c.verdict for c in claims)
    return bad == 0, f"100 pairs, {bad} violations", cert(2, {"seed": 202}, {"pairs": pairs}, claims)


def test_criterion_2(report_line):
    finish(2, "Liouville/Bombieri separation, degree <= 4, height <= 50", 120, gen_c2, report_line)


# --------------------------------------------------------------------------
# 3. height calculus


def gen_c3():
    rng = random.Random(303)
    sqrt2 = make_algebraic([-2, 0, 1], "1414/1000", F(1, 100))
    L, (r, i) = from_generators([sqrt2, AlgebraicNumber.i()])

    def element():
        while True:
            q = [F(rng.randint(-9, 9), rng.randint(1, 6)) for _ in range(4)]
            e = r * q[1] + i * q[2] + r * i * q[3] + q[0]
            if not e.is_zero():
                return e

    claims, conv_checked = [], 0
    for k in range(50):
        g, d = element(), element()
        while (g + d).is_zero():
            d = element()
        hg = log_height_h(element_min_poly(g))
        hd = log_height_h(element_min_poly(d))
        for n in (2, 3):
            hp = log_height_h(element_min_poly(g ** n))
            scaled = hg * n
            tol = 2 * (hp.width + scaled.width)
            gap = abs((hp.lo + hp.hi) / 2 - (scaled.lo + scaled.hi) / 2)
            claims.append(compare(f"{k}:power[{n}]", gap, "<=", tol))
        hprod = log_height_h(element_min_poly(g * d))
        claims.append(compare(f"{k}:product", hprod.lo, "<=", (hg + hd).hi))
        hsum = log_height_h(element_min_poly(g + d))
        claims.append(compare(f"{k}:sum", hsum.lo, "<=", (hg + hd + log_enclosure(2, prec=200)).hi))
        for name, y in (("g", g), ("d", d), ("g2", g ** 2), ("g3", g ** 3), ("gd", g * d), ("g+d", g + d)):
            claims.append(exact_claim(f"{k}:conversion[{name}]", int(check_conversion(element_min_poly(y))), "==", 1))
            conv_checked += 1
        claims.append(exact_claim(f"{k}:h_rules_module", int(check_h_rules(g, d, n=2).ok), "==", 1))
    bad = sum(not c.verdict for c in claims)
    return bad == 0, f"50 elements of Q(sqrt2, i), {conv_checked} conversions, {bad} violations", \
        cert(3, {"seed": 303}, {"violations": bad}, claims)


def test_criterion_3(report_line):
    finish(3, "height calculus: h(g^n) = n h(g), product and sum rules, h<->H conversion", None, gen_c3,
           report_line)


# --------------------------------------------------------------------------
# 4. detector


def _half_binom(k):
    out = F(1)
    for j in range(k):
        out *= (F(1, 2) - j) / (j + 1)
    return out


def gen_c4():
    Y = sympy.Symbol("y")
    geom = [F(1)] * 25
    sqrt = [_half_binom(k) for k in range(25)]
    exp = [F(1, factorial(k)) for k in range(25)]
    cat = [F(comb(2 * k, k), k + 1) for k in range(25)]
    claims, result = [], {}
    for name, g, n, N, ref in (("geometric", geom, 2, 8, (1 - X) * Y - 1), ("sqrt1px", sqrt, 2, 12, Y ** 2 - X - 1),
                               ("exp", exp, 3, 20, None), ("catalan", cat, 3, 22, X * Y ** 2 - Y + 1)):
        res = detect(g, n, N)
        result[name] = res.to_json()
        if ref is None:
            claims.append(exact_claim(f"{name}:independent", int(res.status == INDEPENDENT), "==", 1))
        else:
            expr = sum(sympy.Rational(c.numerator, c.denominator) * X ** r * Y ** s for r, s, c in res.candidate.terms)
            q = sympy.cancel(expr / ref)
            claims.append(exact_claim(f"{name}:dependent", int(res.status == DEPENDENT), "==", 1))
            claims.append(exact_claim(f"{name}:proportional", int(q.is_number and q != 0), "==", 1))
            claims.append(exact_claim(f"{name}:reverified", int(res.candidate.verify(g)), "==", 1))
        prof = stabilization_scan(g, n, range(0, N + 1))
        claims.append(exact_claim(f"{name}:dims_monotone", int(prof.monotone), "==", 1))
        claims.append(compare(f"{name}:dims_bounded", max(d for _, d in prof.dims), "<=",
                              (n + 1) * (n + 2) // 2))
    bad = sum(not c.verdict for c in claims)
    return bad == 0, f"4 series, {bad} failed checks", cert(4, {"series": sorted(result)}, result, claims)


def test_criterion_4(report_line):
    finish(4, "detector oracle equivalence (geometric, sqrt(1+x), exp, catalan)", 30, gen_c4, report_line)


# --------------------------------------------------------------------------
# 5. Lemma 2 schedule on synthetic families


def _families():
    rng = random.Random(505)
    out = []
    for size, alpha in zip((3, 4, 5, 6, 4, 5), (F(3, 4), F(-2, 3), F(5, 7), F(1, 2), F(-4, 5), F(2, 3))):
        base = [-alpha.numerator, alpha.denominator]
        comps, probes = [], [F(0)]
        while len(probes) < size:
            b = F(rng.randint(-8, 8), 9)
            if b not in probes and b != alpha and b != 0:
                probes.append(b)
        for k in range(size):
            while True:
                q = [rng.randint(-3, 3) for _ in range(rng.randint(1, 3))]
                if q[0] == 0 or q[-1] == 0:
                    continue
                coeffs = [0] * (len(base) + len(q) - 1)
                for i, a in enumerate(base):
                    for j, c in enumerate(q):
                        coeffs[i + j] += a * c
                if sum(c * probes[k] ** e for e, c in enumerate(coeffs)) != 0:
                    break
            comps.append(coeffs)
        out.append((alpha, comps, probes))
    return out


def gen_c5():
    claims, scheds = [], []
    for fam, (alpha, coeffs, probes) in enumerate(_families()):
        comps = [component_from_poly(c, rat(alpha)) for c in coeffs]
        sched = lemma2_schedule(comps, [rat(p) for p in probes])
        scheds.append(sched.t)
        t = sched.t
        f = assemble(comps, sched)
        claims.append(exact_claim(f"{fam}:module_claims", int(sched.ok), "==", 1))
        claims.append(exact_claim(f"{fam}:vanishes_at_alpha", sum(c * alpha ** e for e, c in f.terms), "==", 0))
        for N in range(1, len(comps) + 1):
            b = probes[N - 1]
            vals = [b ** t[k] * sum(c * b ** e for e, c in enumerate(coeffs[k])) for k in range(len(comps))]
            P = abs(vals[N - 1])
            claims.append(compare(f"{fam}:I[{N}]", abs(sum(vals[:N])), ">", P / 2))
            claims.append(compare(f"{fam}:tail_quarter[{N}]", abs(sum(vals[N:])), "<=", P / 4))
            # independent series evaluation with a certified tail
            enc = eval_enclosure(f, b)
            val = enc.prefix if isinstance(enc.prefix, F) else enc.prefix.rational_value()
            claims.append(compare(f"{fam}:lower_bound[{N}]", abs(val) - enc.tail, ">=", P / 4))
            claims.append(compare(f"{fam}:positive[{N}]", P, ">", 0))
    bad = sum(not c.verdict for c in claims)
    fams = _families()
    return bad == 0, f"{len(fams)} families of sizes {[len(c) for _, c, _ in fams]}, {bad} failures", \
        cert(5, {"seed": 505}, {"t": scheds}, claims)


def test_criterion_5(report_line):
    finish(5, "Lemma 2 schedule: (I), quarter tail, lower bound by series evaluation", None, gen_c5, report_line)


# --------------------------------------------------------------------------
# 6. forge end to end


def _test_specs():
    probes = [rat(F(1, 3)), rat(F(2, 5))]
    return [("S={0,1/2}", ExceptionalSetSpec([rat(0), rat(F(1, 2))], probes, 4)),
            ("S={0,i/3,-i/3}", ExceptionalSetSpec([rat(0), gauss(0, F(1, 3)), gauss(0, F(-1, 3))], probes, 4))]


def _gaussian_of(a: AlgebraicNumber) -> GaussianRational:
    g = a.gaussian_value()
    assert g is not None
    return g


def gen_c6():
    claims, result = [], {}
    for name, sp in _test_specs():
        res = forge(sp, t_assumed=1)
        comps, s = res.components, res.schedule.s
        for rec, a in zip(res.alpha_values, sp.pairs):
            j = rec["j"]
            alpha = _gaussian_of(a)
            # brute force: dense prefix with the first j-1 terms, evaluated in Q(i)
            brute = GaussianRational(0)
            for e, c in brute_force_prefix(comps, s, j - 1).items() if j > 1 else ():
                brute = brute + alpha ** e * GaussianRational(c)
            later = GaussianRational(1)
            for k in range(1, j + 1):
                fk = comps[k - 1] if k <= len(comps) else comps[0]
                val = GaussianRational(0)
                for e, c in enumerate(fk.coeffs):
                    val = val + alpha ** e * GaussianRational(c)
                later = later * val
            claims.append(exact_claim(f"{name}:alpha{j}:later_terms_vanish", int(later == GaussianRational(0)), "==", 1))
            claims.append(exact_claim(f"{name}:alpha{j}:matches_brute_force",
                                      int(parse_gaussian(rec["value"]["gaussian"]) == brute), "==", 1))
        for ev in res.evidence:
            claims.append(exact_claim(f"{name}:probe{ev.j}:gammas_distinct", int(ev.gammas_distinct), "==", 1))
            claims.append(exact_claim(f"{name}:probe{ev.j}:ratio_increasing", int(ev.ratio_increasing), "==", 1))
            claims.append(exact_claim(f"{name}:probe{ev.j}:witness_found", int(ev.witness is not None), "==", 1))
        claims.extend(res.all_claims())
        result[name] = {"s": [str(v) for v in s],
                        "witness_N": {str(ev.j): ev.witness for ev in res.evidence}}
    bad = sum(not c.verdict for c in claims)
    return bad == 0, f"witness N per probe {[r['witness_N'] for r in result.values()]}, {bad} failures", \
        cert(6, {"specs": [n for n, _ in _test_specs()]}, result, claims)


def test_criterion_6(report_line):
    finish(6, "forge end to end: alpha values, gamma distinctness, ratio growth, (a2) < (a1)", 300, gen_c6,
           report_line)


# --------------------------------------------------------------------------
# 7. uncountability witness


def _augmented():
    extra = [rat(F(1, 4)), rat(F(1, 5))]
    return [(name + "+{1/4,1/5}", ExceptionalSetSpec(sp.alphas + extra, sp.probes, sp.horizon))
            for name, sp in _test_specs()]


def _literal_values(sp, n, bits):
    """f(α_{n+1}) under a bit string, or None when α_{n+1} is missing."""
    if n + 1 > len(sp.pairs):
        return None
    comps = build_components(sp)
    s2 = ExceptionalSetSpec(sp.alphas, sp.probes, sp.horizon, bits)
    return value_at_alpha(s2, comps, build_schedule(s2, comps), n + 1)


BITS = {1: ("0000", "1000"), 2: ("0000", "0100")}


def gen_c7_literal():
    claims = []
    for name, sp in _test_specs():
        for n, (b1, b2) in BITS.items():
            v1, v2 = _literal_values(sp, n, b1), _literal_values(sp, n, b2)
            distinct = v1 is not None and v1 != v2
            claims.append(exact_claim(f"{name}:n={n}:alpha_{n + 1}_distinct", int(distinct), "==", 1))
    bad = sum(not c.verdict for c in claims)
    return bad == 0, f"{bad} of {len(claims)} cases not distinct", cert("7a", {"bits": BITS}, {}, claims)


def gen_c7():
    claims, result = [], {}
    for name, sp in _augmented():
        for n, (b1, b2) in BITS.items():
            w = uncountability_witness(sp, b1, b2)
            result[f"{name}:n={n}"] = w.to_json()
            claims.append(exact_claim(f"{name}:n={n}:alpha_{w.alpha_index}_distinct", int(w.distinct), "==", 1))
            claims.append(exact_claim(f"{name}:n={n}:index", w.alpha_index, "==", n + 2))
    bad = sum(not c.verdict for c in claims)
    return bad == 0, f"{len(claims) // 2} bit pairs distinct at alpha_(n+2)", cert(7, {"bits": BITS}, result, claims)


@pytest.mark.xfail(strict=True, reason="bit n fixes s_(n+1), which first enters f at alpha_(n+2); "
                                       "see the criterion 7 entry of the decisions ledger")
def test_criterion_7_literal(report_line):
    finish("7a", "uncountability witness at alpha_(n+1) on the 2-pair test specs (literal reading)", None,
           gen_c7_literal, report_line)


def test_criterion_7(report_line):
    finish(7, "uncountability witness at alpha_(n+2), test specs extended by {1/4, 1/5}", None, gen_c7,
           report_line)


# --------------------------------------------------------------------------
# 8. Gaussian composite


def gen_c8():
    claims, result = [], {}
    for name, sp in _test_specs():
        comp = build_gaussian_composite(sp)
        certs = comp.certify((50, 100, 200))
        result[name] = {"rho": [str(c.rho) for c in certs], "enclosures": [c.enclosures for c in certs]}
        for c in certs:
            claims.append(exact_claim(f"{name}:probe{c.j}:rho_nonzero", int(c.rho != GaussianRational(0)), "==", 1))
            for e in c.enclosures:
                claims.append(exact_claim(f"{name}:probe{c.j}:contains[M={e['M']}]", int(e["contains_rho"]), "==", 1))
            radii = [F(e["radius"]) for e in c.enclosures]
            for a, b, m in zip(radii, radii[1:], (100, 200)):
                claims.append(compare(f"{name}:probe{c.j}:radius_drop[M={m}]", b, "<", a))
            claims.extend(c.claims)
    bad = sum(not c.verdict for c in claims)
    return bad == 0, f"rho {[r['rho'] for r in result.values()]}, {bad} failures", cert(8, {}, result, claims)


def test_criterion_8(report_line):
    finish(8, "Gaussian composite: rho_j in Q(i)*, enclosures at M = 50/100/200 shrink and contain rho_j",
           None, gen_c8, report_line)


# --------------------------------------------------------------------------
# 9. micro-inequalities


def gen_c9():
    rep = check_micro_inequalities(samples=10_000)
    claims = []
    for name, r in sorted(rep.results.items()):
        claims.append(exact_claim(f"{name}:violations", r["violations"], "==", 0))
        claims.append(exact_claim(f"{name}:undecided", r["undecided"], "==", 0))
    five = [k for k in rep.results if k != "four_over_e2_lt_4_7"]
    ok = rep.ok and len(five) == 5 and all(rep.results[k]["samples"] == 10_000 for k in five)
    return ok, f"{len(five)} inequalities x 10^4 samples, zero violations: {rep.ok}", \
        cert(9, {"samples": 10_000}, rep.to_json(), claims)


def test_criterion_9(report_line):
    finish(9, "micro-inequalities of Lemmas 2 and 4 at 10^4 points each", None, gen_c9, report_line)


# --------------------------------------------------------------------------
# 10. determinism


GENERATORS = {1: gen_c1, 2: gen_c2, 3: gen_c3, 4: gen_c4, 5: gen_c5, 6: gen_c6, 7: gen_c7, 8: gen_c8, 9: gen_c9}


def gen_c10():
    missing = [k for k in GENERATORS if k not in FIRST_RUN]
    for k in missing:
        FIRST_RUN[k] = GENERATORS[k]()[2]
    diffs = [k for k, fn in GENERATORS.items() if fn()[2] != FIRST_RUN[k]]
    claims = [exact_claim(f"criterion{k}:byte_identical", int(k not in diffs), "==", 1) for k in GENERATORS]
    digest = {str(k): frac_str(F(len(FIRST_RUN[k]))) for k in GENERATORS}
    return not diffs, f"criteria 1-9 rerun, differing: {diffs or 'none'}", cert(10, {}, {"sizes": digest}, claims)


@pytest.mark.slow
def test_criterion_10(report_line):
    finish(10, "determinism: byte-identical certificates on rerun", None, gen_c10, report_line)
