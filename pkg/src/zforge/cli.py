"""zforge command line: every run emits a JSON certificate with replayable claims.

Exit status: 0 when every claim holds, 1 when some claim fails, 2 on input errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction

from .basexp import BaseError, DigitStream, make_context
from .certificate import DigestMismatch, build_certificate, dumps, verify_certificate
from .claims import Claim, compare, exact_claim
from .detector import DEPENDENT, detect, stabilization_scan
from .exactnum import (AlgebraicNumber, bombieri_lower_bound, certify_separation, check_h_rules, frac_str,
                       parse_gaussian)
from .forge import ExceptionalSetSpec, SpecError, build_gaussian_composite, forge
from .separator import SeparationError, component_from_poly, lemma2_schedule
from .series import check_micro_inequalities

DEFAULT_PRECISION = 96


class InputError(ValueError):
    pass


def default_precision() -> int:
    raw = os.environ.get("ZFORGE_PRECISION")
    if raw is None:
        return DEFAULT_PRECISION
    try:
        bits = int(raw)
    except ValueError:
        raise InputError(f"ZFORGE_PRECISION must be an integer, got {raw!r}") from None
    if bits < 16:
        raise InputError("ZFORGE_PRECISION must be >= 16")
    return bits


def load_arg(raw: str):
    """Inline JSON, @file, or a bare string."""
    if raw.startswith("@"):
        with open(raw[1:]) as fh:
            return json.load(fh)
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def parse_number(x) -> AlgebraicNumber:
    if isinstance(x, bool) or isinstance(x, float):
        raise InputError(f"numbers must be exact (int, 'p/q', 'a+bi' or minpoly object), got {x!r}")
    if isinstance(x, int):
        return AlgebraicNumber.from_rational(x)
    try:
        return AlgebraicNumber.from_json(x)
    except (ValueError, KeyError, TypeError, AttributeError) as exc:
        raise InputError(f"cannot parse algebraic number {x!r}: {exc}") from None


def parse_numbers(raw) -> list[AlgebraicNumber]:
    data = load_arg(raw) if isinstance(raw, str) else raw
    if not isinstance(data, list):
        data = [data]
    return [parse_number(x) for x in data]


def _normalize(x):
    """Canonical JSON-able form of an input number."""
    if isinstance(x, int):
        return str(x)
    return x


# --------------------------------------------------------------------------
# commands


def cmd_expand(args):
    base_raw = load_arg(args.base)
    target_raw = load_arg(args.target)
    alpha = parse_number(base_raw)
    ctx = make_context(alpha)
    if isinstance(target_raw, dict):
        raise InputError("target must be a Gaussian rational string")
    target = ctx.field.coerce(ctx.field.from_gaussian(parse_gaussian(str(target_raw))))
    if args.steps < 0:
        raise InputError("steps must be non-negative")
    stream = DigitStream(ctx, target=target).extend(args.steps + 1)
    claims = []
    for n in range(args.steps + 1):
        diff = target - stream.partial_value(n)
        bound = stream.remainder_bound(n)
        claims.append(compare(f"remainder[{n}]", diff.abs2(), "<=", bound * bound))
    claims.append(exact_claim("digit_bounds", int(stream.check_digit_bounds()), "==", 1))
    inputs = {"base": _normalize(base_raw), "target": str(target_raw), "steps": args.steps}
    result = {"context": ctx.to_json(), "digits": stream.digits, "blocks": stream.blocks(),
              "remainder_bounds": [frac_str(stream.remainder_bound(n)) for n in range(args.steps + 1)],
              "exact": stream.is_exact()}
    if args.plot:
        from .report import plot_expansion
        plot_expansion(stream, args.plot)
    return "expand", inputs, result, claims


def cmd_lemma2(args):
    comps_raw = load_arg(args.components)
    probes_raw = load_arg(args.probes)
    if not isinstance(comps_raw, list) or not all(isinstance(c, list) for c in comps_raw):
        raise InputError("components must be a list of integer coefficient lists (constant term first)")
    comps = [component_from_poly(c) for c in comps_raw]
    probes = parse_numbers(probes_raw)
    initial = load_arg(args.initial) if args.initial else None
    sched = lemma2_schedule(comps, probes, horizon=args.horizon, initial=initial)
    inputs = {"components": comps_raw, "probes": [_normalize(p) for p in probes_raw],
              "horizon": args.horizon, "initial": initial}
    return "lemma2", inputs, sched.to_json(), sched.claims


def cmd_forge(args):
    alphas_raw, probes_raw = load_arg(args.alphas), load_arg(args.probes)
    spec = ExceptionalSetSpec(parse_numbers(alphas_raw), parse_numbers(probes_raw), args.horizon, args.bits)
    res = forge(spec, t_assumed=args.t_assumed, height_assumed=args.height_assumed)
    claims = res.all_claims()
    result = res.to_json()
    result["ok"] = res.ok
    if args.composite:
        truncs = [int(t) for t in args.truncations.split(",")]
        composites = []
        for ai in range(1, len(spec.pairs) + 1):
            comp = build_gaussian_composite(spec, ai)
            certs = comp.certify(truncs)
            rec = comp.to_json()
            rec["probe_certificates"] = [c.to_json() for c in certs]
            composites.append(rec)
            for c in certs:
                claims.extend(Claim(f"composite{ai}.probe{c.j}.{cl.id}", cl.relation, cl.lhs, cl.rhs, cl.verdict)
                              for cl in c.claims)
        result["composites"] = composites
    inputs = {"alphas": [_normalize(a) for a in alphas_raw], "probes": [_normalize(p) for p in probes_raw],
              "bits": spec.bits, "horizon": args.horizon, "t_assumed": args.t_assumed,
              "height_assumed": str(args.height_assumed), "composite": args.composite,
              "truncations": args.truncations if args.composite else None}
    if args.plot:
        from .report import plot_evidence
        plot_evidence(res.evidence, args.plot)
    return "forge", inputs, result, claims


NAMED_SERIES = {
    "geometric": lambda k: Fraction(1),
    "zero": lambda k: Fraction(0),
    "exp": lambda k: Fraction(1, math.factorial(k)),
    "sqrt1px": lambda k: _binom_half(k),
}


def _binom_half(k: int) -> Fraction:
    out = Fraction(1)
    for j in range(k):
        out *= (Fraction(1, 2) - j) / (j + 1)
    return out


def cmd_detect(args):
    raw = load_arg(args.coeffs)
    if isinstance(raw, str):
        if raw not in NAMED_SERIES:
            raise InputError(f"unknown series {raw!r}; use a list of 'p/q' or one of {sorted(NAMED_SERIES)}")
        hi = max(args.N, args.scan_to or 0)
        coeffs = [NAMED_SERIES[raw](k) for k in range(hi + 1)]
    elif isinstance(raw, list):
        try:
            coeffs = [Fraction(c) if isinstance(c, int) else Fraction(str(c)) for c in raw]
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad coefficient: {exc}") from None
        if any(isinstance(c, float) for c in raw):
            raise InputError("coefficients must be exact")
    else:
        raise InputError("coeffs must be a list or a series name")
    res = detect(coeffs, args.n, args.N)
    claims = []
    if res.status == DEPENDENT:
        claims.append(exact_claim("annihilator_verifies", int(res.candidate.verify(coeffs)), "==", 1))
    else:
        claims.append(exact_claim("full_rank", res.rank, "==", res.rows))
    scan_to = args.scan_to if args.scan_to is not None else args.N
    prof = stabilization_scan(coeffs, args.n, range(0, scan_to + 1))
    claims.append(exact_claim("dims_monotone", int(prof.monotone), "==", 1))
    claims.append(exact_claim("dims_bounded", max(d for _, d in prof.dims), "<=", (args.n + 1) * (args.n + 2) // 2))
    result = res.to_json()
    result["dims"] = [list(d) for d in prof.dims]
    result["stable_from"] = prof.stable_from
    inputs = {"coeffs": raw if isinstance(raw, str) else [frac_str(c) for c in coeffs], "n": args.n, "N": args.N,
              "scan_to": scan_to}
    if args.plot:
        from .report import plot_dims
        plot_dims(prof, args.plot)
    return "detect", inputs, result, claims


def cmd_heights(args):
    raw = load_arg(args.numbers)
    nums = parse_numbers(raw)
    if len(nums) not in (1, 2):
        raise InputError("heights takes one or two numbers")
    rep = check_h_rules(nums[0], nums[1] if len(nums) > 1 else None, n=args.n)
    claims = [exact_claim(i, a, "<=", b) for i, a, b in rep.witnesses()]
    inputs = {"numbers": [_normalize(x) for x in (raw if isinstance(raw, list) else [raw])], "n": args.n}
    return "heights", inputs, rep.to_json(), claims


def cmd_liouville(args):
    a_raw, b_raw = load_arg(args.a), load_arg(args.b)
    a, b = parse_number(a_raw), parse_number(b_raw)
    if a == b:
        raise InputError("the two numbers must be distinct")
    bound = bombieri_lower_bound(a, b)
    lo = certify_separation(a, b, bound)
    claims = [exact_claim("distance_gt_bound", lo, ">", bound)]
    result = {"degrees": [a.degree, b.degree], "heights": [str(a.height_H), str(b.height_H)],
              "bound": frac_str(bound), "distance_lower": frac_str(lo)}
    return "liouville", {"a": _normalize(a_raw), "b": _normalize(b_raw)}, result, claims


def cmd_micro(args):
    if args.samples < 1:
        raise InputError("samples must be positive")
    rep = check_micro_inequalities(args.samples, args.offset)
    claims = []
    for name, r in rep.results.items():
        claims.append(exact_claim(f"{name}.violations", r["violations"], "==", 0))
        claims.append(exact_claim(f"{name}.undecided", r["undecided"], "==", 0))
    return "micro", {"samples": args.samples, "offset": args.offset}, rep.to_json(), claims


COMMANDS = {"expand": cmd_expand, "lemma2": cmd_lemma2, "forge": cmd_forge, "detect": cmd_detect,
            "heights": cmd_heights, "liouville": cmd_liouville, "micro": cmd_micro}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zforge", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="write the certificate here (default: stdout)")
        sp.add_argument("--plot", help="also write a PNG figure to this path")
        return sp

    sp = common(sub.add_parser("expand", help="Lemma 3 digit expansion of a target in base alpha"))
    sp.add_argument("--base", required=True, help="'p/q', 'a+bi' or a minpoly JSON object")
    sp.add_argument("--target", required=True, help="Gaussian rational target")
    sp.add_argument("--steps", type=int, default=8, help="blocks 0..steps (default 8)")

    sp = common(sub.add_parser("lemma2", help="Lemma 2 exponent schedule"))
    sp.add_argument("--components", required=True, help="JSON list of coefficient lists")
    sp.add_argument("--probes", required=True, help="JSON list of probes, one per component")
    sp.add_argument("--horizon", type=int)
    sp.add_argument("--initial", help="JSON list replacing t-hat as the starting schedule")

    sp = common(sub.add_parser("forge", help="§3 construction for a finite exceptional set"))
    sp.add_argument("--alphas", required=True, help="JSON list; must contain 0 and be conjugation closed")
    sp.add_argument("--probes", default="[]", help="JSON list of probes")
    sp.add_argument("--bits", default="", help="choice bits, e.g. 0101")
    sp.add_argument("--horizon", type=int, default=4)
    sp.add_argument("--t-assumed", type=int, default=1, dest="t_assumed")
    sp.add_argument("--height-assumed", type=int, default=10 ** 9, dest="height_assumed")
    sp.add_argument("--composite", action="store_true", help="also build the Lemma 4 Gaussian composites")
    sp.add_argument("--truncations", default="50,100,200")

    sp = common(sub.add_parser("detect", help="Lemma 5 annihilator search"))
    sp.add_argument("--coeffs", required=True, help="JSON list of 'p/q' or geometric|sqrt1px|exp|zero")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--scan-to", type=int, dest="scan_to")

    sp = common(sub.add_parser("heights", help="height calculus checks"))
    sp.add_argument("--numbers", required=True, help="JSON list of one or two numbers")
    sp.add_argument("--n", type=int, default=2)

    sp = common(sub.add_parser("liouville", help="Bombieri/Liouville separation check"))
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)

    sp = common(sub.add_parser("micro", help="analytic micro-inequalities of Lemmas 2 and 4"))
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--offset", type=int, default=1)

    sp = sub.add_parser("verify", help="replay the claims of a certificate")
    sp.add_argument("path")
    return p


def _fail(msg: str) -> int:
    print(json.dumps({"error": msg}), file=sys.stderr)
    return 2


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        try:
            with open(args.path) as fh:
                cert = json.load(fh)
            rep = verify_certificate(cert)
        except (OSError, json.JSONDecodeError, ValueError, KeyError) as exc:
            return _fail(str(exc) if not isinstance(exc, DigestMismatch) else f"digest mismatch: {exc}")
        for w in rep.warnings:
            print(f"warning: {w}", file=sys.stderr)
        sys.stdout.write(dumps(rep.to_json()))
        return 0 if rep.ok else 1
    try:
        from . import forge as forge_mod
        forge_mod.LOG_PREC = max(forge_mod.LOG_PREC, default_precision())
        kind, inputs, result, claims = COMMANDS[args.command](args)
    except (InputError, SpecError, SeparationError, BaseError, json.JSONDecodeError, OSError) as exc:
        return _fail(str(exc))
    except ValueError as exc:
        return _fail(f"invalid input: {exc}")
    cert = build_certificate(kind, inputs, result, claims)
    text = dumps(cert)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if all(c.verdict for c in claims) else 1


if __name__ == "__main__":
    sys.exit(main())
