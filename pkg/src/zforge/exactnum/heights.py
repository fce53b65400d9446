"""The three height rules of the paper, checked with enclosures."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebraic import AlgebraicNumber, log_height_h
from .enclosure import RealEnclosure, log_enclosure
from .field import FieldElement, element_min_poly, from_generators

WIDTH = Fraction(1, 1 << 40)


@dataclass
class HRuleReport:
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c["holds"] for c in self.checks.values())

    def witnesses(self) -> list[tuple[str, Fraction, Fraction]]:
        """(id, a, b) triples with holds <=> a <= b for every pair."""
        out = []
        for name, c in self.checks.items():
            for k, (a, b) in enumerate(c["witness"]):
                out.append((f"{name}[{k}]", a, b))
        return out

    def to_json(self) -> dict:
        return {"ok": self.ok, "checks": {k: {kk: vv for kk, vv in v.items() if kk != "witness"}
                                          for k, v in self.checks.items()}}


def _enc(e: RealEnclosure) -> dict:
    return {"lo": f"{e.lo.numerator}/{e.lo.denominator}", "hi": f"{e.hi.numerator}/{e.hi.denominator}"}


def _as_number(y) -> AlgebraicNumber:
    return element_min_poly(y) if isinstance(y, FieldElement) else y


def check_h_rules(y1, y2=None, n: int = 2) -> HRuleReport:
    """Check h(y1^n) = n h(y1), the product and sum rules, and explicit H bounds.

    ``y1``/``y2`` are AlgebraicNumbers or FieldElements of one field.
    """
    if y2 is None:
        y2 = y1
    if isinstance(y1, FieldElement):
        e1, e2 = y1, y2
    else:
        _, (e1, e2) = from_generators([y1, y2], close_conjugation=False)
    a1, a2 = _as_number(y1), _as_number(y2)
    h1, h2 = log_height_h(a1, WIDTH), log_height_h(a2, WIDTH)
    log2 = log_enclosure(2, prec=200)
    rep = HRuleReport()

    power = element_min_poly(e1 ** n)
    hp = log_height_h(power, WIDTH)
    scaled = h1 * n
    tol = WIDTH * (n + 1)
    rep.checks["power"] = {"lhs": _enc(hp), "rhs": _enc(scaled),
                           "holds": hp.lo - tol <= scaled.hi and scaled.lo - tol <= hp.hi,
                           "witness": [[hp.lo - tol, scaled.hi], [scaled.lo - tol, hp.hi]]}

    prod = element_min_poly(e1 * e2)
    hprod = log_height_h(prod, WIDTH)
    rep.checks["product"] = {"lhs": _enc(hprod), "rhs": _enc(h1 + h2),
                             "holds": hprod.lo <= (h1 + h2).hi + WIDTH,
                             "witness": [[hprod.lo, (h1 + h2).hi + WIDTH]]}

    total = element_min_poly(e1 + e2)
    hsum = log_height_h(total, WIDTH)
    rhs = h1 + h2 + log2
    rep.checks["sum"] = {"lhs": _enc(hsum), "rhs": _enc(rhs), "holds": hsum.lo <= rhs.hi + WIDTH,
                         "witness": [[hsum.lo, rhs.hi + WIDTH]]}

    # explicit H bounds from h >= (1/d) log H - log 2
    for name, num, bound in (("H_power", power, (scaled + log2) * power.degree),
                             ("H_product", prod, (h1 + h2 + log2) * prod.degree),
                             ("H_sum", total, (h1 + h2 + log2 * 2) * total.degree)):
        lhs = log_enclosure(num.height_H, prec=200)
        rep.checks[name] = {"lhs": _enc(lhs), "rhs": _enc(bound), "holds": lhs.hi <= bound.hi,
                            "witness": [[lhs.hi, bound.hi]]}
    return rep
