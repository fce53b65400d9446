"""Certificate claims: inequalities between stored rationals that replay without recomputation."""

from __future__ import annotations

import operator
from dataclasses import dataclass
from fractions import Fraction

from .exactnum import FieldElement, UndecidableError
from .exactnum.algebraic import REFINE_CAP_BITS
from .exactnum.enclosure import round_down, round_up
from .exactnum.rational import frac_str, parse_frac

RELATIONS = {"<": operator.lt, "<=": operator.le, ">": operator.gt, ">=": operator.ge, "==": operator.eq,
             "!=": operator.ne}


@dataclass(frozen=True)
class Claim:
    id: str
    relation: str
    lhs: Fraction
    rhs: Fraction
    verdict: bool

    def replay(self) -> bool:
        return RELATIONS[self.relation](self.lhs, self.rhs)

    def to_json(self) -> dict:
        return {"id": self.id, "relation": self.relation, "lhs": frac_str(self.lhs), "rhs": frac_str(self.rhs),
                "verdict": self.verdict}

    @classmethod
    def from_json(cls, d) -> "Claim":
        return cls(d["id"], d["relation"], parse_frac(d["lhs"]), parse_frac(d["rhs"]), bool(d["verdict"]))


def _real_enclosure(x, bits: int) -> tuple[Fraction, Fraction]:
    if isinstance(x, FieldElement):
        if x.is_rational():
            v = x.coords[0]
            return v, v
        b = x.ball(bits)
        return b.re - b.rad, b.re + b.rad
    v = Fraction(x)
    return v, v


def compare(claim_id: str, a, relation: str, b) -> Claim:
    """Decide ``a relation b`` for real values and store a rational witness.

    The witness is a pair of rationals (lhs, rhs) for which the relation
    holds exactly: a lower or upper bound of each side, chosen so the
    stored inequality implies the real one.  Failing relations are stored
    with the same convention and verdict False.
    """
    if relation not in ("<", "<=", ">", ">="):
        raise ValueError(relation)
    if relation in (">", ">="):
        c = compare(claim_id, b, "<" if relation == ">" else "<=", a)
        return Claim(claim_id, relation, c.rhs, c.lhs, c.verdict)
    strict = relation == "<"
    diff = _difference_sign(a, b)
    holds = diff < 0 or (diff == 0 and not strict)
    bits = 32
    while bits <= REFINE_CAP_BITS:
        alo, ahi = _real_enclosure(a, bits)
        blo, bhi = _real_enclosure(b, bits)
        if holds:
            lhs, rhs = round_up(ahi, bits), round_down(blo, bits)
            if (lhs < rhs) or (not strict and lhs <= rhs) or (alo == ahi == blo == bhi):
                if alo == ahi and blo == bhi:
                    lhs, rhs = ahi, blo
                return Claim(claim_id, relation, lhs, rhs, True)
        else:
            lhs, rhs = round_down(alo, bits), round_up(bhi, bits)
            if not RELATIONS[relation](lhs, rhs):
                return Claim(claim_id, relation, lhs, rhs, False)
        bits *= 2
    raise UndecidableError(f"no rational witness for claim {claim_id}")


def _difference_sign(a, b) -> int:
    if isinstance(a, FieldElement) or isinstance(b, FieldElement):
        fe = a if isinstance(a, FieldElement) else b
        return (fe.field.coerce(a) - fe.field.coerce(b)).sign()
    d = Fraction(a) - Fraction(b)
    return (d > 0) - (d < 0)


def exact_claim(claim_id: str, a, relation: str, b) -> Claim:
    """Claim between two exact rationals."""
    a, b = Fraction(a), Fraction(b)
    return Claim(claim_id, relation, a, b, RELATIONS[relation](a, b))
