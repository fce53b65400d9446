"""Lemma 5 at a fixed truncation: look for f̃(x, y) of total degree <= n with f̃(x, g(x)) ≡ 0 mod x^{N+1}.

INDEPENDENT only means no relation of that degree is visible at this N.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Sequence

from .exactnum.linalg import column_kernel, rank
from .exactnum.rational import frac_str, parse_frac

INDEPENDENT = "INDEPENDENT"
DEPENDENT = "DEPENDENT"


def monomials(n: int) -> list[tuple[int, int]]:
    """(r, s) with r + s <= n, ordered by s then r."""
    return [(r, s) for s in range(n + 1) for r in range(n + 1 - s)]


def _truncated_mul(a: Sequence[Fraction], b: Sequence[Fraction], N: int) -> list[Fraction]:
    out = [Fraction(0)] * (N + 1)
    for i, x in enumerate(a[:N + 1]):
        if x:
            for j, y in enumerate(b[:N + 1 - i]):
                if y:
                    out[i + j] += x * y
    return out


@dataclass(frozen=True)
class ProjectionMatrix:
    n: int
    N: int
    monomials: tuple[tuple[int, int], ...]
    rows: tuple[tuple[Fraction, ...], ...]

    def rank(self) -> int:
        return rank([list(r) for r in self.rows]) if any(any(r) for r in self.rows) else 0


def _coerce(g: Sequence) -> list[Fraction]:
    return [parse_frac(c) if isinstance(c, str) else Fraction(c) for c in g]


def projection_matrix(g: Sequence, n: int, N: int) -> ProjectionMatrix:
    """Rows π_N(x^r g^s) in monomial order."""
    g = _coerce(g)
    if N < 0 or n < 0:
        raise ValueError("n and N must be non-negative")
    if N + 1 > len(g):
        raise ValueError(f"insufficient prefix: need {N + 1} coefficients, have {len(g)}")
    g = g[:N + 1]
    powers = [[Fraction(1)] + [Fraction(0)] * N]
    for _ in range(n):
        powers.append(_truncated_mul(powers[-1], g, N))
    mons = monomials(n)
    rows = []
    for r, s in mons:
        row = [Fraction(0)] * r + powers[s][:N + 1 - r]
        rows.append(tuple(row))
    return ProjectionMatrix(n, N, tuple(mons), tuple(rows))


@dataclass(frozen=True)
class AnnihilatorCandidate:
    terms: tuple[tuple[int, int, Fraction], ...]      # (r, s, c): c x^r y^s
    n: int
    N: int
    lead: tuple[int, int]

    def evaluate_mod(self, g: Sequence, N: int | None = None) -> list[Fraction]:
        """f̃(x, g(x)) mod x^{N+1}, Horner in y (independent of the matrix rows)."""
        N = self.N if N is None else N
        g = _coerce(g)[:N + 1]
        deg_y = max(s for _, s, _ in self.terms)
        acc = [Fraction(0)] * (N + 1)
        for s in range(deg_y, -1, -1):
            acc = _truncated_mul(acc, g, N)
            for r, s2, c in self.terms:
                if s2 == s and r <= N:
                    acc[r] += c
        return acc

    def verify(self, g: Sequence) -> bool:
        return not any(self.evaluate_mod(g))

    def to_json(self) -> list:
        return [[r, s, frac_str(c)] for r, s, c in self.terms]

    def __str__(self):
        parts = []
        for r, s, c in self.terms:
            mon = "·".join(p for p in (f"x^{r}" if r > 1 else "x" if r == 1 else "",
                                       f"y^{s}" if s > 1 else "y" if s == 1 else "") if p) or "1"
            parts.append(f"{c}·{mon}")
        return " + ".join(parts)


@dataclass
class DetectResult:
    status: str
    candidate: AnnihilatorCandidate | None
    rank: int
    rows: int

    def to_json(self) -> dict:
        return {"status": self.status, "annihilator": None if self.candidate is None else self.candidate.to_json(),
                "rank": self.rank, "rows": self.rows,
                "caveat": "INDEPENDENT means no relation of this degree at this truncation"}


def _primitive(vec: Sequence[Fraction]) -> list[Fraction]:
    den = reduce(lcm, (v.denominator for v in vec), 1)
    ints = [int(v * den) for v in vec]
    g = reduce(gcd, ints, 0) or 1
    ints = [v // g for v in ints]
    last = next(v for v in reversed(ints) if v)
    if last < 0:
        ints = [-v for v in ints]
    return [Fraction(v) for v in ints]


def detect(g: Sequence, n: int, N: int) -> DetectResult:
    pm = projection_matrix(g, n, N)
    basis = column_kernel([list(r) for r in pm.rows])
    rk = len(pm.rows) - len(basis)
    if not basis:
        return DetectResult(INDEPENDENT, None, rk, len(pm.rows))
    vec = _primitive(basis[0])
    terms = tuple((r, s, c) for (r, s), c in zip(pm.monomials, vec) if c)
    lead = next((r, s) for (r, s), c in zip(reversed(pm.monomials), reversed(vec)) if c)
    cand = AnnihilatorCandidate(terms, n, N, lead)
    if not cand.verify(g):
        raise ArithmeticError("kernel vector failed the verification pass")
    return DetectResult(DEPENDENT, cand, rk, len(pm.rows))


@dataclass
class StabilizationProfile:
    n: int
    dims: list[tuple[int, int]]
    stable_from: int | None
    monotone: bool

    @property
    def final_dim(self) -> int | None:
        return self.dims[-1][1] if self.dims else None

    def to_json(self) -> dict:
        return {"n": self.n, "dims": [list(d) for d in self.dims], "stable_from": self.stable_from,
                "monotone": self.monotone, "max_dim": (self.n + 1) * (self.n + 2) // 2,
                "note": "stabilization is observed within the range only, never certified final"}


def stabilization_scan(g: Sequence, n: int, N_range: Sequence[int]) -> StabilizationProfile:
    dims = [(N, projection_matrix(g, n, N).rank()) for N in N_range]
    monotone = all(b[1] >= a[1] for a, b in zip(dims, dims[1:]))
    stable_from = None
    if dims:
        last = dims[-1][1]
        for N, d in reversed(dims):
            if d != last:
                break
            stable_from = N
        if stable_from == dims[-1][0] and len(dims) > 1:
            stable_from = None          # only the final N has this value: nothing observed
    return StabilizationProfile(n, dims, stable_from, monotone)
