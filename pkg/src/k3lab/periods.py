"""Hypergeometric series, the I-function layers and the A0 period map.

Coefficient identities are exact (``Fraction``); analytic evaluations use
complex doubles through the kernels in this module, which are compiled
with numba unless ``K3LAB_DISABLE_NUMBA`` is set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Sequence

import numpy as np

from ._accel import njit
from .galedisc import LaurentPoly
from .report import CheckReport, check

__all__ = [
    "TruncSeries2",
    "NilCohClass",
    "WeightedPoint",
    "ModularRingData",
    "gauss_2f1",
    "gauss_2f1_derivs",
    "appell_f4",
    "f4_coefficient",
    "eta1_coeffs",
    "gkz_recurrence_check",
    "ifunction_FG",
    "ifunction_FG_oracle",
    "period_map_A0",
    "lambda_mu_from_xy",
    "blowup_map_A0",
    "wproj_homogeneity_check",
    "hilbert_relation_degree_check",
    "modular_discriminant",
    "indeterminacy_check",
    "branch_locus_check",
]


# ---------------------------------------------------------------------------
# series containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TruncSeries2:
    max_total_degree: int
    coeffs: Mapping[tuple[int, int], object]

    def __post_init__(self):
        bad = [k for k in self.coeffs if k[0] + k[1] > self.max_total_degree or min(k) < 0]
        if bad:
            raise ValueError(f"coefficients beyond total degree {self.max_total_degree}: {bad[:3]}")

    def __getitem__(self, nm: tuple[int, int]):
        return self.coeffs.get(nm, 0)

    def keys(self):
        return [(n, d - n) for d in range(self.max_total_degree + 1) for n in range(d, -1, -1)]

    def map(self, f: Callable) -> "TruncSeries2":
        return TruncSeries2(self.max_total_degree, {k: f(k, v) for k, v in self.coeffs.items()})

    def to_json_dict(self) -> dict:
        return {f"({n},{m})": str(self[(n, m)]) for n, m in self.keys()}


class NilCohClass:
    """Series-valued class c0 + c1 p1 + c2 p2 + c12 p1 p2 with p1^2 = p2^2 = 0.

    Each component is a dict (n, m) -> Fraction truncated at total degree
    ``deg``.
    """

    __slots__ = ("c", "deg")
    BASIS = ((0, 0), (1, 0), (0, 1), (1, 1))

    def __init__(self, comps: Mapping[tuple[int, int], Mapping], deg: int):
        self.deg = deg
        self.c = {b: {k: Fraction(v) for k, v in comps.get(b, {}).items()
                      if k[0] + k[1] <= deg and v != 0} for b in self.BASIS}

    @classmethod
    def linear(cls, const, p1, p2, deg: int) -> "NilCohClass":
        """Constant class const + p1 * P1 + p2 * P2 (scalars)."""
        return cls({(0, 0): {(0, 0): const}, (1, 0): {(0, 0): p1}, (0, 1): {(0, 0): p2}}, deg)

    def __mul__(self, other: "NilCohClass") -> "NilCohClass":
        out: dict = {b: {} for b in self.BASIS}
        for b1, s1 in self.c.items():
            for b2, s2 in other.c.items():
                b = (b1[0] + b2[0], b1[1] + b2[1])
                if b not in out:
                    continue
                tgt = out[b]
                for k1, v1 in s1.items():
                    for k2, v2 in s2.items():
                        k = (k1[0] + k2[0], k1[1] + k2[1])
                        if k[0] + k[1] <= self.deg:
                            tgt[k] = tgt.get(k, 0) + v1 * v2
        return NilCohClass(out, self.deg)

    def inverse_scalar_unit(self) -> "NilCohClass":
        """Inverse of a class whose series components are all constants.

        With a = a0 (1 + y) and y nilpotent (y^3 = 0): a^-1 = (1 - y + y^2) / a0.
        """
        if any(k != (0, 0) for s in self.c.values() for k in s):
            raise ValueError("inverse only implemented for constant classes")
        a0 = self.c[(0, 0)].get((0, 0), 0)
        if a0 == 0:
            raise ZeroDivisionError("constant part vanishes")
        y = NilCohClass({b: {k: v / a0 for k, v in s.items()} for b, s in self.c.items() if b != (0, 0)},
                        self.deg)
        one = NilCohClass({(0, 0): {(0, 0): 1 / Fraction(a0)}}, self.deg)
        return one * (NilCohClass({(0, 0): {(0, 0): 1}}, self.deg) + y.scale(-1) + y * y)

    def scale(self, t) -> "NilCohClass":
        return NilCohClass({b: {k: v * t for k, v in s.items()} for b, s in self.c.items()}, self.deg)

    def shift(self, d: tuple[int, int]) -> "NilCohClass":
        return NilCohClass({b: {(k[0] + d[0], k[1] + d[1]): v for k, v in s.items()}
                            for b, s in self.c.items()}, self.deg)

    def __add__(self, other: "NilCohClass") -> "NilCohClass":
        return NilCohClass({b: {k: self.c[b].get(k, 0) + other.c[b].get(k, 0)
                                for k in set(self.c[b]) | set(other.c[b])} for b in self.BASIS}, self.deg)

    def component(self, b: tuple[int, int]) -> dict:
        return dict(self.c[b])


@dataclass(frozen=True)
class WeightedPoint:
    coords: tuple
    weights: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != len(self.weights):
            raise ValueError("coords and weights differ in length")
        if all(c == 0 for c in self.coords):
            raise ValueError("all coordinates zero")
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be positive")

    def rescale(self, t) -> "WeightedPoint":
        return WeightedPoint(tuple(c * t ** w for c, w in zip(self.coords, self.weights)), self.weights)

    def normalized(self) -> "WeightedPoint":
        """Scale the first coordinate to 1 (requires weight 1 and nonzero)."""
        c0 = self.coords[0]
        if c0 == 0 or self.weights[0] != 1:
            raise ValueError("cannot normalize this point")
        return self.rescale(1 / Fraction(c0) if isinstance(c0, (int, Fraction)) else 1 / c0)

    def equivalent(self, other: "WeightedPoint") -> bool:
        """Exact equality in weighted projective space (first coordinate nonzero)."""
        return self.weights == other.weights and self.normalized().coords == other.normalized().coords


# ---------------------------------------------------------------------------
# float kernels
# ---------------------------------------------------------------------------


@njit
def _f21_kernel(a, b, c, x, tol, maxn):
    s = 0.0 + 0.0j
    t = 1.0 + 0.0j
    small = 0
    n = 0
    while n < maxn:
        s += t
        if abs(t) <= tol * abs(s):
            small += 1
            if small >= 3:
                return s, n + 1
        else:
            small = 0
        t = t * (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x
        n += 1
    return s, -1


@njit
def _f21_d2_kernel(a, b, c, x, tol, maxn):
    """Value, first and second derivative by termwise differentiation."""
    s0 = 0.0 + 0.0j
    s1 = 0.0 + 0.0j
    s2 = 0.0 + 0.0j
    coef = 1.0 + 0.0j  # (a)_n (b)_n / ((c)_n n!)
    xm2 = 0.0 + 0.0j  # x^(n-2)
    xm1 = 0.0 + 0.0j  # x^(n-1)
    xp = 1.0 + 0.0j  # x^n
    small = 0
    n = 0
    while n < maxn:
        t0 = coef * xp
        s0 += t0
        s1 += coef * n * xm1
        s2 += coef * n * (n - 1.0) * xm2
        if n > 2 and abs(coef) * (n + 1.0) * (n + 1.0) * max(abs(xm2), abs(xp)) <= tol * abs(s0):
            small += 1
            if small >= 3:
                return s0, s1, s2, n + 1
        else:
            small = 0
        coef = coef * (a + n) * (b + n) / ((c + n) * (n + 1.0))
        xm2 = xm1
        xm1 = xp
        xp = xp * x
        if n == 0:
            xm2 = 0.0 + 0.0j
        n += 1
    return s0, s1, s2, -1


@njit
def _f4_kernel(a, b, c1, c2, z, w, tol, maxk):
    """Sum of F4 by total-degree diagonals; diag[n] holds the (n, k-n) term."""
    diag = np.zeros(maxk + 2, dtype=np.complex128)
    diag[0] = 1.0
    total = 1.0 + 0.0j
    small = 0
    for k in range(0, maxk):
        nxt = np.zeros(maxk + 2, dtype=np.complex128)
        for n in range(k + 1):
            m = k - n
            # (n, m) -> (n + 1, m)
            nxt[n + 1] = diag[n] * (a + k) * (b + k) / ((c1 + n) * (n + 1.0)) * z
        # (0, k) -> (0, k + 1)
        nxt[0] = diag[0] * (a + k) * (b + k) / ((c2 + k) * (k + 1.0)) * w
        block = 0.0 + 0.0j
        mag = 0.0
        for n in range(k + 2):
            block += nxt[n]
            mag += abs(nxt[n])
        total += block
        diag = nxt
        if mag < tol * abs(total):
            small += 1
            if small >= 3:
                return total, k + 2
        else:
            small = 0
    return total, -1


# ---------------------------------------------------------------------------
# 2F1 and F4
# ---------------------------------------------------------------------------


def _check_c(c):
    if c <= 0 and float(c) == int(c):
        raise ValueError("c is a nonpositive integer")


def gauss_2f1(a, b, c, x: complex, tol: float = 1e-15, maxn: int = 200000) -> tuple[complex, int]:
    """Partial sums of 2F1(a, b; c; x) for |x| < 1; returns (value, terms used)."""
    _check_c(c)
    x = complex(x)
    if abs(x) >= 1:
        raise ValueError("outside radius of convergence |x| < 1")
    s, n = _f21_kernel(float(a), float(b), float(c), x, tol, maxn)
    if n < 0:
        raise RuntimeError("2F1 series did not converge")
    return complex(s), int(n)


def gauss_2f1_derivs(a, b, c, x: complex, tol: float = 1e-15, maxn: int = 200000):
    """(u, u', u'') of 2F1 at x by termwise differentiation."""
    _check_c(c)
    x = complex(x)
    if abs(x) >= 1:
        raise ValueError("outside radius of convergence |x| < 1")
    s0, s1, s2, n = _f21_d2_kernel(float(a), float(b), float(c), x, tol, maxn)
    if n < 0:
        raise RuntimeError("2F1 derivative series did not converge")
    return complex(s0), complex(s1), complex(s2)


def appell_f4(a, b, c1, c2, z: complex, w: complex, tol: float = 1e-15, maxk: int = 4000) -> tuple[complex, int]:
    """Appell F4 in its convergence domain sqrt|z| + sqrt|w| < 1."""
    _check_c(c1)
    _check_c(c2)
    z, w = complex(z), complex(w)
    if math.sqrt(abs(z)) + math.sqrt(abs(w)) >= 1:
        raise ValueError("outside F4 convergence domain sqrt|z| + sqrt|w| < 1")
    s, k = _f4_kernel(float(a), float(b), float(c1), float(c2), z, w, tol, maxk)
    if k < 0:
        raise RuntimeError("F4 series did not converge")
    return complex(s), int(k)


def _poch(a: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for i in range(k):
        out *= a + i
    return out


def f4_coefficient(a, b, c1, c2, n: int, m: int, z=1, w=1) -> Fraction:
    """Exact coefficient of lambda^n mu^m in F4(a, b, c1, c2; z lambda, w mu)."""
    a, b, c1, c2, z, w = map(Fraction, (a, b, c1, c2, z, w))
    return (_poch(a, n + m) * _poch(b, n + m) / (_poch(c1, n) * _poch(c2, m)
            * math.factorial(n) * math.factorial(m)) * z ** n * w ** m)


def eta1_coeffs(max_deg: int) -> TruncSeries2:
    f = math.factorial
    return TruncSeries2(max_deg, {
        (n, d - n): Fraction((-1) ** d * f(3 * d), f(n) ** 2 * f(d - n) ** 2 * f(d))
        for d in range(max_deg + 1) for n in range(d + 1)
    })


# ---------------------------------------------------------------------------
# GKZ recurrences
# ---------------------------------------------------------------------------


def _pairings(rows: Sequence[Sequence[int]], d: Sequence[int]) -> list[int]:
    """<d, c_j> = sum_p d_p c_j^(p) for every column j."""
    return [sum(dp * r[j] for dp, r in zip(d, rows)) for j in range(len(rows[0]))]


def _rising(x: int, k: int) -> int:
    out = 1
    for i in range(1, k + 1):
        out *= x + i
    return out


def gkz_recurrence_check(rows: Sequence[Sequence[int]], S: TruncSeries2, a0_twist: bool = False,
                         prefix: str = "gkz") -> list[CheckReport]:
    """Two-term box recurrences A(d + e_p) * Q_p(d) = A(d) * P_p(d) for each row.

    For a row l the shift d -> d + e_p changes <d, c_j> by l_j.  Columns
    with l_j < 0 contribute the rising factorial of -<d, c_j> (of length
    -l_j) to the numerator, the others to the denominator.  With
    ``a0_twist`` every step also carries the sign (-1)^{l_0}.
    """
    out = []
    D = S.max_total_degree
    for p, row in enumerate(rows):
        first = None
        count = 0
        for d in S.keys():
            if d[0] + d[1] + 1 > D:
                continue
            e = (d[0] + (p == 0), d[1] + (p == 1))
            pair = _pairings(rows, d)
            num = den = 1
            for x, l in zip(pair, row):
                if l < 0:
                    num *= _rising(-x, -l)
                elif l > 0:
                    den *= _rising(x, l)
            sign = (-1) ** (row[0] % 2) if a0_twist else 1
            count += 1
            if S[e] * den != sign * num * S[d]:
                first = (d, e)
                break
        ok = first is None
        out.append(check(f"{prefix}.row{p}", ok,
                         f"row {tuple(row)}: {count} box relations hold" if ok
                         else f"row {tuple(row)} fails between {first[0]} and {first[1]}"))
    return out


# ---------------------------------------------------------------------------
# I-function layers F and G
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _harmonic(n: int) -> Fraction:
    return sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))


def ifunction_FG(rows: Sequence[Sequence[int]], max_deg: int) -> tuple[TruncSeries2, tuple[TruncSeries2, TruncSeries2]]:
    """Scalar part F and non-logarithmic p-parts G_1, G_2 of the I-function.

    ``rows`` are the Gale rows c^(p) with column 0 the origin, so that
    <d, u_j> = sum_p d_p c_j^(p) for j >= 1 and <d, v> = -sum_p d_p c_0^(p).
    """
    rows = [tuple(r) for r in rows]
    vp = [-r[0] for r in rows]
    F, G1, G2 = {}, {}, {}
    for dsum in range(max_deg + 1):
        for n in range(dsum, -1, -1):
            d = (n, dsum - n)
            pair = _pairings(rows, d)
            dv, du = -pair[0], pair[1:]
            if dv < 0 or any(x < 0 for x in du):
                continue
            c = Fraction(math.factorial(dv))
            for x in du:
                c /= math.factorial(x)
            F[d] = c
            for p, G in enumerate((G1, G2)):
                w = vp[p] * _harmonic(dv) - sum(r_j * _harmonic(x) for r_j, x in zip(rows[p][1:], du))
                if c * w:
                    G[d] = c * w
    return (TruncSeries2(max_deg, F), (TruncSeries2(max_deg, G1), TruncSeries2(max_deg, G2)))


def ifunction_FG_oracle(rows: Sequence[Sequence[int]], max_deg: int) -> tuple[dict, dict, dict]:
    """F, G_1, G_2 read off the truncated cohomology-valued product at z = 1."""
    rows = [tuple(r) for r in rows]
    vcls = (0, -rows[0][0], -rows[1][0])
    total = NilCohClass({}, max_deg)
    for dsum in range(max_deg + 1):
        for n in range(dsum, -1, -1):
            d = (n, dsum - n)
            pair = _pairings(rows, d)
            dv, du = -pair[0], pair[1:]
            if dv < 0 or any(x < 0 for x in du):
                continue
            term = NilCohClass({(0, 0): {d: 1}}, max_deg)
            for k in range(1, dv + 1):
                term = term * NilCohClass.linear(k, vcls[1], vcls[2], max_deg)
            den = NilCohClass({(0, 0): {(0, 0): 1}}, max_deg)
            for j, x in enumerate(du, start=1):
                for k in range(1, x + 1):
                    den = den * NilCohClass.linear(k, rows[0][j], rows[1][j], max_deg)
            total = total + term * den.inverse_scalar_unit()
    return total.component((0, 0)), total.component((1, 0)), total.component((0, 1))


def lambda_mu_from_xy(x, y):
    """(lambda, mu) with -27 lambda = x (1 - y) and -27 mu = y (1 - x).

    With x = x(s1) and y = y(s2) this is the inverse of the A1 period map;
    mu pairs y(s2) with x(s1).
    """
    return x * (y - 1) / 27, y * (x - 1) / 27


# ---------------------------------------------------------------------------
# A0 period map and weighted projective checks
# ---------------------------------------------------------------------------


def period_map_A0(lam, mu) -> WeightedPoint:
    """[1 : 25 mu / (2 (lam - 1/4)^3) : -3125 mu^2 / (lam - 1/4)^5] in P(1,3,5)."""
    exact = isinstance(lam, (int, Fraction)) and isinstance(mu, (int, Fraction))
    quarter = Fraction(1, 4) if exact else 0.25
    s = lam - quarter
    if s == 0:
        raise ValueError("indeterminacy center lambda = 1/4")
    if exact:
        mu = Fraction(mu)
        return WeightedPoint((Fraction(1), Fraction(25) * mu / (2 * s ** 3), -3125 * mu ** 2 / s ** 5), (1, 3, 5))
    return WeightedPoint((1.0, 25 * mu / (2 * s ** 3), -3125 * mu ** 2 / s ** 5), (1, 3, 5))


def blowup_map_A0() -> list[LaurentPoly]:
    """[nu : lam : mu] -> [lam - nu^2/4 : (25/2) nu mu : -3125 mu^2]."""
    return [
        LaurentPoly({(0, 1, 0): 1, (2, 0, 0): Fraction(-1, 4)}),
        LaurentPoly({(1, 0, 1): Fraction(25, 2)}),
        LaurentPoly({(0, 0, 2): -3125}),
    ]


def wproj_homogeneity_check(components: Sequence[LaurentPoly], src_weights: Sequence[int],
                            dst_weights: Sequence[int]) -> int | None:
    """k such that component i is quasi-homogeneous of degree k * dst_weights[i]; else None."""
    if len(components) != len(dst_weights):
        raise ValueError("one component per target coordinate required")
    k = None
    for comp, w in zip(components, dst_weights):
        degs = {sum(e * s for e, s in zip(exp, src_weights)) for exp in comp.terms}
        if len(degs) != 1:
            return None
        (deg,) = degs
        if deg % w:
            return None
        kk = deg // w
        if k is None:
            k = kk
        elif kk != k:
            return None
    return k


def indeterminacy_check() -> CheckReport:
    """The blow-up map has base locus exactly [1 : 1/4 : 0] in P(1,2,5).

    Components vanish simultaneously iff mu = 0 and lam = nu^2/4; the
    chart nu = 0 then forces lam = mu = 0 (no point), and nu = 1 leaves the
    single point lam = 1/4.
    """
    comps = blowup_map_A0()
    at_center = [c((Fraction(1), Fraction(1, 4), Fraction(0))) for c in comps]
    # for nu = 1 and mu = 0 the first component is lam - 1/4, linear in lam
    lin = comps[0]((Fraction(1), Fraction(0), Fraction(0))), comps[0]((Fraction(1), Fraction(1), Fraction(0)))
    root = -lin[0] / (lin[1] - lin[0])
    nu0 = [c((Fraction(0), Fraction(1), Fraction(0))) for c in comps]
    ok = all(v == 0 for v in at_center) and root == Fraction(1, 4) and nu0[0] != 0
    return check("A0.periods.indeterminacy", ok,
                 f"components at [1:1/4:0] = {[str(v) for v in at_center]}; unique lam root {root} on nu = 1, mu = 0",)


@dataclass(frozen=True)
class ModularRingData:
    weights: tuple[int, int, int, int] = (2, 6, 10, 15)
    relation: LaurentPoly = field(default=None)

    def __post_init__(self):
        if self.relation is None:
            A, B, C, D = (LaurentPoly.monomial(e) for e in ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)))
            object.__setattr__(self, "relation", D * D * 144 - modular_discriminant(A, B, C))


def modular_discriminant(A, B, C):
    """Delta(A, B, C) = -1728 B^5 + 720 A B^3 C - 80 A^2 B C^2 + 64 A^3 (5 B^2 - A C)^2 + C^3."""
    return (B ** 5 * (-1728) + A * B ** 3 * C * 720 - A ** 2 * B * C ** 2 * 80
            + A ** 3 * (B ** 2 * 5 - A * C) ** 2 * 64 + C ** 3)


def hilbert_relation_degree_check(R: ModularRingData | None = None) -> list[CheckReport]:
    R = R or ModularRingData()
    out = []
    for exp, coef in R.relation.terms.items():
        deg = sum(e * w for e, w in zip(exp, R.weights))
        mono = "".join(f"{v}^{e}" if e > 1 else v for v, e in zip("ABCD", exp) if e)
        out.append(check(f"A0.periods.modular_ring.{mono}", deg == 30, f"{coef} {mono}: weighted degree {deg}"))
    return out


def branch_locus_check(points: Sequence[tuple[Fraction, Fraction]]) -> list[CheckReport]:
    """Delta(1, B, C) = 0 at period images of discriminant points (exact)."""
    out = []
    for i, (lam, mu) in enumerate(points):
        cid = f"A0.periods.branch{i:02d}"
        try:
            P = period_map_A0(lam, mu)
        except ValueError as exc:
            out.append(CheckReport(cid, "skip", str(exc)))
            continue
        _, B, C = P.coords
        val = modular_discriminant(Fraction(1), B, C)
        out.append(check(cid, val == 0, f"(lam, mu) = ({lam}, {mu}) -> [1 : {B} : {C}], Delta = {val}"))
    return out
