"""Gale duality, torus coordinates and the registered A-discriminants.

The discriminants themselves are registered data; this module checks
them: quasi-homogeneity, reduction to the Gale torus, and exact vanishing
on the Horn-Kapranov image.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exactcore import Matrix, integer_kernel, same_lattice, solve_rational
from .polytope import PointConfig, cyclic_sort
from .report import CheckReport, check

__all__ = [
    "GaleData",
    "LaurentPoly",
    "TorusCoords",
    "PoleError",
    "fan_sequence",
    "torus_coordinates",
    "horn_kapranov",
    "reduce_discriminant",
    "discriminant_vanishes_on_horn",
    "eval_laurent",
    "superpotential",
    "newton_normal_rays",
    "sample_points",
    "torus_lift",
]


class PoleError(ZeroDivisionError):
    pass


# ---------------------------------------------------------------------------
# Laurent polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LaurentPoly:
    terms: Mapping[tuple[int, ...], Fraction]

    def __post_init__(self):
        clean: dict = {}
        for e, c in self.terms.items():
            e = tuple(int(x) for x in e)
            clean[e] = clean.get(e, 0) + Fraction(c)
        clean = {e: c for e, c in clean.items() if c != 0}
        lens = {len(e) for e in clean}
        if len(lens) > 1:
            raise ValueError("exponent vectors of mixed length")
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    @classmethod
    def monomial(cls, exp: Sequence[int], coef=1) -> "LaurentPoly":
        return cls({tuple(exp): Fraction(coef)})

    @property
    def nvars(self) -> int:
        return len(next(iter(self.terms))) if self.terms else 0

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        d = dict(self.terms)
        for e, c in other.terms.items():
            d[e] = d.get(e, 0) + c
        return LaurentPoly(d)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other) -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            return LaurentPoly({e: c * other for e, c in self.terms.items()})
        d: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                d[e] = d.get(e, 0) + c1 * c2
        return LaurentPoly(d)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            raise ValueError("negative power of a Laurent polynomial")
        out = LaurentPoly({(0,) * self.nvars: 1})
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, LaurentPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    def __call__(self, point):
        return eval_laurent(self, point)

    def min_exponents(self) -> tuple[int, ...]:
        return tuple(min(e[i] for e in self.terms) for i in range(self.nvars))

    def leading(self) -> tuple[tuple[int, ...], Fraction]:
        """Leading term in graded-lex order."""
        e = max(self.terms, key=lambda e: (sum(e), e))
        return e, self.terms[e]

    def normalized(self) -> "LaurentPoly":
        """Primitive integer polynomial, shifted to touch every axis, positive lead."""
        shift = self.min_exponents()
        den = math.lcm(*[c.denominator for c in self.terms.values()])
        num = math.gcd(*[int(c * den) for c in self.terms.values()])
        scale = Fraction(den, num)
        p = LaurentPoly({tuple(a - b for a, b in zip(e, shift)): c * scale for e, c in self.terms.items()})
        return -p if p.leading()[1] < 0 else p

    def to_dict(self, case: str = "", variables: Sequence[str] = ()) -> dict:
        return {"case": case, "variables": list(variables),
                "terms": [{"exp": list(e), "coef": str(c)} for e, c in self.terms.items()]}

    @classmethod
    def from_dict(cls, d: dict) -> "LaurentPoly":
        return cls({tuple(t["exp"]): Fraction(t["coef"]) for t in d["terms"]})

    def __repr__(self):
        return f"LaurentPoly({ {e: str(c) for e, c in self.terms.items()} })"


def eval_laurent(W: LaurentPoly, point: Sequence):
    """Evaluate exactly (Fractions) or in floating/complex arithmetic."""
    if W.terms and len(point) != W.nvars:
        raise ValueError(f"point has {len(point)} coordinates, polynomial has {W.nvars} variables")
    total = 0
    for e, c in W.terms.items():
        t = c if all(isinstance(x, (int, Fraction)) for x in point) else complex(c)
        for x, k in zip(point, e):
            if k < 0 and x == 0:
                raise PoleError(f"pole: zero coordinate raised to power {k}")
            if k:
                t = t * (x ** k if k > 0 else (1 / (Fraction(x) if isinstance(x, int) else x)) ** (-k))
        total = total + t
    return total


def superpotential(A: PointConfig, coeffs: Sequence | None = None) -> LaurentPoly:
    """W = sum a_i x^{v_i} in the variables x (coefficients a_i given)."""
    coeffs = [1] * len(A) if coeffs is None else coeffs
    return LaurentPoly({p: Fraction(c) for p, c in zip(A.points, coeffs)})


# ---------------------------------------------------------------------------
# Gale data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GaleData:
    A: PointConfig
    P_matrix: Matrix = field(repr=False)
    Ptilde: Matrix = field(repr=False)
    kernel_basis: tuple[tuple[int, ...], ...]

    @property
    def r(self) -> int:
        return len(self.kernel_basis)

    def column(self, j: int) -> tuple[int, ...]:
        """(c_j^{(1)}, ..., c_j^{(r)})."""
        return tuple(row[j] for row in self.kernel_basis)


def fan_sequence(A: PointConfig) -> GaleData:
    """Kernel of 0 -> L -> Z^A -> N + Z -> 0 in Hermite normal form."""
    if A.affine_rank != A.dim:
        raise ValueError(f"configuration does not span: affine rank {A.affine_rank} < {A.dim}")
    P = Matrix.from_columns([p for p in A.points])
    Pt = A.homogenized()
    K = integer_kernel(Pt)
    return GaleData(A, P, Pt, tuple(K))


@dataclass(frozen=True)
class TorusCoords:
    monomials: tuple[tuple[int, ...], ...]
    names: tuple[str, ...] = ("lambda", "mu")

    def __call__(self, a: Sequence) -> tuple:
        return tuple(eval_laurent(LaurentPoly.monomial(m), a) for m in self.monomials)

    def describe(self) -> list[str]:
        out = []
        for name, m in zip(self.names, self.monomials):
            num = " ".join(f"a{i}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(m) if k > 0)
            den = " ".join(f"a{i}" + (f"^{-k}" if k < -1 else "") for i, k in enumerate(m) if k < 0)
            out.append(f"{name} = {num or '1'}" + (f" / {den}" if den else ""))
        return out


def torus_coordinates(G: GaleData, registered: Sequence[Sequence[int]] | None = None,
                      names: Sequence[str] = ("lambda", "mu")) -> TorusCoords:
    """Monomial coordinates on the Gale torus.

    ``registered`` rows (the worked examples' choice of lambda, mu) are used
    when given, after checking they span the same lattice as the kernel.
    """
    if registered is None:
        return TorusCoords(G.kernel_basis, tuple(names[: G.r]))
    rows = tuple(tuple(r) for r in registered)
    for r in rows:
        if any(x for x in G.Ptilde @ r):
            raise ValueError(f"registered row {r} is not an affine relation")
    if not same_lattice(rows, G.kernel_basis):
        raise ValueError("registered rows do not span the relation lattice")
    return TorusCoords(rows, tuple(names[: len(rows)]))


# ---------------------------------------------------------------------------
# Horn-Kapranov uniformization
# ---------------------------------------------------------------------------


def horn_kapranov(rows: Sequence[Sequence[int]] | GaleData | TorusCoords,
                  lam: Sequence) -> tuple[Fraction, ...]:
    """Phi_q(lam) = prod_j (sum_p c_j^(p) lam_p)^(c_j^(q)), over every j in A."""
    if isinstance(rows, GaleData):
        rows = rows.kernel_basis
    elif isinstance(rows, TorusCoords):
        rows = rows.monomials
    rows = [tuple(r) for r in rows]
    lam = [Fraction(x) for x in lam]
    n = len(rows[0])
    forms = [sum(r[j] * l for r, l in zip(rows, lam)) for j in range(n)]
    out = []
    for q in range(len(rows)):
        val = Fraction(1)
        for j in range(n):
            k = rows[q][j]
            if k == 0:
                continue
            if forms[j] == 0:
                if k < 0:
                    raise PoleError(f"pole: linear form {j} vanishes with exponent {k}")
                val = Fraction(0)
                continue
            val *= forms[j] ** k
        out.append(val)
    return tuple(out)


# ---------------------------------------------------------------------------
# reduction to torus coordinates
# ---------------------------------------------------------------------------


def reduce_discriminant(delta: LaurentPoly, tc: TorusCoords, Ptilde: Matrix | None = None) -> LaurentPoly:
    """Rewrite a torus-invariant polynomial in a_0..a_n as one in (lambda, mu)."""
    terms = list(delta.terms.items())
    if not terms:
        raise ValueError("zero polynomial")
    base = terms[0][0]
    if Ptilde is not None:
        w0 = Ptilde @ base
        for e, _ in terms:
            if Ptilde @ e != w0:
                raise ValueError(f"not torus-invariant: term with exponent {e} has weight {Ptilde @ e} != {w0}")
    M = Matrix.from_columns(tc.monomials)
    out = {}
    for e, c in terms:
        diff = tuple(a - b for a, b in zip(e, base))
        k = solve_rational(M, diff)
        if k is None or any(Fraction(x).denominator != 1 for x in k):
            raise ValueError(f"not torus-invariant: exponent {e} is not expressible in the torus coordinates")
        out[tuple(int(x) for x in k)] = c
    return LaurentPoly(out).normalized()


def torus_lift(tc: TorusCoords, pt: Sequence) -> tuple:
    """A point a of the big torus with tc(a) = pt (a_j = 1 off two pivot columns)."""
    rows = tc.monomials
    n = len(rows[0])
    for j in range(n):
        for k in range(j + 1, n):
            S = Matrix([[rows[0][j], rows[0][k]], [rows[1][j], rows[1][k]]])
            if abs(S.det()) == 1:
                Si = S.inverse()
                a = [Fraction(1)] * n
                # a_j = pt^(Si row 0), a_k = pt^(Si row 1)
                for idx, r in ((j, Si.row(0)), (k, Si.row(1))):
                    a[idx] = eval_laurent(LaurentPoly.monomial(r), pt)
                return tuple(a)
    raise ValueError("no unimodular pair of columns")


def sample_points(seed: int, count: int, height: int = 9) -> list[tuple[Fraction, Fraction]]:
    """Deterministic small-height rational points (lam1, lam2)."""
    rng = random.Random(seed)
    pts = []
    while len(pts) < count:
        p = tuple(Fraction(rng.randint(-height, height), rng.randint(1, height)) for _ in range(2))
        if p != (0, 0) and p not in pts:
            pts.append(p)
    return pts


def discriminant_vanishes_on_horn(rows, delta_reduced: LaurentPoly, sample_pts: Iterable,
                                  prefix: str = "horn") -> list[CheckReport]:
    """Exact evaluation of the reduced discriminant on Horn-Kapranov points."""
    out = []
    for i, lam in enumerate(sample_pts):
        cid = f"{prefix}.sample{i:02d}"
        try:
            pt = horn_kapranov(rows, lam)
            val = eval_laurent(delta_reduced, pt)
        except PoleError as exc:
            out.append(CheckReport(cid, "skip", f"pole at {tuple(map(str, lam))}: {exc}"))
            continue
        out.append(check(cid, val == 0,
                         f"lam = ({lam[0]}, {lam[1]}) -> ({pt[0]}, {pt[1]}); value {val}"))
    return out


# ---------------------------------------------------------------------------
# Newton polygon
# ---------------------------------------------------------------------------


def newton_normal_rays(p: LaurentPoly) -> list[tuple[int, int]]:
    """Inner edge normals of the Newton polygon of a bivariate polynomial."""
    from .polytope import hull

    P = hull(list(p.terms))
    return cyclic_sort(n for n, _ in P.facets)


def registry_json(case: str, delta: LaurentPoly) -> str:
    return json.dumps(delta.to_dict(case, [f"a{i}" for i in range(delta.nvars)]), indent=2)
