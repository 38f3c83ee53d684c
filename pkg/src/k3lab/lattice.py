"""Integral lattices, their vectors and isometries.

Conventions: matrices act on column coordinate vectors, so the matrix of
``s2 o s1`` is ``M2 @ M1``.  The E8 Gram matrix is minus the Cartan
matrix in Bourbaki node order (chain 1-3-4-5-6-7-8, node 2 on node 4).
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .exactcore import Matrix, elementary_divisors, signature_of_form, smith_normal_form
from .report import CheckReport, check

__all__ = [
    "Lattice",
    "LVector",
    "Isometry",
    "hyperbolic",
    "e8",
    "direct_sum",
    "rescale",
    "sdiv",
    "is_m_admissible",
    "transvection",
    "tube_embed",
    "discriminant_group",
    "binary_form_equivalent",
    "check_dolgachev",
]


@dataclass(frozen=True)
class Lattice:
    gram: Matrix
    label: str = ""

    def __post_init__(self):
        if not isinstance(self.gram, Matrix):
            object.__setattr__(self, "gram", Matrix(self.gram))
        if not self.gram.is_symmetric():
            raise ValueError("Gram matrix not symmetric")

    @property
    def rank(self) -> int:
        return self.gram.rows

    @property
    def is_even(self) -> bool:
        return all(self.gram[i, i] % 2 == 0 for i in range(self.rank))

    @cached_property
    def signature(self) -> tuple[int, int, int]:
        return signature_of_form(self.gram)

    def pair(self, x: Sequence, y: Sequence):
        gy = self.gram @ tuple(y)
        return sum((a * b for a, b in zip(x, gy)), 0)

    def vector(self, *coords) -> "LVector":
        if len(coords) == 1 and not isinstance(coords[0], (int, Fraction)):
            coords = tuple(coords[0])
        return LVector(tuple(coords), self)

    def basis(self, i: int) -> "LVector":
        return self.vector([int(j == i) for j in range(self.rank)])

    def to_json(self) -> str:
        return json.dumps({"label": self.label, "gram": self.gram.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "Lattice":
        d = json.loads(text)
        return cls(Matrix(d["gram"]), d.get("label", ""))

    def __repr__(self):
        return f"Lattice({self.label or self.gram.tolist()})"


@dataclass(frozen=True)
class LVector:
    coords: tuple
    parent: Lattice = field(repr=False)

    def __post_init__(self):
        if len(self.coords) != self.parent.rank:
            raise ValueError(f"vector of length {len(self.coords)} in rank-{self.parent.rank} lattice")

    def dot(self, other: "LVector"):
        return self.parent.pair(self.coords, other.coords)

    @property
    def norm(self):
        return self.dot(self)

    def __add__(self, other: "LVector") -> "LVector":
        return LVector(tuple(a + b for a, b in zip(self.coords, other.coords)), self.parent)

    def __sub__(self, other: "LVector") -> "LVector":
        return LVector(tuple(a - b for a, b in zip(self.coords, other.coords)), self.parent)

    def __neg__(self) -> "LVector":
        return LVector(tuple(-a for a in self.coords), self.parent)

    def __rmul__(self, k) -> "LVector":
        return LVector(tuple(k * a for a in self.coords), self.parent)

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.coords)

    def is_primitive(self) -> bool:
        return all(isinstance(a, int) for a in self.coords) and math.gcd(*self.coords) == 1


@dataclass(frozen=True)
class Isometry:
    matrix: Matrix
    parent: Lattice = field(repr=False)

    def __post_init__(self):
        M, G = self.matrix, self.parent.gram
        if M.T @ G @ M != G:
            raise ValueError("matrix does not preserve the form")

    def __call__(self, v: LVector) -> LVector:
        return LVector(self.matrix @ v.coords, self.parent)

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return Isometry(self.matrix @ other.matrix, self.parent)

    def inverse(self) -> "Isometry":
        return Isometry(self.matrix.inverse(), self.parent)


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


def hyperbolic(m: int = 1) -> Lattice:
    """U(m): Gram [[0, m], [m, 0]]."""
    if m == 0:
        raise ValueError("rescale by zero")
    return Lattice(Matrix([[0, m], [m, 0]]), "U" if m == 1 else f"U({m})")


_E8_EDGES = [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)]


def e8() -> Lattice:
    g = [[-2 if i == j else 0 for j in range(8)] for i in range(8)]
    for a, b in _E8_EDGES:
        g[a - 1][b - 1] = g[b - 1][a - 1] = 1
    return Lattice(Matrix(g), "E8")


def direct_sum(*lats: Lattice) -> Lattice:
    lats = tuple(l for l in lats if l.rank)
    if not lats:
        return Lattice(Matrix([]), "0")
    if len(lats) == 1:
        return lats[0]
    return Lattice(Matrix.block_diag(*(l.gram for l in lats)), " + ".join(l.label or "?" for l in lats))


def rescale(L: Lattice, m: int) -> Lattice:
    if m == 0:
        raise ValueError("rescale by zero")
    label = f"{L.label}({m})" if L.label else ""
    if L.label.startswith("U") and L.gram[0, 0] == 0 and L.rank == 2:
        label = hyperbolic(L.gram[0, 1] * m).label
    return Lattice(L.gram.scale(m), label)


# ---------------------------------------------------------------------------
# vector invariants
# ---------------------------------------------------------------------------


def sdiv(v: LVector) -> int:
    """gcd of (v, w) over all lattice vectors w."""
    if v.is_zero():
        raise ValueError("zero vector")
    g = math.gcd(*[int(x) for x in v.parent.gram @ v.coords])
    if g == 0:
        raise ValueError("vector in the radical has no sdiv")
    return g


def _blocks(G: Matrix) -> list[list[int]]:
    """Index sets of the orthogonal block decomposition of a Gram matrix."""
    n = G.rows
    seen, out = set(), []
    for s in range(n):
        if s in seen:
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(n):
                if j not in seen and G[i, j] != 0:
                    seen.add(j)
                    stack.append(j)
        out.append(sorted(comp))
    return out


def _admissible_witness_ok(v: LVector, f: LVector, m: int) -> bool:
    return (not f.is_zero() and f.is_primitive() and f.norm == 0
            and v.dot(f) == m and sdiv(f) == m)


def is_m_admissible(v: LVector, m: int, box: int = 6) -> LVector | None:
    """Return a witness f if ``v`` is m-admissible, else None.

    The witness is first looked for inside an explicit hyperbolic block
    containing v; otherwise a coefficient box ``|c_i| <= box`` is searched
    (only for lattices of rank <= 4).
    """
    L = v.parent
    if v.is_zero() or not v.is_primitive() or v.norm != 0 or sdiv(v) != m:
        return None
    support = {i for i, c in enumerate(v.coords) if c}
    for blk in _blocks(L.gram):
        if len(blk) == 2 and support <= set(blk):
            i, j = blk
            for k in (i, j):
                f = L.basis(k)
                if _admissible_witness_ok(v, f, m):
                    return f
    if L.rank > 4:
        return None
    rng = range(-box, box + 1)
    for coords in sorted(itertools.product(rng, repeat=L.rank), key=lambda c: (sum(map(abs, c)), c)):
        f = L.vector(coords)
        if _admissible_witness_ok(v, f, m):
            return f
    return None


# ---------------------------------------------------------------------------
# transvections and the tube domain
# ---------------------------------------------------------------------------


def transvection(e: LVector, v: LVector) -> Isometry:
    """phi_{e,v}(x) = x - ((v,v)/2 (e,x) + (v,x)) e + (e,x) v."""
    L = e.parent
    if e.norm != 0 or e.dot(v) != 0:
        raise ValueError("not isotropic/orthogonal")
    half = Fraction(v.norm, 2)
    cols = []
    for i in range(L.rank):
        x = L.basis(i)
        ex, vx = e.dot(x), v.dot(x)
        k = half * ex + vx
        col = [xi - k * ei + ex * vi for xi, ei, vi in zip(x.coords, e.coords, v.coords)]
        cols.append([int(c) if Fraction(c).denominator == 1 else Fraction(c) for c in col])
    return Isometry(Matrix.from_columns(cols), L)


def tube_embed(v_re: Sequence, v_im: Sequence, T: Lattice) -> tuple[tuple, tuple]:
    """Real and imaginary parts of Omega = -(v,v)/2 e + f + v.

    ``T`` must be ``U + N`` with e, f the first two basis vectors; v_re and
    v_im are coordinates in N.
    """
    N = Lattice(Matrix([row[2:] for row in T.gram.tolist()[2:]]))
    re = tuple(Fraction(x) for x in v_re)
    im = tuple(Fraction(x) for x in v_im)
    if N.pair(im, im) <= 0:
        raise ValueError("not in tube domain")
    vv_re = N.pair(re, re) - N.pair(im, im)
    vv_im = 2 * N.pair(re, im)
    om_re = (-vv_re / 2, Fraction(1)) + re
    om_im = (-vv_im / 2, Fraction(0)) + im
    return om_re, om_im


def complex_pairing(L: Lattice, x: tuple[tuple, tuple], y: tuple[tuple, tuple]) -> tuple:
    """Bilinear (not Hermitian) pairing of complex vectors given as (re, im)."""
    (xr, xi), (yr, yi) = x, y
    return (L.pair(xr, yr) - L.pair(xi, yi), L.pair(xr, yi) + L.pair(xi, yr))


# ---------------------------------------------------------------------------
# discriminant groups and form equivalence
# ---------------------------------------------------------------------------


def discriminant_group(L: Lattice) -> list[int]:
    if L.gram.det() == 0:
        raise ValueError("degenerate lattice")
    return [d for d in elementary_divisors(L.gram) if d > 1]


def binary_form_equivalent(G1: Matrix, G2: Matrix, bound: int = 3) -> Matrix | None:
    """Unimodular S with S^T G1 S == G2 and |entries| <= bound, or None."""
    G1, G2 = Matrix(G1), Matrix(G2)
    if not (G1.is_symmetric() and G2.is_symmetric()):
        raise ValueError("not symmetric")
    if G1.shape != (2, 2) or G2.shape != (2, 2):
        raise ValueError("binary forms only")
    if G1.det() != G2.det():
        return None
    if (G1[0, 0] % 2 == 0 and G1[1, 1] % 2 == 0) != (G2[0, 0] % 2 == 0 and G2[1, 1] % 2 == 0):
        return None
    if math.gcd(*G1.row(0), *G1.row(1)) != math.gcd(*G2.row(0), *G2.row(1)):
        return None
    L1 = Lattice(G1)
    rng = range(-bound, bound + 1)
    vecs = sorted(itertools.product(rng, repeat=2), key=lambda c: (abs(c[0]) + abs(c[1]), (-c[0], -c[1])))
    firsts = [s for s in vecs if L1.pair(s, s) == G2[0, 0]]
    seconds = [t for t in vecs if L1.pair(t, t) == G2[1, 1]]
    for s in firsts:
        for t in seconds:
            if L1.pair(s, t) == G2[0, 1] and abs(s[0] * t[1] - s[1] * t[0]) == 1:
                return Matrix.from_columns([s, t])
    return None


# ---------------------------------------------------------------------------
# Dolgachev-conjecture checks for the two registered families
# ---------------------------------------------------------------------------


def orthogonal_complement_basis(L: Lattice, vecs: Sequence[LVector]) -> list[tuple[int, ...]]:
    from .exactcore import integer_kernel

    A = Matrix([L.gram @ v.coords for v in vecs])
    return integer_kernel(A)


def check_dolgachev(case: str) -> list[CheckReport]:
    """Sub-checks of the three-part conjecture on the registered lattices."""
    from .registry import get_case

    ex = get_case(case)
    M, T, Mv = ex.lattice("M"), ex.lattice("T"), ex.lattice("M_dual")
    Mv_perp = ex.lattice("M_dual_perp")
    out: list[CheckReport] = []
    p = f"{ex.id}.dolgachev"

    sig = direct_sum(M, T).signature
    out.append(check(f"{p}.k3_signature", sig == (3, 19, 0) and M.rank + T.rank == 22,
                     f"M + T has signature {sig}"))
    dm, dt = discriminant_group(M), discriminant_group(T)
    out.append(check(f"{p}.discriminant_match", dm == dt,
                     f"disc(M) = {dm}, disc(T) = {dt}"))

    # (1) the U summand of T gives a 1-admissible vector
    e = T.basis(0)
    f = is_m_admissible(e, 1)
    out.append(check(f"{p}.one_admissible", f is not None,
                     f"e = {e.coords}, witness f = {None if f is None else f.coords}"))
    if f is None:
        return out

    # (2)/(3) complement of <e, f> is equivalent to M_dual
    comp = orthogonal_complement_basis(T, [e, f])
    Mcheck = Matrix([[T.pair(a, b) for b in comp] for a in comp])
    S = binary_form_equivalent(Mcheck, Mv.gram)
    out.append(check(f"{p}.mcheck_equiv_mdual", S is not None,
                     f"M-check Gram {Mcheck.tolist()} ~ {Mv.gram.tolist()} via S = "
                     f"{None if S is None else S.tolist()}"))
    if S is not None:
        out.append(check(f"{p}.transform_unimodular",
                         abs(S.det()) == 1 and S.T @ Mcheck @ S == Mv.gram,
                         f"det S = {S.det()}"))
    Npic = ex.pic_gram_mirror
    S2 = binary_form_equivalent(Npic, Mv.gram)
    out.append(check(f"{p}.mirror_pic_equiv_mdual", S2 is not None,
                     f"N Gram {Npic.tolist()} ~ {Mv.gram.tolist()} via S = "
                     f"{None if S2 is None else S2.tolist()}"))
    sig2 = direct_sum(Mv, Mv_perp).signature
    out.append(check(f"{p}.mirror_k3_signature",
                     sig2 == (3, 19, 0) and Mv.rank + Mv_perp.rank == 22,
                     f"M_dual + M_dual_perp has signature {sig2}"))
    return out


def smith_check(M: Matrix) -> bool:
    U, D, V = smith_normal_form(M)
    return U @ M @ V == D
