"""Numerical Grothendieck lattice, line-bundle monodromy and cusp fans.

Basis of the rank-4 lattice: ([O], [O_E1], [O_E2], [O_p]).  Matrices act
on column vectors.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exactcore import Matrix, integer_kernel, primitive, signature_of_form
from .lattice import Isometry, Lattice, transvection
from .report import CheckReport, check

__all__ = [
    "NumGroth",
    "Splitting",
    "CuspFan",
    "build_numgroth",
    "tensor_action",
    "tensor_action_closed",
    "hyperbolic_splitting",
    "monodromy_log",
    "matrix_exp_nilpotent",
    "nilpotency_index",
    "orbit_fan",
    "coordinate_change_q",
    "dictionary_check",
]


@dataclass(frozen=True)
class NumGroth:
    gram: Matrix
    pic_gram: Matrix
    chi: tuple[int, int]

    @property
    def lattice(self) -> Lattice:
        return Lattice(self.gram, "N(Y)")


def build_numgroth(pic_gram: Sequence[Sequence[int]] | Matrix) -> NumGroth:
    """Euler pairing on Z[O] + Pic + Z[O_p] for a K3 with the given Picard Gram."""
    P = Matrix(pic_gram)
    if P.shape != (2, 2) or not P.is_symmetric():
        raise ValueError("Picard Gram must be a symmetric 2x2 matrix")
    if P[0, 0] % 2 or P[1, 1] % 2:
        raise ValueError("odd self-intersection: Picard lattice of a K3 is even")
    # chi(O_E) = 1 - g with E.E = 2g - 2
    chi = tuple(1 - (P[i, i] // 2 + 1) for i in range(2))
    g = [
        [-2, -chi[0], -chi[1], -1],
        [-chi[0], P[0, 0], P[0, 1], 0],
        [-chi[1], P[1, 0], P[1, 1], 0],
        [-1, 0, 0, 0],
    ]
    ng = NumGroth(Matrix(g), P, chi)
    if signature_of_form(ng.gram) != (2, 2, 0):
        raise ValueError(f"unexpected signature {signature_of_form(ng.gram)}")
    return ng


def _prime_tensor(ng: NumGroth, i: int) -> Matrix:
    """(-) tensor O(-E_i): [O] -> [O] - [O_Ei], [O_Ej] -> [O_Ej] - (Ei.Ej)[O_p]."""
    cols = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    cols[0][1 + i] -= 1
    for j in range(2):
        cols[1 + j][3] -= ng.pic_gram[i, j]
    return Matrix.from_columns(cols)


def tensor_action(ng: NumGroth, d1: int, d2: int) -> Isometry:
    """Action of (-) tensor O(-D), D = d1 E1 + d2 E2, by the group law."""
    M = (_prime_tensor(ng, 0) ** d1) @ (_prime_tensor(ng, 1) ** d2)
    return Isometry(M, ng.lattice)


def tensor_action_closed(ng: NumGroth, d1: int, d2: int) -> Matrix:
    """Closed form with [O] -> [O] - [O_D] and [O_D] = d1[O_E1] + d2[O_E2] - eps [O_p].

    The group law forces eps = D.D/2 - (d1 E1.E1 + d2 E2.E2)/2.
    """
    P = ng.pic_gram
    d = (d1, d2)
    DD = sum(d[i] * P[i, j] * d[j] for i in range(2) for j in range(2))
    eps = Fraction(DD - d1 * P[0, 0] - d2 * P[1, 1], 2)
    cols = [
        [1, -d1, -d2, eps],
        [0, 1, 0, -(d1 * P[0, 0] + d2 * P[1, 0])],
        [0, 0, 1, -(d1 * P[0, 1] + d2 * P[1, 1])],
        [0, 0, 0, 1],
    ]
    return Matrix.from_columns([[int(x) if Fraction(x).denominator == 1 else x for x in c] for c in cols])


@dataclass(frozen=True)
class Splitting:
    e: tuple[int, ...]
    f: tuple[int, ...]
    n_basis: tuple[tuple[int, ...], tuple[int, ...]]
    T: Lattice  # U + N in the basis (e, f, n1, n2)

    @property
    def change(self) -> Matrix:
        """Columns e, f, n1, n2 in NumGroth coordinates."""
        return Matrix.from_columns([self.e, self.f, *self.n_basis])


def hyperbolic_splitting(ng: NumGroth, f: Sequence[int] | None = None, bound: int = 5) -> Splitting:
    """e = [O_p] and an isotropic partner f orthogonal to the Picard classes."""
    L = ng.lattice
    e = (0, 0, 0, 1)
    pic = [(0, 1, 0, 0), (0, 0, 1, 0)]

    def ok(v):
        return L.pair(v, v) == 0 and L.pair(e, v) == 1 and all(L.pair(v, p) == 0 for p in pic)

    if f is not None:
        f = tuple(f)
        if not ok(f):
            raise ValueError(f"registered f = {f} is not an isotropic partner of e orthogonal to Pic")
    else:
        rng = range(-bound, bound + 1)
        cands = [v for v in itertools.product(rng, repeat=4) if ok(v)]
        if not cands:
            raise ValueError(f"no hyperbolic partner found with coefficients bounded by {bound}")
        f = min(cands, key=lambda v: (sum(map(abs, v)), v))
    n = []
    for p in pic:
        # project to {e, f}^perp: x - (x, f) e - (x, e) f
        xf, xe = L.pair(p, f), L.pair(p, e)
        n.append(tuple(a - xf * b - xe * c for a, b, c in zip(p, e, f)))
    basis = [e, f, *n]
    T = Lattice(Matrix([[L.pair(a, b) for b in basis] for a in basis]), "U + N")
    return Splitting(e, f, (n[0], n[1]), T)


def monodromy_log(T: Isometry | Matrix) -> Matrix:
    """log T = sum_{k>=1} (-1)^{k+1} (T - 1)^k / k for unipotent T."""
    M = T.matrix if isinstance(T, Isometry) else Matrix(T)
    n = M.rows
    X = M - Matrix.identity(n)
    if not (X ** n).is_zero():
        raise ValueError("matrix is not unipotent")
    out = Matrix.zeros(n, n)
    P = Matrix.identity(n)
    for k in range(1, n):
        P = P @ X
        out = out + P.scale(Fraction((-1) ** (k + 1), k))
    return out.map(lambda x: int(x) if Fraction(x).denominator == 1 else Fraction(x))


def matrix_exp_nilpotent(N: Matrix) -> Matrix:
    n = N.rows
    out = Matrix.identity(n)
    P = Matrix.identity(n)
    for k in range(1, n + 1):
        P = P @ N
        if P.is_zero():
            break
        out = out + P.scale(Fraction(1, math.factorial(k)))
    return out.map(lambda x: int(x) if Fraction(x).denominator == 1 else Fraction(x))


def nilpotency_index(N: Matrix) -> int:
    """Smallest k >= 1 with N^k = 0 (0 for the zero matrix)."""
    if N.is_zero():
        return 0
    P = N
    for k in range(2, N.rows + 2):
        P = P @ N
        if P.is_zero():
            return k
    raise ValueError("matrix is not nilpotent")


# ---------------------------------------------------------------------------
# cusp fans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CuspFan:
    rays: tuple[tuple[int, int], ...]
    relations: tuple[tuple[int, int, int], ...]  # for interior rays 1..len-2

    def index(self, r: tuple[int, int]) -> int | None:
        try:
            return self.rays.index(tuple(r))
        except ValueError:
            return None

    def self_intersections(self) -> list[int]:
        """-c for each relation v_prev + v_next = c v with a = b = 1."""
        return [-c for a, b, c in self.relations if a == b == 1]


def _cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def orbit_fan(n_gram: Matrix, gens: Sequence[Matrix], seeds: Sequence[Sequence[int]], word_len: int,
              inverses: bool = True) -> CuspFan:
    """Rays in the orbit of ``seeds`` under words of length <= word_len."""
    G = Matrix(n_gram)
    mats = [Matrix(g) for g in gens]
    for g in mats:
        if g.T @ G @ g != G:
            raise ValueError(f"generator {g.tolist()} is not an isometry")
    if inverses:
        mats = mats + [g.inverse() for g in mats]
    frontier = {primitive(s) for s in seeds}
    seen = set(frontier)
    for _ in range(word_len):
        nxt = set()
        for v in frontier:
            for g in mats:
                w = primitive(g @ v)
                if w not in seen:
                    nxt.add(w)
        seen |= nxt
        frontier = nxt
    rays = sorted(seen, key=functools.cmp_to_key(lambda u, v: -1 if _cross(u, v) > 0 else (1 if _cross(u, v) < 0 else 0)))
    for u, v in zip(rays, rays[1:]):
        if _cross(u, v) <= 0:
            raise ValueError("orbit does not lie in an open half-plane")
    rel = []
    for p, v, n in zip(rays, rays[1:], rays[2:]):
        k = integer_kernel(Matrix([[p[0], n[0], -v[0]], [p[1], n[1], -v[1]]]))
        a, b, c = primitive(k[0])
        if a < 0:
            a, b, c = -a, -b, -c
        rel.append((a, b, c))
    return CuspFan(tuple(rays), tuple(rel))


def coordinate_change_q(case) -> Matrix:
    """Exponent matrix E with log q = E log(lambda, mu)."""
    from .registry import get_case

    M = Matrix(get_case(case).value("q_change"))
    if abs(M.det()) != 1:
        raise ValueError("coordinate change is not invertible over Z")
    return M


# ---------------------------------------------------------------------------
# registered checks
# ---------------------------------------------------------------------------


def dictionary_check(case, bound: int = 3) -> list[CheckReport]:
    """tensor_action(d) = transvection(e, d1 n1 + d2 n2) after the splitting."""
    from .registry import get_case

    ex = get_case(case)
    ng = build_numgroth(ex.pic_gram_mirror)
    sp = hyperbolic_splitting(ng, ex.value("hyperbolic_f"))
    P = sp.change
    Pinv = P.inverse()
    fails = []
    for d1, d2 in itertools.product(range(-bound, bound + 1), repeat=2):
        T = tensor_action(ng, d1, d2).matrix
        phi = transvection(sp.T.basis(0), sp.T.vector(0, 0, d1, d2)).matrix
        if Pinv @ T @ P != phi:
            fails.append((d1, d2))
    n = (2 * bound + 1) ** 2
    return [check(f"{ex.id}.monodromy.dictionary", not fails,
                  f"{n - len(fails)}/{n} degrees match transvections; f = {sp.f}"
                  + (f"; mismatches {fails[:5]}" if fails else ""))]
