"""Lattice polytopes of rank <= 3, triangulations and rank-2 secondary fans.

Every predicate is exact.  Facet inequalities are stored as
``<normal, x> >= -offset`` with primitive integer normals.
"""

from __future__ import annotations

import functools
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .exactcore import Matrix, integer_kernel, primitive, solve_rational

__all__ = [
    "PointConfig",
    "Polytope",
    "Triangulation",
    "Circuit",
    "SecondaryFan2",
    "TriangulationError",
    "hull",
    "lattice_points",
    "polar_dual",
    "is_reflexive",
    "normalized_volume",
    "polytope_volume",
    "circuits",
    "check_triangulation",
    "is_regular_triangulation",
    "regularity_witness",
    "enumerate_regular_triangulations",
    "gkz_vector",
    "secondary_fan",
    "cyclic_sort",
    "flip_circuit",
    "triangulation_cone",
    "circuit_ray_in_quotient",
    "MAX_ENUM_POINTS",
]

MAX_ENUM_POINTS = 8


class TriangulationError(ValueError):
    """Raised for simplex lists that are not triangulations.

    ``kind`` is ``"overlap"``, ``"gap"`` or ``"degenerate"``.
    """

    def __init__(self, kind: str, msg: str):
        super().__init__(f"{kind}: {msg}")
        self.kind = kind


# ---------------------------------------------------------------------------
# point configurations and polytopes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PointConfig:
    points: tuple[tuple[int, ...], ...]
    dim: int

    def __post_init__(self):
        pts = tuple(tuple(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if any(len(p) != self.dim for p in pts):
            raise ValueError(f"point of wrong dimension (expected {self.dim})")
        if len(set(pts)) != len(pts):
            dup = next(p for p in pts if pts.count(p) > 1)
            raise ValueError(f"duplicate point {dup}")

    @classmethod
    def from_points(cls, points: Iterable[Sequence[int]]) -> "PointConfig":
        pts = [tuple(p) for p in points]
        if not pts:
            raise ValueError("empty point configuration")
        return cls(tuple(pts), len(pts[0]))

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def homogenized(self) -> Matrix:
        """Ptilde: the points as columns with a final row of ones."""
        cols = [tuple(p) + (1,) for p in self.points]
        return Matrix.from_columns(cols)

    @property
    def affine_rank(self) -> int:
        return self.homogenized().rank() - 1

    def to_json(self) -> str:
        return json.dumps({"dim": self.dim, "points": [list(p) for p in self.points]})

    @classmethod
    def from_json(cls, text: str) -> "PointConfig":
        d = json.loads(text)
        if not isinstance(d, dict) or "points" not in d or "dim" not in d:
            raise ValueError("point config JSON needs 'dim' and 'points'")
        pts = d["points"]
        if not all(isinstance(p, list) and all(isinstance(x, int) for x in p) for p in pts):
            raise ValueError("points must be integer lists")
        return cls(tuple(tuple(p) for p in pts), int(d["dim"]))


@dataclass(frozen=True)
class Polytope:
    vertices: tuple[tuple, ...]
    facets: tuple[tuple[tuple[int, ...], object], ...]

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    def contains(self, x: Sequence, strict: bool = False) -> bool:
        for n, off in self.facets:
            s = sum(a * b for a, b in zip(n, x)) + off
            if s < 0 or (strict and s == 0):
                return False
        return True

    def vertex_set(self) -> frozenset:
        return frozenset(self.vertices)


def _affine_rank(pts: Sequence[Sequence]) -> int:
    if not pts:
        return -1
    p0 = pts[0]
    return Matrix([[Fraction(a) - b for a, b in zip(p, p0)] for p in pts[1:]]).rank() if len(pts) > 1 else 0


def _normal_through(pts: Sequence[Sequence]) -> tuple[int, ...] | None:
    """Primitive integer normal of the hyperplane through ``pts``, or None."""
    p0 = pts[0]
    rows = []
    for p in pts[1:]:
        r = [Fraction(a) - b for a, b in zip(p, p0)]
        den = math.lcm(*[x.denominator for x in r])
        rows.append([int(x * den) for x in r])
    ker = integer_kernel(Matrix(rows))
    if len(ker) != 1:
        return None
    return primitive(ker[0])


def hull(points: Iterable[Sequence]) -> Polytope:
    """Facet/vertex description of a full-dimensional polytope of rank <= 3."""
    pts = sorted(set(tuple(p) for p in points))
    if not pts:
        raise ValueError("empty point set")
    d = len(pts[0])
    if d > 3:
        raise ValueError("hull implemented for rank <= 3 only")
    r = _affine_rank(pts)
    if r < d:
        raise ValueError(f"points are lower-dimensional: affine span has dimension {r} < {d}")
    if d == 1:
        lo, hi = min(pts), max(pts)
        return Polytope((lo, hi), (((1,), -lo[0]), ((-1,), hi[0])))
    facets: dict[tuple, object] = {}
    for sub in itertools.combinations(pts, d):
        n = _normal_through(sub)
        if n is None:
            continue
        vals = [sum(a * b for a, b in zip(n, p)) for p in pts]
        c = sum(a * b for a, b in zip(n, sub[0]))
        if all(v >= c for v in vals):
            facets[n] = -c
        elif all(v <= c for v in vals):
            facets[tuple(-x for x in n)] = c
    facet_list = sorted(facets.items())
    verts = []
    for p in pts:
        tight = [n for n, off in facet_list if sum(a * b for a, b in zip(n, p)) + off == 0]
        if tight and Matrix(tight).rank() == d:
            verts.append(p)
    return Polytope(tuple(verts), tuple(facet_list))


def lattice_points(P: Polytope) -> PointConfig:
    d = P.dim
    lo = [math.floor(min(v[i] for v in P.vertices)) for i in range(d)]
    hi = [math.ceil(max(v[i] for v in P.vertices)) for i in range(d)]
    pts = [p for p in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))) if P.contains(p)]
    origin = (0,) * d
    pts.sort()
    if origin in pts:
        pts.remove(origin)
        pts.insert(0, origin)
    return PointConfig(tuple(pts), d)


def polar_dual(P: Polytope) -> Polytope:
    """{m : <v, m> >= -1 for all v in P}; requires the origin strictly inside."""
    if any(off <= 0 for _, off in P.facets):
        raise ValueError("origin is not an interior point")
    verts = [tuple(Fraction(x, off) if Fraction(x, off).denominator != 1 else x // off for x in n)
             for n, off in P.facets]
    return hull(verts)


def is_reflexive(P: Polytope) -> bool:
    try:
        D = polar_dual(P)
    except ValueError:
        return False
    if not all(isinstance(x, int) for v in D.vertices for x in v):
        return False
    interior = [p for p in lattice_points(P).points if P.contains(p, strict=True)]
    return interior == [(0,) * P.dim]


def normalized_volume(simplex: Sequence[int], A: PointConfig) -> int:
    if len(simplex) != A.dim + 1:
        raise ValueError(f"simplex needs {A.dim + 1} points, got {len(simplex)}")
    p0 = A[simplex[0]]
    M = Matrix([[a - b for a, b in zip(A[i], p0)] for i in simplex[1:]])
    return abs(M.det())


def _cross2(u, v):
    return u[0] * v[1] - u[1] * v[0]


def _half(u) -> int:
    return 0 if (u[1] > 0 or (u[1] == 0 and u[0] > 0)) else 1


def cyclic_sort(vecs: Iterable[Sequence]) -> list[tuple]:
    """Sort nonzero plane vectors counter-clockwise starting at angle 0."""

    def cmp(u, v):
        hu, hv = _half(u), _half(v)
        if hu != hv:
            return hu - hv
        c = _cross2(u, v)
        return -1 if c > 0 else (1 if c < 0 else 0)

    return sorted((tuple(v) for v in vecs), key=functools.cmp_to_key(cmp))


def polytope_volume(P: Polytope) -> int:
    """Normalized volume of a lattice polytope by coning from a vertex.

    Each facet not containing the apex is fanned from one of its vertices
    (rank 3) after a cyclic sort in a coordinate projection.
    """
    d = P.dim
    apex = P.vertices[0]
    total = 0
    for n, off in P.facets:
        fv = [v for v in P.vertices if sum(a * b for a, b in zip(n, v)) + off == 0]
        if apex in fv:
            continue
        if d == 2:
            simplices = [fv]
        elif d == 3:
            k = next(i for i in range(3) if n[i] != 0)
            keep = [i for i in range(3) if i != k]
            c = [sum(Fraction(v[i]) for v in fv) / len(fv) for i in keep]
            rel = {tuple(v[i] - ci for i, ci in zip(keep, c)): v for v in fv}
            order = [rel[u] for u in cyclic_sort(rel)]
            simplices = [[order[0], order[i], order[i + 1]] for i in range(1, len(order) - 1)]
        else:
            raise ValueError("rank 2 or 3 only")
        for s in simplices:
            total += abs(Matrix([[a - b for a, b in zip(v, apex)] for v in s]).det())
    return total


# ---------------------------------------------------------------------------
# circuits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Circuit:
    """Minimal affine dependence ``sum coeffs[k] * a[support[k]] = 0``.

    Coefficients are primitive with sum zero; the first is positive.
    """

    support: tuple[int, ...]
    coeffs: tuple[int, ...]

    @property
    def positive(self) -> frozenset:
        return frozenset(i for i, c in zip(self.support, self.coeffs) if c > 0)

    @property
    def negative(self) -> frozenset:
        return frozenset(i for i, c in zip(self.support, self.coeffs) if c < 0)

    def vector(self, n: int) -> tuple[int, ...]:
        v = [0] * n
        for i, c in zip(self.support, self.coeffs):
            v[i] = c
        return tuple(v)

    def triangulations(self) -> tuple[frozenset, frozenset]:
        """The two triangulations of conv(Z) as sets of index sets."""
        Z = frozenset(self.support)
        return (frozenset(Z - {z} for z in self.positive),
                frozenset(Z - {z} for z in self.negative))


def _circuit_of(A: PointConfig, S: Sequence[int]) -> Circuit | None:
    Pt = A.homogenized()
    sub = Matrix([[Pt[r, j] for j in S] for r in range(Pt.rows)])
    ker = integer_kernel(sub)
    if len(ker) != 1 or any(x == 0 for x in ker[0]):
        return None
    k = primitive(ker[0])
    if k[0] < 0:
        k = tuple(-x for x in k)
    return Circuit(tuple(S), k)


@functools.lru_cache(maxsize=64)
def _circuits_cached(A: PointConfig) -> tuple[Circuit, ...]:
    out = []
    for size in range(2, A.dim + 3):
        for S in itertools.combinations(range(len(A)), size):
            c = _circuit_of(A, S)
            if c is not None:
                out.append(c)
    return tuple(out)


def circuits(A: PointConfig) -> list[Circuit]:
    return list(_circuits_cached(A))


# ---------------------------------------------------------------------------
# triangulations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Triangulation:
    simplices: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        simp = tuple(sorted(tuple(sorted(s)) for s in self.simplices))
        object.__setattr__(self, "simplices", simp)

    @classmethod
    def of(cls, simplices: Iterable[Iterable[int]]) -> "Triangulation":
        return cls(tuple(tuple(s) for s in simplices))

    def as_sets(self) -> frozenset:
        return frozenset(frozenset(s) for s in self.simplices)

    def used_points(self) -> frozenset:
        return frozenset(i for s in self.simplices for i in s)

    def to_json(self) -> str:
        return json.dumps({"simplices": [list(s) for s in self.simplices]})

    @classmethod
    def from_json(cls, text: str) -> "Triangulation":
        return cls.of(json.loads(text)["simplices"])


def _proper_pair(s: frozenset, t: frozenset, circ: Sequence[Circuit]) -> bool:
    for c in circ:
        P, N = c.positive, c.negative
        if (P <= s and N <= t) or (N <= s and P <= t):
            return False
    return True


def _conv_volume(A: PointConfig) -> int:
    return polytope_volume(hull(A.points))


def check_triangulation(A: PointConfig, T: Triangulation) -> None:
    """Raise TriangulationError unless T triangulates conv(A)."""
    circ = circuits(A)
    for s in T.simplices:
        if len(s) != A.dim + 1 or normalized_volume(s, A) == 0:
            raise TriangulationError("degenerate", f"simplex {s} is not full-dimensional")
    sets = [frozenset(s) for s in T.simplices]
    for (i, s), (j, t) in itertools.combinations(enumerate(sets), 2):
        if not _proper_pair(s, t, circ):
            raise TriangulationError("overlap", f"simplices {T.simplices[i]} and {T.simplices[j]} overlap")
    vol = sum(normalized_volume(s, A) for s in T.simplices)
    target = _conv_volume(A)
    if vol != target:
        raise TriangulationError("gap", f"simplices cover volume {vol} of {target}")


def _barycentric(A: PointConfig, simplex: Sequence[int], a: int) -> tuple[Fraction, ...]:
    Pt = A.homogenized()
    S = Matrix([[Pt[r, j] for j in simplex] for r in range(Pt.rows)])
    lam = solve_rational(S, Pt.col(a))
    assert lam is not None
    return lam


def _fold_constraints(A: PointConfig, T: Triangulation) -> list[tuple[Fraction, ...]]:
    """Vectors alpha in Q^A with alpha . psi > 0 iff psi induces T (locally)."""
    n = len(A)
    out = []
    for s in T.simplices:
        for a in range(n):
            if a in s:
                continue
            lam = _barycentric(A, s, a)
            alpha = [Fraction(0)] * n
            alpha[a] += 1
            for i, l in zip(s, lam):
                alpha[i] -= l
            out.append(tuple(alpha))
    return out


def _fourier_motzkin(cons: list[tuple[list[Fraction], Fraction]], nvar: int):
    """Find x with c.x >= b for all (c, b), or None.  Exact."""
    if nvar == 0:
        return [] if all(b <= 0 for _, b in cons) else None
    k = nvar - 1
    pos = [(c, b) for c, b in cons if c[k] > 0]
    neg = [(c, b) for c, b in cons if c[k] < 0]
    zero = [(c[:k], b) for c, b in cons if c[k] == 0]
    reduced = list(zero)
    for cp, bp in pos:
        for cn, bn in neg:
            tp, tn = cp[k], -cn[k]
            reduced.append(([tn * x + tp * y for x, y in zip(cp[:k], cn[:k])], tn * bp + tp * bn))
    sol = _fourier_motzkin(reduced, k)
    if sol is None:
        return None
    lo = max(((b - sum(x * y for x, y in zip(c[:k], sol))) / c[k] for c, b in pos), default=None)
    hi = min(((b - sum(x * y for x, y in zip(c[:k], sol))) / c[k] for c, b in neg), default=None)
    if lo is None and hi is None:
        xk = Fraction(0)
    elif lo is None:
        xk = Fraction(math.floor(hi))
    elif hi is None:
        xk = Fraction(math.ceil(lo))
    else:
        if lo > hi:
            return None
        xk = (lo + hi) / 2
    return sol + [xk]


def regularity_witness(A: PointConfig, T: Triangulation) -> tuple[Fraction, ...] | None:
    """Heights psi in Q^A inducing T, or None when T is not regular."""
    check_triangulation(A, T)
    n = len(A)
    gauge: list[int] = []
    for i in range(n):
        if _affine_rank([A[j] for j in gauge + [i]]) == len(gauge):
            gauge.append(i)
        if len(gauge) == A.dim + 1:
            break
    free = [i for i in range(n) if i not in gauge]
    cons = []
    for alpha in _fold_constraints(A, T):
        cons.append(([alpha[i] for i in free], Fraction(1)))
    sol = _fourier_motzkin(cons, len(free))
    if sol is None:
        return None
    psi = [Fraction(0)] * n
    for i, x in zip(free, sol):
        psi[i] = x
    return tuple(psi)


def is_regular_triangulation(A: PointConfig, T: Triangulation) -> bool:
    return regularity_witness(A, T) is not None


def enumerate_regular_triangulations(A: PointConfig) -> list[Triangulation]:
    """All regular triangulations of A, sorted by simplex lists."""
    if len(A) > MAX_ENUM_POINTS:
        raise ValueError(f"enumeration capped at {MAX_ENUM_POINTS} points, got {len(A)}")
    if A.affine_rank != A.dim:
        raise ValueError("point configuration is not full-dimensional")
    target = _conv_volume(A)
    circ = circuits(A)
    simp = []
    for s in itertools.combinations(range(len(A)), A.dim + 1):
        v = normalized_volume(s, A)
        if v:
            simp.append((frozenset(s), v))
    found: list[Triangulation] = []

    def search(start: int, chosen: list[frozenset], vol: int):
        if vol == target:
            found.append(Triangulation.of(chosen))
            return
        for k in range(start, len(simp)):
            s, v = simp[k]
            if vol + v > target:
                continue
            if all(_proper_pair(s, t, circ) for t in chosen):
                chosen.append(s)
                search(k + 1, chosen, vol + v)
                chosen.pop()

    search(0, [], 0)
    regular = [T for T in found if is_regular_triangulation(A, T)]
    return sorted(regular, key=lambda T: T.simplices)


def gkz_vector(A: PointConfig, T: Triangulation) -> tuple[int, ...]:
    phi = [0] * len(A)
    for s in T.simplices:
        v = normalized_volume(s, A)
        for i in s:
            phi[i] += v
    return tuple(phi)


# ---------------------------------------------------------------------------
# secondary fan (Gale rank 2)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SecondaryFan2:
    rays: tuple[tuple[int, int], ...]
    cone_triangulations: tuple[Triangulation, ...]
    kernel_rows: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def cones(self) -> tuple[tuple[tuple[int, int], tuple[int, int]], ...]:
        r = self.rays
        return tuple((r[i], r[(i + 1) % len(r)]) for i in range(len(r)))

    def wall_ray(self, i: int) -> tuple[int, int]:
        """Ray shared by cone i and cone i+1."""
        return self.rays[(i + 1) % len(self.rays)]

    def to_json(self) -> str:
        return json.dumps({
            "rays": [list(r) for r in self.rays],
            "cones": [[list(a), list(b)] for a, b in self.cones],
            "triangulations": [[list(s) for s in T.simplices] for T in self.cone_triangulations],
        })


def _quotient_coords(alpha: Sequence[Fraction], K: Sequence[Sequence[int]]) -> tuple[Fraction, ...]:
    """k with alpha = sum_p k_p K[p] (alpha lies in the row span of K)."""
    M = Matrix.from_columns([tuple(r) for r in K])
    k = solve_rational(M, alpha)
    if k is None:
        raise ValueError("vector outside the Gale row span")
    return k


def _cone_rays(normals: list[tuple[Fraction, Fraction]]) -> tuple[tuple[int, int], tuple[int, int]]:
    cand = set()
    for a, b in normals:
        for r in ((b, -a), (-b, a)):
            if all(x * r[0] + y * r[1] >= 0 for x, y in normals):
                den = math.lcm(Fraction(r[0]).denominator, Fraction(r[1]).denominator)
                cand.add(primitive((int(r[0] * den), int(r[1] * den))))
    if len(cand) != 2:
        raise ValueError(f"cone is not a pointed 2-dimensional cone: rays {sorted(cand)}")
    r1, r2 = sorted(cand)
    if _cross2(r1, r2) < 0:
        r1, r2 = r2, r1
    return r1, r2


def triangulation_cone(A: PointConfig, T: Triangulation, K: Sequence[Sequence[int]]):
    """Boundary rays (counter-clockwise) of the secondary cone of T."""
    normals = []
    for alpha in _fold_constraints(A, T):
        normals.append(tuple(_quotient_coords(alpha, K)))
    return _cone_rays(normals)


def secondary_fan(A: PointConfig, kernel_rows: Sequence[Sequence[int]] | None = None) -> SecondaryFan2:
    """Secondary fan in the coordinates x_p = <K_p, psi> of R^A / Aff."""
    K = [tuple(r) for r in (kernel_rows if kernel_rows is not None else integer_kernel(A.homogenized()))]
    if len(K) != 2:
        raise ValueError(f"Gale dual has rank {len(K)}, expected 2")
    tris = enumerate_regular_triangulations(A)
    cones = {}
    for T in tris:
        cones[T] = triangulation_cone(A, T, K)
    rays = cyclic_sort({r for pair in cones.values() for r in pair})
    ordered = []
    for i, r in enumerate(rays):
        nxt = rays[(i + 1) % len(rays)]
        match = [T for T, c in cones.items() if c == (r, nxt)]
        if len(match) != 1:
            raise ValueError(f"cones do not tile the plane between {r} and {nxt}")
        ordered.append(match[0])
    if len(ordered) != len(tris):
        raise ValueError("secondary cones overlap")
    return SecondaryFan2(tuple(rays), tuple(ordered), tuple(K))


def flip_circuit(A: PointConfig, T1: Triangulation, T2: Triangulation) -> Circuit | None:
    """The circuit Z with T1, T2 related by the modification along Z, if any."""
    S1, S2 = T1.as_sets(), T2.as_sets()
    gone, new = S1 - S2, S2 - S1
    for c in circuits(A):
        for P, N in ((c.positive, c.negative), (c.negative, c.positive)):
            Z = P | N
            if (all(any(Z - {z} <= s for z in P) for s in gone)
                    and all(any(Z - {z} <= s for z in N) for s in new)
                    and all(not (Z - {z} <= s) for s in S2 for z in P)
                    and all(not (Z - {z} <= s) for s in S1 for z in N)):
                return c
    return None


def circuit_ray_in_quotient(c: Circuit, n: int, K: Sequence[Sequence[int]]) -> tuple[Fraction, ...]:
    return _quotient_coords(c.vector(n), K)
