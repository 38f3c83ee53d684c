"""Arithmetic models of the two moduli spaces and numerical ODE monodromy.

A1: 2x2 integer matrices with the determinant pairing model U + U, the
index-3 sublattice L = U + U(3), Gamma0(3) x Gamma0(3), sigma and rho.
A0: the Hilbert identity over Q(sqrt5).  The Gauss equation with
parameters (1/3, 2/3, 1) is transported along polylines by an adaptive
Dormand-Prince integrator.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._accel import njit
from .exactcore import EPSILON, Matrix, Quad5
from .report import CheckReport, check

__all__ = [
    "Mat2Z",
    "LoopPath",
    "Mobius",
    "det_pairing",
    "matrix_units_gram",
    "sublattice_L_basis",
    "in_L",
    "pair_action",
    "sigma_action",
    "rho_action",
    "GAMMA0_3_GENERATORS",
    "period_matrix_Z",
    "period_point_A1",
    "t1_pairing",
    "hilbert_W_identity",
    "ode_transport",
    "loop_path",
    "loop_monodromy_traces",
    "mobius_class_checks",
    "SINGULAR_POINTS",
]

SINGULAR_POINTS = (0.0, 1.0)


@dataclass(frozen=True)
class Mat2Z:
    x: int
    y: int
    z: int
    w: int

    @classmethod
    def of(cls, m: Sequence[Sequence[int]]) -> "Mat2Z":
        return cls(m[0][0], m[0][1], m[1][0], m[1][1])

    def rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.x, self.y), (self.z, self.w))

    def det(self):
        return self.x * self.w - self.y * self.z

    def __add__(self, o: "Mat2Z") -> "Mat2Z":
        return Mat2Z(self.x + o.x, self.y + o.y, self.z + o.z, self.w + o.w)

    def __neg__(self) -> "Mat2Z":
        return Mat2Z(-self.x, -self.y, -self.z, -self.w)

    def __rmul__(self, k) -> "Mat2Z":
        return Mat2Z(k * self.x, k * self.y, k * self.z, k * self.w)

    def __matmul__(self, o: "Mat2Z") -> "Mat2Z":
        return Mat2Z(self.x * o.x + self.y * o.z, self.x * o.y + self.y * o.w,
                     self.z * o.x + self.w * o.z, self.z * o.y + self.w * o.w)

    @property
    def T(self) -> "Mat2Z":
        return Mat2Z(self.x, self.z, self.y, self.w)

    def conj(self) -> "Mat2Z":
        return Mat2Z(*(complex(v).conjugate() for v in (self.x, self.y, self.z, self.w)))


E11, E12, E21, E22 = Mat2Z(1, 0, 0, 0), Mat2Z(0, 1, 0, 0), Mat2Z(0, 0, 1, 0), Mat2Z(0, 0, 0, 1)


def det_pairing(v: Mat2Z, w: Mat2Z):
    """<v, w> = -det(v + w) + det(v) + det(w)."""
    return -(v + w).det() + v.det() + w.det()


def matrix_units_gram(basis: Sequence[Mat2Z] = (E11, -E22, E12, E21)) -> Matrix:
    return Matrix([[det_pairing(a, b) for b in basis] for a in basis])


def in_L(v: Mat2Z) -> bool:
    """<v, u> = -w for u = E11, so L is cut out by w = 0 mod 3."""
    return det_pairing(v, E11) % 3 == 0


def sublattice_L_basis() -> tuple[Mat2Z, Mat2Z, Mat2Z, Mat2Z]:
    """Basis of L with Gram U + U(3): (E12, E21, E11, -3 E22)."""
    return (E12, E21, E11, -3 * E22)


def _check_sl2(A: Mat2Z):
    if A.det() != 1:
        raise ValueError(f"matrix {A.rows()} does not have determinant 1")


def pair_action(A: Mat2Z, B: Mat2Z, v: Mat2Z) -> Mat2Z:
    """(A, B) . v = A v B^T."""
    _check_sl2(A)
    _check_sl2(B)
    return A @ v @ B.T


def sigma_action(v: Mat2Z) -> Mat2Z:
    """[[x, y], [z, w]] -> [[w/3, -z], [-y, 3x]] on L."""
    if v.w % 3:
        raise ValueError("vector not in L (w not divisible by 3)")
    return Mat2Z(v.w // 3, -v.z, -v.y, 3 * v.x)


def rho_action(v: Mat2Z) -> Mat2Z:
    return v.T


GAMMA0_3_GENERATORS = (Mat2Z(1, 1, 0, 1), Mat2Z(1, 0, 3, 1))


# ---------------------------------------------------------------------------
# period points
# ---------------------------------------------------------------------------


def period_matrix_Z(tau1: complex, tau2: complex) -> Mat2Z:
    if tau1.imag <= 0 or tau2.imag <= 0:
        raise ValueError("tau must lie in the upper half plane")
    return Mat2Z(tau1 * tau2, tau1, tau2, 1)


def t1_pairing(a: Sequence, b: Sequence):
    """Bilinear form of U + U(3) on coordinate 4-vectors."""
    return a[0] * b[1] + a[1] * b[0] + 3 * (a[2] * b[3] + a[3] * b[2])


def period_point_A1(z1: complex, z2: complex) -> tuple:
    """[3 z1 z2 : -1 : z1 : z2]."""
    if z1.imag <= 0 or z2.imag <= 0:
        raise ValueError("z must lie in the upper half plane")
    return (3 * z1 * z2, -1, z1, z2)


@dataclass(frozen=True)
class Mobius:
    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        if self.a * self.d - self.b * self.c == 0:
            raise ValueError("degenerate Mobius map")

    def __call__(self, s):
        return (self.a * s + self.b) / (self.c * s + self.d)

    def normalized_trace(self) -> complex:
        det = self.a * self.d - self.b * self.c
        return (self.a + self.d) / cmath.sqrt(det)

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)


def hilbert_W_identity() -> tuple[bool, Matrix]:
    """W U W^T = [[2, 1], [1, -2]] with W = [[1, 1], [-1/eps, eps]]."""
    one = Quad5(1, 0)
    W = Matrix([[one, one], [-EPSILON.inverse(), EPSILON]])
    U = Matrix([[Quad5(0, 0), one], [one, Quad5(0, 0)]])
    R = W @ U @ W.T
    target = Matrix([[Quad5(2, 0), Quad5(1, 0)], [Quad5(1, 0), Quad5(-2, 0)]])
    return R == target, R


# ---------------------------------------------------------------------------
# ODE transport
# ---------------------------------------------------------------------------

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = np.array([
    [0, 0, 0, 0, 0, 0],
    [1 / 5, 0, 0, 0, 0, 0],
    [3 / 40, 9 / 40, 0, 0, 0, 0],
    [44 / 45, -56 / 15, 32 / 9, 0, 0, 0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0, 0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
])
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


@njit
def _rhs(x, Y, a, b, c):
    """d/dx of [[u], [u']] for x(1-x)u'' + (c - (a+b+1)x)u' - ab u = 0, columnwise."""
    out = np.empty_like(Y)
    q = x * (1.0 - x)
    for j in range(Y.shape[1]):
        u = Y[0, j]
        du = Y[1, j]
        out[0, j] = du
        out[1, j] = (a * b * u - (c - (a + b + 1.0) * x) * du) / q
    return out


@njit
def _dp45_segment(p0, p1, Y0, a, b, c, tol, hmax, A, C, B5, B4):
    h_vec = p1 - p0
    length = abs(h_vec)
    Y = Y0.copy()
    if length == 0.0:
        return Y, 0
    t = 0.0
    dt_max = hmax / length
    dt = min(dt_max, 0.01)
    steps = 0
    K = np.zeros((7, Y.shape[0], Y.shape[1]), dtype=np.complex128)
    while t < 1.0:
        if t + dt > 1.0:
            dt = 1.0 - t
        for s in range(7):
            Ys = Y.copy()
            for r in range(s):
                if A[s, r] != 0.0:
                    Ys += dt * A[s, r] * K[r]
            K[s] = h_vec * _rhs(p0 + (t + C[s] * dt) * h_vec, Ys, a, b, c)
        y5 = Y.copy()
        y4 = Y.copy()
        for s in range(7):
            y5 += dt * B5[s] * K[s]
            y4 += dt * B4[s] * K[s]
        err = 0.0
        scale = 0.0
        for i in range(Y.shape[0]):
            for j in range(Y.shape[1]):
                e = abs(y5[i, j] - y4[i, j])
                if e > err:
                    err = e
                m = abs(y5[i, j])
                if m > scale:
                    scale = m
        bound = tol * (1.0 + scale)
        if err <= bound:
            t += dt
            Y = y5
            steps += 1
        fac = 0.9 * (bound / err) ** 0.2 if err > 0 else 5.0
        fac = min(5.0, max(0.2, fac))
        dt = min(dt * fac, dt_max)
        if dt < 1e-14:
            return Y, -1
    return Y, steps


def _segment_distance(p: complex, q: complex, s: complex) -> float:
    d = q - p
    if d == 0:
        return abs(s - p)
    t = max(0.0, min(1.0, ((s - p) * d.conjugate()).real / abs(d) ** 2))
    return abs(p + t * d - s)


@dataclass(frozen=True)
class LoopPath:
    basepoint: complex
    center: complex
    radius: float
    segments: int = 128

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        for s in SINGULAR_POINTS:
            if s != self.center and abs(s - self.center) - self.radius <= self.radius / 2:
                raise ValueError(f"circle comes too close to the singular point {s}")

    def polyline(self) -> list[complex]:
        return loop_path(self.basepoint, self.center, self.radius, self.segments)


def loop_path(basepoint: complex, center: complex, radius: float, segments: int = 128,
              clockwise: bool = False) -> list[complex]:
    """Basepoint -> circle point facing it -> full circle -> back."""
    d = complex(basepoint) - center
    th0 = cmath.phase(d) if d != 0 else 0.0
    sgn = -1.0 if clockwise else 1.0
    circ = [center + radius * cmath.exp(1j * (th0 + sgn * 2 * math.pi * k / segments))
            for k in range(segments + 1)]
    circ[-1] = circ[0]
    return [complex(basepoint)] + circ + [complex(basepoint)]


def ode_transport(path: Sequence[complex], y0: np.ndarray | None = None, params=(1 / 3, 2 / 3, 1.0),
                  tol: float = 1e-12, hmax: float = 0.01, min_dist: float = 0.05) -> np.ndarray:
    """Transition matrix of (u, u') along a polyline, for the Gauss equation.

    Columns of ``y0`` are initial data (identity by default), so the
    result M satisfies Y(end) = M Y(start) when y0 = I.
    """
    pts = [complex(p) for p in path]
    for p, q in zip(pts, pts[1:]):
        for s in SINGULAR_POINTS:
            if _segment_distance(p, q, s) < min_dist:
                raise ValueError(f"path passes within {min_dist} of the singular point {s}")
    Y = np.eye(2, dtype=np.complex128) if y0 is None else np.array(y0, dtype=np.complex128)
    a, b, c = (float(v) for v in params)
    for p, q in zip(pts, pts[1:]):
        Y, steps = _dp45_segment(p, q, Y, a, b, c, tol, hmax, _A, _C, _B5, _B4)
        if steps < 0:
            raise RuntimeError(f"step size underflow on segment {p} -> {q}")
    return Y


def _proj_order3(M: np.ndarray, tol: float) -> bool:
    M = M / cmath.sqrt(np.linalg.det(M))
    M3 = M @ M @ M
    I = np.eye(2)
    return min(np.abs(M3 - I).max(), np.abs(M3 + I).max()) < tol


def loop_monodromy_traces(tol: float = 1e-6, basepoint: complex = 0.5, radius: float = 0.3,
                          segments: int = 128, prefix: str = "modular.ode") -> tuple[list[CheckReport], dict]:
    """Monodromy of the Gauss (1/3, 2/3, 1) equation around 0, 1 and infinity."""
    b = complex(basepoint)
    M0 = ode_transport(loop_path(b, 0.0, radius, segments))
    M1 = ode_transport(loop_path(b, 1.0, radius, segments))
    # with these loops the relation reads M_inf M0 M1 = 1
    Minf = np.linalg.inv(M0 @ M1)
    # independent loop around infinity: a large clockwise circle about 1/2
    far = ode_transport([b, b.real - 1.5j] + loop_path(b.real - 1.5j, 0.5, 1.5, 4 * segments, clockwise=True)[1:-1]
                        + [b.real - 1.5j, b])
    out, data = [], {}

    def ntr(M):
        return complex(np.trace(M) / cmath.sqrt(np.linalg.det(M)))

    for name, M, target in (("M0", M0, 2.0), ("M1", M1, 2.0), ("Minf", Minf, 1.0)):
        t = ntr(M)
        data[name] = {"trace": [t.real, t.imag], "matrix": [[[z.real, z.imag] for z in r] for r in M]}
        out.append(check(f"{prefix}.trace_{name}", abs(abs(t) - target) < tol and abs(t.imag) < tol,
                         f"|tr {name}| = {abs(t):.12f} (expected {target})", exact=False))
    out.append(check(f"{prefix}.Minf_order3", _proj_order3(Minf, tol),
                     "M_inf^3 = +-I projectively", exact=False))
    prod = far @ M0 @ M1
    prod = prod / cmath.sqrt(np.linalg.det(prod))
    dev = min(np.abs(prod - np.eye(2)).max(), np.abs(prod + np.eye(2)).max())
    out.append(check(f"{prefix}.product_relation", dev < tol,
                     f"independent infinity loop: |M_inf M0 M1 -+ I| = {dev:.3e}", exact=False))
    tf = ntr(far)
    out.append(check(f"{prefix}.trace_far_loop", abs(abs(tf) - 1) < tol,
                     f"|tr| of the large loop = {abs(tf):.12f}", exact=False))
    return out, data


def mobius_class_checks(prefix: str = "modular.mobius") -> list[CheckReport]:
    """Traces of the three Mobius maps s+1, s/(-3s+1), (s-1)/(3s-2)."""
    g0, g1, ginf = Mobius(1, 1, 0, 1), Mobius(1, 0, -3, 1), Mobius(1, -1, 3, -2)
    out = []
    for name, g, target in (("gamma0", g0, 2), ("gamma1", g1, 2), ("gammainf", ginf, 1)):
        out.append(check(f"{prefix}.{name}", abs(abs(g.normalized_trace()) - target) < 1e-15,
                         f"|tr| = {abs(g.normalized_trace())}"))
    M = ginf.matrix().real.astype(int)
    M3 = M @ M @ M
    out.append(check(f"{prefix}.gammainf_order3", bool((M3 == np.eye(2)).all() or (M3 == -np.eye(2)).all()),
                     f"cube = {M3.tolist()}"))
    return out
