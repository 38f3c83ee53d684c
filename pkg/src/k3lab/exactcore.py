"""Exact scalar and integer-matrix kernels.

Rationals are :class:`fractions.Fraction` (always reduced, positive
denominator).  :class:`Quad5` is the real quadratic field Q(sqrt 5).
:class:`Matrix` is a small immutable dense matrix over any exact ring
(ints, Fractions, Quad5); ``IntMat`` is the same type used with ints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

BigRat = Fraction


# ---------------------------------------------------------------------------
# Q(sqrt 5)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Quad5:
    """Element ``a + b*sqrt(5)`` with rational ``a``, ``b``."""

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    @staticmethod
    def coerce(x) -> "Quad5":
        if isinstance(x, Quad5):
            return x
        if isinstance(x, (int, Fraction)):
            return Quad5(Fraction(x), Fraction(0))
        raise TypeError(f"cannot coerce {type(x).__name__} to Quad5")

    def __add__(self, other):
        try:
            o = Quad5.coerce(other)
        except TypeError:
            return NotImplemented
        return Quad5(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return Quad5(-self.a, -self.b)

    def __sub__(self, other):
        try:
            o = Quad5.coerce(other)
        except TypeError:
            return NotImplemented
        return Quad5(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return Quad5.coerce(other) - self

    def __mul__(self, other):
        try:
            o = Quad5.coerce(other)
        except TypeError:
            return NotImplemented
        return Quad5(self.a * o.a + 5 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def conj(self) -> "Quad5":
        return Quad5(self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - 5 * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    def inverse(self) -> "Quad5":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero element of Q(sqrt5)")
        c = self.conj()
        return Quad5(c.a / n, c.b / n)

    def __truediv__(self, other):
        try:
            o = Quad5.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return Quad5.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out, base = Quad5(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        try:
            o = Quad5.coerce(other)
        except TypeError:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(5.0)

    def __repr__(self):
        return f"Quad5({self.a}, {self.b})"


EPSILON = Quad5(Fraction(1, 2), Fraction(1, 2))  # fundamental unit (1+sqrt5)/2
SQRT5 = Quad5(0, 1)


# ---------------------------------------------------------------------------
# Dense exact matrices
# ---------------------------------------------------------------------------


class Matrix:
    """Immutable dense matrix with exact entries, row-major."""

    __slots__ = ("rows", "cols", "_e")

    def __init__(self, data: Iterable[Iterable]):
        if isinstance(data, Matrix):
            data = data._e
        rows = [tuple(r) for r in data]
        self.rows = len(rows)
        self.cols = len(rows[0]) if rows else 0
        if any(len(r) != self.cols for r in rows):
            raise ValueError("ragged matrix")
        self._e = tuple(rows)

    # construction -------------------------------------------------------
    @classmethod
    def identity(cls, n: int, one=1) -> "Matrix":
        zero = one - one
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, r: int, c: int, zero=0) -> "Matrix":
        return cls([[zero] * c for _ in range(r)])

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence]) -> "Matrix":
        return cls(list(zip(*columns)))

    @classmethod
    def block_diag(cls, *blocks: "Matrix") -> "Matrix":
        n = sum(b.rows for b in blocks)
        m = sum(b.cols for b in blocks)
        out = [[0] * m for _ in range(n)]
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    out[r0 + i][c0 + j] = b[i, j]
            r0 += b.rows
            c0 += b.cols
        return cls(out)

    # access -------------------------------------------------------------
    def __getitem__(self, ij):
        i, j = ij
        return self._e[i][j]

    def row(self, i: int) -> tuple:
        return self._e[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self._e)

    def tolist(self) -> list[list]:
        return [list(r) for r in self._e]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def T(self) -> "Matrix":
        return Matrix(zip(*self._e)) if self.rows else Matrix([])

    def map(self, f) -> "Matrix":
        return Matrix([[f(x) for x in r] for r in self._e])

    # arithmetic ---------------------------------------------------------
    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            oc = [other.col(j) for j in range(other.cols)]
            return Matrix([[_dot(r, c) for c in oc] for r in self._e])
        v = tuple(other)
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(_dot(r, v) for r in self._e)

    def __add__(self, other: "Matrix") -> "Matrix":
        return Matrix([[x + y for x, y in zip(r, s)] for r, s in zip(self._e, other._e)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        return Matrix([[x - y for x, y in zip(r, s)] for r, s in zip(self._e, other._e)])

    def __neg__(self) -> "Matrix":
        return self.map(lambda x: -x)

    def scale(self, c) -> "Matrix":
        return self.map(lambda x: c * x)

    def __pow__(self, k: int) -> "Matrix":
        if k < 0:
            return self.inverse() ** (-k)
        out = Matrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self._e == other._e

    def __hash__(self):
        return hash(self._e)

    def __repr__(self):
        return f"Matrix({self.tolist()!r})"

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._e for x in r)

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(
            self._e[i][j] == self._e[j][i] for i in range(self.rows) for j in range(i)
        )

    # linear algebra -----------------------------------------------------
    def det(self):
        if self.rows != self.cols:
            raise ValueError("det of non-square matrix")
        if all(isinstance(x, int) for r in self._e for x in r):
            return _bareiss_det(self.tolist())
        return _field_det(self.tolist())

    def rank(self) -> int:
        return len(_rref([[Fraction(x) for x in r] for r in self._e])[1])

    def inverse(self) -> "Matrix":
        """Inverse over Q; integer result returned as ints when integral."""
        n = self.rows
        if n != self.cols:
            raise ValueError("inverse of non-square matrix")
        aug = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
               for i, r in enumerate(self._e)]
        red, piv = _rref(aug)
        if piv[:n] != list(range(n)):
            raise ZeroDivisionError("singular matrix")
        inv = [r[n:] for r in red[:n]]
        return Matrix([[_demote(x) for x in r] for r in inv])


IntMat = Matrix


def _dot(r, c):
    it = iter(zip(r, c))
    try:
        x, y = next(it)
    except StopIteration:
        return 0
    s = x * y
    for x, y in it:
        s = s + x * y
    return s


def _demote(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def _bareiss_det(a: list[list[int]]) -> int:
    n = len(a)
    if n == 0:
        return 1
    a = [r[:] for r in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _field_det(a: list[list]):
    n = len(a)
    a = [r[:] for r in a]
    one = a[0][0] - a[0][0] + 1 if n else 1
    det = one
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k] != 0), None)
        if p is None:
            return one - one
        if p != k:
            a[k], a[p] = a[p], a[k]
            det = -det
        det = det * a[k][k]
        inv = 1 / a[k][k] if not isinstance(a[k][k], int) else Fraction(1, a[k][k])
        for i in range(k + 1, n):
            f = a[i][k] * inv
            if f != 0:
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return det


def _rref(a: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    a = [r[:] for r in a]
    nr = len(a)
    nc = len(a[0]) if a else 0
    pivots: list[int] = []
    r = 0
    for c in range(nc):
        p = next((i for i in range(r, nr) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        pv = a[r][c]
        a[r] = [x / pv for x in a[r]]
        for i in range(nr):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return a, pivots


def solve_rational(A: Matrix, b: Sequence) -> tuple[Fraction, ...] | None:
    """One solution of ``A x = b`` over Q, or None if inconsistent."""
    aug = [[Fraction(x) for x in A.row(i)] + [Fraction(b[i])] for i in range(A.rows)]
    red, piv = _rref(aug)
    if A.cols in piv:
        return None
    x = [Fraction(0)] * A.cols
    for i, c in enumerate(piv):
        x[c] = red[i][A.cols]
    return tuple(x)


# ---------------------------------------------------------------------------
# Smith / Hermite normal forms and kernels
# ---------------------------------------------------------------------------


def smith_normal_form(M: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(U, D, V)`` with ``U @ M @ V == D`` and U, V unimodular.

    D is diagonal with nonnegative entries, each dividing the next.
    """
    m, n = M.rows, M.cols
    D = [list(map(int, r)) for r in M.tolist()]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, k):  # row dst += k * row src
        D[dst] = [x + k * y for x, y in zip(D[dst], D[src])]
        U[dst] = [x + k * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, k):
        for r in D:
            r[dst] += k * r[src]
        for r in V:
            r[dst] += k * r[src]

    for t in range(min(m, n)):
        nz = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if D[i][t]:
                    q = D[i][t] // D[t][t]
                    add_row(i, t, -q)
                    if D[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    q = D[t][j] // D[t][t]
                    add_col(j, t, -q)
                    if D[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            # divisibility: pivot must divide every remaining entry
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if D[i][j] % D[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
    return Matrix(U), Matrix(D), Matrix(V)


def elementary_divisors(M: Matrix) -> list[int]:
    _, D, _ = smith_normal_form(M)
    return [D[i, i] for i in range(min(D.rows, D.cols))]


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Row-style HNF of the lattice spanned by ``rows`` (zero rows dropped).

    Pivots are positive and entries above each pivot are reduced into
    ``[0, pivot)``.
    """
    a = [list(map(int, r)) for r in rows]
    if not a:
        return []
    nc = len(a[0])
    r = 0
    for c in range(nc):
        # euclid down column c among rows r..
        while True:
            nz = [i for i in range(r, len(a)) if a[i][c]]
            if len(nz) <= 1:
                break
            p = min(nz, key=lambda i: abs(a[i][c]))
            for i in nz:
                if i != p:
                    q = a[i][c] // a[p][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[p])]
        nz = [i for i in range(r, len(a)) if a[i][c]]
        if not nz:
            continue
        p = nz[0]
        a[r], a[p] = a[p], a[r]
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
        for i in range(r):
            q = a[i][c] // a[r][c]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
        r += 1
        if r == len(a):
            break
    return [tuple(x) for x in a[:r] if any(x)]


def integer_kernel(M: Matrix) -> list[tuple[int, ...]]:
    """Hermite-normalized Z-basis of ``{x in Z^n : M x = 0}``.

    The basis spans a saturated sublattice because it is read off the
    unimodular column transform of the Smith form.
    """
    n = M.cols
    if M.rows == 0:
        return hermite_normal_form([[int(i == j) for j in range(n)] for i in range(n)])
    _, D, V = smith_normal_form(M)
    r = sum(1 for i in range(min(D.rows, D.cols)) if D[i, i] != 0)
    basis = [V.col(j) for j in range(r, n)]
    return hermite_normal_form(basis)


def same_lattice(rows1: Sequence[Sequence[int]], rows2: Sequence[Sequence[int]]) -> bool:
    return hermite_normal_form(rows1) == hermite_normal_form(rows2)


def primitive(v: Sequence) -> tuple[int, ...]:
    """Primitive integer vector on the ray of a rational vector."""
    fr = [Fraction(x) for x in v]
    den = math.lcm(*[x.denominator for x in fr]) if fr else 1
    ints = [int(x * den) for x in fr]
    g = math.gcd(*ints)
    if g == 0:
        raise ValueError("zero vector")
    return tuple(x // g for x in ints)


# ---------------------------------------------------------------------------
# Signature of a symmetric form
# ---------------------------------------------------------------------------


def signature_of_form(G: Matrix) -> tuple[int, int, int]:
    """``(n_plus, n_minus, n_zero)`` by exact symmetric Gauss reduction.

    Uses 1x1 pivots where a nonzero diagonal entry exists and a 2x2
    hyperbolic pivot (sig (1,1)) otherwise.
    """
    if not G.is_symmetric():
        raise ValueError("not symmetric")
    a = [[Fraction(x) for x in r] for r in G.tolist()]
    pos = neg = 0
    while a:
        n = len(a)
        k = next((i for i in range(n) if a[i][i] != 0), None)
        if k is not None:
            p = a[k][k]
            if p > 0:
                pos += 1
            else:
                neg += 1
            rest = [i for i in range(n) if i != k]
            a = [[a[i][j] - a[i][k] * a[k][j] / p for j in rest] for i in rest]
            continue
        off = next(((i, j) for i in range(n) for j in range(i + 1, n) if a[i][j] != 0), None)
        if off is None:
            break
        i, j = off
        # zero diagonal at i, j: the 2x2 block [[0,b],[b,0]] has one + and one -
        b = a[i][j]
        pos += 1
        neg += 1
        rest = [t for t in range(n) if t not in (i, j)]
        # Schur complement of [[0,b],[b,0]] with inverse [[0,1/b],[1/b,0]]
        a = [[a[s][t] - (a[s][i] * a[j][t] + a[s][j] * a[i][t]) / b for t in rest]
             for s in rest]
    zero = G.rows - pos - neg
    return pos, neg, zero
