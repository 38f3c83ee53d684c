import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from k3lab.exactcore import (
    EPSILON,
    Matrix,
    Quad5,
    elementary_divisors,
    hermite_normal_form,
    integer_kernel,
    primitive,
    same_lattice,
    signature_of_form,
    smith_normal_form,
    solve_rational,
)

small = st.integers(-9, 9)
mat4 = st.lists(st.lists(small, min_size=4, max_size=4), min_size=4, max_size=4)
fracs = st.fractions(min_value=-20, max_value=20, max_denominator=12)
quads = st.builds(Quad5, fracs, fracs)


def test_snf_identity():
    U, D, V = smith_normal_form(Matrix.identity(2))
    assert D == Matrix.identity(2)


def test_snf_u3():
    assert elementary_divisors(Matrix([[0, 3], [3, 0]])) == [3, 3]


def test_snf_det_minus_five():
    assert elementary_divisors(Matrix([[2, 1], [1, -2]])) == [1, 5]


@given(mat4)
def test_snf_certificate(rows):
    M = Matrix(rows)
    U, D, V = smith_normal_form(M)
    assert U @ M @ V == D
    assert abs(U.det()) == 1 and abs(V.det()) == 1
    d = [D[i, i] for i in range(4)]
    assert all(D[i, j] == 0 for i in range(4) for j in range(4) if i != j)
    nz = [x for x in d if x]
    assert all(x > 0 for x in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))


def test_kernel_of_vertex_matrix_a1():
    beta = Matrix([[0, 1, 0, 0, -1, 0], [0, 0, 1, 0, 0, -1], [0, 0, 0, 1, -1, -1], [1, 1, 1, 1, 1, 1]])
    K = integer_kernel(beta)
    assert len(K) == 2
    assert same_lattice(K, [(-3, 1, 0, 1, 1, 0), (-3, 0, 1, 1, 0, 1)])


def test_kernel_trivial_and_sum_zero():
    assert integer_kernel(Matrix.identity(3)) == []
    K = integer_kernel(Matrix([[1, 1, 1]]))
    assert len(K) == 2 and all(sum(v) == 0 for v in K)
    assert same_lattice(K, [(1, -1, 0), (0, 1, -1)])


@given(st.lists(st.lists(small, min_size=5, max_size=5), min_size=1, max_size=4))
def test_kernel_annihilates_and_is_saturated(rows):
    M = Matrix(rows)
    K = integer_kernel(M)
    assert len(K) == 5 - M.rank()
    for v in K:
        assert all(x == 0 for x in M @ v)
    if K:
        # saturated: the kernel lattice has trivial torsion in Z^5
        assert all(d == 1 for d in elementary_divisors(Matrix(K)))


def test_signatures():
    assert signature_of_form(Matrix([[0, 1], [1, 0]])) == (1, 1, 0)
    assert signature_of_form(Matrix([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 3], [0, 0, 3, 0]])) == (2, 2, 0)
    assert signature_of_form(Matrix([[1, 0], [0, 0]])) == (1, 0, 1)


@given(st.lists(small, min_size=3, max_size=3), st.integers(0, 10 ** 6))
def test_signature_congruence_invariant(diag, seed):
    rng = random.Random(seed)
    G = Matrix([[diag[i] if i == j else 0 for j in range(3)] for i in range(3)])
    S = Matrix.identity(3)
    for _ in range(6):
        i, j = rng.sample(range(3), 2)
        E = [[int(a == b) for b in range(3)] for a in range(3)]
        E[i][j] = rng.randint(-3, 3)
        S = S @ Matrix(E)
    assert signature_of_form(S.T @ G @ S) == signature_of_form(G)


def test_quad5_unit():
    assert EPSILON * EPSILON.conj() == -1
    assert EPSILON * (EPSILON - 1) == 1
    assert EPSILON.inverse() == EPSILON - 1


@given(quads, quads)
def test_quad5_norm_multiplicative(x, y):
    assert (x * y).norm() == x.norm() * y.norm()


@given(quads)
def test_quad5_conj_involution(x):
    assert x.conj().conj() == x


def test_quad5_rejects_float():
    with pytest.raises(TypeError):
        Quad5.coerce(0.5)


def test_solve_rational_and_hnf():
    A = Matrix([[1, 2], [3, 4]])
    x = solve_rational(A, (5, 6))
    assert A @ x == (5, 6)
    assert solve_rational(Matrix([[1, 1], [1, 1]]), (1, 2)) is None
    H = hermite_normal_form([(2, 4), (1, 3)])
    assert same_lattice(H, [(2, 4), (1, 3)])


def test_primitive():
    assert primitive((4, -6)) == (2, -3)
    assert primitive((Fraction(1, 2), Fraction(3, 4))) == (2, 3)


def test_matrix_errors():
    with pytest.raises(ValueError):
        Matrix([[1, 2], [3]])
    with pytest.raises((ValueError, ZeroDivisionError)):
        Matrix([[1, 2], [2, 4]]).inverse()
