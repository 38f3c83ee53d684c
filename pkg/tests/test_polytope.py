import itertools

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from k3lab.exactcore import integer_kernel, same_lattice
from k3lab.polytope import (
    PointConfig,
    Triangulation,
    TriangulationError,
    check_triangulation,
    circuits,
    cyclic_sort,
    enumerate_regular_triangulations,
    flip_circuit,
    gkz_vector,
    hull,
    is_regular_triangulation,
    is_reflexive,
    lattice_points,
    normalized_volume,
    polar_dual,
    polytope_volume,
    regularity_witness,
    secondary_fan,
)
from k3lab.registry import get_case

A0 = PointConfig.from_points(get_case("A0").points)
A1 = PointConfig.from_points(get_case("A1").points)
SIMPLEX = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]


def test_hull_small():
    P = hull(SIMPLEX)
    assert len(P.facets) == 4
    sq = hull([(0, 0), (2, 0), (0, 2), (2, 2), (1, 1)])
    assert (1, 1) not in sq.vertices and len(sq.vertices) == 4
    with pytest.raises(ValueError, match="affine span"):
        hull([(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)])


@pytest.mark.parametrize("case", ["A0", "A1"])
def test_registered_polytopes(case):
    ex = get_case(case)
    P = hull(ex.points)
    assert set(P.vertices) == set(ex.points[1:])
    assert len(P.facets) <= 6
    assert is_reflexive(P)
    L = lattice_points(P)
    assert len(L) == 6 and L[0] == (0, 0, 0) and set(L.points) == set(ex.points)
    D = polar_dual(P)
    assert set(D.vertices) == {tuple(v) for v in ex.value("dual_vertices")}
    assert polar_dual(D).vertex_set() == P.vertex_set()
    assert polytope_volume(P) == 6


def test_lattice_points_oracle():
    # bounding box count of the simplex
    assert len(lattice_points(hull(SIMPLEX))) == 4


def test_cube_octahedron():
    cube = hull(list(itertools.product((-1, 1), repeat=3)))
    octa = polar_dual(cube)
    assert octa.vertex_set() == {(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)}
    assert polar_dual(octa).vertex_set() == cube.vertex_set()
    assert is_reflexive(cube)


def test_non_reflexive():
    big = hull(list(itertools.product((-2, 2), repeat=3)))
    assert not is_reflexive(big)
    with pytest.raises(ValueError, match="interior"):
        polar_dual(hull(SIMPLEX))


def test_volumes():
    assert normalized_volume((1, 2, 3, 5), A0) == 5
    assert normalized_volume((0, 1, 2, 5), A0) == 2
    assert normalized_volume((0, 1, 2, 3), PointConfig.from_points(SIMPLEX)) == 1
    with pytest.raises(ValueError):
        normalized_volume((0, 1, 2), A0)


def test_circuits_a0():
    cs = {c.support: c.coeffs for c in circuits(A0)}
    assert cs[(0, 3, 4)] == (2, -1, -1)
    assert (0, 1, 2, 3, 5) in cs
    assert circuits(PointConfig.from_points(SIMPLEX)) == []
    for supp, co in cs.items():
        assert sum(co) == 0
        for k in range(3):
            assert sum(c * A0[i][k] for i, c in zip(supp, co)) == 0


def test_regularity_examples():
    tri = get_case("A0").triangulations()
    T = Triangulation.of(tri["I"])
    assert is_regular_triangulation(A0, T)
    psi = regularity_witness(A0, T)
    assert psi is not None
    T2 = Triangulation.of([(1, 2, 3, 4), (1, 3, 4, 5)])
    assert is_regular_triangulation(A1, T2)


def test_invalid_triangulations():
    tri = get_case("A1").triangulations()
    bad = Triangulation.of(list(tri["II"]) + [tri["I"][0]])
    with pytest.raises(TriangulationError) as ei:
        check_triangulation(A1, bad)
    assert ei.value.kind == "overlap"
    with pytest.raises(TriangulationError) as ei:
        check_triangulation(A1, Triangulation.of(tri["II"][:1]))
    assert ei.value.kind == "gap"
    with pytest.raises(TriangulationError) as ei:
        check_triangulation(A0, Triangulation.of([(0, 3, 4, 1)]))
    assert ei.value.kind == "degenerate"


@pytest.mark.parametrize("case", ["A0", "A1"])
def test_enumeration_matches_registry(case):
    ex = get_case(case)
    A = PointConfig.from_points(ex.points)
    tris = enumerate_regular_triangulations(A)
    assert len(tris) == 4
    assert {T.as_sets() for T in tris} == {Triangulation.of(v).as_sets() for v in ex.triangulations().values()}
    for T in tris:
        assert sum(normalized_volume(s, A) for s in T.simplices) == polytope_volume(hull(ex.points))
        assert sum(gkz_vector(A, T)) == 4 * 6


def test_gkz_vertical_triangulation():
    T = Triangulation.of(get_case("A0").triangulations()["II"])
    assert gkz_vector(A0, T)[0] == 0


def test_a1_triangulations_without_origin():
    tri = get_case("A1").triangulations()
    for key in ("II", "III"):
        T = Triangulation.of(tri[key])
        assert 0 not in T.used_points()
        assert sum(normalized_volume(s, A1) for s in T.simplices) == 6


def test_rank2_square_configuration():
    A = PointConfig.from_points([(0, 0), (1, 0), (0, 1), (-1, -1)])
    tris = enumerate_regular_triangulations(A)
    assert len(tris) == 2
    assert {len(T.simplices) for T in tris} == {1, 3}


@pytest.mark.parametrize("case", ["A0", "A1"])
def test_secondary_fan(case):
    ex = get_case(case)
    A = PointConfig.from_points(ex.points)
    F = secondary_fan(A, ex.torus_rows)
    assert len(F.rays) == 4 and F.rays == tuple(cyclic_sort(F.rays))
    names = {Triangulation.of(v).as_sets(): k for k, v in ex.triangulations().items()}
    order = [names[T.as_sets()] for T in F.cone_triangulations]
    assert "".join(order) in "".join(ex.cone_order * 2)
    K = integer_kernel(A.homogenized())
    assert same_lattice(K, ex.torus_rows)
    cs = circuits(A)
    for i in range(4):
        c = flip_circuit(A, F.cone_triangulations[i], F.cone_triangulations[(i + 1) % 4])
        assert c is not None and c in cs


def test_secondary_fan_a0_rays_and_first_flip():
    F = secondary_fan(A0, get_case("A0").torus_rows)
    assert F.rays == ((1, 0), (1, 2), (0, 1), (-2, -5))
    tri = get_case("A0").triangulations()
    c = flip_circuit(A0, Triangulation.of(tri["I"]), Triangulation.of(tri["II"]))
    assert c.support == (0, 3, 4)


def test_point_config_errors():
    with pytest.raises(ValueError, match="duplicate"):
        PointConfig.from_points([(0, 0), (0, 0)])
    with pytest.raises(ValueError, match="dimension"):
        PointConfig(((0, 0), (1, 0, 0)), 2)
    assert PointConfig.from_json(A0.to_json()) == A0


coords = st.integers(-2, 2)


@given(st.lists(st.tuples(coords, coords), min_size=4, max_size=6, unique=True))
def test_planar_triangulation_properties(pts):
    A = PointConfig.from_points(pts)
    assume(A.affine_rank == 2)
    vol = polytope_volume(hull(pts))
    tris = enumerate_regular_triangulations(A)
    assert tris
    for T in tris:
        assert sum(normalized_volume(s, A) for s in T.simplices) == vol
        assert sum(gkz_vector(A, T)) == 3 * vol
        psi = regularity_witness(A, T)
        assert psi is not None
    # GKZ vectors of distinct regular triangulations are distinct
    assert len({gkz_vector(A, T) for T in tris}) == len(tris)
