"""The twelve acceptance criteria, each with its tolerance and time budget.

Run ``pytest tests/test_acceptance.py`` or ``python3 tests/test_acceptance.py``;
either prints one PASS/FAIL line per criterion.
"""

import itertools
import time
from fractions import Fraction

import numpy as np
import pytest

from k3lab import modular as md
from k3lab.exactcore import Matrix
from k3lab.galedisc import LaurentPoly, fan_sequence, reduce_discriminant, torus_coordinates
from k3lab.lattice import check_dolgachev, transvection
from k3lab.monodromy import (
    build_numgroth,
    dictionary_check,
    hyperbolic_splitting,
    monodromy_log,
    tensor_action,
)
from k3lab.periods import (
    blowup_map_A0,
    eta1_coeffs,
    f4_coefficient,
    gkz_recurrence_check,
    hilbert_relation_degree_check,
    ifunction_FG,
    period_map_A0,
    wproj_homogeneity_check,
)
from k3lab.polytope import (
    enumerate_regular_triangulations,
    hull,
    is_reflexive,
    lattice_points,
    normalized_volume,
    polar_dual,
)
from k3lab.registry import get_case
from k3lab.suites import fan_suite, monodromy_suite, periods_suite, point_config

RESULTS: dict[int, str] = {}
CASES = ("A0", "A1")


def _passed(reports):
    bad = [r.check_id for r in reports if r.status != "pass"]
    return not bad, (f"failing: {bad[:4]}" if bad else f"{len(reports)} checks")


def c1():
    for c in CASES:
        ex = get_case(c)
        P = hull(ex.points)
        if not is_reflexive(P):
            return False, f"{c}: not reflexive"
        if len(lattice_points(P)) != 6:
            return False, f"{c}: lattice point count"
        if set(polar_dual(P).vertices) != {tuple(v) for v in ex.value("dual_vertices")}:
            return False, f"{c}: polar dual"
    return True, "reflexive, 6 points, duals match"


def c2():
    A = point_config(get_case("A0"))
    v = (normalized_volume((1, 2, 3, 5), A), normalized_volume((0, 1, 2, 5), A))
    return v == (5, 2), f"volumes {v}"


def c3():
    reps = []
    for c in CASES:
        ex = get_case(c)
        tris = enumerate_regular_triangulations(point_config(ex))
        if len(tris) != 4:
            return False, f"{c}: {len(tris)} triangulations"
        reps += fan_suite(ex)
    ids = {r.check_id for r in reps}
    need = {"A0.fan.circuit_a0a3a4", "A0.fan.cyclic_order", "A1.fan.cyclic_order", "A0.fan.wall_I_II"}
    ok, msg = _passed(reps)
    return ok and need <= ids, msg


def _poly(terms):
    return LaurentPoly({e: c for e, c in terms})


def c4():
    from k3lab.suites import discriminant_suite

    lam, mu = _poly([((1, 0), 1)]), _poly([((0, 1), 1)])
    one = _poly([((0, 0), 1)])
    want = {
        "A0": 64 * lam ** 5 - 48 * lam ** 4 + 12 * lam ** 3 - lam ** 2 - 1000 * lam ** 2 * mu
        + 50 * lam * mu - 3125 * mu ** 2 - 4 * mu,
        "A1": one + 54 * (lam + mu) + 729 * (lam - mu) ** 2,
    }
    reps = []
    for c in CASES:
        ex = get_case(c)
        G = fan_sequence(point_config(ex))
        red = reduce_discriminant(ex.discriminant(), torus_coordinates(G, ex.torus_rows), G.Ptilde)
        w = want[c].normalized()
        if red.normalized() not in (w, -w):
            return False, f"{c}: reduced form differs"
        part = discriminant_suite(ex, samples=25)
        zeros = sum(r.status == "pass" for r in part if ".horn.sample" in r.check_id)
        if zeros < 25:
            return False, f"{c}: {zeros} exact zeros"
        reps += part
    return _passed(reps)


def c5():
    eta = eta1_coeffs(10)
    bad = [(n, m) for n in range(9) for m in range(9 - n)
           if f4_coefficient(Fraction(1, 3), Fraction(2, 3), 1, 1, n, m, -27, -27) != eta[(n, m)]]
    if bad:
        return False, f"F4 vs eta1 at {bad[:3]}"
    reps = []
    for c in CASES:
        rows = get_case(c).torus_rows
        F, _ = ifunction_FG(rows, 10)
        reps += gkz_recurrence_check(rows, F, prefix=f"{c}.gkz")
    reps += gkz_recurrence_check(get_case("A1").torus_rows, eta, a0_twist=True, prefix="A1.gkz_eta1")
    from k3lab.suites import _factorization_grid

    grid = _factorization_grid(1e-10)
    ok, msg = _passed(reps + [grid])
    return ok, f"{msg}; {grid.details}"


def c6():
    reps = []
    for c in CASES:
        reps += dictionary_check(c, bound=3)
        ex = get_case(c)
        ng = build_numgroth(ex.pic_gram_mirror)
        sp = hyperbolic_splitting(ng, ex.value("hyperbolic_f"))
        P = sp.change
        named = [(1, 0), (0, 1)] if c == "A0" else [(1, 1), (0, 1)]
        for d in named:
            phi = transvection(sp.T.basis(0), sp.T.vector(0, 0, *d)).matrix
            if P.inverse() @ tensor_action(ng, *d).matrix @ P != phi:
                return False, f"{c}: named monodromy {d}"
    return _passed(reps)


def c7():
    Z = Matrix.zeros(4, 4)
    ng0 = build_numgroth(get_case("A0").pic_gram_mirror)
    for d in ((1, 0), (0, 1), (1, 1)):
        N = monodromy_log(tensor_action(ng0, *d).matrix)
        if N @ N == Z or N @ N @ N != Z:
            return False, f"A0 {d}"
    ng1 = build_numgroth(get_case("A1").pic_gram_mirror)
    for d in ((1, 0), (0, 1)):
        N = monodromy_log(tensor_action(ng1, *d).matrix)
        if N == Z or N @ N != Z:
            return False, f"A1 {d}"
    return True, "A0 type III, A1 type II on (1,0), (0,1)"


def c8():
    reps = [r for c in CASES for r in monodromy_suite(get_case(c))
            if r.check_id.split(".")[-1] in ("orbit_fan", "g1_shift", "alternating_relations")]
    ok, msg = _passed(reps)
    return ok and len(reps) == 3, msg


def c9():
    from k3lab.suites import modular_suite

    ok, R = md.hilbert_W_identity()
    if not ok:
        return False, f"W U W^T = {R}"
    return _passed(modular_suite(CASES, ode=False))


def c10():
    reps, _ = md.loop_monodromy_traces(tol=1e-6)
    loop = md.loop_path(0.5 + 0.2j, 0.5 + 0.2j, 0.1, 64)
    dev = float(np.abs(md.ode_transport(loop) - np.eye(2)).max())
    ok, msg = _passed(reps)
    return ok and dev < 1e-9, f"{msg}; contractible loop deviation {dev:.1e}"


def c11():
    k = wproj_homogeneity_check(blowup_map_A0(), (1, 2, 5), (1, 3, 5))
    cusps = [period_map_A0(Fraction(l), Fraction(0)).normalized().coords for l in (0, Fraction(1, 2), 3)]
    deg = hilbert_relation_degree_check()
    ok, msg = _passed(deg)
    return ok and k == 2 and all(c == (1, 0, 0) for c in cusps), f"k = {k}; relation {msg}"


def c12():
    return _passed([r for c in CASES for r in check_dolgachev(get_case(c))])


CRITERIA = [
    (1, "polytope data", c1, 1.0),
    (2, "volumes", c2, 1.0),
    (3, "secondary fans", c3, 30.0),
    (4, "discriminants", c4, 5.0),
    (5, "series identities", c5, 10.0),
    (6, "monodromy dictionary", c6, 1.0),
    (7, "nilpotency types", c7, 1.0),
    (8, "toroidal fans", c8, 5.0),
    (9, "arithmetic models", c9, 1.0),
    (10, "ODE monodromy", c10, 60.0),
    (11, "weighted maps", c11, 1.0),
    (12, "Dolgachev checks", c12, 5.0),
]


def run(n, name, fn, limit):
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # reported as a failure line
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    dt = time.perf_counter() - t0
    ok = ok and dt < limit
    RESULTS[n] = f"{'PASS' if ok else 'FAIL'} criterion {n:2d} {name}: {detail} [{dt:.2f}s / {limit:g}s]"
    print(RESULTS[n])
    return ok


@pytest.mark.parametrize("n,name,fn,limit", CRITERIA, ids=[f"c{c[0]:02d}" for c in CRITERIA])
def test_criterion(n, name, fn, limit):
    assert run(n, name, fn, limit), RESULTS[n]


if __name__ == "__main__":
    import sys

    sys.exit(0 if all([run(*c) for c in CRITERIA]) else 1)
