"""Check suites binding the registered example data to the verification code."""

from __future__ import annotations

import itertools
import os
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .exactcore import Matrix
from .galedisc import (
    PoleError,
    discriminant_vanishes_on_horn,
    eval_laurent,
    fan_sequence,
    horn_kapranov,
    newton_normal_rays,
    reduce_discriminant,
    sample_points,
    torus_coordinates,
    torus_lift,
)
from .lattice import check_dolgachev
from .registry import CASES, ExampleCase, load_registry
from .report import SKIP, CheckReport, check, timed

SUITES = ("all", "lattice", "polytope", "fan", "discriminant", "periods", "monodromy", "modular")
DEFAULT_MAX_DEG = 10


def max_degree() -> int:
    raw = os.environ.get("K3LAB_MAX_DEG", "").strip()
    if not raw:
        return DEFAULT_MAX_DEG
    try:
        d = int(raw)
    except ValueError:
        raise ValueError(f"K3LAB_MAX_DEG must be an integer, got {raw!r}") from None
    if d < 1:
        raise ValueError("K3LAB_MAX_DEG must be positive")
    return d


def point_config(ex: ExampleCase):
    from .polytope import PointConfig

    return PointConfig.from_points(ex.points)


# ---------------------------------------------------------------------------
# per-area suites
# ---------------------------------------------------------------------------


def lattice_suite(ex: ExampleCase, **_) -> list[CheckReport]:
    out = check_dolgachev(ex)
    if ex.id == "A0":
        from .lattice import Isometry, Lattice

        N = Lattice(ex.pic_gram_mirror, "N")
        g1, g2 = (Matrix(g) for g in ex.value("orthogonal_generators"))
        ok = True
        try:
            Isometry(g1, N), Isometry(g2, N)
        except ValueError:
            ok = False
        out.append(check("A0.lattice.orthogonal_generators", ok and g2 @ g2 == Matrix.identity(2),
                         "g1, g2 preserve the Gram of N and g2^2 = 1"))
    return out


def polytope_suite(ex: ExampleCase, **_) -> list[CheckReport]:
    from .polytope import hull, is_reflexive, lattice_points, normalized_volume, polar_dual, polytope_volume

    p = f"{ex.id}.polytope"
    out = []
    P = hull(ex.points)
    out.append(check(f"{p}.reflexive", is_reflexive(P), f"{len(P.vertices)} vertices"))
    n = len(lattice_points(P))
    out.append(check(f"{p}.lattice_points", n == 6, f"{n} lattice points"))
    D = polar_dual(P)
    want = {tuple(v) for v in ex.value("dual_vertices")}
    out.append(check(f"{p}.polar_dual", set(D.vertices) == want,
                     f"dual vertices {sorted(D.vertices)}"))
    out.append(check(f"{p}.double_dual", polar_dual(D).vertex_set() == P.vertex_set(), "dual of dual"))
    A = point_config(ex)
    for item in ex.value("volumes"):
        s = tuple(item["simplex"])
        v = normalized_volume(s, A)
        out.append(check(f"{p}.volume_{''.join(map(str, s))}", v == item["volume"],
                         f"vol{s} = {v}, registered {item['volume']}"))
    out.append(check(f"{p}.total_volume", polytope_volume(P) == 6, f"vol = {polytope_volume(P)}"))
    return out


def fan_suite(ex: ExampleCase, **_) -> list[CheckReport]:
    from .polytope import (
        check_triangulation,
        circuit_ray_in_quotient,
        circuits,
        enumerate_regular_triangulations,
        flip_circuit,
        gkz_vector,
        polytope_volume,
        hull,
        secondary_fan,
    )

    p = f"{ex.id}.fan"
    A = point_config(ex)
    out = []
    tris = enumerate_regular_triangulations(A)
    reg = {k: frozenset(frozenset(s) for s in v) for k, v in ex.triangulations().items()}
    got = {frozenset(T.as_sets()) for T in tris}
    out.append(check(f"{p}.triangulation_count", len(tris) == 4, f"{len(tris)} regular triangulations"))
    out.append(check(f"{p}.triangulations_match", got == set(reg.values()),
                     "enumerated simplex lists equal the registered ones"))
    vol = polytope_volume(hull(ex.points))
    bad = []
    for T in tris:
        try:
            check_triangulation(A, T)
        except ValueError as exc:
            bad.append(str(exc))
    out.append(check(f"{p}.triangulations_valid", not bad, f"all cover volume {vol}" if not bad else bad[0]))

    F = secondary_fan(A, ex.torus_rows)
    names = {v: k for k, v in reg.items()}
    order = [names.get(frozenset(T.as_sets()), "?") for T in F.cone_triangulations]
    want = ex.cone_order
    rotations = [want[i:] + want[:i] for i in range(len(want))]
    out.append(check(f"{p}.cone_count", len(F.rays) == 4,
                     f"{ex.id} secondary fan has {len(F.rays)} maximal cones"))
    out.append(check(f"{p}.cyclic_order", order in rotations,
                     f"cones in counter-clockwise order {order}; rays {[list(r) for r in F.rays]}"))
    gk = [gkz_vector(A, T) for T in F.cone_triangulations]
    out.append(check(f"{p}.gkz_distinct", len(set(gk)) == 4, f"GKZ vectors {gk}"))

    circ = circuits(A)
    walls = {frozenset(w["cones"]): frozenset(w["circuit"]) for w in ex.value("wall_circuits")}
    n = len(A)
    for i in range(len(F.rays)):
        T1, T2 = F.cone_triangulations[i], F.cone_triangulations[(i + 1) % 4]
        pair = (order[i], order[(i + 1) % 4])
        c = flip_circuit(A, T1, T2)
        cid = f"{p}.wall_{pair[0]}_{pair[1]}"
        if c is None:
            out.append(check(cid, False, "no single circuit modification"))
            continue
        ray = F.wall_ray(i)
        q = circuit_ray_in_quotient(c, n, F.kernel_rows)
        orth = q[0] * ray[0] + q[1] * ray[1] == 0
        reg_c = walls.get(frozenset(pair))
        ok = c in circ and orth and (reg_c is None or reg_c == frozenset(c.support))
        out.append(check(cid, ok, f"circuit {sorted(c.support)} with coefficients {c.coeffs}; wall ray {ray}"))
    if ex.id == "A0":
        target = [c for c in circ if c.support == (0, 3, 4)]
        ok = len(target) == 1 and target[0].coeffs == (2, -1, -1)
        out.append(check(f"{p}.circuit_a0a3a4", ok, "2 a0 = a3 + a4"))
    return out


def _horn_points(rows, count: int, seed: int, skip_zero: bool = True):
    """``count`` exact Horn-Kapranov points with no pole and nonzero coordinates."""
    pts, i = [], 0
    for lam in sample_points(seed, 8 * count):
        try:
            pt = horn_kapranov(rows, lam)
        except PoleError:
            continue
        if skip_zero and any(x == 0 for x in pt):
            continue
        pts.append((lam, pt))
        if len(pts) == count:
            break
    return pts


def discriminant_suite(ex: ExampleCase, seed: int = 0, samples: int = 25, **_) -> list[CheckReport]:
    p = f"{ex.id}.discriminant"
    A = point_config(ex)
    G = fan_sequence(A)
    tc = torus_coordinates(G, ex.torus_rows)
    delta = ex.discriminant()
    out = []
    try:
        red = reduce_discriminant(delta, tc, G.Ptilde)
    except ValueError as exc:
        return [check(f"{p}.reduce", False, str(exc))]
    want = ex.reduced_discriminant().normalized()
    out.append(check(f"{p}.reduced_form", red == want or red == -want,
                     f"reduced polynomial with {len(red.terms)} terms"))
    hp = _horn_points(tc.monomials, samples, seed)
    reps = discriminant_vanishes_on_horn(tc.monomials, red, [lam for lam, _ in hp], prefix=f"{p}.horn")
    out.extend(reps)
    zero = sum(1 for r in reps if r.status == "pass")
    out.append(check(f"{p}.horn_count", zero >= samples, f"{zero} exact zeros"))
    lifted_bad = []
    for lam, pt in hp:
        a = torus_lift(tc, pt)
        if eval_laurent(delta, a) != 0:
            lifted_bad.append(lam)
    out.append(check(f"{p}.full_vanishes", not lifted_bad,
                     f"full discriminant vanishes at {len(hp) - len(lifted_bad)}/{len(hp)} lifted points"))
    from .polytope import secondary_fan

    F = secondary_fan(A, ex.torus_rows)
    normals = newton_normal_rays(red)
    out.append(check(f"{p}.newton_refinement", set(normals) <= set(F.rays),
                     f"Newton normals {normals} among secondary rays {list(F.rays)}"))
    return out


def _factorization_grid(tol: float) -> CheckReport:
    from .periods import appell_f4, gauss_2f1

    a, b, c = 1 / 3, 2 / 3, 1.0
    c2 = a + b - c + 1
    grid = [0.01 + k * 0.035 for k in range(5)]
    worst = 0.0
    for x, y in itertools.product(grid, grid):
        lhs, _ = appell_f4(a, b, c, c2, x * (1 - y), y * (1 - x))
        rhs = gauss_2f1(a, b, c, x)[0] * gauss_2f1(a, b, c2, y)[0]
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    return check("A1.periods.factorization_grid", worst < tol,
                 f"max relative error {worst:.3e} on 5x5 grid", exact=False)


def periods_suite(ex: ExampleCase, seed: int = 0, tol: float = 1e-9, **_) -> list[CheckReport]:
    from .periods import (
        blowup_map_A0,
        branch_locus_check,
        eta1_coeffs,
        f4_coefficient,
        gkz_recurrence_check,
        hilbert_relation_degree_check,
        ifunction_FG,
        ifunction_FG_oracle,
        indeterminacy_check,
        period_map_A0,
        wproj_homogeneity_check,
    )

    D = max_degree()
    p = f"{ex.id}.periods"
    rows = ex.torus_rows
    out = []
    F, (G1, G2) = ifunction_FG(rows, D)
    Fo, G1o, G2o = ifunction_FG_oracle(rows, D)
    same = all(dict(S.coeffs) == {k: v for k, v in O.items() if v} for S, O in ((F, Fo), (G1, G1o), (G2, G2o)))
    out.append(check(f"{p}.ifunction_oracle", same, f"F, G1, G2 match the cohomology product to degree {D}"))
    out.extend(gkz_recurrence_check(rows, F, prefix=f"{p}.gkz_F"))
    if ex.id == "A1":
        eta = eta1_coeffs(D)
        out.extend(gkz_recurrence_check(rows, eta, a0_twist=True, prefix=f"{p}.gkz_eta1"))
        eta8 = eta if D >= 8 else eta1_coeffs(8)
        bad = [(n, m) for n in range(9) for m in range(9 - n)
               if f4_coefficient(Fraction(1, 3), Fraction(2, 3), 1, 1, n, m, -27, -27) != eta8[(n, m)]]
        out.append(check(f"{p}.f4_eta1", not bad, "F4 coefficients equal eta1 for n + m <= 8"
                         if not bad else f"mismatch at {bad[:3]}"))
        sym = all(eta[(n, m)] == eta[(m, n)] for n, m in eta.keys())
        out.append(check(f"{p}.eta1_symmetric", sym, "A(n, m) = A(m, n)"))
        out.append(_factorization_grid(max(tol, 1e-10)))
    else:
        k = wproj_homogeneity_check(blowup_map_A0(), (1, 2, 5), (1, 3, 5))
        out.append(check(f"{p}.weighted_homogeneity", k == 2, f"k = {k}"))
        cusp = period_map_A0(Fraction(1, 2), Fraction(0)).normalized()
        out.append(check(f"{p}.cusp", cusp.coords[1:] == (0, 0), f"mu = 0 maps to {[str(x) for x in cusp.coords]}"))
        out.append(indeterminacy_check())
        out.extend(hilbert_relation_degree_check())
        hp = _horn_points(rows, 10, seed)
        out.extend(branch_locus_check([pt for _, pt in hp]))
    return out


def monodromy_suite(ex: ExampleCase, **_) -> list[CheckReport]:
    from .monodromy import (
        build_numgroth,
        coordinate_change_q,
        dictionary_check,
        matrix_exp_nilpotent,
        monodromy_log,
        nilpotency_index,
        orbit_fan,
        tensor_action,
    )

    p = f"{ex.id}.monodromy"
    out = dictionary_check(ex)
    ng = build_numgroth(ex.pic_gram_mirror)
    degs = [tuple(d) for d in ex.value("monodromies")]
    expected = {"II": 2, "III": 3}[ex.raw["monodromies"]["expected_type"]]
    tested = degs if ex.id == "A0" else [(1, 0), (0, 1)]
    for d in tested:
        T = tensor_action(ng, *d).matrix
        N = monodromy_log(T)
        k = nilpotency_index(N)
        out.append(check(f"{p}.nilpotency_{d[0]}{d[1]}", k == expected,
                         f"N = log T({d}) has nilpotency index {k}"))
        out.append(check(f"{p}.exp_log_{d[0]}{d[1]}", matrix_exp_nilpotent(N) == T, "exp(log T) = T"))
    if ex.id == "A1":
        N = monodromy_log(tensor_action(ng, 1, 1).matrix)
        out.append(check(f"{p}.nilpotency_11", nilpotency_index(N) == 3,
                         f"phi_(e, e1 + e2) has nilpotency index {nilpotency_index(N)}"))
        fan = orbit_fan(ex.pic_gram_mirror, [Matrix([[0, 1], [1, 0]])], [(1, 1), (0, 1)], 4)
        fan8 = orbit_fan(ex.pic_gram_mirror, [Matrix([[0, 1], [1, 0]])], [(1, 1), (0, 1)], 8)
        out.append(check(f"{p}.orbit_fan", set(fan.rays) == {(1, 0), (1, 1), (0, 1)} and fan8 == fan,
                         f"rays {list(fan.rays)}"))
    else:
        g1, g2 = (Matrix(g) for g in ex.value("orthogonal_generators"))
        fan = orbit_fan(ex.pic_gram_mirror, [g1, g2], [(1, 0), (0, 1)], 4)
        idx = [fan.index(tuple(_prim(g1 @ r))) for r in fan.rays]
        shift = {i - j for j, i in enumerate(idx) if i is not None}
        out.append(check(f"{p}.g1_shift", len(shift) == 1,
                         f"g1 moves ray i to ray i{'+' if shift and min(shift) > 0 else ''}{sorted(shift)[0] if shift else '?'}"))
        rel = [c for _, _, c in fan.relations]
        alt = all(rel[i] in (1, 5) and rel[i] != rel[i + 1] for i in range(len(rel) - 1))
        out.append(check(f"{p}.alternating_relations", alt and all(a == b == 1 for a, b, _ in fan.relations),
                         f"v_prev + v_next = c v with c = {rel}"))
    Q = coordinate_change_q(ex)
    out.append(check(f"{p}.q_change", abs(Q.det()) == 1, f"exponent matrix {Q.tolist()}"))
    return out


def _prim(v):
    from .exactcore import primitive

    return primitive(v)


def modular_suite(cases: Iterable[str], tol: float = 1e-6, ode: bool = True, **_) -> list[CheckReport]:
    from . import modular as md

    out = []
    cases = set(cases)
    if "A0" in cases:
        ok, _ = md.hilbert_W_identity()
        out.append(check("A0.modular.hilbert_W", ok, "W U W^T = [[2, 1], [1, -2]] over Q(sqrt5)"))
    if "A1" in cases:
        G = md.matrix_units_gram()
        out.append(check("A1.modular.r_gram", G == Matrix([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]),
                         f"Gram {G.tolist()}"))
        B = md.sublattice_L_basis()
        GL = md.matrix_units_gram(B)
        out.append(check("A1.modular.l_gram", GL == Matrix([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 3], [0, 0, 3, 0]])
                         and all(md.in_L(b) for b in B), f"Gram {GL.tolist()}"))
        ok = True
        for g in md.GAMMA0_3_GENERATORS:
            for A_, B_ in ((g, md.Mat2Z(1, 0, 0, 1)), (md.Mat2Z(1, 0, 0, 1), g)):
                imgs = [md.pair_action(A_, B_, b) for b in B]
                ok &= all(md.in_L(v) for v in imgs)
                ok &= all(md.det_pairing(x, y) == md.det_pairing(u, v)
                          for (x, u), (y, v) in itertools.product(zip(imgs, B), repeat=2))
        out.append(check("A1.modular.gamma0_3", ok, "generators of Gamma0(3) x Gamma0(3) preserve L and the pairing"))
        S = [md.sigma_action(b) for b in B]
        ok = all(md.in_L(v) and md.sigma_action(v) == b for v, b in zip(S, B)) and all(
            md.det_pairing(x, y) == md.det_pairing(u, v) for (x, u), (y, v) in itertools.product(zip(S, B), repeat=2))
        out.append(check("A1.modular.sigma", ok, "sigma is an involutive isometry of L"))
        if ode:
            reps, _ = md.loop_monodromy_traces(tol=tol, prefix="A1.modular.ode")
            out.extend(reps)
        out.extend(md.mobius_class_checks(prefix="A1.modular.mobius"))
    return out


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------

_PER_CASE: Mapping[str, Callable[..., list[CheckReport]]] = {
    "lattice": lattice_suite,
    "polytope": polytope_suite,
    "fan": fan_suite,
    "discriminant": discriminant_suite,
    "periods": periods_suite,
    "monodromy": monodromy_suite,
}


def run_suite(filter: str = "all", seed: int = 0, tol: float = 1e-9, cases: Iterable[str] | None = None,
              registry: Mapping[str, ExampleCase] | str | os.PathLike | None = None,
              ode_tol: float = 1e-6) -> list[CheckReport]:
    """Run the named suite and return reports sorted by check id."""
    if filter not in SUITES:
        raise ValueError(f"unknown suite {filter!r}; choose from {', '.join(SUITES)}")
    if registry is None or isinstance(registry, (str, os.PathLike)):
        registry = load_registry(registry)
    cases = list(CASES if cases is None else cases)
    for c in cases:
        if c not in registry:
            raise ValueError(f"unknown case {c!r}")
    names = [s for s in SUITES[1:] if filter in ("all", s)]
    if "periods" in names:
        max_degree()  # bad K3LAB_MAX_DEG is a usage error, not a check failure
    out: list[CheckReport] = []
    for name in names:
        if name == "modular":
            with timed(out):
                out.extend(modular_suite(cases, tol=ode_tol))
            continue
        for c in cases:
            with timed(out):
                try:
                    out.extend(_PER_CASE[name](registry[c], seed=seed, tol=tol))
                except (ValueError, ArithmeticError) as exc:
                    out.append(check(f"{c}.{name}.error", False, f"{type(exc).__name__}: {exc}"))
    return sorted(out, key=lambda r: r.check_id)


def any_failed(reports: Iterable[CheckReport]) -> bool:
    return any(r.status == "fail" for r in reports)


__all__ = ["SUITES", "run_suite", "any_failed", "max_degree", "SKIP"]
