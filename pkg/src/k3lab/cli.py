"""Command line entry point: ``k3lab verify`` and per-area report commands.

Exit codes: 0 all checks pass, 1 some check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .registry import CASES, get_case
from .report import CheckReport, dumps
from .suites import SUITES, any_failed, max_degree, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def emit_report(reports: Sequence[CheckReport], fmt: str = "json", path: str | Path | None = None,
                suite: str = "all", seed: int = 0, extra: dict | None = None) -> str:
    """Render reports (sorted by check id) and write them to ``path`` or stdout."""
    if fmt == "json":
        text = dumps(suite, seed, list(reports))
        if extra:
            payload = json.loads(text)
            payload.update(extra)
            text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    elif fmt == "text":
        lines = [f"{r.status.upper():4}  {r.check_id}  {r.details}" for r in sorted(reports, key=lambda r: r.check_id)]
        n_fail = sum(r.status == "fail" for r in reports)
        lines.append(f"{len(reports)} checks, {n_fail} failed")
        text = "\n".join(lines) + "\n"
    else:
        raise UsageError(f"unknown format {fmt!r}")
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        try:
            Path(path).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot write report to {path}: {exc.strerror or exc}") from None
    return text


def parse_point_config(path: str | Path):
    from .polytope import PointConfig

    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        return PointConfig.from_json(text)
    except (ValueError, TypeError) as exc:
        line = _point_line(text, str(exc))
        where = f" (line {line})" if line else ""
        raise UsageError(f"{path}{where}: {exc}") from None


def _point_line(text: str, msg: str) -> int | None:
    """Best-effort line number of the point named in a validation message."""
    import re

    m = re.search(r"\(([-\d, ]+)\)", msg)
    if not m:
        return None
    target = [int(x) for x in m.group(1).split(",") if x.strip()]
    hits = [i for i, ln in enumerate(text.splitlines(), 1)
            if ln.strip().rstrip(",").startswith("[") and _ints(ln) == target]
    return hits[-1] if hits else None


def _ints(line: str) -> list[int]:
    try:
        v = json.loads(line.strip().rstrip(","))
        return v if isinstance(v, list) else []
    except json.JSONDecodeError:
        return []


def _frac_dict(series) -> dict:
    return {f"({n},{m})": str(Fraction(series[(n, m)])) for n, m in series.keys()}


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_verify(args) -> int:
    cases = [args.case] if args.case else None
    try:
        reports = run_suite(args.suite, seed=args.seed, tol=args.tol, cases=cases,
                            registry=args.registry, ode_tol=args.ode_tol)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise UsageError(f"cannot load registry: {exc}") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.json:
        emit_report(reports, "json", args.json, args.suite, args.seed)
    emit_report(reports, args.format, None, args.suite, args.seed)
    return EXIT_FAIL if any_failed(reports) else EXIT_OK


def cmd_discriminant(args) -> int:
    from .galedisc import fan_sequence, reduce_discriminant, torus_coordinates
    from .suites import discriminant_suite, point_config

    ex = get_case(args.case)
    reports = discriminant_suite(ex, seed=args.seed, samples=args.samples)
    A = point_config(ex)
    G = fan_sequence(A)
    red = reduce_discriminant(ex.discriminant(), torus_coordinates(G, ex.torus_rows), G.Ptilde)
    extra = {"reduced": red.to_dict(ex.id, ["lambda", "mu"])}
    emit_report(reports, "json" if args.json else "text", None if args.json in (None, True) else args.json,
                f"discriminant:{ex.id}", args.seed, extra)
    return EXIT_FAIL if any_failed(reports) else EXIT_OK


def cmd_periods(args) -> int:
    from .periods import eta1_coeffs, ifunction_FG
    from .suites import periods_suite

    ex = get_case(args.case)
    D = args.max_deg if args.max_deg is not None else max_degree()
    F, (G1, G2) = ifunction_FG(ex.torus_rows, D)
    series = {"F": _frac_dict(F), "G1": _frac_dict(G1), "G2": _frac_dict(G2)}
    if ex.id == "A1":
        series["eta1"] = _frac_dict(eta1_coeffs(D))
    reports = periods_suite(ex)
    emit_report(reports, "json" if args.json else "text", None, f"periods:{ex.id}", 0,
                {"max_deg": D, "series": series})
    return EXIT_FAIL if any_failed(reports) else EXIT_OK


def cmd_monodromy(args) -> int:
    from .monodromy import build_numgroth, monodromy_log, nilpotency_index, tensor_action
    from .suites import monodromy_suite

    ex = get_case(args.case)
    ng = build_numgroth(ex.pic_gram_mirror)
    mats = {}
    for d in [(1, 0), (0, 1), (1, 1)]:
        T = tensor_action(ng, *d).matrix
        N = monodromy_log(T)
        mats[f"{d[0]},{d[1]}"] = {"T": T.tolist(), "log": [[str(x) for x in r] for r in N.tolist()],
                                  "nilpotency_index": nilpotency_index(N)}
    reports = monodromy_suite(ex)
    emit_report(reports, "json" if args.json else "text", None, f"monodromy:{ex.id}", 0,
                {"gram": ng.gram.tolist(), "tensor_actions": mats})
    return EXIT_FAIL if any_failed(reports) else EXIT_OK


def cmd_modular(args) -> int:
    from . import modular as md
    from .suites import modular_suite

    reports = modular_suite(["A0", "A1"], tol=args.tol, ode=False)
    extra = {}
    if args.ode:
        reps, extra["ode"] = md.loop_monodromy_traces(tol=args.tol, prefix="A1.modular.ode")
        reports += reps
    emit_report(reports, "json" if args.json else "text", None, "modular", 0, extra)
    return EXIT_FAIL if any_failed(reports) else EXIT_OK


def cmd_fan(args) -> int:
    from .polytope import enumerate_regular_triangulations, gkz_vector, secondary_fan

    A = parse_point_config(args.points)
    if len(A) > 8:
        raise UsageError(f"{len(A)} points: enumeration is limited to 8")
    tris = enumerate_regular_triangulations(A)
    out = {"points": [list(p) for p in A.points],
           "triangulations": [{"simplices": [list(s) for s in T.simplices], "gkz": list(gkz_vector(A, T))}
                              for T in tris]}
    try:
        F = secondary_fan(A)
        out["secondary_fan"] = json.loads(F.to_json())
    except ValueError as exc:
        out["secondary_fan"] = None
        out["note"] = str(exc)
    sys.stdout.write(json.dumps(out, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="k3lab", description="Verification suites for the two K3 mirror examples.")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run check suites")
    v.add_argument("--suite", default="all", choices=SUITES)
    v.add_argument("--case", choices=CASES)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, default=1e-9, help="relative tolerance of numeric checks")
    v.add_argument("--ode-tol", type=float, default=1e-6, help="tolerance of the ODE monodromy checks")
    v.add_argument("--json", metavar="PATH", help="also write the JSON report to PATH")
    v.add_argument("--format", choices=("text", "json"), default="text", help="stdout format")
    v.add_argument("--registry", metavar="PATH", help="alternative examples.json")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("discriminant", help="reduced discriminant and Horn-Kapranov samples")
    d.add_argument("case", choices=CASES)
    d.add_argument("--samples", type=int, default=25)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--json", nargs="?", const=True, metavar="PATH")
    d.set_defaults(func=cmd_discriminant)

    p = sub.add_parser("periods", help="I-function series and identities")
    p.add_argument("--case", choices=CASES, default="A1")
    p.add_argument("--max-deg", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_periods)

    m = sub.add_parser("monodromy", help="tensor actions, logarithms and cusp fans")
    m.add_argument("case", choices=CASES)
    m.add_argument("--json", action="store_true")
    m.set_defaults(func=cmd_monodromy)

    q = sub.add_parser("modular", help="arithmetic models and ODE monodromy")
    q.add_argument("--ode", action="store_true", help="include the numerical loop integrations")
    q.add_argument("--tol", type=float, default=1e-6)
    q.add_argument("--json", action="store_true")
    q.set_defaults(func=cmd_modular)

    f = sub.add_parser("fan", help="regular triangulations of a point configuration file")
    f.add_argument("points", metavar="PATH")
    f.set_defaults(func=cmd_fan)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "max_deg", None) is not None and args.max_deg < 1:
            raise UsageError("--max-deg must be positive")
        if getattr(args, "samples", 25) < 1:
            raise UsageError("--samples must be positive")
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"k3lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
