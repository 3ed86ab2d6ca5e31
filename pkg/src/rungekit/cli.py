"""Command-line interface.

Exit status: 0 success, 1 mathematical mismatch, 2 usage error, 3 bad input data.
Result payloads are deterministic; run metadata (timestamps, digests) goes in
a separate manifest file.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .exact_arith import CycloElement, RationalPoly

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 3


class InputError(Exception):
    """Malformed input data (exit status 3)."""


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _point(text: str) -> tuple[Fraction, Fraction]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("a point is given as x,y")
    return _rational(parts[0]), _rational(parts[1])


def _polys(text: str) -> list[RationalPoly]:
    try:
        return [RationalPoly.parse(s) for s in text.split(";") if s.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _q(x) -> str:
    return str(Fraction(x))


def _cyclo(c: CycloElement) -> list[str]:
    return [_q(v) for v in c.coords]


def _emit(payload, out: str | None = None) -> str:
    text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    return text


def _digest(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(path: str, command: str, params: dict, inputs: list[str], assumptions: list[str]) -> None:
    manifest = {
        "command": command,
        "parameters": params,
        "inputs": {p: _digest(p) for p in inputs},
        "tool_version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
        "assumptions": assumptions,
    }
    Path(path).write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


def cmd_bounds(args) -> int:
    from . import runge_bounds as rb

    what = args.what
    if what == "table1":
        payload = {
            "provenance": "ieq:table",
            "ks": list(rb.TABLE1_KS),
            "grid": [
                {"psi": psi, **{str(k): v for k, v in zip(rb.TABLE1_KS, row)}}
                for psi, row in enumerate(rb.table1_grid())
            ],
            "rows": [{"psi": psi, "k": k, "max_omega_d": v} for psi, k, v in rb.table1()],
        }
    elif what == "par":
        cond, bound = rb.thm_par(args.k, args.r, args.p, args.b, args.omega_d)
        payload = {"condition": cond, "bound": bound.to_json(), "params": vars_of(args, "k r p b omega_d")}
    elif what == "par2":
        cond, bound = rb.thm_par2(args.k, args.r, args.m, args.b, args.omega_L_d, args.omega_L_kb)
        payload = {"condition": cond, "bound": bound.to_json(), "params": vars_of(args, "k r m b omega_L_d omega_L_kb")}
    elif what == "main":
        params = rb.MainthParams(args.p, tuple(args.degs), args.t, args.B, args.disc_log)
        mb = rb.height_bound_main(params)
        payload = {
            "case": params.case,
            "delta": mb.delta,
            "m": _q(mb.m),
            "genus": rb.genus(params.p, params.degs),
            "closed_form_valid": rb.closed_form_valid(mb.delta, params.p, params.degs),
            "sharp": mb.sharp.to_json(),
            "simplified": mb.simplified.to_json(),
        }
    elif what == "sr":
        res = rb.thm_sr(args.p, args.polys, args.n, args.a, args.s_size)
        payload = {"epsilon": res.epsilon, "condition": res.condition, "bound": res.bound.to_json()}
    elif what == "wth":
        target, cutoff = rb.thm_wth(args.p, args.polys)
        payload = {"guaranteed_omega": target, "log_x_cutoff": cutoff.to_json()}
    elif what == "ieq":
        payload = {
            "provenance": "ieq",
            "holds": rb.ieq_holds(args.k, args.r, args.omega_d, args.eps),
            "max_omega_d": rb.ieq_max_omega(args.k, args.r, args.eps),
        }
    elif what == "corollary":
        payload = {
            "provenance": "ieq:corollary",
            "prime_count": rb.corollary_prime_count(args.k, args.omega_d, args.eps),
        }
    else:  # pragma: no cover - argparse restricts the choices
        raise AssertionError(what)
    _emit(payload, args.out)
    return EXIT_OK


def vars_of(args, names: str) -> dict:
    return {n: getattr(args, n) for n in names.split()}


# ---------------------------------------------------------------------------
# puiseux / runge
# ---------------------------------------------------------------------------


def cmd_puiseux(args) -> int:
    from .puiseux import check_integrality, expand_pth_root

    s = expand_pth_root(args.poly, args.p, args.terms)
    payload = {
        "provenance": "puiseux:expand",
        "p": s.p,
        "lead_exponent": _q(Fraction(s.lead_num, s.p)),
        "terms": [{"exponent": _q(e), "coeff": _cyclo(c)} for e, c in s.terms()],
        "integral_after_scaling": check_integrality(s),
    }
    _emit(payload, args.out)
    return EXIT_OK


def cmd_runge(args) -> int:
    from .runge_core import aux_degree, matrix_height, nullspace, runge_system, verify_aux

    system = runge_system(args.polys, args.p, args.t)
    basis = nullspace(system.matrix)
    rows, cols = system.matrix.shape
    checks = []
    for g in basis[: args.check]:
        deg = aux_degree(g)
        checks.append({d: verify_aux(g, system.fs, args.p, system.branch_set, d) for d in (deg + 1, deg + 3)})
    mh = matrix_height(system.matrix, system.fs)
    payload = {
        "provenance": "runge:system",
        "delta": system.delta,
        "monomial_degree": system.monomial_degree,
        "branch_set": [list(b) for b in system.branch_set],
        "matrix_shape": [rows, cols],
        "nullspace_dimension": len(basis),
        "expected_dimension_lower_bound": system.expected_dimension,
        "verified_depths": [{str(d): ok for d, ok in c.items()} for c in checks],
        "matrix_height": {"exact": mh.exact.to_json(), "a_priori": mh.a_priori.to_json(), "within": mh.within_a_priori},
    }
    _emit(payload, args.out)
    return EXIT_OK if all(all(c.values()) for c in checks) else EXIT_MISMATCH


# ---------------------------------------------------------------------------
# ec
# ---------------------------------------------------------------------------


def _curve_from_args(args):
    from .ec import WeierstrassCurve, curve_from_quadruple

    if args.gammas is not None:
        if args.aJ is None:
            raise argparse.ArgumentTypeError("--gammas needs --aJ")
        return curve_from_quadruple(args.gammas, args.aJ)
    if args.A is None or args.B is None:
        raise argparse.ArgumentTypeError("give --A and --B, or --gammas and --aJ")
    return None, WeierstrassCurve(args.A, args.B)


def _pt(P) -> list[str] | None:
    return None if P.is_infinity else [_q(P.x), _q(P.y)]


def cmd_ec(args) -> int:
    from .ec import CurvePoint, canonical_height_interval, map_F_to_E, torsion_subgroup

    try:
        model, E = _curve_from_args(args)
    except (argparse.ArgumentTypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    payload: dict = {"curve": {"A": E.A, "B": E.B}}
    if args.what == "torsion":
        tors = torsion_subgroup(E)
        payload.update(provenance="ec:torsion", order=len(tors), points=[_pt(T) for T in tors])
    else:
        if args.point is None:
            print("error: --point is required", file=sys.stderr)
            return EXIT_USAGE
        P = CurvePoint(*args.point)
        if not E.contains(P):
            print(f"error: point {args.point} is not on the curve", file=sys.stderr)
            return EXIT_DATA
        if args.what == "height":
            h = canonical_height_interval(P, E)
            import mpmath

            payload.update(
                provenance="ec:canonical-height",
                lower=mpmath.nstr(h.lo, 30),
                upper=mpmath.nstr(h.hi, 30),
                doublings=h.doublings,
                torsion=h.torsion,
            )
        else:
            if model is None:
                print("error: ec map needs --gammas and --aJ", file=sys.stderr)
                return EXIT_USAGE
            Q = map_F_to_E(P, model)
            payload.update(
                provenance="ec:quartic-map",
                gammas=list(model.gammas),
                aJ=model.aJ,
                image=None if Q.at_infinity else [_q(Q.X), _q(Q.Y)],
            )
    _emit(payload, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# sieve
# ---------------------------------------------------------------------------


def _load_configs(path: str, k: int):
    from .sieve.configs import Configuration

    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from exc
    items = obj if isinstance(obj, list) else [obj]
    out = []
    for n, item in enumerate(items):
        try:
            c = Configuration.from_json(item)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{path}: configuration {n}: {exc}") from exc
        if c.k != k:
            raise InputError(f"{path}: configuration {n} has k={c.k}, expected {k}")
        out.append(c)
    return out


def _load_db(path: str):
    from .sieve.db import DBError, load_db

    try:
        return load_db(path)
    except DBError as exc:
        raise InputError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _run_sieve(args):
    from .sieve.driver import run

    db = _load_db(args.db)
    configs = _load_configs(args.configs, args.k)
    return run(
        args.k,
        args.psi,
        db,
        configs,
        log_hmax=args.log_hmax,
        case3_log_hmax=args.case3_log_hmax,
        jobs=args.jobs,
        image_mode=args.image,
    )


def _manifest_path(args) -> str | None:
    if args.manifest:
        return args.manifest
    if args.out:
        return args.out + ".manifest.json"
    return None


def cmd_sieve(args) -> int:
    from .sieve.fixtures import table_pairs
    from .sieve.solutions import witness

    if args.what == "fixture":
        ks = [args.k] if args.k is not None else list(range(8, 18))
        entries, missing = [], []
        for d, x in sorted(table_pairs()):
            good = [k for k in ks if witness(x, d, k) is not None]
            entries.append({"d": d, "x": x, "k": good})
            if not good:
                missing.append([d, x])
        payload = {
            "provenance": "fixture:table",
            "k": ks,
            "pairs": len(entries),
            "entries": entries,
            "without_witness": missing,
        }
        _emit(payload, args.out)
        return EXIT_MISMATCH if missing else EXIT_OK

    report = _run_sieve(args)
    payload = report.to_json()
    manifest = _manifest_path(args)
    if manifest:
        payload["manifest"] = Path(manifest).name
    inputs = [args.db, args.configs]
    params = {k: v for k, v in vars(args).items() if k not in ("func", "out", "manifest", "csv")}
    params["log_hmax"] = str(params["log_hmax"])
    params["case3_log_hmax"] = str(params["case3_log_hmax"])

    if args.what == "run":
        _emit(payload, args.out)
        if args.csv:
            Path(args.csv).write_text(report.to_csv())
        status = EXIT_OK
    else:
        from .sieve.driver import check_against_table

        table = table_pairs()
        diff = check_against_table(report, table)
        out = {
            "k": report.k,
            "psi": report.psi,
            "complete": report.complete,
            "found_in_table": [list(p) for p in diff["found_in_table"]],
            "extra": [list(p) for p in diff["extra"]],
            "skipped": [o.to_json() for o in report.skipped],
            "assumptions": report.assumptions,
        }
        if args.strict:
            out["missing"] = [list(p) for p in sorted(table - report.pairs())]
        if manifest:
            out["manifest"] = Path(manifest).name
        _emit(out, args.out)
        mismatch = bool(out["extra"]) or (args.strict and (out["missing"] or out["skipped"]))
        status = EXIT_MISMATCH if mismatch else EXIT_OK
    if manifest:
        write_manifest(manifest, f"sieve {args.what}", params, inputs, report.assumptions)
    return status


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rungekit", description="Height bounds, Puiseux expansions and the six-term sieve.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    # bounds
    b = sub.add_parser("bounds", help="evaluate height bounds and admissibility tables")
    bs = b.add_subparsers(dest="what", required=True)
    t1 = bs.add_parser("table1", help="largest omega(d) for each (psi, k)")
    par = bs.add_parser("par", help="bound for x + i d = b_i y_i^p")
    for flag in ("--k", "--r", "--p", "--b", "--omega-d"):
        par.add_argument(flag, type=int, required=True)
    par2 = bs.add_parser("par2", help="quadratic-field variant for p = 2")
    for flag in ("--k", "--r", "--m", "--b", "--omega-L-d"):
        par2.add_argument(flag, type=int, required=True)
    par2.add_argument("--omega-L-kb", type=int, default=None)
    main = bs.add_parser("main", help="height bound for a point at the chosen delta")
    main.add_argument("--p", type=int, required=True)
    main.add_argument("--degs", type=_ints, required=True)
    main.add_argument("--t", type=int, required=True)
    main.add_argument("--B", type=_rational, default=Fraction(2))
    main.add_argument("--disc-log", type=_rational, default=Fraction(0))
    sr = bs.add_parser("sr", help="finiteness condition for a y^p = prod g_i^n")
    sr.add_argument("--p", type=int, required=True)
    sr.add_argument("--polys", type=_polys, required=True, help="';'-separated polynomials in x")
    sr.add_argument("--n", type=int, default=1)
    sr.add_argument("--a", type=int, default=1)
    sr.add_argument("--s-size", type=int, default=1)
    wth = bs.add_parser("wth", help="guaranteed prime count and |x| cutoff")
    wth.add_argument("--p", type=int, required=True)
    wth.add_argument("--polys", type=_polys, required=True)
    ieq = bs.add_parser("ieq", help="admissibility inequality")
    corr = bs.add_parser("corollary", help="guaranteed number of primes above k-1")
    for p_ in (ieq, corr):
        p_.add_argument("--k", type=int, required=True)
        p_.add_argument("--omega-d", type=int, required=True)
        p_.add_argument("--eps", type=int, choices=(0, 1), required=True)
    ieq.add_argument("--r", type=int, required=True)
    for p_ in (t1, par, par2, main, sr, wth, ieq, corr):
        p_.add_argument("--out", default=None)
        p_.set_defaults(func=cmd_bounds)

    # puiseux
    pu = sub.add_parser("puiseux", help="series expansions at infinity")
    pus = pu.add_subparsers(dest="what", required=True)
    ex = pus.add_parser("expand", help="principal p-th root of a monic polynomial")
    ex.add_argument("--poly", type=RationalPoly.parse, required=True)
    ex.add_argument("--p", type=int, required=True)
    ex.add_argument("--terms", type=int, required=True, help="truncation order")
    ex.add_argument("--out", default=None)
    ex.set_defaults(func=cmd_puiseux)

    # runge
    ru = sub.add_parser("runge", help="build the branch matrix and its nullspace")
    ru.add_argument("--polys", type=_polys, required=True, help="';'-separated polynomials in x")
    ru.add_argument("--p", type=int, required=True)
    ru.add_argument("--t", type=int, required=True)
    ru.add_argument("--check", type=int, default=2, help="number of basis vectors to verify")
    ru.add_argument("--out", default=None)
    ru.set_defaults(func=cmd_runge)

    # ec
    ec = sub.add_parser("ec", help="elliptic curve utilities for Y^2 = X(X+A)(X+B)")
    ecs = ec.add_subparsers(dest="what", required=True)
    for name in ("torsion", "height", "map"):
        e = ecs.add_parser(name)
        e.add_argument("--A", type=int)
        e.add_argument("--B", type=int)
        e.add_argument("--gammas", type=_ints)
        e.add_argument("--aJ", type=int)
        e.add_argument("--point", type=_point)
        e.add_argument("--out", default=None)
        e.set_defaults(func=cmd_ec)

    # sieve
    sv = sub.add_parser("sieve", help="six-term sieve")
    svs = sv.add_subparsers(dest="what", required=True)
    sieve_help = {
        "run": "sieve configurations and write the solutions found",
        "verify": "sieve configurations and compare with the embedded solution table",
    }
    for name in ("run", "verify"):
        s = svs.add_parser(name, help=sieve_help[name])
        s.add_argument("--k", type=int, required=True)
        s.add_argument("--psi", type=int, default=5, help="terms allowed to be dropped: r = k - psi")
        s.add_argument("--db", required=True)
        s.add_argument("--configs", required=True, help="JSON configuration or list of configurations")
        s.add_argument("--log-hmax", type=int, default=10**14)
        s.add_argument("--case3-log-hmax", type=int, default=400)
        s.add_argument("--image", choices=("mw", "full"), default="mw")
        s.add_argument("--jobs", type=int, default=1)
        s.add_argument("--out", default=None)
        s.add_argument("--manifest", default=None)
        s.set_defaults(func=cmd_sieve)
        if name == "run":
            s.add_argument("--csv", default=None)
        else:
            s.add_argument("--strict", action="store_true", help="also require every table entry to be found")
    fx = svs.add_parser("fixture", help="check that every table entry has a witness")
    fx.add_argument("--k", type=int, default=None, help="only this k (default: any k in 8..17)")
    fx.add_argument("--out", default=None)
    fx.set_defaults(func=cmd_sieve)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "sieve" and args.what != "fixture" and args.jobs < 1:
        ap.error("--jobs must be positive")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
