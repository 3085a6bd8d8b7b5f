"""Command-line entry point: read one command, print one report.

Exit status is 0 on success, 1 when a library error is reported (the error
record is printed in the requested format) and 2 for malformed arguments.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import catalog as cat
from . import dsl
from . import schwartz as sw
from .distribution import checks, core
from .errors import DistCalcError
from .report import Report, complex_fields, render_error

PAIR_TOL = 1e-8
FT_TOL = 1e-6


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _windows(text: str) -> list[tuple[float, float]]:
    try:
        return [tuple(float(v) for v in w.split(":")) for w in text.split(",") if w.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected windows a:b,c:d, got {text!r}") from None


def _tol(args, default: float) -> float:
    if args.tol is not None:
        return args.tol
    env = os.environ.get("DISTCALC_TOL")
    if env:
        try:
            return float(env)
        except ValueError:
            raise DistCalcError(f"DISTCALC_TOL={env!r} is not a number") from None
    return default


# --- commands ------------------------------------------------------------------

def cmd_eval(args) -> Report:
    tol = _tol(args, PAIR_TOL)
    L, phi = dsl.elaborate(args.dist), dsl.testfn(args.testfn)
    r = core.pair_detailed(L, phi, tol)
    return Report("eval", {"distribution": str(L), "test_function": args.testfn},
                  summary={"value": dsl.format_number(r.value), **complex_fields("value", r.value),
                           "error_estimate": r.error},
                  tolerances={"tol": tol})


def cmd_ft(args) -> Report:
    L = dsl.elaborate(args.dist)
    F = core.fourier(L)
    return Report("ft", {"distribution": str(L)},
                  summary={"result": str(F), "wrap_depth": F.wrap_depth()})


def cmd_diff(args) -> Report:
    L = dsl.elaborate(args.dist)
    return Report("diff", {"distribution": str(L), "order": args.order},
                  summary={"result": str(core.derivative(L, args.order))})


def _mollifier(args) -> sw.TestFunction:
    return dsl.testfn(args.mollifier) if args.mollifier else checks.default_mollifier()


def cmd_recover(args) -> Report:
    tol = _tol(args, PAIR_TOL)
    L = dsl.elaborate(args.dist)
    rep = checks.recover_point(L, args.at, _mollifier(args), args.ks, tol, args.variant)
    rows = [{"k": k, **complex_fields("estimate", v), "error_estimate": e}
            for k, v, e in zip(rep.ks, rep.estimates, rep.errors)]
    summ = {"limit_estimate": dsl.format_number(rep.extrapolated) if rep.extrapolated is not None
            else None}
    if rep.extrapolated is not None:
        summ.update(complex_fields("limit", rep.extrapolated))
    return Report("recover", {"distribution": str(L), "at": args.at, "mollifier": args.mollifier,
                              "variant": args.variant},
                  rows, summ, {"tol": tol},
                  columns=["k", "estimate_re", "estimate_im", "error_estimate"])


def cmd_witness(args) -> Report:
    tol = _tol(args, PAIR_TOL)
    L = dsl.elaborate(args.dist)
    rep = checks.regularity_witness(L, args.at, _mollifier(args), args.ks, tol)
    rows = [{"k": k, "abs_value": abs(v), **complex_fields("value", v)}
            for k, v in zip(rep.ks, rep.values)]
    return Report("witness", {"distribution": str(L), "at": args.at, "mollifier": args.mollifier},
                  rows, {"growth_exponent": rep.growth_exponent}, {"tol": tol},
                  columns=["k", "abs_value", "value_re", "value_im"])


def cmd_probe(args) -> Report:
    tol = _tol(args, PAIR_TOL)
    family = "gauss_modulated" if args.family == "gauss" else args.family
    L, M = dsl.elaborate(args.first), dsl.elaborate(args.second)
    params = args.windows if family == "box_window" else args.omegas
    v = checks.probe_separation(L, M, family, params, tol)
    rows = [{"param": list(p) if isinstance(p, tuple) else p, "gap": g, "error_estimate": e}
            for p, g, e in v.per_probe]
    param = list(v.param) if isinstance(v.param, tuple) else v.param
    return Report("probe", {"first": str(L), "second": str(M), "family": family}, rows,
                  {"status": v.status, "param": param, "gap": v.gap, "max_gap": v.max_gap},
                  {"tol": tol}, columns=["param", "gap", "error_estimate"])


def cmd_seminorm(args) -> Report:
    phi = dsl.testfn(args.testfn)
    s = sw.seminorm(phi, args.m, args.n)
    return Report("seminorm", {"test_function": args.testfn, "m": args.m, "n": args.n},
                  summary={"value": s.value, "argmax_estimate": s.argmax_estimate,
                           "grid_resolution": s.grid_resolution})


def _residual_report(op, args, rep, tol) -> Report:
    return Report(op, {"function": args.function, "test_function": args.testfn},
                  summary={**complex_fields("lhs", rep.lhs), **complex_fields("rhs", rep.rhs),
                           "residual": rep.residual, "error_estimate": rep.error_estimate,
                           "pass": rep.residual <= tol + rep.error_estimate},
                  tolerances={"tol": tol})


def cmd_check(args) -> Report:
    what = args.what
    if what == "gpf":
        tol = _tol(args, FT_TOL)
        rep = checks.gpf_check(dsl.catalog_function(args.function), dsl.testfn(args.testfn), tol)
        return _residual_report("check gpf", args, rep, tol)
    if what == "ibp":
        tol = _tol(args, PAIR_TOL)
        rep = checks.ibp_check(dsl.catalog_function(args.function), dsl.testfn(args.testfn), tol)
        return _residual_report("check ibp", args, rep, tol)
    if what == "ftic":
        base = dsl.testfn(args.testfn) if args.testfn else sw.gauss(1)
        rep = checks.ft_continuity_check(base, args.ks, args.mn_cap, args.constant)
        rows = [{"k": k, "sup_transform": s, "bound": b, "within_bound": s <= b}
                for k, s, b in zip(rep.ks, rep.sup_transform, rep.transform_bound)]
        return Report("check ftic", {"test_function": args.testfn or "gauss(1)",
                                     "mn_cap": args.mn_cap},
                      rows, {"seminorms_decrease": rep.monotone,
                             "bound_holds": all(r["within_bound"] for r in rows),
                             "constant": rep.constant},
                      columns=["k", "sup_transform", "bound", "within_bound"])
    # growth
    f = dsl.catalog_function(args.function)
    cert = None if args.C is None else (args.C, args.N if args.N is not None else 0)
    rep = cat.verify_growth(f, cert)
    rows = [{"R": R, "integral": a, "bound": b} for R, a, b in zip(rep.R_values, rep.lhs, rep.rhs)]
    return Report("check growth", {"function": f.name}, rows,
                  {"pass": rep.passed, "C": rep.certificate[0], "N": rep.certificate[1]},
                  columns=["R", "integral", "bound"])


# --- argument parsing ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--tol", type=float, default=None,
                        help="overrides DISTCALC_TOL and the per-command default")

    p = argparse.ArgumentParser(prog="distcalc", description="Tempered distribution calculator")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("eval", parents=[common], help="pair a distribution with a test function")
    s.add_argument("dist")
    s.add_argument("testfn")
    s.set_defaults(run=cmd_eval)

    s = sub.add_parser("ft", parents=[common], help="Fourier transform in canonical form")
    s.add_argument("dist")
    s.set_defaults(run=cmd_ft)

    s = sub.add_parser("diff", parents=[common], help="distributional derivative")
    s.add_argument("dist")
    s.add_argument("--order", type=int, default=1)
    s.set_defaults(run=cmd_diff)

    for name, fn, ks in (("recover", cmd_recover, "4,16,64,256"),
                         ("witness", cmd_witness, "4,8,16,32,64,128,256")):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("dist")
        s.add_argument("--at", type=float, required=True)
        s.add_argument("--mollifier", default=None, help="default: gauss(0)/sqrt(pi)")
        s.add_argument("--ks", type=_floats, default=_floats(ks))
        if name == "recover":
            s.add_argument("--variant", choices=("mollifier", "box"), default="mollifier")
        s.set_defaults(run=fn)

    s = sub.add_parser("probe", parents=[common], help="search for a separating probe")
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("--family", default="gauss",
                   choices=("gauss", "gauss_modulated", "fourier_exponential", "box_window"))
    s.add_argument("--omegas", type=_floats, default=_floats("-2,-1,0,1,2"))
    s.add_argument("--windows", type=_windows, default=_windows("-1:0,0:1,-0.5:0.5"))
    s.set_defaults(run=cmd_probe)

    s = sub.add_parser("seminorm", parents=[common], help="C_{m,n} = sup |x^m phi^(n)|")
    s.add_argument("testfn")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(run=cmd_seminorm)

    s = sub.add_parser("check", parents=[common], help="numerical verification reports")
    s.add_argument("what", choices=("gpf", "ibp", "ftic", "growth"))
    s.add_argument("function", nargs="?", help="catalog function (gpf, ibp, growth)")
    s.add_argument("testfn", nargs="?", help="test function (gpf, ibp; base for ftic)")
    s.add_argument("--ks", type=_floats, default=_floats("1,2,4,8,16"))
    s.add_argument("--mn-cap", type=int, default=2)
    s.add_argument("--constant", type=float, default=checks.TRANSFORM_BOUND_CONSTANT)
    s.add_argument("--C", type=float, default=None)
    s.add_argument("--N", type=int, default=None)
    s.set_defaults(run=cmd_check)
    return p


def _normalize_check(args, parser):
    if args.command != "check":
        return
    if args.what == "ftic":
        # the single positional, if any, is the base test function
        args.testfn = args.testfn or args.function
        args.function = None
        return
    if args.function is None or (args.what in ("gpf", "ibp") and args.testfn is None):
        parser.error(f"check {args.what} needs a catalog function"
                     + (" and a test function" if args.what != "growth" else ""))


_VALUE_FLAGS = ("--omegas", "--windows", "--ks", "--at", "--tol", "--constant", "--C")


def _attach_values(argv: list[str]) -> list[str]:
    """``--omegas -2,-1`` -> ``--omegas=-2,-1`` so negative lists are not read as options."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def run_command(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    argv = _attach_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
        _normalize_check(args, parser)
    except SystemExit as exc:
        return int(exc.code or 0)
    fmt = args.format
    try:
        report = args.run(args)
    except DistCalcError as exc:
        out.write(render_error(exc.record(), fmt))
        return 1
    out.write(report.render(fmt))
    return 0


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
