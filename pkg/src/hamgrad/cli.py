"""Command-line front end.

Every subcommand writes a JSON summary (stdout unless ``--out``) and, where
records exist, a CSV (``--csv``).  Exit status: 0 pass, 1 violation found,
2 configuration or I/O error.  ``--config FILE`` reads ``key = value`` lines
named like the long flags; explicit flags win.  Relative output paths are
placed under $HAMGRAD_OUTPUT_DIR when it is set.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import auxfn, pde, reporting
from .bounds import BoundEnv, BoundKind
from .errors import HamgradError
from .solutions import make_family
from .verify import battery, harnack, kernel, lower, modulus, upper
from .verify.pairs import family_source

PASS, VIOLATION, CONFIG_ERROR = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(CONFIG_ERROR, f"{self.prog}: error: {message}\n")


def _float(text):
    v = float(text)
    if math.isnan(v):
        raise argparse.ArgumentTypeError("nan is not allowed")
    return v


def _positive(text):
    v = _float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return v


def _nonneg(text):
    v = _float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return v


def _seeds(text):
    """'0:50' (half-open range) or a comma list."""
    if ":" in text:
        a, b = text.split(":")
        return list(range(int(a), int(b)))
    return [int(x) for x in text.split(",") if x]


def _add_output(p):
    p.add_argument("--out", help="JSON summary path (default: stdout)")
    p.add_argument("--csv", help="CSV records path")
    p.add_argument("--config", help="key = value file; explicit flags win")


def _add_family(p, required=True):
    p.add_argument("--family", required=required, choices=["exp", "gauss", "kernel", "h3kernel", "fourier"])
    p.add_argument("--a", type=_positive, help="rate (exp) or width (gauss)")
    p.add_argument("--n", type=int, default=1, help="dimension")
    p.add_argument("--lam", type=_positive, help="frequency (fourier)")
    p.add_argument("--A", type=_float, default=2.0, help="offset (fourier)")
    p.add_argument("--shift", type=_nonneg, default=0.0, help="time shift added to the family")


def _add_env(p, R_default=1.0):
    p.add_argument("--R", type=_positive, default=R_default, help="ball radius (inf allowed)")
    p.add_argument("--T", type=_positive, default=1.0)
    p.add_argument("--k", type=_nonneg, default=0.0)
    p.add_argument("--M", type=_positive, default=None, help="ceiling (default: exact supremum)")
    p.add_argument("--x0", type=_float, nargs="+", default=None, help="ball center")
    p.add_argument("--tau0", type=_nonneg, default=0.0, help="time offset of the cylinder")


def build_parser():
    ap = _Parser(prog="hamgrad", description="Hamilton-type gradient bound verification")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("scan-aux", help="comparability scan of the auxiliary function")
    p.add_argument("--s-min", type=_positive, default=1e-6)
    p.add_argument("--s-max", type=_positive, default=1e6)
    p.add_argument("--points", type=int, default=400)
    p.add_argument("--R", type=_positive, nargs="+", default=[0.1, 1.0, 10.0])
    p.add_argument("--tau", type=_positive, nargs="+", default=[0.01, 1.0, 100.0])
    p.add_argument("--k", type=_nonneg, nargs="+", default=[0.0, 1.0, 10.0])
    p.add_argument("--max-spread", type=_positive, default=100.0)
    _add_output(p)

    p = sub.add_parser("verify-upper", help="empirical constant of a gradient bound")
    _add_family(p, required=False)
    _add_env(p)
    p.add_argument("--geometry", choices=[battery.INTERVAL, battery.HYPERBOLIC],
                   help="seeded PDE battery instead of a family")
    p.add_argument("--seeds", type=_seeds, default=None, help="'0:50' or '1,2,3'")
    p.add_argument("--N", type=int, default=201)
    p.add_argument("--bound", default="h0", choices=[b.value for b in BoundKind])
    p.add_argument("--trial-C", type=_positive, default=None)
    p.add_argument("--sample-radius", type=_positive, default=None)
    p.add_argument("--s-bar", type=_positive, default=None)
    p.add_argument("--alpha", type=_positive, default=None)
    _add_output(p)

    p = sub.add_parser("lower-search", help="constructive lower value at (s, t, R)")
    p.add_argument("--s", type=_positive, required=True)
    p.add_argument("--t", type=_positive, required=True)
    p.add_argument("--R", type=_positive, default=math.inf)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--no-refine", action="store_true")
    _add_output(p)

    p = sub.add_parser("hmap", help="sharpness map of the extremal function")
    p.add_argument("--s-min", type=_positive, default=2.0**-20)
    p.add_argument("--s-max", type=_positive, default=2.0**20)
    p.add_argument("--s-points", type=int, default=41)
    p.add_argument("--t", type=_positive, nargs="+", default=[1.0])
    p.add_argument("--R", type=_positive, nargs="+", default=[1.0])
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--no-refine", action="store_true")
    _add_output(p)

    p = sub.add_parser("harnack", help="pseudo-Harnack checks and the critical constant")
    _add_family(p, required=False)
    _add_env(p)
    p.add_argument("--C", type=_positive, default=None)
    p.add_argument("--scan-n", type=int, default=3, help="dimension for the kernel family scan")
    p.add_argument("--min-C", action="store_true", help="bisect for the smallest passing C")
    _add_output(p)

    p = sub.add_parser("modulus", help="modulus of continuity and the implication lemma")
    _add_family(p, required=False)
    _add_env(p)
    p.add_argument("--C", type=_positive, default=2.0)
    p.add_argument("--c", type=_positive, default=1.0)
    p.add_argument("--branch", type=int, choices=[1, 2], default=None)
    p.add_argument("--implication-samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--search", action="store_true", help="report smallest C and largest c")
    _add_output(p)

    p = sub.add_parser("kernel", help="heat-kernel logarithmic gradient bound")
    p.add_argument("--kind", choices=["euclid", "h3"], default="euclid")
    p.add_argument("--trial-C", type=_positive, default=None)
    p.add_argument("--delta", type=_float, default=None)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--d-max", type=_positive, default=6.0)
    p.add_argument("--t-min", type=_positive, default=1e-3)
    p.add_argument("--t-max", type=_positive, default=10.0)
    _add_output(p)

    p = sub.add_parser("liyau", help="Li-Yau quantity over the half cylinder")
    _add_family(p)
    _add_env(p)
    p.add_argument("--alpha", type=_float, default=1.0)
    p.add_argument("--trial-C", type=_positive, default=None)
    p.add_argument("--sample-radius", type=_positive, default=None)
    _add_output(p)

    p = sub.add_parser("pde-validate", help="solver error and convergence against exact kernels")
    p.add_argument("--case", choices=["euclid-radial", "euclid-interval", "h3", "fourier-circle"],
                   default="euclid-radial")
    p.add_argument("--N", type=int, nargs="+", default=[101, 201, 401])
    p.add_argument("--t0", type=_positive, default=0.5)
    p.add_argument("--t1", type=_positive, default=1.0)
    p.add_argument("--dt-factor", type=_positive, default=0.5)
    p.add_argument("--min-order", type=_positive, default=1.8)
    _add_output(p)

    p = sub.add_parser("report", help="merge JSON summaries into one document")
    p.add_argument("inputs", nargs="+")
    _add_output(p)
    return ap


def _config_argv(path):
    """Translate a key = value file into flags."""
    argv = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise HamgradError(f"config line without '=': {line!r}")
            key, val = (x.strip() for x in line.split("=", 1))
            flag = "--" + key.replace("_", "-")
            low = val.lower()
            if low in ("true", "yes", "on"):
                argv.append(flag)
            elif low in ("false", "no", "off"):
                continue
            else:
                argv.append(flag)
                argv.extend(val.split())
    return argv


def _family(args):
    params = {}
    if args.family in ("exp", "gauss"):
        if args.a is None:
            raise HamgradError(f"--a is required for family {args.family}")
        params = {"a": args.a, "n": args.n}
    elif args.family == "kernel":
        params = {"n": args.n}
    elif args.family == "fourier":
        params = {"lam": 1.0 if args.lam is None else args.lam, "A": args.A, "n": args.n}
    if args.shift:
        params["shift"] = args.shift
    return make_family(args.family, **params)


def _emit(args, summary, header=None, rows=None):
    if args.csv and header is not None:
        reporting.emit_report(None, args.csv, "csv", header, rows)
    text = reporting.emit_report(summary, args.out, "json")
    if not args.out:
        sys.stdout.write(text)


def _cmd_scan_aux(args):
    s = np.geomspace(args.s_min, args.s_max, args.points)
    res = auxfn.comparability_scan(s, args.R, args.tau, args.k, keep_rows=bool(args.csv))
    summary = res.summary()
    summary["max_spread"] = args.max_spread
    passed = math.isfinite(res.spread) and res.spread <= args.max_spread
    summary["passed"] = passed
    _emit(args, summary, auxfn.CSV_COLUMNS, res.rows if res.rows is not None else [])
    return PASS if passed else VIOLATION


def _cmd_verify_upper(args):
    if args.geometry:
        if not args.seeds:
            raise HamgradError("--seeds is required for PDE batteries")
        rep = battery.pde_battery(args.geometry, args.seeds, args.N, args.R, args.T, args.bound, args.trial_C)
    else:
        if not args.family:
            raise HamgradError("give --family or --geometry")
        fam = _family(args)
        env = BoundEnv(fam.dim if args.family != "h3kernel" else 3, args.k, args.R, args.T, args.M)
        rep = upper.verify_upper(fam, env, args.bound, args.trial_C, x0=args.x0, tau0=args.tau0,
                                 sample_radius=args.sample_radius, s_bar=args.s_bar, alpha=args.alpha)
    _emit(args, rep.summary(), upper.CSV_COLUMNS, rep.csv_rows())
    return VIOLATION if rep.violations else PASS


def _cmd_lower(args):
    res = lower.lower_search(args.s, args.t, args.R, args.n, refine=not args.no_refine)
    _emit(args, res.as_dict())
    return PASS


def _cmd_hmap(args):
    s = np.geomspace(args.s_min, args.s_max, args.s_points) if args.s_points > 0 else []
    res = lower.hmap(s, args.t, args.R, args.n, refine=not args.no_refine)
    summary = {"cells": len(res.rows), "max_h0_over_lower": res.max_gap if res.rows else None}
    _emit(args, summary, lower.HMAP_COLUMNS, res.rows)
    return PASS


def _cmd_harnack(args):
    crit = harnack.critical_constant()
    C = args.C if args.C is not None else 2.0 * crit
    out = {"critical_constant": crit, "closed_form": harnack.CRITICAL_EXACT,
           "family_scan": harnack.family_scan(C, args.scan_n).as_dict()}
    code = PASS
    if args.family:
        fam = _family(args)
        src = family_source(fam, args.R, args.T, x0=args.x0, tau0=args.tau0, M=args.M)
        rep = harnack.harnack_check(src, args.R, args.k, C)
        out["check"] = rep.as_dict()
        if args.min_C:
            out["minimal_C"] = harnack.minimal_constant(lambda c: harnack.harnack_check(src, args.R, args.k, c))
        code = PASS if rep.passed else VIOLATION
    _emit(args, out)
    return code


def _cmd_modulus(args):
    bad, total = modulus.implication_counterexamples(args.implication_samples, args.seed)
    out = {"implication": {"counterexamples": bad, "samples": total, "seed": args.seed}}
    code = PASS if bad == 0 else VIOLATION
    if args.family:
        fam = _family(args)
        src = family_source(fam, args.R, args.T, x0=args.x0, tau0=args.tau0, M=args.M)
        rep = modulus.modulus_check(src, args.R, args.k, args.C, args.c, branch=args.branch)
        out["check"] = rep.as_dict()
        if args.search:
            out["smallest_C"] = harnack.minimal_constant(
                lambda C: modulus.modulus_check(src, args.R, args.k, C, args.c, branch=args.branch))
            out["largest_c"] = modulus.maximal_radius_constant(
                lambda c: modulus.modulus_check(src, args.R, args.k, args.C, c, branch=args.branch))
        if not rep.passed:
            code = VIOLATION
    _emit(args, out)
    return code


def _cmd_kernel(args):
    rep = kernel.kernel_check(args.kind, args.trial_C, args.delta, n=args.n, d_max=args.d_max,
                              t_min=args.t_min, t_max=args.t_max)
    _emit(args, rep.as_dict())
    return PASS if rep.passed else VIOLATION


def _cmd_liyau(args):
    fam = _family(args)
    rep = kernel.li_yau_check(fam, args.alpha, args.R, args.T, args.k, x0=args.x0, tau0=args.tau0,
                              sample_radius=args.sample_radius)
    out = rep.as_dict()
    code = PASS
    if args.trial_C is not None:
        out["trial_C"] = args.trial_C
        out["violations"] = int(rep.c_emp > args.trial_C)
        code = VIOLATION if rep.c_emp > args.trial_C else PASS
    _emit(args, out, ("t", "lhs"), zip(rep.t, rep.lhs))
    return code


_PDE_CASES = {
    "euclid-radial": lambda: (make_family("kernel", n=3), pde.RadialEuclidean(3, 6.0)),
    "euclid-interval": lambda: (make_family("kernel", n=1, y=3.0), pde.Interval1D(6.0)),
    "h3": lambda: (make_family("h3kernel"), pde.RadialHyperbolic(3, 6.0)),
    "fourier-circle": lambda: (make_family("fourier", lam=1.0, A=2.0, n=1), pde.PeriodicCircle(2 * math.pi)),
}


def _cmd_pde_validate(args):
    fam, geom = _PDE_CASES[args.case]()
    table = pde.convergence_validate(fam, geom, args.N, args.t0, args.t1, args.dt_factor, strict=False)
    out = {"case": args.case, **table.as_dict(), "min_order": args.min_order}
    ok = all(o >= args.min_order for o in table.orders)
    out["passed"] = ok
    _emit(args, out, ("N", "h", "dt", "error"), ([r["N"], r["h"], r["dt"], r["error"]] for r in table.rows))
    return PASS if ok else VIOLATION


def _cmd_report(args):
    merged = {}
    for path in args.inputs:
        with open(path, encoding="utf-8") as fh:
            merged[path] = json.load(fh)
    _emit(args, merged)
    return PASS


_COMMANDS = {
    "scan-aux": _cmd_scan_aux,
    "verify-upper": _cmd_verify_upper,
    "lower-search": _cmd_lower,
    "hmap": _cmd_hmap,
    "harnack": _cmd_harnack,
    "modulus": _cmd_modulus,
    "kernel": _cmd_kernel,
    "liyau": _cmd_liyau,
    "pde-validate": _cmd_pde_validate,
    "report": _cmd_report,
}


def run_command(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        if "--config" in argv:
            i = argv.index("--config")
            if i + 1 >= len(argv):
                parser.error("--config needs a path")
            sub_i = next(j for j, a in enumerate(argv) if a in _COMMANDS)
            # config flags go first so explicit flags, parsed later, win
            argv = argv[: sub_i + 1] + _config_argv(argv[i + 1]) + argv[sub_i + 1:]
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else CONFIG_ERROR
    except StopIteration:
        parser.print_usage(sys.stderr)
        return CONFIG_ERROR
    except (OSError, HamgradError) as exc:
        print(f"hamgrad: error: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    if not args.command:
        parser.print_usage(sys.stderr)
        return CONFIG_ERROR
    try:
        return _COMMANDS[args.command](args)
    except (HamgradError, ValueError, OSError) as exc:
        print(f"hamgrad: error: {exc}", file=sys.stderr)
        return CONFIG_ERROR


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
