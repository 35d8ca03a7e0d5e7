"""Command-line front end: ``fprf <command> [options]``.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import analytic as an
from . import compound as cp
from . import gpp
from . import motion as mo
from . import sampling as sm
from .analytic import FieldParams, QuadrantPoint
from .errors import DomainError, NumericError
from .sampling import RngStream
from .specfun import DEFAULT_CONTROL, SeriesControl
from .validation import SCENARIOS, run_scenario

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- output helpers

def _ctl(args) -> SeriesControl:
    if args.tol is None:
        return DEFAULT_CONTROL
    if not args.tol > 0:
        raise UsageError("--tol must be positive")
    return SeriesControl(abs_tol=args.tol)


def _emit_text(text: str, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


def _json_text(payload: dict) -> str:
    return json.dumps({"schema": SCHEMA, **payload}, indent=2, allow_nan=True) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _emit(args, payload: dict, header=None, rows=None):
    if args.format == "csv":
        if header is None:
            raise UsageError(f"{args.command} has no CSV form; use --format json")
        _emit_text(_csv_text(header, rows), args.out)
    else:
        _emit_text(_json_text(payload), args.out)


def _merge_diag(reports) -> dict:
    regimes = sorted({r.regime for r in reports})
    return {"regime": regimes[0] if len(regimes) == 1 else regimes,
            "terms_used": max(int(r.terms_used) for r in reports),
            "error_estimate": max(float(r.error_estimate) for r in reports),
            "precision_loss": any(r.precision_loss for r in reports)}


def _field(args) -> tuple[FieldParams, QuadrantPoint]:
    return FieldParams(args.lam, args.nu1, args.nu2), QuadrantPoint(args.t1, args.t2)


def _field_params(args) -> dict:
    return {"lambda": args.lam, "nu1": args.nu1, "nu2": args.nu2, "t1": args.t1, "t2": args.t2}


# ---------------------------------------------------------------- evaluation commands

def cmd_pmf(args):
    p, at = _field(args)
    ctl = _ctl(args)
    if args.kmax < 1:
        raise UsageError("--kmax must be at least 1")
    reps = [an.pmf(p, k, at, ctl, route=args.route) for k in range(args.kmax)]
    table = [{"k": k, "value": float(r.value)} for k, r in enumerate(reps)]
    payload = {"command": "pmf", "params": _field_params(args), "table": table,
               "diagnostics": _merge_diag(reps),
               "per_k": [r.diagnostics() for r in reps]}
    _emit(args, payload, ["k", "value", "regime"],
          [(k, float(r.value), r.regime) for k, r in enumerate(reps)])


def cmd_moments(args):
    p, at = _field(args)
    mean, var = an.moments(p, at)
    vals = {"mean": mean, "variance": var, "capacity": an.capacity(p, at, _ctl(args))}
    for n in range(1, args.nmax + 1):
        vals[f"factorial_moment_{n}"] = an.factorial_moment(p, n, at)
    if args.z is not None:
        vals["pgf"] = float(an.pgf(p, args.z, at, _ctl(args)).value)
    _emit(args, {"command": "moments", "params": _field_params(args), "values": vals},
          ["name", "value"], list(vals.items()))


def cmd_covariance(args):
    p, at = _field(args)
    tau = QuadrantPoint(args.tau1, args.tau2)
    val = an.covariance(p, tau, at)
    params = {**_field_params(args), "tau1": args.tau1, "tau2": args.tau2}
    _emit(args, {"command": "covariance", "params": params, "values": {"covariance": val}},
          ["name", "value"], [("covariance", val)])


def cmd_orderstats(args):
    p, at = _field(args)
    ctl = _ctl(args)
    vals = {f"order_stat_cdf_k{args.k}": an.order_stat_cdf(p, args.k, args.fv, at, ctl)}
    for which in an.EXTREMES:
        vals[which] = an.extreme_stats(p, args.fv, at, which, ctl)
    params = {**_field_params(args), "k": args.k, "Fv": args.fv}
    _emit(args, {"command": "orderstats", "params": params, "values": vals},
          ["name", "value"], list(vals.items()))


def cmd_gpp(args):
    p = gpp.GppParams(args.alpha, args.gamma, args.lam)
    ctl = _ctl(args)
    reps = [gpp.gen_field_pmf(p, args.t, k, ctl) for k in range(args.kmax)]
    vals = {"mean": gpp.gpp_stats(p, args.t, "mean"),
            "variance": gpp.gpp_stats(p, args.t, "variance"),
            "waiting_survival": gpp.gpp_stats(p, args.t, "waiting_survival", ctl=ctl)}
    params = {"alpha": args.alpha, "gamma": args.gamma, "lambda": args.lam, "t": args.t}
    payload = {"command": "gpp", "params": params, "values": vals,
               "table": [{"k": k, "value": float(r.value)} for k, r in enumerate(reps)],
               "diagnostics": _merge_diag(reps)}
    _emit(args, payload, ["k", "value", "regime"],
          [(k, float(r.value), r.regime) for k, r in enumerate(reps)])


def _timechange(text: str):
    if text in ("none", "reflecting_bm"):
        return None if text == "none" else text
    if text.startswith("inverse_stable:"):
        return ("inverse_stable", float(text.split(":", 1)[1]))
    raise UsageError("--timechange is none, reflecting_bm or inverse_stable:NU")


def cmd_motion_cf(args):
    m = mo.MotionParams(args.lam, args.v, args.t)
    ctl = _ctl(args)
    if args.kind == "linear":
        val = mo.linear_cf(m, args.eta)
    elif args.kind == "linear-timechanged":
        val = mo.linear_cf_timechanged(args.alpha, args.gamma, m, args.eta, ctl)
    elif args.kind == "planar":
        val = mo.planar_cond_cf(args.k, m, args.eta)
    elif args.kind == "planar-unconditional":
        val = mo.planar_cf(m, args.eta)
    elif args.kind == "frac-planar-unconditional":
        if args.gamma != 1:
            raise UsageError("the unconditional fractional law needs --gamma 1")
        val = mo.frac_planar_cf(args.alpha, m, args.eta)
    else:
        val = mo.frac_planar_cond_cf(args.alpha, args.gamma, args.k, m, args.eta, args.route, ctl)
    params = {"kind": args.kind, "lambda": args.lam, "v": args.v, "t": args.t, "eta": args.eta,
              "alpha": args.alpha, "gamma": args.gamma, "k": args.k}
    _emit(args, {"command": "motion-cf", "params": params, "values": {"cf": val}},
          ["name", "value"], [("cf", val)])


def _exp_jumps(mean, step, upper):
    return cp.discretize_jumps(lambda y: -np.expm1(-np.asarray(y) / mean), step, upper)


def cmd_compound_cdf(args):
    p, at = _field(args)
    jumps = _exp_jumps(args.jump_mean, args.step, args.upper)
    law = cp.cfprf_distribution(p, jumps, at, args.eps_tail, _ctl(args))
    params = {**_field_params(args), "jump_mean": args.jump_mean, "step": args.step,
              "upper": args.upper, "eps_tail": args.eps_tail}
    if args.format == "csv":
        if args.out in (None, "-"):
            raise UsageError("compound-cdf --format csv needs --out")
        cp.write_grid_csv(law, args.out)
        return
    ys = args.y if args.y else [float(v) for v in np.linspace(0, args.upper, 11)]
    payload = {"command": "compound-cdf", "params": params, "atom_at_zero": law.atom_at_zero,
               "total_mass": law.total_mass(),
               "table": [{"y": y, "cdf": float(law.cdf_at(y))} for y in ys]}
    _emit_text(_json_text(payload), args.out)


# ---------------------------------------------------------------- simulation

def _count_summary(k) -> dict:
    freq, se = sm.empirical_pmf(k)
    return {"n": int(np.size(k)), "mean": float(np.mean(k)), "variance": float(np.var(k, ddof=1)) if np.size(k) > 1 else 0.0,
            "empirical_pmf": [float(f) for f in freq], "standard_errors": [float(e) for e in se]}


def _value_summary(x) -> dict:
    x = np.asarray(x, dtype=float)
    return {"n": int(x.size), "mean": float(x.mean()),
            "variance": float(x.var(ddof=1)) if x.size > 1 else 0.0}


def cmd_simulate(args):
    seed = 0 if args.seed is None else args.seed
    s = RngStream(seed)
    kind = args.kind
    if args.n < 1:
        raise UsageError("--n must be positive")
    if kind == "prf":
        bounds = QuadrantPoint(args.t1, args.t2)
        pat = sm.sample_prf(args.lam, bounds, s)
        header, rows = ["x", "y"], [(float(a), float(b)) for a, b in pat.points]
        summary = {"count": len(pat)}
        writer = lambda path: sm.write_pattern_csv(pat, path)
    elif kind in ("fprf", "gpp"):
        if kind == "fprf":
            p, at = _field(args)
            k = sm.sample_fprf(p, at, s, args.n)
        else:
            k = sm.sample_gpp(gpp.GppParams(args.alpha, args.gamma, args.lam), args.t, s, args.n)
        header, rows = ["sample_index", "k"], [(i, int(v)) for i, v in enumerate(k)]
        summary = _count_summary(k)
        writer = lambda path: sm.write_counts_csv(k, path)
    elif kind == "linear":
        m = mo.MotionParams(args.lam, args.v, args.t)
        x, k = mo.simulate_linear(m, _timechange(args.timechange), s, args.n, return_switches=True)
        header, rows = ["x", "k"], [(float(a), int(b)) for a, b in zip(x, k)]
        summary = _value_summary(x)
        writer = lambda path: mo.write_linear_csv(x, k, path)
    elif kind == "planar":
        m = mo.MotionParams(args.lam, args.v, args.t)
        tc = _timechange(args.timechange)
        if isinstance(tc, tuple):
            raise UsageError("planar motion supports --timechange none or reflecting_bm")
        smp = mo.simulate_planar(m, tc, s, args.n, condition_k=args.condition_k)
        header = ["x", "y", "k"]
        rows = [(float(a), float(b), int(c)) for (a, b), c in zip(smp.position, smp.switches)]
        summary = {**_value_summary(np.hypot(*smp.position.T)), "of": "radius",
                   "switch_mean": float(smp.switches.mean())}
        writer = lambda path: mo.write_planar_csv(smp, path)
    else:
        p, at = _field(args)
        mean = args.jump_mean
        y = cp.sample_cfprf(p, lambda g, n: g.exponential(mean, n), at, s, args.n)
        header, rows = ["sample_index", "y"], [(i, float(v)) for i, v in enumerate(y)]
        summary = _value_summary(y)
        writer = None
    payload = {"command": f"simulate {kind}", "seed": seed, "summary": summary}
    if args.out in (None, "-"):
        _emit(args, payload, header, rows)
        return
    out = Path(args.out)
    if writer is None:
        out.write_text(_csv_text(header, rows), encoding="utf-8", newline="\n")
    else:
        writer(out)
    out.with_suffix(".json").write_text(_json_text(payload),
                                        encoding="utf-8", newline="\n")


# ---------------------------------------------------------------- validate and plot

def cmd_validate(args):
    names = list(SCENARIOS) if args.scenario == "all" else [args.scenario]
    if any(n not in SCENARIOS for n in names):
        raise UsageError(f"unknown scenario {args.scenario!r}; known: all, {', '.join(SCENARIOS)}")
    results = [run_scenario(n, args.seed) for n in names]
    ok = all(r.passed for r in results)
    payload = {"command": "validate", "seed": args.seed, "pass": ok,
               "scenarios": [r.as_dict() for r in results]}
    _emit_text(_json_text(payload), args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_plot(args):
    try:
        import matplotlib
        matplotlib.use("svg")
        import matplotlib.pyplot as plt
    except ImportError:
        raise UsageError("plot needs matplotlib (install the 'plot' extra)")
    if args.out in (None, "-"):
        raise UsageError("plot needs --out FILE.svg")
    with open(args.input, newline="", encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.DictReader(lines))
    if not rows or args.x not in rows[0] or args.y not in rows[0]:
        raise UsageError(f"columns {args.x!r} and {args.y!r} must exist in {args.input}")
    x = np.array([float(r[args.x]) for r in rows])
    y = np.array([float(r[args.y]) for r in rows])
    fig, ax = plt.subplots(figsize=(6, 4))
    if args.kind == "scatter":
        ax.scatter(x, y, s=2)
    else:
        ax.plot(x, y, lw=1.2)
    ax.set_xlabel(args.x)
    ax.set_ylabel(args.y)
    if args.title:
        ax.set_title(args.title)
    fig.tight_layout()
    fig.savefig(args.out, format="svg")
    plt.close(fig)


# ---------------------------------------------------------------- parser

def _common(defaults: bool) -> argparse.ArgumentParser:
    sup = argparse.SUPPRESS
    c = argparse.ArgumentParser(add_help=False)
    c.add_argument("--seed", type=int, default=None if defaults else sup,
                   help="root RNG seed (default 0; validation scenarios use their own)")
    c.add_argument("--out", default=None if defaults else sup, help="output file ('-' for stdout)")
    c.add_argument("--format", choices=("json", "csv"), default="json" if defaults else sup)
    c.add_argument("--tol", type=float, default=None if defaults else sup,
                   help="absolute series truncation tolerance")
    return c


def _field_args(p, lam=1.0, t=1.0):
    p.add_argument("--lambda", dest="lam", type=float, default=lam)
    p.add_argument("--nu1", type=float, default=1.0)
    p.add_argument("--nu2", type=float, default=1.0)
    p.add_argument("--t1", type=float, default=t)
    p.add_argument("--t2", type=float, default=t)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fprf", parents=[_common(True)],
                                     description="Fractional Poisson random fields and relatives.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common(False)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("pmf", cmd_pmf, "state probabilities k = 0 .. kmax-1")
    _field_args(sp)
    sp.add_argument("--kmax", type=int, default=10, help="number of probabilities (k < kmax)")
    sp.add_argument("--route", choices=("auto", "series", "integral", "closed"), default="auto")

    sp = add("moments", cmd_moments, "mean, variance, capacity, factorial moments")
    _field_args(sp)
    sp.add_argument("--nmax", type=int, default=2, help="factorial moments of order 1..nmax")
    sp.add_argument("--z", type=float, default=None, help="also evaluate the pgf at z")

    sp = add("covariance", cmd_covariance, "Cov(N(tau), N(t))")
    _field_args(sp)
    sp.add_argument("--tau1", type=float, required=True)
    sp.add_argument("--tau2", type=float, required=True)

    sp = add("orderstats", cmd_orderstats, "order statistics of iid marks")
    _field_args(sp)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--fv", type=float, required=True, help="mark cdf value F(v)")

    sp = add("gpp", cmd_gpp, "generalized Poisson process laws")
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--gamma", type=float, default=1.0)
    sp.add_argument("--lambda", dest="lam", type=float, default=1.0)
    sp.add_argument("--t", type=float, default=1.0, help="time (or measure |B|)")
    sp.add_argument("--kmax", type=int, default=10)

    sp = add("simulate", cmd_simulate, "draw samples and write CSV plus a JSON summary")
    sp.add_argument("kind", choices=("prf", "fprf", "gpp", "linear", "planar", "compound"))
    _field_args(sp)
    sp.add_argument("--n", type=int, default=1000)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--gamma", type=float, default=1.0)
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--v", type=float, default=1.0)
    sp.add_argument("--timechange", default="none")
    sp.add_argument("--condition-k", dest="condition_k", type=int, default=None)
    sp.add_argument("--jump-mean", dest="jump_mean", type=float, default=1.0)

    sp = add("motion-cf", cmd_motion_cf, "characteristic functions of the random motions")
    sp.add_argument("--kind", choices=("linear", "linear-timechanged", "planar", "frac-planar",
                                       "planar-unconditional", "frac-planar-unconditional"),
                    default="linear")
    sp.add_argument("--lambda", dest="lam", type=float, default=1.0)
    sp.add_argument("--v", type=float, default=1.0)
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--eta", type=float, required=True, help="frequency (|delta| for planar)")
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--gamma", type=float, default=1.0)
    sp.add_argument("--k", type=int, default=0)
    sp.add_argument("--route", choices=mo.FRAC_ROUTES, default="auto")

    sp = add("compound-cdf", cmd_compound_cdf, "compound field law with exponential jumps")
    _field_args(sp)
    sp.add_argument("--jump-mean", dest="jump_mean", type=float, default=1.0)
    sp.add_argument("--step", type=float, default=2e-3)
    sp.add_argument("--upper", type=float, default=20.0)
    sp.add_argument("--eps-tail", dest="eps_tail", type=float, default=1e-10)
    sp.add_argument("--y", type=float, nargs="*", default=None)

    sp = add("validate", cmd_validate, "run a validation scenario (or 'all')")
    sp.add_argument("scenario")

    sp = add("plot", cmd_plot, "static SVG plot of two CSV columns")
    sp.add_argument("input")
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp.add_argument("--kind", choices=("line", "scatter"), default="line")
    sp.add_argument("--title", default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    try:
        code = args.func(args)
    except UsageError as exc:
        print(f"fprf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"fprf: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericError, ArithmeticError) as exc:
        print(f"fprf: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
