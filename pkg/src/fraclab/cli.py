"""Command-line front end: eval, verify, walk, heat, caputo, report.

Exit codes: 0 success / all checks pass, 1 verification failure,
2 usage or validation error, 3 quadrature tolerance not reached.
CSV output uses a header row, '.' decimals, and 17 significant digits;
JSON reports are UTF-8 with a stable schema.  Flag values take precedence
over a ``key = value`` config file, which takes precedence over defaults;
the effective configuration is echoed into every report.
"""

import argparse
import json
import sys

import numpy as np

from . import __version__
from .core import Domain, GridFunction, QuadratureSpec
from .caputo import caputo_derivative
from .heatflow import heat_kernel_fourier
from .oracles import oracle, oracle_names
from .pointops import (QuadratureBudgetError, extension_halflap,
                       fraclap_detailed, regional_fraclap)
from .spectral import spectral_heat_evolve
from .verify import run_suite
from .walkers import (CombConfig, WalkConfig, empirical_density,
                      run_classical_walk, run_censored_walk, run_comb_walk,
                      run_free_longjump_walk)

_FN_TABLE = {
    "t": (lambda t: np.asarray(t, float), lambda t: np.ones_like(t)),
    "t^2": (lambda t: np.asarray(t, float) ** 2, lambda t: 2.0 * np.asarray(t, float)),
    "t^3": (lambda t: np.asarray(t, float) ** 3, lambda t: 3.0 * np.asarray(t, float) ** 2),
    "exp(-t)": (lambda t: np.exp(-np.asarray(t, float)),
                lambda t: -np.exp(-np.asarray(t, float))),
}


def _fmt(x):
    return f"{float(x):.17g}"


def _emit(lines, path):
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_table(rows, path, fmt):
    """rows[0] is the CSV header; fmt selects csv or a json record list."""
    if fmt == "json":
        keys = rows[0].split(",")
        records = [dict(zip(keys, (float(v) for v in line.split(","))))
                   for line in rows[1:]]
        _emit_json(records, path)
    else:
        _emit(rows, path)


def _emit_json(obj, path):
    text = json.dumps(obj, indent=2, sort_keys=True)
    _emit([text], path)


def _read_config(path):
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {raw.rstrip()}")
            key, val = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = val
    return values


def cmd_eval(args):
    points = [float(p) for p in args.points.split(",")] if args.points else [0.0]
    q = QuadratureSpec(abs_tol=args.abs_tol)
    rows = ["x,value,est_error"]
    if args.op == "caputo":
        fn, dfn = _FN_TABLE[args.fn]
        for t in ([args.t] if args.t is not None else points):
            v = caputo_derivative(fn, float(t), args.s,
                                  scheme="direct_quadrature", derivative=dfn)
            rows.append(f"{_fmt(t)},{_fmt(v)},{_fmt(args.abs_tol)}")
        _emit_table(rows, args.out, args.format)
        return 0
    entry = oracle(args.oracle, args.s)
    for x in points:
        if args.op == "fraclap":
            v, err = fraclap_detailed(entry.function, x, args.s, q)
        elif args.op == "regional":
            dom = Domain.interval(args.a, args.b)
            v = regional_fraclap(entry.function, x, args.s, dom, q)
            err = args.abs_tol
        elif args.op == "extension":
            v = extension_halflap(entry.function, x, q)
            err = args.abs_tol
        else:
            raise ValueError(f"unknown operator {args.op!r}")
        rows.append(f"{_fmt(x)},{_fmt(v)},{_fmt(err)}")
    _emit_table(rows, args.out, args.format)
    return 0


def cmd_verify(args):
    report = run_suite(args.suite, quick=args.quick, seed=args.seed)
    report["effective_config"] = {"suite": args.suite, "quick": args.quick,
                                  "seed": args.seed, "threads": args.threads}
    _emit_json(report, args.out)
    return 0 if report["all_pass"] else 1


def _walk_result(args):
    if args.kind == "comb":
        cfg = CombConfig(n_steps=args.steps, ensemble=args.N, seed=args.seed)
        return run_comb_walk(cfg)
    dom = Domain.interval(args.a, args.b) if args.kind == "censored" else None
    cfg = WalkConfig(h=args.h, horizon=args.t, ensemble=args.N,
                     seed=args.seed, s=args.s, domain=dom)
    if args.kind == "classical":
        return run_classical_walk(cfg)
    if args.kind == "censored":
        return run_censored_walk(cfg)
    if args.kind == "free":
        return run_free_longjump_walk(cfg)
    raise ValueError(f"unknown walk kind {args.kind!r}")


def cmd_walk(args):
    res = _walk_result(args)
    prefix = args.out or f"walk_{args.kind}"
    if res.positions.ndim == 1:
        dens = empirical_density(res, args.bins)
        masses = dens.values * dens.spacing
        masses = masses / masses.sum()
        rows = ["bin_center,mass"]
        for c, v in zip(dens.nodes, masses):
            rows.append(f"{_fmt(c)},{_fmt(v)}")
        _emit(rows, prefix + "_density.csv")
    if res.msd_steps is not None:
        rows = ["t,msd"]
        for t, m in zip(res.msd_times, res.msd_values):
            rows.append(f"{_fmt(t)},{_fmt(m)}")
        _emit(rows, prefix + "_msd.csv")
    summary = {"kind": res.kind, "n_steps": res.n_steps, "tau": res.tau,
               "elapsed": res.elapsed, "seed": res.seed,
               "ensemble": int(res.positions.shape[0])}
    for key, val in res.extras.items():
        if isinstance(val, (int, float)):
            summary[key] = val
    _emit_json(summary, prefix + "_summary.json")
    return 0


def cmd_heat(args):
    if args.table:
        tab = heat_kernel_fourier(args.s)
        rows = ["x,kernel"]
        for x, v in zip(tab.x_grid, tab.values):
            rows.append(f"{_fmt(x)},{_fmt(v)}")
        _emit_table(rows, args.out, args.format)
        return 0
    dom = Domain.torus(args.period, origin=-args.period / 2.0)
    n = args.n
    spacing = args.period / n
    values = np.zeros(n)
    values[n // 2] = 1.0 / spacing
    ut = spectral_heat_evolve(GridFunction(dom, values), args.s, args.t)
    rows = ["x,density"]
    for x, v in zip(ut.nodes, ut.values):
        rows.append(f"{_fmt(x)},{_fmt(v)}")
    _emit_table(rows, args.out, args.format)
    return 0


def cmd_caputo(args):
    fn, dfn = _FN_TABLE[args.fn]
    rows = ["t,value"]
    for t in (float(p) for p in args.t.split(",")):
        v = caputo_derivative(fn, t, args.s, scheme="direct_quadrature",
                              derivative=dfn)
        rows.append(f"{_fmt(t)},{_fmt(v)}")
    _emit_table(rows, args.out, args.format)
    return 0


def cmd_report(args):
    report = run_suite("all", quick=True, seed=args.seed)
    report["package_version"] = __version__
    report["effective_config"] = {"seed": args.seed, "threads": args.threads}
    _emit_json(report, args.out)
    return 0 if report["all_pass"] else 1


def build_parser():
    p = argparse.ArgumentParser(prog="fraclab",
                                description="nonlocal-operator laboratory")
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--threads", type=int, default=1,
                   help="worker budget hint, recorded in reports")
    p.add_argument("--format", choices=["csv", "json"], default="csv",
                   help="tabular output format for eval/heat/caputo")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="evaluate an operator on an oracle")
    e.add_argument("--op", required=True,
                   choices=["fraclap", "regional", "extension", "caputo"])
    e.add_argument("--oracle", choices=list(oracle_names()), default="gaussian")
    e.add_argument("--fn", choices=list(_FN_TABLE), default="t")
    e.add_argument("--s", type=float, default=0.5)
    e.add_argument("--points", default="0.0")
    e.add_argument("--t", type=float)
    e.add_argument("--a", type=float, default=-1.0)
    e.add_argument("--b", type=float, default=1.0)
    e.add_argument("--abs-tol", type=float, default=1e-5)
    e.add_argument("--out")
    e.set_defaults(func=cmd_eval)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", required=True,
                   choices=["oracles", "spectral", "caputo", "kernels",
                            "master", "all"])
    v.add_argument("--quick", action="store_true")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    w = sub.add_parser("walk", help="run a walker ensemble")
    w.add_argument("--kind", required=True,
                   choices=["classical", "censored", "free", "comb"])
    w.add_argument("--h", type=float, default=0.02)
    w.add_argument("--s", type=float, default=0.5)
    w.add_argument("--t", type=float, default=0.5)
    w.add_argument("--steps", type=int, default=10 ** 4)
    w.add_argument("--N", type=int, default=10 ** 4)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--a", type=float, default=-1.0)
    w.add_argument("--b", type=float, default=1.0)
    w.add_argument("--bins", type=int, default=64)
    w.add_argument("--out", help="output prefix for csv/json files")
    w.set_defaults(func=cmd_walk)

    h = sub.add_parser("heat", help="heat kernel table or delta evolution")
    h.add_argument("--s", type=float, default=0.5)
    h.add_argument("--t", type=float, default=1.0)
    h.add_argument("--n", type=int, default=4096)
    h.add_argument("--period", type=float, default=256.0)
    h.add_argument("--table", action="store_true",
                   help="emit the unit-time kernel table instead")
    h.add_argument("--out")
    h.set_defaults(func=cmd_heat)

    c = sub.add_parser("caputo", help="Caputo derivative of a named function")
    c.add_argument("--fn", required=True, choices=list(_FN_TABLE))
    c.add_argument("--s", type=float, default=0.5)
    c.add_argument("--t", default="1.0", help="comma-separated times")
    c.add_argument("--out")
    c.set_defaults(func=cmd_caputo)

    r = sub.add_parser("report", help="quick run of every suite")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    # config file values sit between flags and defaults
    if "--config" in argv:
        try:
            cfg_path = argv[argv.index("--config") + 1]
            overrides = _read_config(cfg_path)
        except (IndexError, OSError, ValueError) as exc:
            sys.stderr.write(f"config error: {exc}\n")
            return 2
        def apply(target):
            typed = {}
            for act in target._actions:
                if act.dest in overrides:
                    raw = overrides[act.dest]
                    typed[act.dest] = act.type(raw) if act.type else raw
            target.set_defaults(**typed)

        for action in parser._actions:
            if isinstance(action, argparse._SubParsersAction):
                for sp in action.choices.values():
                    apply(sp)
        apply(parser)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except QuadratureBudgetError as exc:
        sys.stderr.write(f"tolerance not reached: {exc}\n")
        return 3
    except (ValueError, KeyError, TypeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
