"""Command-line experiment runner.

Every command writes its data file(s) plus ``<out>.manifest.json`` holding the
full effective configuration, a summary, and the wall-clock timestamps.  A
manifest can be replayed with ``zetalab --config run.manifest.json``; flags
given next to ``--config`` override the stored values.

Errors from the library exit with status 3 and print a JSON line
``{"error": <category>, "message": ...}`` to stderr; usage errors exit with 2.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import math
import os
import sys
import time
import warnings

import numpy as np

from . import __version__
from .errors import ZetaLabError

STOCHASTIC = {"zeta-sample", "mc-sample", "discrepancy", "charfn-compare", "moment-check"}


# --- argument helpers ----------------------------------------------------------------------


def _complex(text):
    try:
        return complex(str(text).replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def _floats(n=None):
    def parse(text):
        if isinstance(text, (list, tuple)):
            vals = [float(x) for x in text]
        else:
            vals = [float(x) for x in str(text).split(",") if x.strip()]
        if n is not None and len(vals) != n:
            raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {text!r}")
        return vals

    return parse


def _box(text):
    vals = []
    for x in (text if isinstance(text, (list, tuple)) else str(text).split(",")):
        x = str(x).strip().lower()
        vals.append(math.inf if x in ("inf", "+inf") else -math.inf if x == "-inf" else float(x))
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("a box is x0,x1,y0,y1")
    return vals


def _out(sub, default):
    sub.add_argument("--out", default=default, help=f"output data file (default {default})")


def _seed(sub):
    sub.add_argument("--seed", type=int, default=None, help="base seed (required)")


def build_parser():
    p = argparse.ArgumentParser(prog="zetalab", description="Value-distribution experiments for zeta(s).", allow_abbrev=False)
    p.add_argument("--version", action="version", version=f"zetalab {__version__}")
    p.add_argument("--config", help="replay a manifest (or any JSON with 'command' and 'config')")
    p.add_argument("--workers", type=int, default=1, help="worker threads for compiled kernels")
    sp = p.add_subparsers(dest="command")

    s = sp.add_parser("primes", help="prime table and prime sums")
    s.add_argument("--limit", type=int, default=10**6)
    s.add_argument("--sigma", type=float, default=None, help="also report psi(sigma)")
    _out(s, "primes.csv")

    s = sp.add_parser("zeta-sample", help="log zeta(sigma+it) on an offset grid in [T, 2T]")
    s.add_argument("--sigma", type=float, required=True)
    s.add_argument("--T", type=float, required=True)
    s.add_argument("--n", type=int, default=1000)
    s.add_argument("--precision", type=float, default=1e-8)
    _seed(s)
    _out(s, "zeta_samples.csv")

    s = sp.add_parser("mc-sample", help="random-model realizations")
    s.add_argument("--sigma", type=float, required=True)
    s.add_argument("--cutoff", type=float, default=2000)
    s.add_argument("--n", type=int, default=10000)
    s.add_argument("--kind", choices=["log_zeta", "R_Y"], default="log_zeta")
    s.add_argument("--no-gaussian-tail", action="store_true")
    _seed(s)
    _out(s, "mc_samples.csv")

    s = sp.add_parser("charfn-table", help="coefficients a_kl, b_kl at w, or Phi_rand on a grid")
    s.add_argument("--w", type=float, default=None)
    s.add_argument("--K", type=int, default=8)
    s.add_argument("--sigma", type=float, default=None)
    s.add_argument("--u-max", type=float, default=1.0)
    s.add_argument("--n-grid", type=int, default=21)
    _out(s, "charfn.csv")

    s = sp.add_parser("density", help="density of the random model by Fourier inversion")
    s.add_argument("--sigma", type=float, required=True)
    s.add_argument("--n-x", type=int, default=201)
    s.add_argument("--x-max", type=float, default=None)
    s.add_argument("--gnuplot", default=None, help="also write a gnuplot nonuniform matrix")
    _out(s, "density.csv")

    s = sp.add_parser("expansion", help="coefficients of the near-critical expansion")
    s.add_argument("--sigma", type=float, required=True)
    s.add_argument("--order", type=int, default=5)
    _out(s, "expansion.json")

    s = sp.add_parser("count", help="count and list solutions of zeta(s) = a in a rectangle")
    s.add_argument("--a", type=_complex, required=True)
    s.add_argument("--rect", type=_floats(4), required=True, help="sigma_min,sigma_max,t_min,t_max")
    s.add_argument("--no-refine", action="store_true")
    s.add_argument("--theta", type=float, default=None)
    s.add_argument("--T", type=float, default=None, help="height for the attached prediction")
    _out(s, "avalues.csv")

    s = sp.add_parser("littlewood", help="int log|zeta - a| on a vertical segment, or the full balance")
    s.add_argument("--a", type=_complex, required=True)
    s.add_argument("--sigma", type=float, required=True)
    s.add_argument("--T1", type=float, required=True)
    s.add_argument("--T2", type=float, required=True)
    s.add_argument("--sigma2", type=float, default=None, help="right edge: run the balance check")
    _out(s, "littlewood.csv")

    s = sp.add_parser("discrepancy", help="rectangle discrepancy of log zeta against the model density")
    s.add_argument("--sigma", type=float, required=True)
    s.add_argument("--T", type=float, required=True)
    s.add_argument("--n", type=int, default=10000)
    s.add_argument("--cells", type=int, default=256)
    _seed(s)
    _out(s, "discrepancy.csv")

    s = sp.add_parser("charfn-compare", help="empirical vs model characteristic function")
    s.add_argument("--sigma", type=float, required=True)
    s.add_argument("--T", type=float, required=True)
    s.add_argument("--n", type=int, default=10000)
    s.add_argument("--u", type=_floats(), default=[0.0, 0.1, 0.2, 0.3])
    s.add_argument("--v", type=_floats(), default=[0.0, 0.1, 0.2, 0.3])
    s.add_argument("--theta-L", type=float, default=0.2)
    _seed(s)
    _out(s, "charfn_compare.csv")

    s = sp.add_parser("clt-box", help="box probabilities of the normalized model from the expansion")
    s.add_argument("--theta", type=float, required=True)
    s.add_argument("--T", type=float, required=True)
    s.add_argument("--box", type=_box, action="append", required=True, help="x0,x1,y0,y1 (inf allowed); repeatable")
    s.add_argument("--order", type=int, default=5)
    _out(s, "clt_box.csv")

    s = sp.add_parser("moment-check", help="2k-th moments and tails of R_Y in the random model")
    s.add_argument("--sigma", type=float, required=True)
    s.add_argument("--Y", type=float, required=True)
    s.add_argument("--k-max", type=int, default=4)
    s.add_argument("--n", type=int, default=100000)
    _seed(s)
    _out(s, "moments.csv")
    return p


# --- commands --------------------------------------------------------------------------------


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for r in rows:
            wr.writerow([repr(x) if isinstance(x, float) else x for x in r])


def _cmd_primes(a):
    from .primes import build_prime_table, psi

    tab = build_prime_table(a.limit)
    ps = tab.primes_upto(a.limit)
    with open(a.out, "w") as fh:
        fh.write("p\n")
        fh.write("\n".join(str(int(x)) for x in ps))
        fh.write("\n")
    summary = {"n_primes": int(len(ps)), "largest": int(ps[-1]) if len(ps) else None}
    if a.sigma is not None:
        pv = psi(a.sigma, table=tab)
        summary["psi"] = pv.value
        summary["psi_error"] = pv.tail_error
    return summary


def _cmd_zeta_sample(a):
    from .discrepancy import empirical_log_zeta

    emp = empirical_log_zeta(a.sigma, a.T, a.n, a.seed, a.precision)
    emp.to_csv(a.out)
    return {"n_total": emp.n_total, "n_excluded": emp.n_excluded, "window": list(emp.window)}


def _cmd_mc_sample(a):
    from .random_model import sample_set

    ss = sample_set(a.sigma, a.cutoff, a.n, a.seed, a.kind, not a.no_gaussian_tail)
    ss.to_csv(a.out)
    return ss.manifest()


def _cmd_charfn_table(a):
    from .charfn import coeff_a, coeff_b, phi_hat_grid, write_coefficient_csv, write_phi_csv

    if (a.w is None) == (a.sigma is None):
        raise argparse.ArgumentTypeError("give exactly one of --w or --sigma")
    if a.w is not None:
        tab = coeff_b(coeff_a(a.w, a.K))
        write_coefficient_csv(a.out, tab)
        return {"w": a.w, "K": a.K, "a_tail_bound": tab.a_tail_bound}
    us = np.linspace(-a.u_max, a.u_max, a.n_grid)
    grid = phi_hat_grid(us, us, a.sigma)
    write_phi_csv(a.out, grid)
    return {"sigma": a.sigma, "p_cut": grid.p_cut, "tail_error": grid.tail_error}


def _cmd_density(a):
    from .density import GridSpec, invert_density

    g = invert_density(a.sigma, GridSpec(x_max=a.x_max, n_x=a.n_x))
    g.to_csv(a.out)
    if a.gnuplot:
        g.to_gnuplot_matrix(a.gnuplot)
    return g.metadata()


def _cmd_expansion(a):
    from .density import build_expansion

    poly = build_expansion(a.sigma, a.order)
    poly.to_json(a.out)
    return {"sigma": a.sigma, "order": a.order, "psi": poly.psi}


def _cmd_count(a):
    from .avalues import ComplexRect, count_avalues

    rect = ComplexRect(*a.rect)
    rep = count_avalues(a.a, rect, refine=not a.no_refine, theta=a.theta, T=a.T)
    rep.to_csv(a.out)
    s = rep.summary()
    print(f"{'a':>12} {'rect':>34} {'count':>6} {'predicted':>12} {'gap':>10}")
    r = rep.rect
    pred = f"{rep.prediction_main:12.4g}" if math.isfinite(rep.prediction_main) else f"{'-':>12}"
    gap = f"{s['gap']:10.4g}" if s["gap"] is not None else f"{'-':>10}"
    print(f"{str(rep.a):>12} {f'[{r.sigma_min:g},{r.sigma_max:g}]x[{r.t_min:g},{r.t_max:g}]':>34} {rep.count:>6} {pred} {gap}")
    return s


def _cmd_littlewood(a):
    from .avalues import littlewood_balance, littlewood_integral

    if a.sigma2 is None:
        r = littlewood_integral(a.a, a.sigma, a.T1, a.T2)
        _write_rows(a.out, ["sigma", "T1", "T2", "integral", "mean", "error", "n_singular"],
                    [[r.sigma, r.T1, r.T2, r.integral, r.mean, r.error, len(r.singular_roots)]])
        return {"integral": r.integral, "mean": r.mean, "error": r.error}
    b = littlewood_balance(a.a, a.sigma, a.sigma2, a.T1, a.T2)
    cols = ["left_integral", "right_integral", "top_arg_integral", "bottom_arg_integral", "lhs", "rhs", "gap", "quadrature_error"]
    _write_rows(a.out, cols, [[float(getattr(b, c)) for c in cols]])
    return {c: float(getattr(b, c)) for c in cols} | {"n_roots": len(b.roots)}


def _cmd_discrepancy(a):
    from .density import invert_density
    from .discrepancy import empirical_log_zeta, estimate_discrepancy

    emp = empirical_log_zeta(a.sigma, a.T, a.n, a.seed)
    res = estimate_discrepancy(emp, invert_density(a.sigma), n_cells=a.cells)
    res.to_csv(a.out)
    return res.row()


def _cmd_charfn_compare(a):
    from .discrepancy import compare_char_functions

    c = compare_char_functions(a.sigma, a.T, a.n, a.u, a.v, a.seed, theta_L=a.theta_L)
    c.to_csv(a.out)
    return {"max_gap": float(c.gap.max()), "all_within": bool(c.within().all()), "n_used": c.n_used,
            "n_excluded": c.n_excluded, "range_limit": c.range_limit}


def _cmd_clt_box(a):
    from .density import build_expansion, clt_box_probability
    from .primes import sigma_T

    poly = build_expansion(sigma_T(a.theta, a.T), a.order)
    rows = []
    for box in a.box:
        r = clt_box_probability(a.theta, a.T, tuple(box), a.order, poly=poly)
        rows.append([*map(float, box), r.probability, *map(float, r.terms), r.error_scale])
    _write_rows(a.out, ["x0", "x1", "y0", "y1", "probability", *[f"term_{k}" for k in range(a.order + 1)], "error_scale"], rows)
    return {"sigma_T": sigma_T(a.theta, a.T), "psi_T": poly.psi, "n_boxes": len(rows)}


def _cmd_moment_check(a):
    from .random_model import check_moment_bound

    rows, ok = [], True
    for k in range(1, a.k_max + 1):
        r = check_moment_bound(a.sigma, a.Y, k, a.n, a.seed)
        ok &= bool(r.passed)
        rows.append([k, r.prime_moment, r.prime_moment_se, r.prime_moment_exact, r.factorial_bound, r.R_moment,
                     r.R_moment_se, r.implied_C1, int(r.passed)])
    _write_rows(a.out, ["k", "prime_moment", "prime_moment_se", "prime_moment_exact", "factorial_bound", "R_moment",
                        "R_moment_se", "implied_C1", "passed"], rows)
    return {"all_passed": ok}


COMMANDS = {
    "primes": _cmd_primes,
    "zeta-sample": _cmd_zeta_sample,
    "mc-sample": _cmd_mc_sample,
    "charfn-table": _cmd_charfn_table,
    "density": _cmd_density,
    "expansion": _cmd_expansion,
    "count": _cmd_count,
    "littlewood": _cmd_littlewood,
    "discrepancy": _cmd_discrepancy,
    "charfn-compare": _cmd_charfn_compare,
    "clt-box": _cmd_clt_box,
    "moment-check": _cmd_moment_check,
}


# --- driver ------------------------------------------------------------------------------------


def _jsonable(v):
    if isinstance(v, complex):
        return str(v).strip("()")
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


def _config_argv(path, argv):
    """Rebuild a command line from a stored config, then append the explicit flags."""
    with open(path) as fh:
        data = json.load(fh)
    command = data.get("command")
    cfg = data.get("config", {})
    if command not in COMMANDS:
        raise SystemExit(f"zetalab: config {path} names no known command")
    rest = list(argv)
    if rest and rest[0] == command:
        rest = rest[1:]
    out = [command]
    for key, val in cfg.items():
        if val is None or val is False:
            continue
        flag = "--" + key.replace("_", "-")
        if key in ("T", "T1", "T2", "K", "Y"):
            flag = "--" + key
        if key == "theta_L":
            flag = "--theta-L"
        if val is True:
            out.append(flag)
        elif key == "box":
            out += [f"{flag}={','.join(str(x) for x in b)}" for b in val]
        elif isinstance(val, list):
            out.append(f"{flag}={','.join(str(x) for x in val)}")
        else:
            out.append(f"{flag}={val}")
    return out + rest


def run_command(argv):
    """Parse ``argv``, run one command, and return the process exit status."""
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument("--config")
    pre.add_argument("--workers", type=int)
    known, rest = pre.parse_known_args(argv)
    if known.config:
        head = ["--workers", str(known.workers)] if known.workers else []
        argv = head + _config_argv(known.config, rest)
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    if args.command in STOCHASTIC and args.seed is None:
        parser.error(f"{args.command} needs --seed")
    if args.workers < 1:
        parser.error("--workers must be positive")
    if args.workers > 1:
        import numba

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            numba.set_num_threads(min(args.workers, numba.config.NUMBA_NUM_THREADS))
    config = {k: v for k, v in vars(args).items() if k not in ("command", "config", "workers")}
    started = _dt.datetime.now(_dt.timezone.utc)
    t0 = time.perf_counter()
    try:
        summary = COMMANDS[args.command](args)
    except ZetaLabError as exc:
        print(json.dumps({"error": exc.category, "message": str(exc), "command": args.command}), file=sys.stderr)
        return 3
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))
    manifest = {
        "command": args.command,
        "config": _jsonable(config),
        "summary": _jsonable(summary),
        "version": __version__,
        "workers": args.workers,
        "started": started.isoformat(),
        "elapsed_seconds": time.perf_counter() - t0,
    }
    mpath = os.path.splitext(args.out)[0] + ".manifest.json"
    with open(mpath, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return 0


def main(argv=None):
    sys.exit(run_command(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
