"""Command line front end.

Data (CSV or JSON) goes to standard output or ``--out``; solve reports go to
standard error. Exit status is 0 on success, 1 when a solve does not
converge and 2 for bad arguments.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .errors import SpectralPopError
from .oracle import rk_integrate, trajectory_peak
from .volterra import (
    DEFAULT_K,
    DEFAULT_L,
    DEFAULT_SCALE_L,
    ModelParams,
    exact_umax,
    solve_hfc,
    solve_rcc,
)

# (kappa, N for HFC, N for RCC, SDMM literal, CSF literal) for the reference comparison
TABLE_ROWS = (
    (0.02, 20, 14, "0.92342714", "0.9234262"),
    (0.04, 25, 14, "0.87381998", "0.8737192"),
    (0.1, 20, 14, "0.76974140", "0.7697409"),
    (0.2, 25, 11, "0.65905037", "0.6590497"),
    (0.5, 30, 13, "0.48519029", "0.4851898"),
)
TABLE_COLUMNS = (
    "kappa", "exact", "N_hfc", "hfc", "N_rcc", "rcc",
    "err_hfc", "err_rcc", "sdmm", "csf", "status",
)

EXIT_OK, EXIT_NONCONVERGED, EXIT_USAGE = 0, 1, 2


def fmt(x: float) -> str:
    """Fixed nine-significant-digit scientific notation."""
    return f"{x:.8e}"


def _num(x: float) -> float:
    # JSON numbers carry exactly the printed digits
    return float(fmt(x))


def default_n(method: str, kappa: float) -> int:
    for k, n_hfc, n_rcc, _, _ in TABLE_ROWS:
        if abs(k - kappa) < 1e-12:
            return n_hfc if method == "hfc" else n_rcc
    return 20 if method == "hfc" else 14


# -- argument parsing ------------------------------------------------------------


def _positive(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _count(minimum):
    def parse(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if v < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}: {text!r}")
        return v

    return parse


def _add_basis_args(p):
    p.add_argument("--L", "--map-length", dest="L", type=_positive, default=DEFAULT_L,
                   help=f"rational Chebyshev map length (default {DEFAULT_L:g})")
    p.add_argument("--k", "--steepness", dest="k", type=_positive, default=DEFAULT_K,
                   help=f"log-sinh map steepness (default {DEFAULT_K:g})")
    p.add_argument("--l", "--domain-scale", dest="l", type=_positive, default=DEFAULT_SCALE_L,
                   help=f"Hermite domain scaling (default {DEFAULT_SCALE_L:g})")


def _add_output_args(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default="-", help="output path, '-' for standard output")


def _add_model_args(p, methods):
    p.add_argument("--method", choices=methods, required=True)
    p.add_argument("--kappa", type=_positive, required=True, help="nondimensional toxicity")
    p.add_argument("--u0", type=_positive, default=0.1, help="initial population (default 0.1)")
    p.add_argument("--n", "--N", dest="n", type=_count(2), default=None,
                   help="truncation degree (default: the reference N for this kappa)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectralpop",
        description="Spectral collocation solvers for Volterra's population model.",
        allow_abbrev=False,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve once and emit the t,u,y series", allow_abbrev=False)
    _add_model_args(p, ("rcc", "hfc", "oracle"))
    _add_basis_args(p)
    p.add_argument("--t-end", type=_positive, default=10.0, help="end of the output grid")
    p.add_argument("--samples", type=_count(2), default=201, help="output grid size (>= 2)")
    p.add_argument("--tol", type=_positive, default=1e-10, help="oracle error tolerance")
    _add_output_args(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("table", help="reproduce the u_max comparison table", allow_abbrev=False)
    _add_basis_args(p)
    p.add_argument("--jobs", type=_count(1), default=1, help="parallel worker processes")
    _add_output_args(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("coeffs", help="dump |a_i| of a converged solve", allow_abbrev=False)
    _add_model_args(p, ("rcc", "hfc"))
    _add_basis_args(p)
    _add_output_args(p)
    p.set_defaults(func=cmd_coeffs)
    return parser


# -- helpers ----------------------------------------------------------------------


def _spectral(args, params, n):
    if args.method == "rcc":
        return solve_rcc(params, n, args.L)
    return solve_hfc(params, n, args.k, args.l)


def _report_dict(rep):
    d = {
        "method": rep.method,
        "kappa": rep.kappa,
        "u0": rep.u0,
        "N": rep.N,
        **{k: v for k, v in rep.basis_params.items()},
        "converged": rep.converged,
        "iterations": rep.newton.iterations,
        "residual_norm": _num(rep.newton.residual_norm),
        "node_residual": _num(rep.node_residual),
        "t_max": _num(rep.t_max),
        "u_max": _num(rep.u_max),
        "exact": _num(rep.exact),
        "abs_error": _num(rep.abs_error),
        "continuation_used": rep.continuation_used,
        "at_scan_boundary": rep.at_scan_boundary,
    }
    return d


def _write(args, text):
    if args.out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj):
    return json.dumps(obj, indent=2) + "\n"


def _config(args, **extra):
    d = {k: v for k, v in vars(args).items() if k not in ("func", "out", "format")}
    d.update(extra)
    return d


# -- subcommands ------------------------------------------------------------------


def cmd_solve(args) -> int:
    params = ModelParams(args.kappa, args.u0)
    t = np.linspace(0.0, args.t_end, args.samples)
    if args.method == "oracle":
        traj = rk_integrate(params, max(args.t_end, 10.0), args.tol)
        t_max, u_max = trajectory_peak(traj)
        y, u = traj.interpolate(t)
        exact = exact_umax(params)
        report = {
            "method": "oracle", "kappa": params.kappa, "u0": params.u0, "tol": args.tol,
            "steps": len(traj) - 1, "converged": True, "t_max": _num(t_max),
            "u_max": _num(u_max), "exact": _num(exact), "abs_error": _num(abs(u_max - exact)),
        }
        summary = (
            f"method=oracle kappa={params.kappa:g} u0={params.u0:g} tol={args.tol:g} "
            f"steps={len(traj) - 1} t_max={t_max:.9g} u_max={u_max:.9g} "
            f"exact={exact:.9g} abs_err={abs(u_max - exact):.3e}"
        )
        converged = True
        n = None
    else:
        n = args.n or default_n(args.method, args.kappa)
        sol, rep = _spectral(args, params, n)
        y, u = sol.evaluate(t)
        report = _report_dict(rep)
        summary = rep.summary()
        converged = rep.converged
    print(summary, file=sys.stderr)

    rows = [(fmt(ti), fmt(ui), fmt(yi)) for ti, ui, yi in zip(t, u, y)]
    if args.format == "csv":
        _write(args, _csv(("t", "u", "y"), rows))
    else:
        series = [{"t": float(a), "u": float(b), "y": float(c)} for a, b, c in rows]
        _write(args, _json({"config": _config(args, n=n), "report": report, "series": series}))
    return EXIT_OK if converged else EXIT_NONCONVERGED


def _table_row(job):
    (kappa, n_hfc, n_rcc, sdmm, csf), L, k, l = job
    params = ModelParams(kappa, 0.1)
    _, rh = solve_hfc(params, n_hfc, k, l)
    _, rr = solve_rcc(params, n_rcc, L)
    return rh, rr, sdmm, csf


def cmd_table(args) -> int:
    jobs = [(row, args.L, args.k, args.l) for row in TABLE_ROWS]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_table_row, jobs))
    else:
        results = [_table_row(j) for j in jobs]

    rows, failed = [], False
    for rh, rr, sdmm, csf in results:
        bad = [name for name, r in (("hfc", rh), ("rcc", rr)) if not r.converged]
        failed = failed or bool(bad)
        status = "ok" if not bad else "FAILED:" + "+".join(bad)
        rows.append({
            "kappa": f"{rh.kappa:g}", "exact": fmt(rh.exact),
            "N_hfc": str(rh.N), "hfc": fmt(rh.u_max),
            "N_rcc": str(rr.N), "rcc": fmt(rr.u_max),
            "err_hfc": fmt(rh.abs_error), "err_rcc": fmt(rr.abs_error),
            "sdmm": sdmm, "csf": csf, "status": status,
        })
        print(rh.summary(), file=sys.stderr)
        print(rr.summary(), file=sys.stderr)

    if args.format == "csv":
        _write(args, _csv(TABLE_COLUMNS, [[r[c] for c in TABLE_COLUMNS] for r in rows]))
    else:
        numeric = ("exact", "hfc", "rcc", "err_hfc", "err_rcc")
        out = []
        for r in rows:
            d = dict(r)
            d["kappa"] = float(r["kappa"])
            d["N_hfc"], d["N_rcc"] = int(r["N_hfc"]), int(r["N_rcc"])
            for c in numeric:
                d[c] = float(r[c])
            out.append(d)
        _write(args, _json({"config": _config(args), "rows": out}))
    return EXIT_NONCONVERGED if failed else EXIT_OK


def cmd_coeffs(args) -> int:
    params = ModelParams(args.kappa, args.u0)
    n = args.n or default_n(args.method, args.kappa)
    sol, rep = _spectral(args, params, n)
    print(rep.summary(), file=sys.stderr)
    rows = [(str(i), fmt(abs(a))) for i, a in enumerate(sol.coeffs)]
    if sol.lam is not None:
        rows.append(("lambda", fmt(abs(sol.lam))))
    if args.format == "csv":
        _write(args, _csv(("i", "abs_coeff"), rows))
    else:
        coeffs = [{"i": int(i), "abs_coeff": float(v)} for i, v in rows if i != "lambda"]
        obj = {"config": _config(args, n=n), "report": _report_dict(rep), "coeffs": coeffs}
        if sol.lam is not None:
            obj["abs_lambda"] = _num(abs(sol.lam))
        _write(args, _json(obj))
    return EXIT_OK if rep.converged else EXIT_NONCONVERGED


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpectralPopError as exc:
        print(f"spectralpop: error: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc, ValueError) else EXIT_NONCONVERGED


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
