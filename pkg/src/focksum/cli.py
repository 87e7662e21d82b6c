"""Batch command-line interface.

Subcommands parse the weight/measure mini-languages, run one analysis or a
verification suite, and print a human-readable report; classification
commands can also append a machine-readable CSV row.  Exit codes: 0 for a
certified verdict or a passing suite, 2 for an inconclusive verdict, 1 for
errors (including failing suites).

CSV schema (UTF-8, LF line endings, 12 significant digits)::

    case_id,p,r,alpha,regime,s,lattice_norm,integral_norm,pi_low,pi_high,classification

Sweep config grammar: one ``key: value value ...`` assignment per line
(tokens whitespace-separated, so weight/measure specs must not contain
spaces), ``#`` starts a comment, later assignments override earlier ones.
Keys: p, r, alpha, weight, measure, window, step, radius, seed.  The sweep
runs the cartesian product in that key order; rows are sorted by case_id.
"""

from __future__ import annotations

import argparse
import itertools
import math
import sys

from .classifiers import (classify_composition, classify_volterra,
                          reduce_differentiation)
from .errors import DivergentConstant, FocksumError, ZeroInfimum
from .lattice import GridSpec, Window
from .measures import AffineSymbol, PolynomialSymbol, parse_measure
from .oracles import SUITE_NAMES, run_suite
from .summing import Classification, SummingVerdict, classify_embedding
from .weights import apr_constant, parse_weight
from .fock import kernel_norm

CSV_COLUMNS = ("case_id", "p", "r", "alpha", "regime", "s", "lattice_norm",
               "integral_norm", "pi_low", "pi_high", "classification")


def _fmt(x) -> str:
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return f"{x:.12g}"
    return str(x)


def _grid_from_args(args) -> GridSpec:
    return GridSpec(step=args.step, radius=args.radius,
                    window=Window(args.window))


def _parse_complex(text: str) -> complex:
    parts = text.split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise ValueError(f"bad complex literal {text!r}; use 're' or 're,im'")


def _add_grid_args(sp) -> None:
    sp.add_argument("--window", type=int, default=12,
                    help="window n_max (cells with max(|j|,|k|) <= n_max)")
    sp.add_argument("--step", type=float, default=0.05,
                    help="quadrature node spacing")
    sp.add_argument("--radius", type=float, default=16.0,
                    help="plane truncation radius")
    sp.add_argument("--seed", type=int, default=0, help="random seed")


def _verdict_row(case_id: str, p: float, r: float, alpha: float,
                 v: SummingVerdict) -> list[str]:
    return [case_id, _fmt(p), _fmt(r), _fmt(alpha), v.regime.value,
            _fmt(v.s), _fmt(v.lattice_norm), _fmt(v.integral_norm),
            _fmt(v.pi_r_low), _fmt(v.pi_r_high), v.classification.value]


def _write_csv(path: str, rows: list[list[str]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in sorted(rows, key=lambda r: r[0]):
            fh.write(",".join(row) + "\n")


def _print_verdict(v: SummingVerdict) -> None:
    print(f"regime          {v.regime.value}")
    print(f"s               {_fmt(v.s)}")
    print(f"lattice_norm    {_fmt(v.lattice_norm)}")
    print(f"integral_norm   {_fmt(v.integral_norm)}")
    print(f"pi_r bracket    [{_fmt(v.pi_r_low)}, {_fmt(v.pi_r_high)}]")
    tail = ("none" if v.tail_certificate is None
            else f"{v.tail_certificate.kind} (bound {_fmt(v.tail_certificate.bound)})")
    print(f"tail            {tail}")
    print(f"classification  {v.classification.value}")


def _exit_for(cls: Classification) -> int:
    return 2 if cls is Classification.INCONCLUSIVE else 0


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_classify_embedding(args) -> int:
    grid = _grid_from_args(args)
    w = parse_weight(args.weight)
    mu = parse_measure(args.measure, p=args.p, alpha=args.alpha)
    v = classify_embedding(args.p, args.r, args.alpha, w, mu, grid)
    _print_verdict(v)
    if args.csv:
        _write_csv(args.csv, [_verdict_row("single", args.p, args.r,
                                           args.alpha, v)])
    return _exit_for(v.classification)


def _cmd_apr_constant(args) -> int:
    grid = _grid_from_args(args)
    w = parse_weight(args.weight)
    try:
        res = apr_constant(w, args.p, args.t, grid)
    except (DivergentConstant, ZeroInfimum) as exc:
        print(f"verdict: divergent ({exc})")
        return 0
    print(f"constant  {_fmt(res.constant)}")
    print(f"center    {res.center}")
    for n, v in res.trace:
        print(f"trace     n_max={n}: {_fmt(v)}")
    print("verdict: stable" if res.trace[-1][1] <= 1.05 * res.trace[0][1] * 10
          else "verdict: inconclusive")
    return 0


def _cmd_kernel_norm(args) -> int:
    grid = _grid_from_args(args)
    w = parse_weight(args.weight)
    u = _parse_complex(args.u)
    kn = kernel_norm(u, args.p, args.alpha, w, grid)
    print(f"log_direct  {_fmt(kn.log_direct)}")
    print(f"log_proxy   {_fmt(kn.log_proxy)}")
    print(f"ratio       {_fmt(kn.ratio)}")
    return 0


def _cmd_classify_composition(args) -> int:
    grid = _grid_from_args(args)
    phi = AffineSymbol(_parse_complex(args.a), _parse_complex(args.b))
    res = classify_composition(phi, args.p, args.r, args.alpha, grid)
    print(f"verdict      {'SUMMING' if res.summing else 'NOT_SUMMING'}")
    print(f"reason       {res.reason}")
    if res.cross_check is not None:
        print(f"cross-check  {res.cross_check.classification.value} "
              f"(agrees: {res.agrees})")
    return 0


def _cmd_classify_volterra(args) -> int:
    grid = _grid_from_args(args)
    g = PolynomialSymbol([_parse_complex(c) for c in args.g.split(",")])
    res = classify_volterra(g, args.p, args.r, args.alpha, grid)
    print(f"verdict      {'SUMMING' if res.summing else 'NOT_SUMMING'}")
    print(f"reason       {res.reason}")
    if res.cross_check is not None:
        print(f"cross-check  {res.cross_check.classification.value} "
              f"(agrees: {res.agrees})")
    return 0


def _cmd_classify_differentiation(args) -> int:
    grid = _grid_from_args(args)
    w = parse_weight(args.weight)
    mu = parse_measure(args.measure, p=args.p, alpha=args.alpha)
    res = reduce_differentiation(args.k, args.p, args.r, args.alpha, w, mu, grid)
    if res.verdict is None:
        print(f"classification  inconclusive ({res.inconclusive_reason})")
        return 2
    _print_verdict(res.verdict)
    return _exit_for(res.classification)


def _cmd_verify(args) -> int:
    grid = _grid_from_args(args)
    report = run_suite(args.suite, seed=args.seed, grid=grid)
    print(report)
    return 0 if report.passed else 1


def _cmd_sweep(args) -> int:
    grids = _parse_sweep_config(args.config)
    keys = ("p", "r", "alpha", "weight", "measure", "window", "step",
            "radius", "seed")
    values = [grids[k] for k in keys]
    rows = []
    for idx, combo in enumerate(itertools.product(*values)):
        c = dict(zip(keys, combo))
        grid = GridSpec(step=float(c["step"]), radius=float(c["radius"]),
                        window=Window(int(c["window"])))
        w = parse_weight(c["weight"])
        mu = parse_measure(c["measure"], p=float(c["p"]), alpha=float(c["alpha"]))
        v = classify_embedding(float(c["p"]), float(c["r"]), float(c["alpha"]),
                               w, mu, grid)
        rows.append(_verdict_row(f"{idx:04d}", float(c["p"]), float(c["r"]),
                                 float(c["alpha"]), v))
    _write_csv(args.csv, rows)
    print(f"wrote {len(rows)} rows to {args.csv}")
    return 0


_SWEEP_DEFAULTS = {"p": ["2"], "r": ["2"], "alpha": ["1"],
                   "weight": ["const:1"], "measure": ["lebesgue"],
                   "window": ["12"], "step": ["0.05"], "radius": ["16"],
                   "seed": ["0"]}


def _parse_sweep_config(path: str) -> dict:
    out = {k: list(v) for k, v in _SWEEP_DEFAULTS.items()}
    with open(path, encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if ":" not in line:
                raise ValueError(f"{path}:{ln}: expected 'key: values'")
            key, rest = line.split(":", 1)
            key = key.strip()
            if key not in out:
                raise ValueError(f"{path}:{ln}: unknown key {key!r}")
            tokens = rest.split()
            if not tokens:
                raise ValueError(f"{path}:{ln}: no values for {key!r}")
            out[key] = tokens
    return out


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="focksum",
        description="Summability analysis for Carleson embeddings on "
                    "weighted Fock spaces")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("classify-embedding", help="full embedding verdict")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--weight", required=True)
    sp.add_argument("--measure", required=True)
    sp.add_argument("--csv", default=None)
    _add_grid_args(sp)
    sp.set_defaults(func=_cmd_classify_embedding)

    sp = sub.add_parser("apr-constant", help="restricted A_p constant")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--weight", required=True)
    _add_grid_args(sp)
    sp.set_defaults(func=_cmd_apr_constant)

    sp = sub.add_parser("kernel-norm", help="kernel norm vs its proxy")
    sp.add_argument("--u", required=True, help="complex center 're' or 're,im'")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--weight", required=True)
    _add_grid_args(sp)
    sp.set_defaults(func=_cmd_kernel_norm)

    sp = sub.add_parser("classify-composition", help="composition operator")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--alpha", type=float, default=1.0)
    _add_grid_args(sp)
    sp.set_defaults(func=_cmd_classify_composition)

    sp = sub.add_parser("classify-volterra", help="Volterra-type operator")
    sp.add_argument("--g", required=True, help="coefficients c0,c1,...")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--alpha", type=float, default=1.0)
    _add_grid_args(sp)
    sp.set_defaults(func=_cmd_classify_volterra)

    sp = sub.add_parser("classify-differentiation",
                        help="differentiation/integration operator")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--weight", required=True)
    sp.add_argument("--measure", required=True)
    _add_grid_args(sp)
    sp.set_defaults(func=_cmd_classify_differentiation)

    sp = sub.add_parser("verify", help="run a verification suite")
    sp.add_argument("--suite", required=True, choices=SUITE_NAMES)
    _add_grid_args(sp)
    sp.set_defaults(func=_cmd_verify)

    sp = sub.add_parser("sweep", help="parameter sweep from a config file")
    sp.add_argument("config")
    sp.add_argument("--csv", required=True)
    sp.set_defaults(func=_cmd_sweep)

    return ap


def run(argv) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except FocksumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> int:
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
