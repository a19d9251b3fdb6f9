"""Command-line front end: single points, sweeps, figure datasets.

Every output file starts with the line ``# schema=oamlab.v1`` followed by
a comment echoing the resolved configuration, so downstream plotting
never has to guess provenance.  Identical invocations produce
byte-identical files; Monte Carlo commands take an explicit seed.

Exit codes: 0 success, 2 usage error, 3 numerical non-convergence (the
message names the failing grid point).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import map_asymptotic as asym
from . import montecarlo, universal
from .errors import ConvergenceError
from .map_numeric import AmplitudePair, QuadratureConfig, amplitudes_numeric
from .turbulence import ALPHA_KOLMOGOROV, TurbulenceParams, parse_alpha

SCHEMA = "oamlab.v1"
METHODS = ("quadrature", "asymptotic", "series", "exact_quadratic", "montecarlo")

USAGE_ERROR = 2
NUMERICAL_ERROR = 3


@dataclass(frozen=True)
class SweepSpec:
    alphas: tuple
    l0_list: tuple
    t_list: tuple
    methods: tuple
    output_path: str
    output_format: str = "csv"

    def __post_init__(self):
        if not (self.alphas and self.l0_list and self.t_list and self.methods):
            raise ValueError("sweep needs non-empty alpha, l0, t and method lists")
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}")
        for alpha in self.alphas:
            for m in self.methods:
                _check_method(m, alpha)
        if self.output_format not in ("csv", "json"):
            raise ValueError("format must be csv or json")


def _check_method(method: str, alpha: float) -> None:
    if method == "series" and alpha != ALPHA_KOLMOGOROV:
        raise ValueError("the series method applies to alpha = 5/3 only")
    if method == "exact_quadratic" and alpha != 2.0:
        raise ValueError("exact_quadratic applies to alpha = 2 only")


def _no_turbulence_pair(method: str) -> AmplitudePair:
    return AmplitudePair(a=1.0, b=0.0, b_tilde=0.0, method=method, err=0.0)


def evaluate_point(method, alpha, l0, t, w0=1.0, seed=0, samples=1000):
    """One (method, alpha, l0, t) evaluation; t = 0 is the exact identity map."""
    _check_method(method, alpha)
    if t == 0.0:
        return _no_turbulence_pair(method)
    params = TurbulenceParams(alpha=alpha, t=t, w0=w0)
    if method == "quadrature":
        return amplitudes_numeric(l0, params)
    if method == "asymptotic":
        return asym.amplitudes_asymptotic(l0, params)
    if method == "series":
        return asym.amplitudes_series(l0, params)
    if method == "exact_quadratic":
        return asym.exact_quadratic(l0, params)
    return montecarlo.estimate_amplitudes(l0, params, samples, seed)


def _pair_row(alpha, l0, t, pair: AmplitudePair):
    return {
        "alpha": alpha,
        "l0": l0,
        "t": t,
        "method": pair.method,
        "a": pair.a,
        "b": pair.b,
        "b_tilde": pair.b_tilde,
        "err": pair.err,
        "noise_floor": int(pair.noise_floor),
    }


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_table(path, config, columns, rows, output_format):
    """Atomically write a sweep table; partial files never survive errors."""
    tmp = str(path) + ".tmp"
    try:
        with open(tmp, "w", newline="\n") as fh:
            if output_format == "csv":
                fh.write(f"# schema={SCHEMA}\n")
                fh.write(f"# config={json.dumps(config, sort_keys=True)}\n")
                fh.write(",".join(columns) + "\n")
                for row in rows:
                    fh.write(",".join(_fmt(row[c]) for c in columns) + "\n")
            else:
                json.dump(
                    {"schema": SCHEMA, "config": config, "columns": list(columns), "rows": rows},
                    fh,
                    sort_keys=True,
                    indent=1,
                )
                fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _worker_count() -> int:
    raw = os.environ.get("OAMLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _sweep_point(job):
    method, alpha, l0, t, w0, seed, samples = job
    return _pair_row(alpha, l0, t, evaluate_point(method, alpha, l0, t, w0, seed, samples))


def run_sweep(spec: SweepSpec, config, w0=1.0, seed=0, samples=1000):
    """Evaluate the grid; outputs are ordered by grid index regardless of scheduling."""
    jobs = [
        (method, alpha, l0, t, w0, seed, samples)
        for alpha in spec.alphas
        for method in spec.methods
        for l0 in spec.l0_list
        for t in spec.t_list
    ]
    workers = _worker_count()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, jobs, chunksize=1))
    else:
        rows = [_sweep_point(j) for j in jobs]
    columns = ["alpha", "l0", "t", "method", "a", "b", "b_tilde", "err", "noise_floor"]
    _write_table(spec.output_path, config, columns, rows, spec.output_format)
    return rows


# ---------------------------------------------------------------------------
# Figure datasets
# ---------------------------------------------------------------------------

FIG1_T_VALUES = (0.1, 0.5, 1.0, 2.0, 5.0)
FIG1_L0_RANGE = (2, 300)
FIG1_ALPHAS = {"1a": 1.0, "1b": ALPHA_KOLMOGOROV, "1c": 2.0}


def _fig1_l0_grid(n_points=24):
    lo, hi = FIG1_L0_RANGE
    grid = np.unique(np.rint(np.logspace(math.log10(lo), math.log10(hi), n_points)).astype(int))
    return [int(v) for v in grid]


def _fig1_rows(alpha):
    exact_by_quadrature = alpha != 2.0
    rows = []
    for t in FIG1_T_VALUES:
        params = TurbulenceParams(alpha=alpha, t=t)
        for l0 in _fig1_l0_grid():
            if exact_by_quadrature:
                exact = amplitudes_numeric(l0, params)
            else:
                exact = asym.exact_quadratic(l0, params)
            row = {
                "l0": l0,
                "t": t,
                "btilde_exact": exact.b_tilde,
                "btilde_asym": asym.btilde_asym(l0, params),
                "noise_floor": int(exact.noise_floor),
            }
            if alpha == ALPHA_KOLMOGOROV:
                row["btilde_series3"] = asym.b_series(l0, params)
            rows.append(row)
    return rows


def _fig2_rows(n_points=61):
    xs = np.logspace(-2.0, 1.0, n_points)
    coeffs, powers = asym.series_coefficients(3, variable="xi_over_r0")
    rows = []
    for x in xs:
        rows.append(
            {
                "x": float(x),
                "btilde_alpha1": universal.btilde_universal(float(x), 1.0),
                "btilde_alpha53": universal.btilde_universal(float(x), ALPHA_KOLMOGOROV),
                "btilde_alpha53_series3": float(np.dot(coeffs, x**powers)),
                "btilde_alpha2": universal.btilde_universal(float(x), 2.0),
            }
        )
    return rows


def _fig3_rows(n_points=121):
    xs = np.linspace(0.0, 1.2, n_points)
    rows = []
    for x in xs:
        x = float(x)
        rows.append(
            {
                "x": x,
                "conc_alpha1": universal.concurrence(universal.btilde_universal(x, 1.0)),
                "conc_alpha53": universal.concurrence(
                    universal.btilde_universal(x, ALPHA_KOLMOGOROV)
                ),
                "conc_alpha2": universal.concurrence(universal.btilde_universal(x, 2.0)),
                "leonhard_fit": universal.leonhard_fit(x),
            }
        )
    return rows


def emit_figure_dataset(which: str, outdir, config=None) -> str:
    """Write one figure's CSV dataset and return its path."""
    os.makedirs(outdir, exist_ok=True)
    config = dict(config or {})
    config["figure"] = which
    path = os.path.join(outdir, f"fig{which}.csv")
    if which in FIG1_ALPHAS:
        alpha = FIG1_ALPHAS[which]
        config["alpha"] = alpha
        rows = _fig1_rows(alpha)
        columns = ["l0", "t", "btilde_exact", "btilde_asym", "noise_floor"]
        if alpha == ALPHA_KOLMOGOROV:
            columns.insert(4, "btilde_series3")
    elif which == "2":
        rows = _fig2_rows()
        columns = ["x", "btilde_alpha1", "btilde_alpha53", "btilde_alpha53_series3", "btilde_alpha2"]
    elif which == "3":
        rows = _fig3_rows()
        columns = ["x", "conc_alpha1", "conc_alpha53", "conc_alpha2", "leonhard_fit"]
    else:
        raise ValueError(f"unknown figure {which!r}; expected 1a, 1b, 1c, 2 or 3")
    _write_table(path, config, columns, rows, "csv")
    return path


# ---------------------------------------------------------------------------
# Argument handling
# ---------------------------------------------------------------------------

def _build_parser():
    parser = argparse.ArgumentParser(prog="oamlab", description=__doc__)
    parser.add_argument("--config", help="JSON file supplying defaults for any flag")
    sub = parser.add_subparsers(dest="command", required=True)

    amp = sub.add_parser("amplitudes", help="one (alpha, l0, t) point")
    amp.add_argument("--alpha")
    amp.add_argument("--l0", type=int)
    amp.add_argument("--t", type=float)
    amp.add_argument("--w0", type=float)
    amp.add_argument("--method", choices=METHODS)
    amp.add_argument("--seed", type=int)
    amp.add_argument("--samples", type=int)
    amp.add_argument("--out")

    swp = sub.add_parser("sweep", help="grid of (alpha, l0, t) points")
    swp.add_argument("--alpha", help="comma-separated exponents, fractions allowed")
    swp.add_argument("--l0", help="comma-separated azimuthal indices")
    swp.add_argument("--t", help="comma-separated strengths")
    swp.add_argument("--methods")
    swp.add_argument("--w0", type=float)
    swp.add_argument("--seed", type=int)
    swp.add_argument("--samples", type=int)
    swp.add_argument("--out")
    swp.add_argument("--format", choices=("csv", "json"))

    uni = sub.add_parser("universal", help="universal curves on an x grid")
    uni.add_argument("--alpha")
    uni.add_argument("--x", help="comma-separated rescaled strengths")
    uni.add_argument("--out")
    uni.add_argument("--format", choices=("csv", "json"))

    con = sub.add_parser("concurrence", help="concurrence from crosstalk or x")
    con.add_argument("--b-tilde", type=float, dest="b_tilde")
    con.add_argument("--x", type=float)
    con.add_argument("--alpha")

    mcp = sub.add_parser("montecarlo", help="phase-screen ensemble estimate")
    mcp.add_argument("--alpha")
    mcp.add_argument("--l0", type=int)
    mcp.add_argument("--t", type=float)
    mcp.add_argument("--w0", type=float)
    mcp.add_argument("--samples", type=int)
    mcp.add_argument("--seed", type=int)
    mcp.add_argument("--n", type=int, help="screen grid side (power of two)")
    mcp.add_argument("--dump-screen", dest="dump_screen", help="write the first screen here")
    mcp.add_argument("--out")

    fig = sub.add_parser("figures", help="emit figure datasets")
    fig.add_argument("--which", help="comma list from {1a,1b,1c,2,3} or 'all'")
    fig.add_argument("--outdir")
    return parser


_DEFAULTS = {
    "alpha": "5/3",
    "w0": 1.0,
    "method": "quadrature",
    "seed": 0,
    "samples": 1000,
    "format": "csv",
    "which": "all",
    "outdir": ".",
    "n": 512,
}


def _resolve(args, config_data, key):
    """Explicit flag beats config file beats built-in default."""
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config_data:
        return config_data[key]
    return _DEFAULTS.get(key)


def _resolved_config(args, config_data, keys):
    out = {"command": args.command}
    for key in keys:
        out[key] = _resolve(args, config_data, key)
    return out


def _emit(payload, out_path):
    text = json.dumps(payload, sort_keys=True, indent=1)
    if out_path:
        with open(out_path, "w", newline="\n") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _parse_list(text, conv):
    return tuple(conv(part) for part in str(text).split(",") if part != "")


def execute_command(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0,) else 0

    config_data = {}
    if args.config:
        try:
            with open(args.config) as fh:
                config_data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
            return USAGE_ERROR

    try:
        return _dispatch(args, config_data)
    except ConvergenceError as exc:
        print(f"error: numerical non-convergence: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


def _dispatch(args, config_data) -> int:
    if args.command == "amplitudes":
        keys = ("alpha", "l0", "t", "w0", "method", "seed", "samples", "out")
        cfg = _resolved_config(args, config_data, keys)
        if cfg["l0"] is None or cfg["t"] is None:
            raise ValueError("amplitudes needs --l0 and --t")
        alpha = parse_alpha(cfg["alpha"])
        pair = evaluate_point(
            cfg["method"], alpha, cfg["l0"], cfg["t"], cfg["w0"], cfg["seed"], cfg["samples"]
        )
        payload = {"schema": SCHEMA, "config": cfg, **_pair_row(alpha, cfg["l0"], cfg["t"], pair)}
        _emit(payload, cfg["out"])
        return 0

    if args.command == "sweep":
        keys = ("alpha", "l0", "t", "methods", "w0", "seed", "samples", "out", "format")
        cfg = _resolved_config(args, config_data, keys)
        if not (cfg["l0"] and cfg["t"] and cfg["methods"] and cfg["out"]):
            raise ValueError("sweep needs --l0, --t, --methods and --out")
        spec = SweepSpec(
            alphas=_parse_list(cfg["alpha"], parse_alpha),
            l0_list=_parse_list(cfg["l0"], int),
            t_list=_parse_list(cfg["t"], float),
            methods=_parse_list(cfg["methods"], str),
            output_path=cfg["out"],
            output_format=cfg["format"],
        )
        run_sweep(spec, cfg, w0=cfg["w0"], seed=cfg["seed"], samples=cfg["samples"])
        return 0

    if args.command == "universal":
        keys = ("alpha", "x", "out", "format")
        cfg = _resolved_config(args, config_data, keys)
        if not (cfg["x"] and cfg["out"]):
            raise ValueError("universal needs --x and --out")
        alphas = _parse_list(cfg["alpha"], parse_alpha)
        xs = _parse_list(cfg["x"], float)
        rows = []
        for alpha in alphas:
            for x in xs:
                point = universal.universal_point(x, alpha)
                rows.append(
                    {"alpha": alpha, "x": x, "b_tilde": point.b_tilde, "concurrence": point.concurrence}
                )
        _write_table(cfg["out"], cfg, ["alpha", "x", "b_tilde", "concurrence"], rows, cfg["format"])
        return 0

    if args.command == "concurrence":
        keys = ("b_tilde", "x", "alpha")
        cfg = _resolved_config(args, config_data, keys)
        if cfg["b_tilde"] is None and cfg["x"] is None:
            raise ValueError("concurrence needs --b-tilde or --x with --alpha")
        if cfg["b_tilde"] is not None:
            bt = cfg["b_tilde"]
        else:
            bt = universal.btilde_universal(cfg["x"], parse_alpha(cfg["alpha"]))
        payload = {
            "schema": SCHEMA,
            "config": cfg,
            "b_tilde": bt,
            "concurrence": universal.concurrence(bt),
        }
        _emit(payload, None)
        return 0

    if args.command == "montecarlo":
        keys = ("alpha", "l0", "t", "w0", "samples", "seed", "n", "dump_screen", "out")
        cfg = _resolved_config(args, config_data, keys)
        if cfg["l0"] is None or cfg["t"] is None:
            raise ValueError("montecarlo needs --l0 and --t")
        alpha = parse_alpha(cfg["alpha"])
        params = TurbulenceParams(alpha=alpha, t=cfg["t"], w0=cfg["w0"])
        geometry = montecarlo.default_geometry(params, cfg["l0"], n=cfg["n"])
        if cfg["dump_screen"]:
            screen = montecarlo.generate_screen(params, geometry, cfg["seed"])
            montecarlo.dump_screen(screen, cfg["dump_screen"])
        pair, a_err, b_err, bt_err = montecarlo.estimate_with_errors(
            cfg["l0"], params, cfg["samples"], cfg["seed"], geometry=geometry
        )
        payload = {
            "schema": SCHEMA,
            "config": cfg,
            **_pair_row(alpha, cfg["l0"], cfg["t"], pair),
            "a_err": a_err,
            "b_err": b_err,
            "b_tilde_err": bt_err,
        }
        _emit(payload, cfg["out"])
        return 0

    if args.command == "figures":
        keys = ("which", "outdir")
        cfg = _resolved_config(args, config_data, keys)
        which = cfg["which"]
        names = ("1a", "1b", "1c", "2", "3") if which == "all" else tuple(str(which).split(","))
        for name in names:
            path = emit_figure_dataset(name, cfg["outdir"], config=cfg)
            print(path)
        return 0

    raise ValueError(f"unknown command {args.command!r}")


def main() -> None:
    sys.exit(execute_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
