"""Command-line surface: theory curves, optimizers, bounds, simulation, figures data.

Every number written here is the corresponding library value; the CLI
adds no arithmetic of its own.  Floats are printed with six significant
digits and rows are emitted in ascending prevalence order.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from . import simulate as sim_mod
from . import theory
from .designs import (
    Bernoulli,
    ConstantTestsPerItem,
    Dorfman,
    DoublyConstant,
    Hypercube,
    Individual,
    SchemeConfig,
)

DEFAULT_P_MIN = 1e-3
DEFAULT_P_MAX = 0.5
DEFAULT_STEPS = 200
ZOOM_P_MIN = 5e-3
ZOOM_P_MAX = 0.25

_THEORY_SCHEMES = ("individual", "dorfman", "bernoulli", "ctpi", "dc", "mutesa")
_OPT_FAMILIES = {"dorfman": "dorfman", "bernoulli": "bernoulli", "ctpi": "ctpi", "dc": "doubly_constant"}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.6g}"


def _row(*values) -> str:
    return ",".join(_fmt(v) if not isinstance(v, str) else v for v in values) + "\n"


def p_grid(args) -> list[float]:
    if args.p is not None:
        return [args.p]
    p_min = args.p_min if args.p_min is not None else DEFAULT_P_MIN
    p_max = args.p_max if args.p_max is not None else DEFAULT_P_MAX
    steps = args.steps if args.steps is not None else DEFAULT_STEPS
    if not 0.0 < p_min <= p_max < 1.0:
        raise ValueError(f"need 0 < p_min <= p_max < 1, got [{p_min}, {p_max}]")
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if args.log:
        grid = np.logspace(np.log10(p_min), np.log10(p_max), steps)
    else:
        grid = np.linspace(p_min, p_max, steps)
    return [float(p) for p in grid]


def _add_grid_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p", type=float, help="single prevalence")
    parser.add_argument("--p-min", type=float, help="sweep start")
    parser.add_argument("--p-max", type=float, help="sweep end")
    parser.add_argument("--steps", type=int, help="sweep length")
    parser.add_argument("--log", action="store_true", help="log-spaced sweep")


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


# --- theory ------------------------------------------------------------------


def _theory_point(args, p: float) -> theory.TheoryPoint:
    if args.scheme == "individual":
        return theory.theory_point(p, "individual", {}, 1.0)
    if args.scheme == "dorfman":
        if args.s is None:
            raise ValueError("dorfman theory needs --s")
        return theory.theory_point(
            p, "dorfman", {"s": args.s}, float(theory.dorfman_et(args.s, p))
        )
    if args.scheme == "bernoulli":
        if args.sigma is None or args.t1_frac is None:
            raise ValueError("bernoulli theory needs --sigma and --t1-frac")
        et = float(theory.bernoulli_et(args.t1_frac, args.sigma, p))
        return theory.theory_point(
            p, "bernoulli", {"sigma": args.sigma, "t1_frac": args.t1_frac}, et
        )
    if args.scheme == "ctpi":
        if args.r is None or args.sigma is None:
            raise ValueError("ctpi theory needs --r and --sigma")
        et = float(theory.ctpi_et(args.r, args.sigma, p))
        return theory.theory_point(p, "ctpi", {"r": args.r, "sigma": args.sigma}, et)
    if args.scheme == "dc":
        if args.r is None or args.s is None:
            raise ValueError("dc theory needs --r and --s")
        et = float(theory.dc_et(args.r, args.s, p))
        return theory.theory_point(p, "dc", {"r": args.r, "s": args.s}, et)
    if args.scheme == "mutesa":
        return theory.theory_point(p, "mutesa", {}, theory.mutesa_asymptotic_et(p))
    raise ValueError(f"unknown scheme {args.scheme!r}")


def cmd_theory(args) -> int:
    rows = ["p,scheme,r,s,sigma,t1_frac,et_per_item,rate\n"]
    for p in p_grid(args):
        pt = _theory_point(args, p)
        rows.append(
            _row(
                pt.p,
                pt.scheme,
                pt.params.get("r"),
                pt.params.get("s"),
                pt.params.get("sigma"),
                pt.params.get("t1_frac"),
                pt.et_per_item,
                pt.rate,
            )
        )
    _write_text(args.out, "".join(rows))
    return 0


# --- optimize ----------------------------------------------------------------


def cmd_optimize(args) -> int:
    family = _OPT_FAMILIES[args.family]
    rows = ["p,family,first_stage,r,s,sigma,t1_frac,et_per_item,rate\n"]
    for p in p_grid(args):
        res = theory.optimize_scheme(family, p)
        params = res.params or {}
        rows.append(
            _row(
                p,
                args.family,
                family if res.first_stage else "none",
                params.get("r"),
                params.get("s"),
                params.get("sigma"),
                res.t1_frac,
                res.et_per_item,
                res.rate,
            )
        )
    _write_text(args.out, "".join(rows))
    return 0


# --- bounds ------------------------------------------------------------------


def cmd_bounds(args) -> int:
    rows = ["p,counting,thm1,bound1,bound2,bound3,best,binding,rate_ceiling\n"]
    for p in p_grid(args):
        rep = bounds_mod.conservative_lower_bound(p)
        rows.append(
            _row(
                p,
                rep.counting,
                rep.thm1_two_stage,
                rep.bound1_ungar,
                rep.bound2,
                rep.bound3,
                rep.best,
                rep.binding,
                rep.rate_ceiling,
            )
        )
    _write_text(args.out, "".join(rows))
    return 0


# --- simulate ----------------------------------------------------------------


def scheme_from_config(cfg: dict) -> SchemeConfig:
    """Build a scheme from a flat JSON config dict."""
    family = cfg.get("scheme")
    if family == "individual":
        return Individual()
    if family == "dorfman":
        return Dorfman(s=int(cfg["s"]))
    if family == "bernoulli":
        return Bernoulli(pi=float(cfg["pi"]), t1=int(cfg["t1"]))
    if family == "ctpi":
        return ConstantTestsPerItem(r=int(cfg["r"]), t1=int(cfg["t1"]))
    if family == "doubly_constant":
        return DoublyConstant(r=int(cfg["r"]), s=int(cfg["s"]))
    if family == "hypercube":
        return Hypercube(a=int(cfg["a"]), r2=int(cfg["r2"]))
    raise ValueError(f"unknown scheme family {family!r}")


def cmd_simulate(args) -> int:
    if args.trials is not None and args.trials < 1:
        raise ValueError(f"trial count must be >= 1, got {args.trials}")
    out_dir = Path(args.out or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.table1:
        trials = args.trials if args.trials is not None else sim_mod.TABLE1_TRIALS
        runs = sim_mod.table1_preset(master_seed=args.seed, trials=trials)
    elif args.config:
        cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        scheme = scheme_from_config(cfg)
        trials = args.trials if args.trials is not None else int(cfg.get("trials", 1000))
        if trials < 1:
            raise ValueError(f"trial count must be >= 1, got {trials}")
        summary, results = sim_mod.run_experiment(
            scheme,
            sim_mod.IIDPrior(float(cfg["p"])),
            n=int(cfg["n"]),
            mode=cfg.get("mode", "conservative"),
            trials=trials,
            master_seed=args.seed if args.seed is not None else int(cfg.get("seed", 0)),
        )
        runs = [(summary, results)]
    else:
        raise ValueError("simulate needs --table1 or --config FILE")
    sim_mod.write_summary_csv(out_dir / "summary.csv", [s for s, _ in runs])
    sim_mod.write_trials_csv(
        out_dir / "trials.csv", [(s.scheme.family, r) for s, r in runs]
    )
    return 0


# --- figure data ---------------------------------------------------------------


_CURVE_HEADER = "p,individual,dorfman,bernoulli,ctpi,doubly_constant,counting,lower_bound\n"


def _curve_values(p: float) -> tuple[list[float], float, float]:
    """Optimized per-item costs for the four families, plus H(p) and best bound."""
    ets = [
        theory.optimize_scheme(family, p).et_per_item
        for family in ("dorfman", "bernoulli", "ctpi", "doubly_constant")
    ]
    rep = bounds_mod.conservative_lower_bound(p)
    return ets, rep.counting, rep.best


def cmd_figure_data(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    args.log = True
    grid = p_grid(args)

    aspect = [_CURVE_HEADER]
    rate_rows = [_CURVE_HEADER]
    for p in grid:
        ets, counting, best = _curve_values(p)
        aspect.append(_row(p, 1.0, *ets, counting, best))
        rate_rows.append(
            _row(
                p,
                theory.rate(p, 1.0),
                *[theory.rate(p, et) for et in ets],
                1.0,
                counting / best,
            )
        )
    (out_dir / "aspect_ratio.csv").write_text("".join(aspect), encoding="utf-8")
    (out_dir / "rate.csv").write_text("".join(rate_rows), encoding="utf-8")

    zoom = ["p,doubly_constant,lower_bound\n"]
    zoom_grid = np.logspace(np.log10(ZOOM_P_MIN), np.log10(ZOOM_P_MAX), len(grid))
    for p in [float(x) for x in zoom_grid]:
        res = theory.optimize_scheme("doubly_constant", p)
        rep = bounds_mod.conservative_lower_bound(p)
        zoom.append(_row(p, res.rate, rep.rate_ceiling))
    (out_dir / "rate_zoom.csv").write_text("".join(zoom), encoding="utf-8")
    return 0


# --- entry point -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twostagegt",
        description="Conservative two-stage group testing: theory, bounds, simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_theory = sub.add_parser("theory", help="evaluate a scheme's expected-test formula")
    p_theory.add_argument("--scheme", choices=_THEORY_SCHEMES, required=True)
    p_theory.add_argument("--r", type=int, help="tests per item")
    p_theory.add_argument("--s", type=int, help="items per test / group size")
    p_theory.add_argument("--sigma", type=float, help="mean items per test")
    p_theory.add_argument("--t1-frac", type=float, help="stage-one tests per item")
    p_theory.add_argument("--out", help="output CSV path (default stdout)")
    _add_grid_args(p_theory)
    p_theory.set_defaults(func=cmd_theory)

    p_opt = sub.add_parser("optimize", help="optimize a family's first stage over p")
    p_opt.add_argument("--family", choices=sorted(_OPT_FAMILIES), required=True)
    p_opt.add_argument("--out", help="output CSV path (default stdout)")
    _add_grid_args(p_opt)
    p_opt.set_defaults(func=cmd_optimize)

    p_bounds = sub.add_parser("bounds", help="evaluate the lower bounds over p")
    p_bounds.add_argument("--out", help="output CSV path (default stdout)")
    _add_grid_args(p_bounds)
    p_bounds.set_defaults(func=cmd_bounds)

    p_sim = sub.add_parser("simulate", help="run seeded Monte Carlo experiments")
    p_sim.add_argument("--table1", action="store_true", help="run the benchmark preset")
    p_sim.add_argument("--config", help="flat JSON experiment config")
    p_sim.add_argument("--seed", type=int, default=0, help="master seed")
    p_sim.add_argument("--trials", type=int, help="trials per experiment")
    p_sim.add_argument("--out", help="output directory (summary.csv, trials.csv)")
    p_sim.set_defaults(func=cmd_simulate)

    p_fig = sub.add_parser("figure-data", help="emit the three CSV curve panels")
    p_fig.add_argument("--out", required=True, help="output directory")
    _add_grid_args(p_fig)
    p_fig.set_defaults(func=cmd_figure_data)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
