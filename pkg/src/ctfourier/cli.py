"""Command-line driver: ``ctfourier <task> [options]``.

Each task writes ``<task>.json`` (keys ``task``, ``config_digest``, ``results``,
``assertions``, ``config``) and, where tabular output makes sense,
``<task>.csv`` into ``--out-dir``. Exit codes: 0 all assertions pass,
1 an assertion failed, 2 configuration error, 3 hypothesis violation,
4 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import warnings
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import config as cfgmod
from .config import ExperimentConfig, TASKS
from .eigenfn import EigenfunctionEvaluator
from .errors import ConfigError, HypothesisError, NumericalError
from .inequalities import (ENVELOPE, HY_SLACK, empirical_opnorm, hormander_bound, hy_report,
                           hyp_report, paley_report)
from .model import make_bessel_kingman, make_jacobi
from .multipliers import apply_multiplier, heat_opnorm_curve, sobolev_check
from .pde import b_l2_norm, heat_t_star, solve_heat, solve_wave, wave_t_star
from .plancherel import fit_density_exponents, plancherel_defect
from .suite import (gaussian, gaussian_suite, named_coefficient, named_function,
                    named_symbol, probe_family)
from .transform import SpatialGrid, SpectralGrid, Transformer, WeightedSignal, lp_norm

EXIT_OK, EXIT_ASSERT, EXIT_CONFIG, EXIT_HYPOTHESIS, EXIT_NUMERICAL = 0, 1, 2, 3, 4


# ---------------------------------------------------------------- helpers

def _number(text: str) -> float:
    """Accept ``1.5`` as well as fractions such as ``4/3``."""
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def build_model(cfg: ExperimentConfig):
    m = cfg.model
    if m["family"] == "bessel-kingman":
        return make_bessel_kingman(m["alpha"])
    return make_jacobi(m["alpha"], m["beta"])


def build_transformer(cfg: ExperimentConfig, threads: int = 1) -> Transformer:
    g = cfg.grid
    panel = g["panel"] or None
    xgrid = SpatialGrid.default(g["x_max"], g["lambda_max"], g["nodes"], panel)
    lgrid = SpectralGrid.default(g["x_max"], g["lambda_max"], g["nodes"], panel)
    return Transformer(build_model(cfg), xgrid=xgrid, lgrid=lgrid, threads=threads)


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    return obj


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def write_csv(path: str, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _assert(assertions: list, name: str, ok: bool, **detail) -> None:
    assertions.append({"name": name, "passed": bool(ok), **detail})


# ---------------------------------------------------------------- tasks

def task_phi(cfg, threads):
    P = cfg.params
    ev = EigenfunctionEvaluator(build_model(cfg))
    xs = np.linspace(0.0, P["x_end"], int(P["points"]))
    table = ev.evaluate_matrix(P["lambdas"], xs, threads)
    header = ["x"] + [f"phi_{lam:g}" for lam in P["lambdas"]]
    rows = [[x, *table[:, i]] for i, x in enumerate(xs)]
    assertions: list = []
    _assert(assertions, "phi_at_origin_is_one", np.allclose(table[:, 0], 1.0, atol=1e-12))
    _assert(assertions, "bounded_by_one", np.max(np.abs(table)) <= 1 + 1e-8,
            max_abs=float(np.max(np.abs(table))))
    results = {"lambdas": P["lambdas"], "max_abs": float(np.max(np.abs(table)))}
    return results, assertions, {"": (header, rows)}


def task_density(cfg, threads):
    P = cfg.params
    tr = build_transformer(cfg, threads)
    lam = np.geomspace(P["lam_min"], P["lam_max"], int(P["points"]))
    fit = fit_density_exponents(tr.sd, P["lam_min"], P["lam_max"], int(P["points"]))
    # width differs from the calibration Gaussian so the check is not circular
    defect = plancherel_defect(tr, tr.signal(gaussian(0.6)))
    results = {"C0": tr.sd.C0_calibration, "plancherel_defect": defect, **fit.as_dict()}
    assertions: list = []
    _assert(assertions, "plancherel_defect", defect < 1e-3, value=defect, tol=1e-3)
    rows = zip(lam, tr.sd.density(lam))
    return results, assertions, {"": (["lambda", "density"], rows)}


def _read_signal_csv(path: str, tr: Transformer) -> WeightedSignal:
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read input CSV {path}: {exc}") from None
    if data.shape[1] < 2 or np.any(np.diff(data[:, 0]) <= 0):
        raise ConfigError("input CSV needs increasing x in column 1 and f in column 2")
    vals = np.interp(tr.xgrid.nodes, data[:, 0], data[:, 1], left=data[0, 1], right=0.0)
    return WeightedSignal(tr.xgrid, vals, tr.model)


def task_transform(cfg, threads):
    P = cfg.params
    tr = build_transformer(cfg, threads)
    f = _read_signal_csv(P["input"], tr) if P["input"] else tr.signal(named_function(P["function"]))
    F = tr.forward(f)
    rt = tr.round_trip_error(f)
    assertions: list = []
    _assert(assertions, "round_trip", rt < 1e-4, value=rt, tol=1e-4)
    results = {"l2_norm": lp_norm(f, 2), "round_trip_error": rt,
               "plancherel_defect": plancherel_defect(tr, f)}
    return results, assertions, {"": (["lambda", "fhat"], zip(tr.lgrid.nodes, F.values))}


def task_verify(cfg, threads):
    P = cfg.params
    tr = build_transformer(cfg, threads)
    kind = P["inequality"]
    suite = [(name, tr.signal(f)) for name, f in gaussian_suite()]
    reports: List[dict] = []
    assertions: list = []
    if kind in ("hy", "paley", "hyp"):
        psi = named_symbol(P["psi"], tr.model)
        for p in P["p"]:
            if kind == "hyp":
                pp = p / (p - 1)
                bs = P["b"] or [p, 2.0, pp]
            else:
                bs = [None]
            for b in bs:
                for name, f in suite:
                    if kind == "hy":
                        rep, limit = hy_report(f, p, tr), 1 + HY_SLACK
                    elif kind == "paley":
                        rep, limit = paley_report(f, psi, p, tr), ENVELOPE
                    else:
                        rep, limit = hyp_report(f, psi, p, b, tr), ENVELOPE
                    d = rep.as_dict()
                    d["inputs"]["function"] = name
                    reports.append(d)
                    _assert(assertions, f"{kind}:{name}:p={p:g}" + ("" if b is None else f":b={b:g}"),
                            rep.ratio <= limit, ratio=rep.ratio, limit=limit)
    elif kind == "hormander":
        probes = probe_family(tr, cfg.seed)
        for spec in P["symbols"]:
            h = named_symbol(spec, tr.model)
            for p, q in P["pairs"]:
                est = empirical_opnorm(h, tr, p, q, probes, detail=True)
                bound = hormander_bound(h, tr.sd, tr.lgrid, p, q)
                ratio = est.value / bound
                reports.append({"kind": "hormander", "lhs": est.value, "rhs_core": bound,
                                "ratio": ratio, "inputs": {"symbol": spec, "p": p, "q": q,
                                                           "argmax": est.argmax}})
                _assert(assertions, f"hormander:{spec}:p={p:g}:q={q:g}", ratio <= ENVELOPE,
                        ratio=ratio, limit=ENVELOPE)
    else:
        raise ConfigError(f"unknown inequality {kind!r}")
    rows = [(r["kind"], r["inputs"].get("function", r["inputs"].get("symbol", "")),
             r["inputs"].get("p", float("nan")), r["inputs"].get("b", r["inputs"].get("q", float("nan"))),
             r["lhs"], r["rhs_core"], r["ratio"]) for r in reports]
    header = ["kind", "input", "p", "b_or_q", "lhs", "rhs_core", "ratio"]
    return reports, assertions, {"": (header, rows)}


def task_multiplier(cfg, threads):
    P = cfg.params
    tr = build_transformer(cfg, threads)
    f = tr.signal(named_function(P["function"]))
    h = named_symbol(P["symbol"], tr.model)
    tf = apply_multiplier(h, f, tr)
    results = {"symbol": P["symbol"], "function": P["function"],
               "input_l2": lp_norm(f, 2), "output_l2": lp_norm(tf, 2)}
    assertions: list = []
    _assert(assertions, "finite_output", bool(np.all(np.isfinite(tf.values))))
    return results, assertions, {"": (["x", "f", "Tf"], zip(tr.xgrid.nodes, f.values, tf.values))}


def task_heat_decay(cfg, threads):
    P = cfg.params
    tr = build_transformer(cfg, threads)
    ts = np.geomspace(P["t_min"], P["t_max"], int(P["points"]))
    rows = heat_opnorm_curve(tr, P["p"], P["q"], ts, cfg.seed)
    bounds = np.array([r.bound for r in rows])
    assertions: list = []
    _assert(assertions, "bound_monotone", bool(np.all(np.diff(bounds) <= 0)))
    worst = max(r.empirical / r.bound for r in rows)
    _assert(assertions, "envelope", worst <= ENVELOPE, worst_ratio=worst, limit=ENVELOPE)
    results = [{"t": r.t, "empirical": r.empirical, "bound": r.bound, "branch": r.branch}
               for r in rows]
    table = [(r.t, r.empirical, r.bound, r.branch) for r in rows]
    return results, assertions, {"": (["t", "empirical", "bound", "branch"], table)}


def task_embed(cfg, threads):
    P = cfg.params
    v = sobolev_check(P["b"], build_model(cfg), P["p"], P["q"])
    return v.as_dict(), [], {}


def _snapshot_rows(tr, run):
    for m, t in enumerate(run.times):
        for x, u in zip(tr.xgrid.nodes, run.states[m]):
            yield (t, x, u)


def _pde_assertions(run):
    assertions: list = []
    _assert(assertions, "converged", run.converged, iterations=run.iterations)
    _assert(assertions, "contraction", run.contraction_ok)
    _assert(assertions, "invariant_set", all(run.in_set))
    return assertions


def task_solve_heat(cfg, threads):
    P = cfg.params
    tr = build_transformer(cfg, threads)
    u0 = tr.signal(named_function(P["u0"]))
    B = named_symbol(P["symbol"], tr.model)
    T = P["T"]
    if T <= 0:
        ts = heat_t_star(lp_norm(u0, 2), P["c"], P["p_exp"])
        T = ts / 2 if math.isfinite(ts) else 1.0
    run = solve_heat(tr, B, P["p_exp"], u0, T, int(P["steps"]), P["c"], P["tol"],
                     int(P["max_iters"]), raise_on_failure=False)
    return (run.as_dict(), _pde_assertions(run),
            {"": (["t", "x", "u"], _snapshot_rows(tr, run))})


def task_solve_wave(cfg, threads):
    P = cfg.params
    tr = build_transformer(cfg, threads)
    u0 = tr.signal(named_function(P["u0"]))
    u1 = tr.signal(named_function(P["u1"]))
    B = named_symbol(P["symbol"], tr.model)
    b = named_coefficient(P["b_coeff"])
    M = int(P["steps"])
    T, horizon = P["T"], P["horizon"]
    if T <= 0:
        horizon = horizon if horizon > 0 else 1.0
        bl2 = b_l2_norm(b, horizon, horizon / M)
        ts = wave_t_star(lp_norm(u0, 2), lp_norm(u1, 2), bl2, P["c"], P["p_exp"]) \
            if bl2 > 0 else math.inf
        T = min(ts, horizon) / 2
    horizon = horizon if horizon > 0 else T
    run = solve_wave(tr, B, P["p_exp"], b, u0, u1, T, M, P["c"], P["tol"],
                     int(P["max_iters"]), horizon=horizon, raise_on_failure=False)
    return (run.as_dict(), _pde_assertions(run),
            {"": (["t", "x", "u"], _snapshot_rows(tr, run))})


TASK_RUNNERS = {
    "phi": task_phi, "density": task_density, "transform": task_transform,
    "verify": task_verify, "multiplier": task_multiplier, "heat-decay": task_heat_decay,
    "embed": task_embed, "solve-heat": task_solve_heat, "solve-wave": task_solve_wave,
}


def _provenance(cfg: ExperimentConfig) -> dict:
    """Resolved config without the output block, so reports do not depend on where they land."""
    d = cfg.to_dict()
    d.pop("output")
    return d


def run(cfg: ExperimentConfig, out_dir: Optional[str] = None, threads: int = 1) -> int:
    """Execute one configured task, write its artifacts, return the exit status."""
    out_dir = out_dir or cfg.output["dir"]
    os.makedirs(out_dir, exist_ok=True)
    results, assertions, tables = TASK_RUNNERS[cfg.task](cfg, threads)
    for suffix, (header, rows) in tables.items():
        write_csv(os.path.join(out_dir, f"{cfg.task}{suffix}.csv"), header, rows)
    report = {"task": cfg.task, "config_digest": cfg.digest(), "results": results,
              "assertions": assertions, "config": _provenance(cfg)}
    with open(os.path.join(out_dir, f"{cfg.task}.json"), "w") as fh:
        json.dump(_clean(report), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return EXIT_OK if all(a["passed"] for a in assertions) else EXIT_ASSERT


# ---------------------------------------------------------------- argument parsing

# flag name -> (config section, key, argparse kwargs)
_COMMON = {
    "model": ("model", "family", dict(choices=cfgmod.FAMILIES)),
    "alpha": ("model", "alpha", dict(type=_number)),
    "beta": ("model", "beta", dict(type=_number)),
    "xmax": ("grid", "x_max", dict(type=_number)),
    "lmax": ("grid", "lambda_max", dict(type=_number)),
    "nodes": ("grid", "nodes", dict(type=int)),
    "panel": ("grid", "panel", dict(type=_number)),
}

_PDE = {
    "symbol": dict(type=str), "p": dict(type=_number, dest="p_exp"), "c": dict(type=_number),
    "T": dict(type=_number), "steps": dict(type=int), "tol": dict(type=_number),
    "max-iters": dict(type=int, dest="max_iters"), "u0": dict(type=str),
}

_TASK_FLAGS: Dict[str, dict] = {
    "phi": {"lambdas": dict(type=_number, nargs="+"), "x-end": dict(type=_number, dest="x_end"),
            "points": dict(type=int)},
    "density": {"lam-min": dict(type=_number, dest="lam_min"),
                "lam-max": dict(type=_number, dest="lam_max"), "points": dict(type=int)},
    "transform": {"function": dict(type=str), "input": dict(type=str)},
    "verify": {"inequality": dict(choices=["paley", "hyp", "hy", "hormander"]),
               "p": dict(type=_number, nargs="+"), "b": dict(type=_number, nargs="+"),
               "psi": dict(type=str), "symbols": dict(type=str, nargs="+")},
    "multiplier": {"symbol": dict(type=str), "function": dict(type=str)},
    "heat-decay": {"p": dict(type=_number), "q": dict(type=_number),
                   "t-min": dict(type=_number, dest="t_min"),
                   "t-max": dict(type=_number, dest="t_max"), "points": dict(type=int)},
    "embed": {"b": dict(type=_number), "p": dict(type=_number), "q": dict(type=_number)},
    "solve-heat": dict(_PDE),
    "solve-wave": {**_PDE, "u1": dict(type=str), "b-coeff": dict(type=str, dest="b_coeff"),
                   "horizon": dict(type=_number)},
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ctfourier", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="task", required=True)
    for task in TASKS:
        sp = sub.add_parser(task)
        sp.add_argument("--config", help="TOML experiment config")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--out-dir", dest="out_dir")
        for flag, (_, _, kw) in _COMMON.items():
            sp.add_argument(f"--{flag}", dest=f"common_{flag}", default=None, **kw)
        for flag, kw in _TASK_FLAGS[task].items():
            kw = dict(kw)
            dest = kw.pop("dest", flag.replace("-", "_"))
            sp.add_argument(f"--{flag}", dest=f"task_{dest}", default=None, **kw)
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    base = cfgmod.load(args.config).to_dict() if args.config else {}
    name = base.get("task", {}).get("name", args.task)
    if name != args.task:
        raise ConfigError(f"config task {name!r} does not match subcommand {args.task!r}")
    data = {"seed": base.get("seed", 0), "model": dict(base.get("model", {})),
            "grid": dict(base.get("grid", {})), "task": dict(base.get("task", {"name": name})),
            "output": dict(base.get("output", {}))}
    data["task"]["name"] = name
    for flag, (section, key, _) in _COMMON.items():
        v = getattr(args, f"common_{flag}")
        if v is not None:
            data[section][key] = v
    for k, v in vars(args).items():
        if k.startswith("task_") and v is not None:
            data["task"][k[5:]] = v
    if args.seed is not None:
        data["seed"] = args.seed
    if args.out_dir is not None:
        data["output"]["dir"] = args.out_dir
    return ExperimentConfig.from_dict(data)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            status = run(cfg, threads=args.threads)
    except ConfigError as exc:
        loc = cfgmod.parse_location(str(exc))
        where = f" (line {loc[0]}, column {loc[1]})" if loc else ""
        print(f"config error{where}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HypothesisError as exc:
        print(f"hypothesis violation: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if status != EXIT_OK:
        print("one or more assertions failed; see the JSON report", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
