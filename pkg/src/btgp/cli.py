"""``btgp`` command line: fitting, selection, prediction and maintenance policies.

Every command prints (or writes with ``--out``) one JSON result document that
embeds the resolved configuration and the library version; figure-type
outputs go to a CSV table given by ``--csv``.  Options resolve as built-in
default < ``--config`` JSON file < command-line flag.  Thresholds and
condition values are on the user's scale (``--orientation decreasing`` means
a condition index such as BCI, where 100 is new).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .analysis import matched_mean_bngp, mumv, mumv_grid, predictive_band
from .errors import BTGPError, DomainError, InputError
from .inference import FitOptions, census, cleanse, fit_mle, select_best_model
from .io import csv_text, dumps, load_inspections, validate_document, write_json
from .models import VARIANT_ORDER, ModelSpec, Variant, remaining_life, simulate_paths
from .policy import (
    ABRPolicy,
    CBRPolicy,
    CostConfig,
    abr_rate,
    cbr_rate,
    cbr_surface,
    optimize_abr,
    optimize_cbr,
    simulate_policy,
)

COMMON_DEFAULTS = {"model": "BTGP", "xlim": 100.0, "orientation": "decreasing"}
COMMAND_DEFAULTS = {
    "fit": {"clean": True, "n_starts": 8, "max_iter": 2000, "seed": 0},
    "select": {"clean": True, "n_starts": 8, "max_iter": 2000, "seed": 0,
               "candidates": ",".join(v.value for v in VARIANT_ORDER)},
    "census": {"clean": True, "n_starts": 8, "max_iter": 2000, "seed": 0, "min_records": 6,
               "jobs": 1, "candidates": ",".join(v.value for v in VARIANT_ORDER)},
    "simulate": {"grid_t": "0,100,1", "n_paths": 10},
    "predict": {"grid_t": "0,100,1", "levels": "0.025,0.975", "clock": "age"},
    "mumv": {},
    "mumv-grid": {"grid_theta2": "0.1,4,40", "grid_theta3": "1,100,40", "theta1": 1.0},
    "match": {"n_grid": 200},
    "abr": {"ci": 1.0, "cr": 100.0, "cf": 500.0, "grid_t_r": "1,150,0.1"},
    "cbr": {"ci": 1.0, "cr": 100.0, "cf": 500.0, "grid_t_i": "0.5,20,0.1", "n_cells": 400},
    "sweep": {"ci": 1.0, "cr": 100.0, "cf": 500.0, "kind": "abr", "param": "xi",
              "grid_t_r": "1,150,0.1", "grid_t_i": "0.5,20,0.1", "n_cells": 400},
    "mc-check": {"ci": 1.0, "cr": 100.0, "cf": 500.0, "kind": "abr", "n_cycles": 20000,
                 "dt": 0.05, "z_tol": 3.0, "n_cells": 400},
}
_NOT_EMBEDDED = ("out", "csv", "config")


# -- argument parsing -------------------------------------------------------


def _flag(p, name, **kw):
    p.add_argument(name, default=argparse.SUPPRESS, **kw)


def _parents():
    base = argparse.ArgumentParser(add_help=False)
    _flag(base, "--config", help="JSON file of option values (flags take precedence)")
    _flag(base, "--out", help="write the JSON result here instead of stdout")
    _flag(base, "--csv", help="write the command's table here")
    model = argparse.ArgumentParser(add_help=False)
    _flag(model, "--model", choices=[v.value for v in Variant], help="model variant")
    for i in range(1, 5):
        _flag(model, f"--theta{i}", type=float)
    _flag(model, "--xlim", type=float, help="known bound of the degradation scale")
    _flag(model, "--orientation", choices=["increasing", "decreasing"])
    costs = argparse.ArgumentParser(add_help=False)
    _flag(costs, "--ci", type=float, help="inspection cost")
    _flag(costs, "--cr", type=float, help="preventive replacement cost")
    _flag(costs, "--cf", type=float, help="failure replacement cost")
    data = argparse.ArgumentParser(add_help=False)
    _flag(data, "--input", help="CSV with columns asset_id,age_years,condition")
    _flag(data, "--no-clean", dest="clean", action="store_false",
          help="skip the monotone-prefix cleansing")
    _flag(data, "--n-starts", type=int)
    _flag(data, "--max-iter", type=int)
    _flag(data, "--seed", type=int, help="seed of the Latin-hypercube starts")
    return base, model, costs, data


def build_parser() -> argparse.ArgumentParser:
    base, model, costs, data = _parents()
    p = argparse.ArgumentParser(prog="btgp", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("fit", parents=[base, model, data], help="maximum-likelihood fit")

    s = sub.add_parser("select", parents=[base, model, data], help="per-asset AIC selection")
    _flag(s, "--candidates", help="comma-separated variants")
    _flag(s, "--asset", help="only this asset_id")

    s = sub.add_parser("census", parents=[base, model, data], help="best-model census")
    _flag(s, "--candidates", help="comma-separated variants")
    _flag(s, "--min-records", type=int)
    _flag(s, "--jobs", type=int)

    s = sub.add_parser("simulate", parents=[base, model], help="exact sample paths")
    _flag(s, "--grid-t", help="start,stop,step")
    _flag(s, "--n-paths", type=int)
    _flag(s, "--seed", type=int)

    s = sub.add_parser("predict", parents=[base, model], help="predictive band, remaining life")
    _flag(s, "--grid-t", help="start,stop,step")
    _flag(s, "--levels", help="lower,upper quantile levels")
    _flag(s, "--t0", type=float, help="current age for remaining life")
    _flag(s, "--x0", type=float, help="current condition for remaining life")
    _flag(s, "--xi", type=float, help="failure threshold")
    _flag(s, "--clock", choices=["age", "restart"])

    sub.add_parser("mumv", parents=[base, model], help="mean at maximum variance")

    s = sub.add_parser("mumv-grid", parents=[base, model], help="MUMV over (theta2, theta3)")
    _flag(s, "--grid-theta2", help="lo,hi,n")
    _flag(s, "--grid-theta3", help="lo,hi,n")

    s = sub.add_parser("match", parents=[base, model], help="mean-matched BNGP")
    _flag(s, "--n-grid", type=int)

    s = sub.add_parser("abr", parents=[base, model, costs], help="age-based replacement")
    _flag(s, "--xi", type=float, help="failure threshold")
    _flag(s, "--grid-t-r", help="start,stop,step of the replacement-age scan")

    s = sub.add_parser("cbr", parents=[base, model, costs], help="condition-based replacement")
    _flag(s, "--xi", type=float, help="failure threshold")
    _flag(s, "--grid-t-i", help="start,stop,step of the inspection-interval grid")
    _flag(s, "--grid-xi-r", help="start,stop,step of preventive thresholds")
    _flag(s, "--n-cells", type=int)

    s = sub.add_parser("sweep", parents=[base, model, costs], help="policy sensitivity sweep")
    _flag(s, "--kind", choices=["abr", "cbr"])
    _flag(s, "--param", choices=["xi", "ci", "cr", "cf"])
    _flag(s, "--values", help="comma-separated values of the swept parameter")
    _flag(s, "--xi", type=float, help="failure threshold (when not swept)")
    _flag(s, "--grid-t-r", help="start,stop,step")
    _flag(s, "--grid-t-i", help="start,stop,step")
    _flag(s, "--grid-xi-r", help="start,stop,step")
    _flag(s, "--n-cells", type=int)

    s = sub.add_parser("mc-check", parents=[base, model, costs],
                       help="analytic policy rate against Monte Carlo")
    _flag(s, "--kind", choices=["abr", "cbr"])
    _flag(s, "--xi", type=float, help="failure threshold")
    _flag(s, "--t-r", type=float, help="ABR replacement age")
    _flag(s, "--t-i", type=float, help="CBR inspection interval")
    _flag(s, "--xi-r", type=float, help="CBR preventive threshold")
    _flag(s, "--n-cycles", type=int)
    _flag(s, "--dt", type=float, help="ABR path time step")
    _flag(s, "--z-tol", type=float, help="pass if |z| is at most this")
    _flag(s, "--n-cells", type=int)
    _flag(s, "--seed", type=int)
    return p


def _subparser_dests(parser, command):
    for action in parser._subparsers._group_actions:
        sp = action.choices[command]
        return {a.dest for a in sp._actions if a.dest != "help"}
    return set()


def resolve_config(parser, args) -> dict:
    given = {k: v for k, v in vars(args).items() if k != "command"}
    cmd = args.command
    cfg = {**COMMON_DEFAULTS, **COMMAND_DEFAULTS[cmd]}
    if "config" in given:
        try:
            with open(given["config"], encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read config {given['config']}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"config {given['config']} is not valid JSON: {exc.msg}") from exc
        if not isinstance(file_cfg, dict):
            raise InputError("config file must hold a JSON object")
        file_cfg = {k.replace("-", "_"): v for k, v in file_cfg.items()}
        unknown = sorted(set(file_cfg) - _subparser_dests(parser, cmd))
        if unknown:
            raise InputError(f"unknown config key(s) for {cmd}: {', '.join(unknown)}",
                             keys=unknown)
        cfg.update(file_cfg)
    cfg.update(given)
    return cfg


# -- helpers ----------------------------------------------------------------


def _floats(text, n=None, what="value list"):
    if isinstance(text, (list, tuple)):
        vals = [float(v) for v in text]
    else:
        try:
            vals = [float(v) for v in str(text).split(",") if v.strip()]
        except ValueError as exc:
            raise InputError(f"cannot parse {what} {text!r}") from exc
    if n is not None and len(vals) != n:
        raise InputError(f"{what} needs {n} comma-separated numbers, got {text!r}")
    return vals


def _range(text, what):
    start, stop, step = _floats(text, 3, what)
    if step <= 0 or stop < start:
        raise InputError(f"{what} must be start,stop,step with step > 0 and stop >= start")
    n = int(round((stop - start) / step))
    return start + step * np.arange(n + 1)


def _model(cfg) -> ModelSpec:
    try:
        variant = Variant(cfg["model"])
    except ValueError as exc:
        raise InputError(f"unknown model {cfg['model']!r}") from exc
    theta = []
    for i in range(1, variant.n_params + 1):
        if cfg.get(f"theta{i}") is None:
            raise InputError(f"--theta{i} is required for {variant.value}")
        theta.append(float(cfg[f"theta{i}"]))
    return ModelSpec(variant, tuple(theta), float(cfg["xlim"]), cfg["orientation"])


def _costs(cfg) -> CostConfig:
    return CostConfig(float(cfg["ci"]), float(cfg["cr"]), float(cfg["cf"]))


def _degradation(m: ModelSpec, cfg, key):
    if cfg.get(key) is None:
        raise InputError(f"--{key.replace('_', '-')} is required")
    value = float(cfg[key])
    if not 0.0 <= value <= m.x_lim:
        raise DomainError(f"--{key.replace('_', '-')} {value} outside [0, {m.x_lim}]")
    return float(m.to_degradation(value))


def _rng(cfg, cmd):
    if cfg.get("seed") is None:
        raise InputError(f"{cmd} is stochastic and needs --seed")
    return np.random.default_rng(int(cfg["seed"]))


def _fit_options(cfg) -> FitOptions:
    return FitOptions(n_starts=int(cfg["n_starts"]), max_iter=int(cfg["max_iter"]),
                      seed=int(cfg["seed"]), orientation=cfg["orientation"])


def _histories(cfg, notices, clean=True):
    if cfg.get("input") is None:
        raise InputError("--input is required")
    hs = load_inspections(cfg["input"], float(cfg["xlim"]), notices)
    if not (clean and cfg["clean"]):
        return hs
    out = []
    for h in hs:
        c = cleanse(h, cfg["orientation"])
        if c.report.dropped:
            notices.append(f"asset {h.asset_id}: dropped {len(c.report.dropped)} record(s) "
                           "after a reversal")
        if c.report.merged:
            notices.append(f"asset {h.asset_id}: merged {len(c.report.merged)} repeated "
                           "reading(s)")
        if c.report.eligible:
            out.append(c)
        else:
            notices.append(f"asset {h.asset_id}: fewer than 2 records after cleansing; skipped")
    if not out:
        raise InputError("no asset history survived cleansing")
    return out


def _candidates(cfg):
    raw = cfg["candidates"]
    names = raw if isinstance(raw, list) else [c.strip() for c in raw.split(",") if c.strip()]
    try:
        return [Variant(c) for c in names]
    except ValueError as exc:
        raise InputError(f"unknown candidate in {raw!r}") from exc


def _policy_costs(c: CostConfig) -> dict:
    return {"ci": c.c_inspect, "cr": c.c_preventive, "cf": c.c_failure}


# -- commands ---------------------------------------------------------------


def cmd_fit(cfg, notices):
    hs = _histories(cfg, notices)
    fm = fit_mle(cfg["model"], hs, float(cfg["xlim"]), _fit_options(cfg))
    return fm.as_dict(), None


def cmd_select(cfg, notices):
    hs = _histories(cfg, notices)
    if cfg.get("asset") is not None:
        hs = [h for h in hs if h.asset_id == str(cfg["asset"])]
        if not hs:
            raise InputError(f"asset {cfg['asset']!r} not found (or not eligible)")
    opts = _fit_options(cfg)
    assets, rows = [], []
    for h in hs:
        best, table = select_best_model(h, _candidates(cfg), opts)
        assets.append({"asset_id": h.asset_id, "best": best.as_dict(), "table": table})
        for name, entry in table.items():
            rows.append((h.asset_id, name, entry["aic"], entry["loglik"], entry["converged"],
                         name == best.spec.variant.value, entry["error"]))
    header = ("asset_id", "variant", "aic", "loglik", "converged", "best", "error")
    return {"assets": assets}, (header, rows)


def cmd_census(cfg, notices):
    hs = _histories(cfg, notices, clean=False)
    res = census(hs, _candidates(cfg), _fit_options(cfg), int(cfg["min_records"]),
                 clean=bool(cfg["clean"]), n_jobs=int(cfg["jobs"]))
    doc = res.as_dict()
    doc["family_counts"] = res.family_counts()
    rows = [(v, res.counts[v], res.percentages[v]) for v in res.counts]
    return doc, (("variant", "count", "percentage"), rows)


def cmd_simulate(cfg, notices):
    m = _model(cfg)
    grid = _range(cfg["grid_t"], "--grid-t")
    n = int(cfg["n_paths"])
    paths = simulate_paths(m, grid, n, _rng(cfg, "simulate"))
    rows = [(i, t, paths[i, j]) for i in range(n) for j, t in enumerate(grid)]
    doc = {"model": m.as_dict(), "n_paths": n, "t": grid, "mean": paths.mean(axis=0),
           "within_bounds": bool(np.all((paths >= 0) & (paths <= m.x_lim)))}
    return doc, (("path", "t", "level"), rows)


def cmd_predict(cfg, notices):
    m = _model(cfg)
    grid = _range(cfg["grid_t"], "--grid-t")
    levels = tuple(_floats(cfg["levels"], 2, "--levels"))
    band = predictive_band(m, grid, levels)
    doc = {"model": m.as_dict(), "levels": list(levels), "t": band.t, "lower": band.lower,
           "mean": band.mean, "upper": band.upper, "variance": band.variance}
    if any(cfg.get(k) is not None for k in ("t0", "x0", "xi")):
        rl = remaining_life(m, float(cfg.get("t0") or 0.0), _degradation(m, cfg, "x0"),
                            _degradation(m, cfg, "xi"), cfg["clock"])
        doc["remaining_life"] = {"t0": rl.t0, "x0": cfg["x0"], "xi": cfg["xi"],
                                 "clock": rl.clock, "mean": rl.mean, "sd": rl.sd,
                                 "defect": rl.defect}
    rows = list(zip(band.t, band.lower, band.mean, band.upper, band.variance))
    return doc, (("t", "lower", "mean", "upper", "variance"), rows)


def cmd_mumv(cfg, notices):
    m = _model(cfg)
    return {"model": m.as_dict(), **mumv(m).as_dict()}, None


def cmd_mumv_grid(cfg, notices):
    lo2, hi2, n2 = _floats(cfg["grid_theta2"], 3, "--grid-theta2")
    lo3, hi3, n3 = _floats(cfg["grid_theta3"], 3, "--grid-theta3")
    g = mumv_grid((lo2, hi2), (lo3, hi3), (int(n2), int(n3)), float(cfg["theta1"]),
                  float(cfg["xlim"]), cfg["orientation"], cfg["model"])
    finite = g.values[np.isfinite(g.values)]
    doc = {"theta1": g.theta1, "theta2": g.theta2, "theta3": g.theta3, "values": g.values,
           "n_flagged": int(g.flagged.sum()),
           "min": float(finite.min()) if finite.size else None,
           "max": float(finite.max()) if finite.size else None}
    return doc, (("theta2", "theta3", "mumv", "flagged"), list(g.rows()))


def cmd_match(cfg, notices):
    m = _model(cfg)
    res = matched_mean_bngp(m, n_grid=int(cfg["n_grid"]))
    doc = {"reference": m.as_dict(), "matched": res.spec.as_dict(),
           "rms_residual": res.rms_residual, "sup_residual": res.sup_residual,
           "variance_rms": res.variance_rms}
    return doc, None


def _abr(m, xi, costs, cfg):
    t0, t1, step = _floats(cfg["grid_t_r"], 3, "--grid-t-r")
    return optimize_abr(m, xi, costs, t0, t1, step)


def _cbr_grids(m, xi, cfg):
    t_grid = _range(cfg["grid_t_i"], "--grid-t-i")
    xr = None
    if cfg.get("grid_xi_r") is not None:
        vals = _range(cfg["grid_xi_r"], "--grid-xi-r")
        xr = np.unique(m.to_degradation(vals))
        xr = xr[(xr > 0) & (xr <= xi)]
        if xr.size == 0:
            raise DomainError("--grid-xi-r has no value between the failure threshold and new")
    return t_grid, xr


def cmd_abr(cfg, notices):
    m = _model(cfg)
    xi = _degradation(m, cfg, "xi")
    costs = _costs(cfg)
    opt = _abr(m, xi, costs, cfg)
    doc = {"model": m.as_dict(), "xi": cfg["xi"], "xi_degradation": xi,
           "costs": _policy_costs(costs), "optimum": {"t_R": opt.t_R, "rate": opt.rate}}
    tr = opt.search_trace
    return doc, (("t_R", "rate"), list(zip(tr["t_R"], tr["rate"])))


def cmd_cbr(cfg, notices):
    m = _model(cfg)
    xi = _degradation(m, cfg, "xi")
    costs = _costs(cfg)
    t_grid, xr = _cbr_grids(m, xi, cfg)
    opt = optimize_cbr(m, xi, costs, t_grid, xr, n_cells=int(cfg["n_cells"]))
    doc = {"model": m.as_dict(), "xi": cfg["xi"], "xi_degradation": xi,
           "costs": _policy_costs(costs),
           "optimum": {"t_I": opt.t_I, "xi_R": float(m.from_degradation(opt.xi_R)),
                       "xi_R_degradation": opt.xi_R, "rate": opt.rate}}
    tr = opt.search_trace
    rows = [(t, float(m.from_degradation(x)), tr["rate"][i, j])
            for i, t in enumerate(tr["t_I"]) for j, x in enumerate(tr["xi_R"])]
    return doc, (("t_I", "xi_R", "rate"), rows)


def cmd_sweep(cfg, notices):
    m = _model(cfg)
    kind, param = cfg["kind"], cfg["param"]
    if cfg.get("values") is None:
        raise InputError("--values is required")
    values = _floats(cfg["values"], what="--values")
    surface = None
    out = []
    for v in values:
        local = {**cfg, param: v}
        xi = _degradation(m, local, "xi")
        costs = _costs(local)
        if kind == "abr":
            opt = _abr(m, xi, costs, local)
            out.append({"value": v, "rate": opt.rate, "t_R": opt.t_R})
        else:
            t_grid, xr = _cbr_grids(m, xi, local)
            if param == "xi" or surface is None:
                surface = cbr_surface(m, xi, t_grid, xr, n_cells=int(cfg["n_cells"]))
            opt = optimize_cbr(m, xi, costs, surface=surface, n_cells=int(cfg["n_cells"]))
            out.append({"value": v, "rate": opt.rate, "t_I": opt.t_I,
                        "xi_R": float(m.from_degradation(opt.xi_R))})
    if kind == "abr":
        table = (("value", "rate", "t_R"), [(r["value"], r["rate"], r["t_R"]) for r in out])
    else:
        table = (("value", "rate", "t_I", "xi_R"),
                 [(r["value"], r["rate"], r["t_I"], r["xi_R"]) for r in out])
    return {"model": m.as_dict(), "kind": kind, "param": param, "rows": out}, table


def cmd_mc_check(cfg, notices):
    m = _model(cfg)
    xi = _degradation(m, cfg, "xi")
    costs = _costs(cfg)
    rng = _rng(cfg, "mc-check")
    if cfg["kind"] == "abr":
        if cfg.get("t_r") is None:
            raise InputError("--t-r is required for an ABR check")
        policy = ABRPolicy(float(cfg["t_r"]))
        analytic = abr_rate(m, xi, costs, policy.t_R)
        est = simulate_policy(m, policy, xi, costs, int(cfg["n_cycles"]), rng,
                              dt=float(cfg["dt"]))
        pol = {"t_R": policy.t_R}
    else:
        if cfg.get("t_i") is None:
            raise InputError("--t-i is required for a CBR check")
        policy = CBRPolicy(float(cfg["t_i"]), _degradation(m, cfg, "xi_r"))
        analytic = cbr_rate(m, xi, policy.xi_R, policy.t_I, costs,
                            n_cells=int(cfg["n_cells"]))
        est = simulate_policy(m, policy, xi, costs, int(cfg["n_cycles"]), rng)
        pol = {"t_I": policy.t_I, "xi_R": cfg["xi_r"], "xi_R_degradation": policy.xi_R}
    z = (est.rate - analytic) / est.se
    doc = {"model": m.as_dict(), "kind": cfg["kind"], "policy": pol, "xi": cfg["xi"],
           "costs": _policy_costs(costs), "analytic_rate": analytic,
           "empirical_rate": est.rate, "se": est.se, "n_cycles": est.n_cycles, "z": z,
           "pass": bool(abs(z) <= float(cfg["z_tol"]))}
    return doc, None


COMMANDS = {
    "fit": cmd_fit,
    "select": cmd_select,
    "census": cmd_census,
    "simulate": cmd_simulate,
    "predict": cmd_predict,
    "mumv": cmd_mumv,
    "mumv-grid": cmd_mumv_grid,
    "match": cmd_match,
    "abr": cmd_abr,
    "cbr": cmd_cbr,
    "sweep": cmd_sweep,
    "mc-check": cmd_mc_check,
}


# -- entry point ------------------------------------------------------------


def _error_doc(cmd, cfg, exc: BTGPError) -> dict:
    embedded = {k: v for k, v in (cfg or {}).items() if k not in _NOT_EMBEDDED}
    return {"status": "error", "command": cmd or "", "version": __version__,
            "config": embedded, "error": exc.to_dict()}


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cmd, cfg, written = args.command, None, []
    try:
        cfg = resolve_config(parser, args)
        notices: list[str] = []
        result, table = COMMANDS[cmd](cfg, notices)
        outputs = []
        if cfg.get("csv") and table is not None:
            header, rows = table
            text = csv_text(header, rows)
            with open(cfg["csv"], "w", encoding="utf-8", newline="") as fh:
                written.append(cfg["csv"])
                fh.write(text)
            outputs.append(os.path.basename(cfg["csv"]))
        embedded = {k: v for k, v in cfg.items() if k not in _NOT_EMBEDDED}
        doc = {"status": "ok", "command": cmd, "version": __version__, "config": embedded,
               "notices": notices, "outputs": outputs, "result": result}
        doc = json.loads(dumps(doc))
        validate_document(doc)
        if cfg.get("out"):
            written.append(cfg["out"])
            write_json(cfg["out"], doc)
        else:
            sys.stdout.write(dumps(doc))
        return 0
    except (BTGPError, OSError) as exc:
        for path in written:
            if os.path.exists(path):
                os.unlink(path)
        if isinstance(exc, OSError):
            exc = InputError(f"{exc.filename}: {exc.strerror}")
        sys.stderr.write(dumps(_error_doc(cmd, cfg, exc)))
        return 2 if isinstance(exc, InputError) else 1


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
