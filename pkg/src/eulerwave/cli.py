"""Command-line verification suites.

    eulerwave <command> --config <path> [--out <dir>] [--seed <u64>]
                        [--n <int>] [--eos <name>]

Commands: eos-check, geometry-check, nullframe-check, reform-verify,
converge, shock1d, export.  Exit codes: 0 all verdicts pass, 1 verification
failure, 2 configuration error, 3 numeric error.

All numeric tolerances live in the config (see DEFAULT_CONFIG) so a report
is self-describing; every CSV carries a provenance header with the hash of
the fully merged config.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import eos as eos_mod
from . import grid as gr
from . import reports, shock1d as sh
from .errors import (BlowupError, ConfigurationError, DomainError,
                     EulerwaveError, NumericError, PostBlowupError, UsageError)
from .evolve import build_slice_stack, make_fixture
from .grid import Grid
from .metric import metric_at, metric_invariant_residuals
from .nullframes import (build_null_frame, frame_residuals, qg_term,
                         strong_null_check)
from .sources import all_residuals
from .state import compute_derived

DEFAULT_CONFIG = {
    "eos": {"kind": "polytropic", "gamma": 1.4, "background_density": 1.0},
    "grid": {"n": 32, "order": 4},
    "fixture": "smooth-default",
    "t_center": 0.1,
    "dt_factor": 0.1,
    "dt": None,  # absolute step at the coarsest n; scales as 1/n if set
    "ns": [16, 32, 64],
    "trials": 1000,
    "seed": 42,
    "tolerances": {
        "metric": 1e-12,
        "frame": 1e-10,
        "roundoff": 1e-12,
        "eos_rel_error": 1e-6,
        "order_thresholds": {"2": 1.8, "4": 3.5},
    },
    "shock1d": {
        "amplitude": 0.5,
        "gamma": 1.4,
        "n_pde": 1024,
        "chaplygin_horizon_factor": 10.0,
        "mu_star_floor": 0.5,
        "product_window": [0.1, 10.0],
        "growth_factor": 50.0,
        "fit_window": [0.8, 0.99],
        "r_squared_min": 0.999,
        "t_star_rel_tol": 0.01,
    },
}

COMMANDS = ("eos-check", "geometry-check", "nullframe-check", "reform-verify",
            "converge", "shock1d", "export")


def _deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def load_config(args) -> dict:
    override = {}
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigurationError(f"config file not found: {path}")
        try:
            override = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"malformed config JSON: {exc}") from exc
        if not isinstance(override, dict):
            raise ConfigurationError("config JSON must be an object")
    cfg = _deep_merge(DEFAULT_CONFIG, override)
    if args.n is not None:
        cfg["grid"]["n"] = args.n
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.eos is not None:
        if args.eos == "polytropic":
            cfg["eos"] = {"kind": "polytropic", "gamma": 1.4,
                          "background_density": 1.0}
        elif args.eos == "chaplygin":
            cfg["eos"] = {"kind": "chaplygin", "c0": 0.0, "c1": 1.0,
                          "background_density": 1.0}
        else:
            raise ConfigurationError(f"unknown --eos {args.eos!r}")
    # validate eagerly so nothing is written for a bad config
    eos_mod.from_config(cfg["eos"])
    Grid(n=int(cfg["grid"]["n"]), order=int(cfg["grid"]["order"]))
    if cfg["fixture"] not in ("smooth-default", "plane-wave", "constant"):
        raise ConfigurationError(f"unknown fixture {cfg['fixture']!r}")
    if cfg.get("dt") is not None and float(cfg["dt"]) <= 0.0:
        raise ConfigurationError("dt must be positive")
    return cfg


def _metadata(cfg: dict, **extra) -> dict:
    md = {
        "config_hash": reports.config_hash(cfg),
        "eos": cfg["eos"]["kind"],
        "grid_n": cfg["grid"]["n"],
        "grid_order": cfg["grid"]["order"],
        "seed": cfg["seed"],
    }
    md.update(extra)
    return md


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _random_metric_points(rng, trials):
    cs = rng.uniform(0.5, 3.0, size=trials)
    vs = rng.uniform(-1.0, 1.0, size=(trials, 3))
    norms = np.linalg.norm(vs, axis=1)
    scales = rng.uniform(0.0, 2.0, size=trials) / np.maximum(norms, 1e-12)
    vs = vs * scales[:, None]
    return cs, vs


def cmd_eos_check(cfg: dict, outdir: Path) -> bool:
    model = eos_mod.from_config(cfg["eos"])
    tol = cfg["tolerances"]["eos_rel_error"]
    rows = []
    ok = True
    points = np.linspace(-1.0, 1.0, 5)
    for rho in points:
        for s in points:
            rep = eos_mod.verify_derivatives(model, float(rho), float(s), 1e-4)
            passed = rep["max_rel_error"] <= tol
            ok &= passed
            rows.append([float(rho), float(s), 1e-4,
                         rep["max_rel_error"], passed])
    reports.write_table_csv(outdir / "eos_check.csv",
                            ("rho_log", "s", "h", "max_rel_error", "pass"),
                            rows, _metadata(cfg, tolerance=tol))
    return ok


def cmd_geometry_check(cfg: dict, outdir: Path) -> bool:
    tol = cfg["tolerances"]["metric"]
    rng = np.random.default_rng(cfg["seed"])
    cs, vs = _random_metric_points(rng, int(cfg["trials"]))
    rows = []
    ok = True
    for trial, (c, v) in enumerate(zip(cs, vs)):
        res = metric_invariant_residuals(metric_at(float(c), v))
        worst = max(res.values())
        passed = worst <= tol
        ok &= passed
        rows.append([trial, float(c), float(v[0]), float(v[1]), float(v[2]),
                     res["inverse_residual"], res["det_residual"],
                     res["bb_residual"], res["orthogonality_residual"], passed])
    reports.write_table_csv(
        outdir / "geometry_check.csv",
        ("trial", "c", "v1", "v2", "v3", "inverse_residual", "det_residual",
         "bb_residual", "orthogonality_residual", "pass"),
        rows, _metadata(cfg, tolerance=tol))
    return ok


def cmd_nullframe_check(cfg: dict, outdir: Path) -> bool:
    tol = cfg["tolerances"]["frame"]
    rng = np.random.default_rng(cfg["seed"])
    trials = int(cfg["trials"])
    cs, vs = _random_metric_points(rng, trials)
    term = qg_term(0, 1)
    rows = []
    ok = True
    for trial, (c, v) in enumerate(zip(cs, vs)):
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        frame = build_null_frame(metric_at(float(c), v), direction)
        fres = frame_residuals(frame)["max"]
        V = rng.normal(size=11)
        dV = rng.normal(size=(4, 11))
        rep = strong_null_check(term, frame, V, dV, tol=tol)
        passed = fres <= tol and rep.passed
        ok &= passed
        rows.append([trial, float(c), float(v[0]), float(v[1]), float(v[2]),
                     fres, rep.diag_uLuL, rep.diag_LL, passed])
    reports.write_table_csv(
        outdir / "nullframe_check.csv",
        ("trial", "c", "v1", "v2", "v3", "max_frame_residual",
         "qg_diag_uLuL", "qg_diag_LL", "pass"),
        rows, _metadata(cfg, tolerance=tol))
    return ok


def stack_timestep(n: int, t_center: float, dt_factor: float,
                   n_base: int | None = None) -> float:
    """A step that divides t_center exactly and scales like dt_factor * h.

    Within a convergence study, pass the coarsest resolution as n_base so
    the step count scales linearly with n and dt halves exactly with h.
    """
    if n_base is None:
        n_base = n
    h_base = 2.0 * math.pi / n_base
    k_base = max(4, round(t_center / (dt_factor * h_base)))
    k = max(4, round(k_base * n / n_base))
    return t_center / k


def residual_study(cfg: dict, ns) -> reports.ResidualReport:
    eos = eos_mod.from_config(cfg["eos"])
    order = int(cfg["grid"]["order"])
    report = reports.ResidualReport()
    n_base = min(int(n) for n in ns)
    for n in ns:
        grid = Grid(n=int(n), order=order)
        state = make_fixture(cfg["fixture"], grid, eos)
        if cfg.get("dt") is not None:
            dt = float(cfg["dt"]) * n_base / int(n)
        else:
            dt = stack_timestep(grid.n, cfg["t_center"], cfg["dt_factor"],
                                n_base)
        stack = build_slice_stack(state, cfg["t_center"], dt)
        report.add_resolution(grid.n, dt, all_residuals(stack))
    threshold = cfg["tolerances"]["order_thresholds"][str(order)]
    report.metadata = _metadata(cfg, fixture=cfg["fixture"],
                                order_threshold=threshold,
                                t_center=cfg["t_center"])
    return report.finalize(order_threshold=threshold if len(ns) >= 3 else None)


def cmd_reform_verify(cfg: dict, outdir: Path) -> bool:
    report = residual_study(cfg, cfg["ns"])
    reports.write_residual_csv(outdir / "residuals.csv", report)
    reports.write_residual_json(outdir / "residuals.json", report)
    return report.all_passed()


def cmd_converge(cfg: dict, outdir: Path) -> bool:
    cfg = dict(cfg)
    cfg["ns"] = [16, 32, 64]
    return cmd_reform_verify(cfg, outdir)


def _linear_fit(ts, ys):
    coeffs = np.polyfit(ts, ys, 1)
    fit = np.polyval(coeffs, ts)
    ss_res = float(np.sum((ys - fit) ** 2))
    ss_tot = float(np.sum((ys - np.mean(ys)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return coeffs, r2


def cmd_shock1d(cfg: dict, outdir: Path) -> bool:
    sc = cfg["shock1d"]
    eos_cfg = cfg["eos"]
    profile = sh.sinusoidal_profile(sc["amplitude"])

    reference = eos_mod.polytropic(sc["gamma"])
    t_star_ref = sh.blowup_time(sh.build_fan(sh.build_riemann_map(reference),
                                             profile))

    model = eos_mod.from_config(eos_cfg)
    fan = sh.build_fan(sh.build_riemann_map(model), profile)
    t_star = fan.valid_until

    if math.isinf(t_star):
        horizon = sc["chaplygin_horizon_factor"] * t_star_ref
        times = np.linspace(0.0, horizon, 101)
    else:
        times = np.linspace(0.0, 0.99 * t_star, 101)

    rows = []
    for t in times:
        rows.append([float(t), sh.mu_star(fan, t), sh.max_abs_dxv1(fan, t),
                     sh.blowup_product_check(fan, t)])
    series = np.asarray(rows)
    reports.write_table_csv(
        outdir / "shock1d_series.csv",
        ("t", "mu_star", "max_abs_dxv1", "product_mu_dxv1"),
        rows, _metadata(cfg, amplitude=sc["amplitude"], t_star=t_star,
                        t_star_reference=t_star_ref))

    t_profile = 0.5 * (t_star if math.isfinite(t_star) else t_star_ref)
    x = np.linspace(0.0, 2.0 * math.pi, 257)[:-1]
    r_plus, v1, rho = sh.simple_wave_solution(fan, t_profile, x)
    u, mu = sh.eikonal_mu(fan, t_profile, x)
    profile_rows = [[float(x[i]), float(r_plus[i]), float(v1[i]),
                     float(rho[i]), float(u[i]), float(mu[i])]
                    for i in range(x.size)]
    reports.write_table_csv(outdir / "shock1d_profile.csv",
                            ("x", "R_plus", "v1", "rho_log", "u", "mu"),
                            profile_rows, _metadata(cfg, t=t_profile))

    if math.isinf(t_star):
        return bool(np.min(series[:, 1]) >= sc["mu_star_floor"])

    lo, hi = sc["fit_window"]
    window = (series[:, 0] >= lo * t_star) & (series[:, 0] <= hi * t_star)
    coeffs, r2 = _linear_fit(series[window, 0], series[window, 1])
    zero = -coeffs[1] / coeffs[0]
    growth = series[-1, 2] / series[0, 2]
    prod_lo, prod_hi = sc["product_window"]
    checks = [
        r2 >= sc["r_squared_min"],
        abs(zero - t_star) <= sc["t_star_rel_tol"] * t_star,
        np.all(series[:, 3] >= prod_lo) and np.all(series[:, 3] <= prod_hi),
        growth >= sc["growth_factor"],
    ]
    return all(bool(c) for c in checks)


def cmd_export(cfg: dict, outdir: Path) -> bool:
    eos = eos_mod.from_config(cfg["eos"])
    grid = Grid(n=int(cfg["grid"]["n"]), order=int(cfg["grid"]["order"]))
    state = make_fixture(cfg["fixture"], grid, eos)
    derived = compute_derived(state)
    run = cfg["fixture"]
    scalars = {"rho_log": state.rho_log, "s": state.s,
               "div_mod": derived.div_mod}
    vectors = {"v": state.v, "omega": derived.omega,
               "grad_ent": derived.grad_ent, "curl_mod": derived.curl_mod}
    for name, values in scalars.items():
        reports.write_scalar_field_csv(
            reports.field_dump_path(outdir, run, name, 0), values)
    for name, values in vectors.items():
        reports.write_vector_field_csv(
            reports.field_dump_path(outdir, run, name, 0), values)
    return True


DISPATCH = {
    "eos-check": cmd_eos_check,
    "geometry-check": cmd_geometry_check,
    "nullframe-check": cmd_nullframe_check,
    "reform-verify": cmd_reform_verify,
    "converge": cmd_converge,
    "shock1d": cmd_shock1d,
    "export": cmd_export,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eulerwave",
        description="Verification suites for the acoustic wave-transport "
                    "structure of the compressible Euler equations.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="JSON config path")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--eos", default=None,
                       choices=("polytropic", "chaplygin"))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
    except (ConfigurationError, UsageError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    try:
        ok = DISPATCH[args.command](cfg, _outdir(args))
    except (ConfigurationError, UsageError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (NumericError, BlowupError, PostBlowupError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except EulerwaveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    if not ok:
        print(f"{args.command}: verification FAILED", file=sys.stderr)
        return 1
    print(f"{args.command}: all verdicts pass")
    return 0


if __name__ == "__main__":
    sys.exit(main())
