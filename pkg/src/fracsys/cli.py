"""Command-line driver: ``fracsys <mode> --config run.ini [--out DIR] ...``.

Exit codes: 0 success, 1 configuration error, 2 constraint violation,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import MODES, RunConfig, load_config
from .coupling_algebra import classify_conditions, eval_f, eval_g, eval_h
from .errors import ConfigError, ConstraintError, NoRoot, NumericalError
from .ground_state import solve_w
from .least_energy import minimize_quotient, proportional_state, vector_residual
from .nondegeneracy import kernel_dimension, weighted_spectrum
from .spectral_core import write_csv, write_field
from .tau_solver import classify_landscape, solve_tau0

log = logging.getLogger("fracsys")

EXIT_OK, EXIT_CONFIG, EXIT_CONSTRAINT, EXIT_NUMERIC = 0, 1, 2, 3
FMT = "%.17g"


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    return FMT % x


def load_schema() -> dict:
    """The JSON schema every report validates against."""
    from importlib.resources import files

    return json.loads(files("fracsys").joinpath("schemas/report.schema.json").read_text())


def write_report(out: Path, report: dict) -> Path:
    path = out / "report.json"
    path.write_text(json.dumps(_clean(report), indent=2, sort_keys=True) + "\n")
    return path


def _base_report(cfg: RunConfig, mode: str) -> dict:
    g = cfg.grid
    return {
        "mode": mode,
        "version": __version__,
        "status": "ok",
        "params": cfg.params.as_dict(),
        "grid": {"N": g.N, "n": g.n, "L": g.L},
        "tolerances": dict(cfg.tolerances),
        "seed": cfg.seed,
    }


def _ground_state(cfg: RunConfig, s=None, p=None):
    return solve_w(cfg.params.s if s is None else s, cfg.params.p if p is None else p,
                   cfg.grid, tol=cfg.tolerances["gs_tol"])


def _dump_ground_state(out: Path, gs):
    write_field(out / "w.bin", gs.w, gs.s)
    if gs.grid.N == 1:
        write_csv(out / "w_profile.csv", gs.w)


# ---------------------------------------------------------------------------
# modes


def run_ground_state(cfg: RunConfig, out: Path, report: dict):
    gs = _ground_state(cfg)
    report["ground_state"] = gs.as_dict()
    _dump_ground_state(out, gs)


def write_landscape_csv(path: Path, params, taus) -> None:
    data = np.column_stack([taus, eval_f(params, taus), eval_g(params, taus), eval_h(params, taus)])
    np.savetxt(path, data, delimiter=",", header="tau,f,g,h", comments="", fmt=FMT)


def run_landscape(cfg: RunConfig, out: Path, report: dict):
    params = cfg.params
    taus = np.geomspace(cfg.tau_lo, cfg.tau_hi, cfg.points)
    write_landscape_csv(out / "landscape.csv", params, taus)
    report["landscape"] = classify_landscape(params).as_dict() if params.beta > 0 else None


def _solution_entry(cfg, gs, sol, spectrum):
    params = cfg.params
    state = proportional_state(params, gs, sol.tau0, sol.k1)
    r_u, r_v = vector_residual(params, state, rescale=False)
    entry = dict(sol.as_dict())
    entry["residuals"] = {"r_u": r_u, "r_v": r_v, "scalar": gs.residual_norm}
    entry["min_u"] = float(state.u.values.min())
    entry["min_v"] = float(state.v.values.min())
    rep = kernel_dimension(gs, sol, params.normalized(), K=cfg.K,
                           grid_tol=cfg.tolerances["grid_tol"], spectrum=spectrum)
    entry["nondegeneracy"] = rep.to_dict()
    return entry


def run_analyze(cfg: RunConfig, out: Path, report: dict):
    params = cfg.params
    cond = classify_conditions(params)
    report["conditions"] = dict(cond.as_dict(), a_holding=cond.a_holding, b_holding=cond.b_holding,
                                notes=list(cond.notes))
    if cond.nonexistence_window:
        report["nonexistence_window"] = [params.mu2, params.mu1]
        raise NoRoot(f"p = 2 and beta = {params.beta} lies in the window "
                     f"[mu2, mu1] = [{params.mu2}, {params.mu1}]: no positive solution")
    sols = solve_tau0(params)
    report["landscape"] = classify_landscape(params).as_dict() if params.beta > 0 else None
    gs = _ground_state(cfg)
    report["ground_state"] = gs.as_dict()
    _dump_ground_state(out, gs)
    spectrum = weighted_spectrum(gs, cfg.K, tol=cfg.tolerances["eig_tol"])
    report["spectrum"] = spectrum.as_dict()
    report["solutions"] = [_solution_entry(cfg, gs, sol, spectrum) for sol in sols]


def run_nondegen(cfg: RunConfig, out: Path, report: dict):
    params = cfg.params
    sols = solve_tau0(params)
    gs = _ground_state(cfg)
    spectrum = weighted_spectrum(gs, cfg.K, tol=cfg.tolerances["eig_tol"])
    report["nondegeneracy"] = [
        kernel_dimension(gs, sol, params.normalized(), K=cfg.K,
                         grid_tol=cfg.tolerances["grid_tol"], spectrum=spectrum).to_dict()
        for sol in sols
    ]


def run_rayleigh(cfg: RunConfig, out: Path, report: dict):
    params = cfg.params
    gs = _ground_state(cfg)
    state = minimize_quotient(params, cfg.grid, restarts=cfg.restarts, seed=cfg.seed,
                              ground_state=gs, descent_tol=cfg.tolerances["descent_tol"],
                              workers=cfg.workers)
    land = classify_landscape(params)
    predicted = eval_f(params, land.global_min_tau) * gs.S_value
    u, v = state.u.values, state.v.values
    entry = state.as_dict()
    entry["predicted"] = predicted
    entry["relative_gap"] = state.quotient_value / predicted - 1
    entry["tau_min"] = land.tau_min
    if land.tau_min is not None:
        entry["proportionality"] = float(np.linalg.norm(v - land.tau_min * u) / np.linalg.norm(u))
    entry["residuals"] = list(vector_residual(params, state))
    report["rayleigh"] = entry
    steps = np.arange(len(state.history))
    np.savetxt(out / "rayleigh_log.csv", np.column_stack([steps, state.history]), delimiter=",",
               header="step,quotient", comments="", fmt=["%d", FMT])
    write_field(out / "u.bin", state.u, params.s)
    write_field(out / "v.bin", state.v, params.s)


def _sweep_point(cfg: RunConfig, params, gs):
    """Rows (value, τ0, k1, f̃, verdict, S_{μ1,μ2}) for one sweep value."""
    value = getattr(params, cfg.sweep.variable)
    S_mu = math.nan
    if params.beta > 0:
        land = classify_landscape(params)
        S_mu = eval_f(params, land.global_min_tau) * gs.S_value
    try:
        sols = solve_tau0(params)
    except ConstraintError:
        return [(value, math.nan, math.nan, math.nan, "no_solution", S_mu)]
    rows = []
    for sol in sols:
        rep = kernel_dimension(gs, sol, params.normalized(), K=cfg.K,
                               grid_tol=cfg.tolerances["grid_tol"])
        rows.append((value, sol.tau0, sol.k1, rep.coeffs.f_tilde, rep.verdict, S_mu))
    return rows


def run_sweep(cfg: RunConfig, out: Path, report: dict):
    if cfg.sweep is None:
        raise ConfigError("sweep mode needs a [sweep] section")
    axis = cfg.sweep
    points = [cfg.params.with_(**{axis.variable: float(x)}) for x in axis.values()]
    # ground states depend only on (s, p); build each once before fanning out
    states = {}
    for q in points:
        if (q.s, q.p) not in states:
            states[(q.s, q.p)] = _ground_state(cfg, q.s, q.p)
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        results = list(pool.map(lambda q: _sweep_point(cfg, q, states[(q.s, q.p)]), points))
    rows = [row for chunk in results for row in chunk]
    header = [axis.variable, "tau0", "k1", "f_tilde", "verdict", "S_mu1mu2"]
    with open(out / "sweep.csv", "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")
    report["sweep"] = {
        "variable": axis.variable,
        "rows": [dict(zip(header, row)) for row in rows],
    }


RUNNERS = {
    "analyze": run_analyze,
    "ground-state": run_ground_state,
    "landscape": run_landscape,
    "nondegen": run_nondegen,
    "rayleigh": run_rayleigh,
    "sweep": run_sweep,
}


def run(mode: str, cfg: RunConfig, out) -> int:
    """Execute ``mode`` and write its outputs under ``out``; returns the exit code."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    report = _base_report(cfg, mode)
    code = EXIT_OK
    try:
        RUNNERS[mode](cfg, out, report)
    except ConfigError as exc:
        report["status"] = "config_error"
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        code = EXIT_CONFIG
    except ConstraintError as exc:
        report["status"] = "constraint_violation"
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        code = EXIT_CONSTRAINT
    except NumericalError as exc:
        report["status"] = "non_convergence"
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        code = EXIT_NUMERIC
    write_report(out, report)
    if code:
        log.error("%s: %s", report["status"], report["error"]["message"])
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracsys", description=__doc__.splitlines()[0])
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--config", required=True, help="path to the run configuration")
    parser.add_argument("--out", default=".", help="output directory (default: current)")
    parser.add_argument("--seed", type=int, help="seed for random restarts (u64)")
    parser.add_argument("--grid-n", type=int, dest="grid_n", help="nodes per axis (power of two)")
    parser.add_argument("--grid-L", type=float, dest="grid_L", help="box half-width")
    parser.add_argument("--gs-tol", type=float, dest="gs_tol", help="ground-state tolerance")
    parser.add_argument("--restarts", type=int, help="random restarts for the quotient descent")
    parser.add_argument("--descent-tol", type=float, dest="descent_tol",
                        help="relative decrease over 25 steps that stops the descent")
    parser.add_argument("--workers", type=int, help="worker threads for sweeps and restarts")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        cfg = load_config(args.config).with_overrides(
            seed=args.seed, grid_n=args.grid_n, grid_L=args.grid_L, gs_tol=args.gs_tol,
            restarts=args.restarts, descent_tol=args.descent_tol, workers=args.workers,
        )
    except ConfigError as exc:
        print(f"fracsys: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(args.mode, cfg, args.out)


if __name__ == "__main__":
    sys.exit(main())
