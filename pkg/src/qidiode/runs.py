"""Table-producing runners behind the CLI subcommands."""
from __future__ import annotations

import logging

import numpy as np

from .config import RunConfig
from .model import build_mode_set, dispersion_1d, group_velocity_1d
from .oracle import (
    MAX_DENSE_SITES,
    ORACLE_TOL,
    OracleMismatchError,
    build_chain_hamiltonian,
    otoc_exact,
    spectral_decompose,
)
from .otoc import (
    TimeGrid,
    lattice_propagator_otoc,
    otoc_series,
    resolution_limit,
    sweep_rectification,
)
from .tables import OutputTable

log = logging.getLogger(__name__)

DEFAULT_OTOC_WINDOW = 40.0
DEFAULT_LATTICE_WINDOW = 30.0
DEFAULT_LATTICE_STEP = 0.15


def _header(config: RunConfig, command: str) -> dict:
    return {
        "command": command,
        "parameters": config.resolved(),
        "provenance": dict(config.provenance),
    }


def run_dispersion(config: RunConfig) -> OutputTable:
    params = config.model_params()
    points = config["k_points"]
    if points < 2:
        raise ValueError("k_points must be at least 2")
    ka = np.linspace(-np.pi, np.pi, points)
    k = ka / params.a
    data = np.column_stack([
        k,
        dispersion_1d(params, k, +1),
        dispersion_1d(params, k, -1),
        group_velocity_1d(params, k, +1),
        group_velocity_1d(params, k, -1),
    ])
    return OutputTable(["k", "omega_plus", "omega_minus", "vg_plus", "vg_minus"], data,
                       _header(config, "dispersion"))


def run_otoc(config: RunConfig) -> OutputTable:
    params = config.model_params()
    modes = build_mode_set(params.with_(d=abs(params.d)))
    limit = resolution_limit(modes)
    dt = config["dt"] if config["dt"] is not None else limit / 2.0
    t_max = config["t_max"] if config["t_max"] is not None else DEFAULT_OTOC_WINDOW
    under_resolved = dt > limit
    if under_resolved:
        log.warning("dt = %g under-resolves the fastest mode (limit %g)", dt, limit)

    r_sites = config["r_sites"]
    if r_sites < 0:
        raise ValueError("r_sites must be non-negative")
    series = otoc_series(params, r_sites * params.a, TimeGrid.spanning(t_max, dt),
                         config.zeta_override)
    meta = _header(config, "otoc")
    meta.update(zeta=series.zeta, n_modes=series.n_modes, suppressed_side=series.suppressed_side,
                dt_used=float(series.times[1] - series.times[0]), under_resolved=under_resolved)
    return OutputTable(["t", "c_left", "c_right"],
                       np.column_stack([series.times, series.c_left, series.c_right]), meta)


def rectify_d_values(config: RunConfig) -> np.ndarray:
    if config["d_min"] < 0 or config["d_max"] < config["d_min"]:
        raise ValueError("need 0 <= d_min <= d_max")
    if config["d_steps"] < 1:
        raise ValueError("d_steps must be at least 1")
    if config["d_steps"] == 1:
        return np.array([config["d_min"]])
    return np.linspace(config["d_min"], config["d_max"], config["d_steps"])


def run_rectify(config: RunConfig) -> OutputTable:
    params = config.model_params()
    sweep = sweep_rectification(params, rectify_d_values(config), r=config["r_sites"] * params.a,
                                t_truncation=config["t_max"], dt=config["dt"])
    meta = _header(config, "rectify")
    meta.update(t_truncation=sweep.t_truncation, dt_used=sweep.dt, all_converged=sweep.converged,
                converged=[row.converged for row in sweep.rows],
                tail_estimate=[row.tail_estimate for row in sweep.rows],
                integral_tail=[row.integral_tail for row in sweep.rows])
    data = np.column_stack([sweep.column("d"), sweep.column("zeta"),
                            sweep.column("r_coeff"), sweep.column("r_analytic")])
    return OutputTable(["D", "zeta", "R", "R_analytic"], data, meta)


def run_lattice_otoc(config: RunConfig) -> OutputTable:
    """Exact OTOC next to the propagator formula; raises on any breach of 1e-10."""
    n_sites = config["n_sites"]
    if n_sites > MAX_DENSE_SITES:
        raise ValueError(f"n_sites must not exceed {MAX_DENSE_SITES}")
    params = config.model_params().with_(n=n_sites)
    source = config["source"] - 1
    if not 0 <= source < n_sites:
        raise ValueError(f"source site must lie in 1..{n_sites}")
    disp = config["displacement"]
    probe = (source + disp) % n_sites
    t_max = config["t_max"] if config["t_max"] is not None else DEFAULT_LATTICE_WINDOW
    dt = config["dt"] if config["dt"] is not None else DEFAULT_LATTICE_STEP
    times = TimeGrid.spanning(t_max, dt).times

    exact = otoc_exact(spectral_decompose(build_chain_hamiltonian(params)), source, probe, times)
    formula = lattice_propagator_otoc(params, disp, times).c
    err = np.abs(exact - formula)
    if np.max(err) >= ORACLE_TOL:
        raise OracleMismatchError(f"lattice OTOC mismatch {np.max(err):.3g} >= {ORACLE_TOL}")
    meta = _header(config, "lattice-otoc")
    meta.update(source_site=source + 1, probe_site=probe + 1, max_abs_err=float(np.max(err)))
    return OutputTable(["t", "c_exact", "c_formula", "abs_err"],
                       np.column_stack([times, exact, formula, err]), meta)
