"""One-shot invariant suite behind ``qidiode validate``."""
from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .config import RunConfig, parse_config
from .model import (
    ModelParams,
    build_mode_set,
    dispersion_1d,
    dispersion_2d,
    group_velocity_1d,
    suppression_rate,
)
from .oracle import (
    asymmetry_probe,
    build_chain_hamiltonian,
    cross_validate,
    g2_zero,
    otoc_exact,
    spectral_decompose,
    transition_probability,
)
from .otoc import TimeGrid, otoc_series, rectification_coefficient

SEED = 20240611


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


@dataclass
class ValidationReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> str:
        doc = {
            "passed": self.passed,
            "failures": [c.name for c in self.failures],
            "checks": [{k: v for k, v in asdict(c).items() if k != "seconds"} for c in self.checks],
        }
        return json.dumps(doc, indent=1) + "\n"


def onset_time(times: np.ndarray, c: np.ndarray, fraction: float = 0.01) -> float:
    """First time at which C exceeds ``fraction`` of its maximum on the grid."""
    above = np.nonzero(c > fraction * np.max(c))[0]
    return float(times[above[0]])


def _checks(params: ModelParams, zeta_model: Callable[[float], float]):
    rng = np.random.default_rng(SEED)
    a = params.a

    def mirror_2d():
        kx, ky = rng.uniform(-np.pi, np.pi, (2, 1000)) / a
        gap = np.max(np.abs(dispersion_2d(params, kx, ky, +1) - dispersion_2d(params, -kx, ky, -1)))
        return gap <= 1e-14, f"max gap {gap:.3g}"

    def y_axis_reciprocity():
        ky = rng.uniform(-np.pi, np.pi, 1000) / a
        gap = np.max(np.abs(dispersion_2d(params, 0.0, ky, +1) - dispersion_2d(params, 0.0, ky, -1)))
        return gap == 0.0, f"max gap {gap:.3g}"

    def branch_gap():
        k = rng.uniform(-np.pi, np.pi, 1000) / a
        diff = dispersion_1d(params, k, +1) - dispersion_1d(params, k, -1)
        err = np.max(np.abs(diff - 2 * params.d * np.sin(k * a)))
        return err <= 1e-14, f"max error {err:.3g}"

    def frequency_matching():
        modes = build_mode_set(params)
        err = np.max(np.abs(dispersion_1d(params, modes.k_plus, +1)
                            - dispersion_1d(params, modes.k_minus, -1)))
        return err < 1e-12, f"max mismatch {err:.3g} over {len(modes)} modes"

    def group_velocity():
        k = rng.uniform(-np.pi, np.pi, 1000) / a
        h = 1e-6
        worst = 0.0
        for s in (+1, -1):
            fd = (dispersion_1d(params, k + h, s) - dispersion_1d(params, k - h, s)) / (2 * h)
            worst = max(worst, float(np.max(np.abs(fd - group_velocity_1d(params, k, s)))))
        return worst < 1e-8, f"max deviation {worst:.3g}"

    def suppression_model():
        grid = np.linspace(0.0, 10.0, 101)
        z = np.array([zeta_model(d) for d in grid])
        ok = z[0] == 1.0 and np.all((z > 0) & (z <= 1)) and np.all(np.diff(z) < 0)
        return bool(ok), f"zeta(0)={z[0]:.6g}, zeta(10)={z[-1]:.6g}"

    def otoc_bounds():
        grid = TimeGrid.spanning(40.0, 0.02)
        s = otoc_series(params, 10 * a, grid)
        lo = min(s.c_left.min(), s.c_right.min())
        hi = max(s.c_left.max(), s.c_right.max())
        ratio_err = np.max(np.abs(s.c_right - s.zeta ** 4 * s.c_left))
        ok = lo >= 0 and hi <= 2 and s.c_left[0] < 1e-12 and ratio_err < 1e-12
        return ok, f"range [{lo:.3g}, {hi:.3g}], C_L(0)={s.c_left[0]:.3g}, identity err {ratio_err:.3g}"

    def onset_ordering():
        grid = TimeGrid.spanning(40.0, 0.01)
        onsets = [onset_time(grid.times, otoc_series(params, r * a, grid).c_left) for r in (10, 20, 30)]
        return bool(np.all(np.diff(onsets) > 0)), f"onsets {onsets}"

    def rectification():
        worst = 0.0
        for d in (0.0, 1.0):
            p = params.with_(d=d)
            res = rectification_coefficient(p, 10 * a, zeta_override=zeta_model(d))
            expected = zeta_model(d) ** 4
            if not res.converged:
                return False, f"D={d} not converged (tail {res.tail_estimate:.3g})"
            worst = max(worst, abs(res.r_coeff - expected) / expected)
        return worst < 1e-6, f"max relative deviation from zeta^4 {worst:.3g}"

    def oracle_equivalence():
        times = np.linspace(0.0, 30.0, 200)
        worst = 0.0
        for n_sites in (8, 16, 32):
            pairs = [(0, d % n_sites) for d in (1, -1, 3, -3)]
            rep = cross_validate(params, n_sites, pairs, times, strict=False)
            worst = max(worst, rep.max_abs_error)
        return worst < 1e-10, f"max |C_exact - C_formula| {worst:.3g}"

    def spectrum():
        chain = params.with_(n=64)
        h = build_chain_hamiltonian(chain)
        ev = np.sort(spectral_decompose(h).eigenvalues)
        band = np.sort(dispersion_1d(chain, 2 * np.pi * np.arange(64) / (64 * a), +1))
        err = np.max(np.abs(ev - band))
        ok = err < 1e-10 and h.is_circulant()
        return ok, f"max eigenvalue error {err:.3g}"

    def closed_form_and_unitarity():
        dec = spectral_decompose(build_chain_hamiltonian(params.with_(n=16)))
        t = rng.uniform(0, 50, 100)
        c = otoc_exact(dec, 0, 3, t)
        p = transition_probability(dec, 0, 3, t)
        err = np.max(np.abs(c - 8 * p * (1 - p)))
        psi = np.zeros(16)
        psi[0] = 1.0
        norm_err = np.max(np.abs(np.linalg.norm(dec.evolve(psi, t), axis=-1) - 1))
        return err < 1e-12 and norm_err < 1e-12, f"identity err {err:.3g}, norm err {norm_err:.3g}"

    def reciprocity():
        times = np.linspace(0.0, 30.0, 200)
        flat = spectral_decompose(build_chain_hamiltonian(params.with_(d=0.0, n=32)))
        sym = asymmetry_probe(flat, 0, 5, times).max_gap
        d = params.d if params.d != 0 else 1.0
        # odd ring: on even rings the nearest-neighbour DMI phase cancels in |<m|U|n>|
        chiral = spectral_decompose(build_chain_hamiltonian(params.with_(d=d, n=33)))
        asym = asymmetry_probe(chiral, 0, 5, times).max_gap
        return sym < 1e-12 and asym > 1e-3, f"gap D=0: {sym:.3g}, gap D={d} (N=33): {asym:.3g}"

    def blockade():
        worst = 0.0
        for _ in range(10):
            amps = rng.normal(size=8) + 1j * rng.normal(size=8)
            amps /= np.linalg.norm(amps)
            worst = max(worst, g2_zero(amps).g2)
        return worst == 0.0, f"max g2(0) {worst}"

    return [
        ("dispersion_mirror_symmetry", mirror_2d),
        ("dispersion_y_axis_reciprocity", y_axis_reciprocity),
        ("dispersion_branch_gap", branch_gap),
        ("mode_frequency_matching", frequency_matching),
        ("group_velocity_vs_finite_difference", group_velocity),
        ("suppression_model", suppression_model),
        ("otoc_bounds_and_suppression_identity", otoc_bounds),
        ("otoc_onset_ordering", onset_ordering),
        ("rectification_identity", rectification),
        ("oracle_equivalence", oracle_equivalence),
        ("oracle_spectrum_equals_dispersion", spectrum),
        ("oracle_closed_form_and_unitarity", closed_form_and_unitarity),
        ("reciprocity_restoration", reciprocity),
        ("magnon_blockade", blockade),
    ]


def run_validate(config: RunConfig | None = None,
                 zeta_model: Callable[[float], float] | None = None) -> ValidationReport:
    """Run every invariant check; exceptions count as failures.

    ``zeta_model`` replaces the suppression law (a hook for testing the suite).
    """
    config = config if config is not None else parse_config("")
    params = config.model_params()
    if zeta_model is None:
        def zeta_model(d):
            return suppression_rate(params.with_(d=d))

    report = ValidationReport()
    for name, check in _checks(params, zeta_model):
        start = time.perf_counter()
        try:
            passed, detail = check()
        except Exception as exc:  # a crash is a failed check, not an aborted suite
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        report.checks.append(CheckResult(name, bool(passed), detail, time.perf_counter() - start))
    return report


def exponential_zeta(decay: float) -> Callable[[float], float]:
    """exp(-d / decay) without the positivity guard of ModelParams."""
    return lambda d: math.exp(-d / decay)
