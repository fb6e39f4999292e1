"""Left/right OTOC time series, lattice propagator OTOC and rectification."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import (
    ModelParams,
    ModeSet,
    build_mode_set,
    dispersion_1d,
    fastest_mode_time,
    suppression_rate,
)

# relative change of R under doubling of the truncation time
CONVERGENCE_TOL = 1e-3
_BLOCK = 512


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid t_start + dt * j, j = 0..steps-1."""

    dt: float
    steps: int
    t_start: float = 0.0

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"steps must be a positive integer, got {self.steps}")
        object.__setattr__(self, "steps", int(self.steps))

    @classmethod
    def spanning(cls, t_end: float, dt: float) -> "TimeGrid":
        """Grid from 0 to exactly t_end with spacing no larger than dt."""
        if not t_end > 0:
            raise ValueError(f"t_end must be positive, got {t_end}")
        intervals = max(1, math.ceil(t_end / dt - 1e-9))
        return cls(dt=t_end / intervals, steps=intervals + 1)

    @property
    def times(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.steps)

    @property
    def t_end(self) -> float:
        return self.t_start + self.dt * (self.steps - 1)


@dataclass(frozen=True)
class OtocSeries:
    times: np.ndarray = field(repr=False)
    c_left: np.ndarray = field(repr=False)
    c_right: np.ndarray = field(repr=False)
    r: float
    zeta: float
    n_modes: int
    suppressed_side: str = "right"


@dataclass(frozen=True)
class PropagatorSeries:
    """OTOC between two sites of the periodic chain, no suppression factor."""

    times: np.ndarray = field(repr=False)
    c: np.ndarray = field(repr=False)
    p: np.ndarray = field(repr=False)
    displacement: int


@dataclass(frozen=True)
class RectificationResult:
    r_coeff: float
    integral_left: float
    integral_right: float
    t_truncation: float
    dt: float
    tail_estimate: float
    converged: bool
    # relative growth of the left integral itself when the window doubles
    integral_tail: float
    zeta: float


@dataclass(frozen=True)
class SweepRow:
    d: float
    zeta: float
    r_coeff: float
    r_analytic: float
    converged: bool
    tail_estimate: float
    integral_tail: float


@dataclass(frozen=True)
class RectificationSweep:
    rows: list[SweepRow]
    r: float
    t_truncation: float
    dt: float

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def converged(self) -> bool:
        return all(row.converged for row in self.rows)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(row, name) for row in self.rows], dtype=float)


def _check_times(t):
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("times must be finite")
    return t


def phase_sums(weights: np.ndarray, omega: np.ndarray, times) -> np.ndarray:
    """Evaluate sum_j weights[j, s] * exp(i omega[j] t) for every t.

    ``weights`` has shape (modes,) or (modes, S); the result has shape
    (len(times),) or (len(times), S).  A :class:`TimeGrid` is evaluated in
    blocks that reuse exp(i omega j dt), every other input directly.
    """
    weights = np.asarray(weights, dtype=complex)
    squeeze = weights.ndim == 1
    if squeeze:
        weights = weights[:, None]
    omega = np.asarray(omega, dtype=float)

    if isinstance(times, TimeGrid):
        grid = times
        out = np.empty((grid.steps, weights.shape[1]), dtype=complex)
        offsets = grid.dt * np.arange(min(_BLOCK, grid.steps))
        base = np.exp(1j * np.outer(offsets, omega))
        for start in range(0, grid.steps, _BLOCK):
            stop = min(start + _BLOCK, grid.steps)
            t0 = grid.t_start + grid.dt * start
            shifted = np.exp(1j * omega * t0)[:, None] * weights
            out[start:stop] = base[: stop - start] @ shifted
    else:
        t = np.atleast_1d(_check_times(times))
        out = np.empty((t.size, weights.shape[1]), dtype=complex)
        for start in range(0, t.size, _BLOCK):
            chunk = t[start:start + _BLOCK]
            out[start:start + chunk.size] = np.exp(1j * np.outer(chunk, omega)) @ weights
    return out[:, 0] if squeeze else out


def omega_sum(mode_set: ModeSet, r: float, t, side: str = "right"):
    """Phase sum over the mode set for spins separated by ``r``.

    The right sum uses the Bragg wave vectors k_plus, the left sum the matched
    k_minus; both share the frequencies omega_m0.  The companion sum with the
    opposite phases is the complex conjugate of this one.
    """
    if side == "right":
        k = mode_set.k_plus
    elif side == "left":
        k = mode_set.k_minus
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    weights = np.exp(-1j * k * r)
    scalar = not isinstance(t, TimeGrid) and np.ndim(t) == 0
    values = phase_sums(weights, mode_set.omega, t)
    return complex(values[0]) if scalar else values


def _otoc_from_sum(total: np.ndarray, n: int) -> np.ndarray:
    # |Omega| <= n analytically; clip the rounding excess so C stays in [0, 2]
    p = np.minimum(np.abs(total / n) ** 2, 1.0)
    return 8.0 * p * (1.0 - p)


def check_separation(params: ModelParams, r: float) -> float:
    if not math.isfinite(r) or r < 0:
        raise ValueError(f"separation r must be a finite non-negative length, got {r}")
    sites = r / params.a
    if abs(sites - round(sites)) > 1e-9 * max(1.0, abs(sites)):
        raise ValueError(f"separation r={r} is not a whole number of lattice sites (a={params.a})")
    return float(r)


def otoc_series(params: ModelParams, r: float, grid, zeta_override: float | None = None) -> OtocSeries:
    """Left and right OTOCs for spins a distance r apart.

    The Bragg-matched direction is suppressed by zeta**4.  For D >= 0 that is
    the right mover; a negative D (reversed field) makes the left mover the
    matched one, which swaps the two series.
    """
    r = check_separation(params, r)
    mirrored = params.d < 0
    modes = build_mode_set(params.with_(d=-params.d) if mirrored else params)
    zeta = suppression_rate(params, zeta_override)

    weights = np.stack([np.exp(-1j * modes.k_plus * r), np.exp(-1j * modes.k_minus * r)], axis=1)
    sums = phase_sums(weights, modes.omega, grid)
    matched = zeta ** 4 * _otoc_from_sum(sums[:, 0], params.n)
    free = _otoc_from_sum(sums[:, 1], params.n)

    times = grid.times if isinstance(grid, TimeGrid) else np.atleast_1d(_check_times(grid))
    if mirrored:
        c_left, c_right, side = matched, free, "left"
    else:
        c_left, c_right, side = free, matched, "right"
    return OtocSeries(times=times, c_left=c_left, c_right=c_right, r=r, zeta=zeta,
                      n_modes=len(modes), suppressed_side=side)


def lattice_wavevectors(params: ModelParams) -> np.ndarray:
    """Brillouin-zone momenta 2*pi*m/(N*a) of the periodic chain."""
    return 2.0 * np.pi * np.arange(params.n) / (params.n * params.a)


def lattice_propagator_otoc(params: ModelParams, displacement: int, grid) -> PropagatorSeries:
    """OTOC from the single-magnon propagator of the periodic chain.

    p(t) = |<n + d| exp(-iHt) |n>|^2 evaluated as a plane-wave sum over the
    band of :func:`dispersion_1d`, and C = 8 p (1 - p).
    """
    if int(displacement) != displacement or abs(displacement) >= params.n:
        raise ValueError(f"|displacement| must be an integer below N={params.n}, got {displacement}")
    displacement = int(displacement)
    k = lattice_wavevectors(params)
    weights = np.exp(1j * k * displacement * params.a)
    amp = phase_sums(weights, -dispersion_1d(params, k, +1), grid) / params.n
    p = np.minimum(np.abs(amp) ** 2, 1.0)
    times = grid.times if isinstance(grid, TimeGrid) else np.atleast_1d(_check_times(grid))
    return PropagatorSeries(times=times, c=8.0 * p * (1.0 - p), p=p, displacement=displacement)


def resolution_limit(mode_set: ModeSet) -> float:
    """Largest admissible step, 2*pi / (20 * max omega)."""
    return 2.0 * np.pi / (20.0 * float(np.max(np.abs(mode_set.omega))))


def default_quadrature(params: ModelParams) -> tuple[float, float]:
    """(t_truncation, dt): wrap time of the fastest mode, 40 samples per fastest period."""
    modes = build_mode_set(params.with_(d=abs(params.d)))
    dt = 2.0 * np.pi / (40.0 * float(np.max(np.abs(modes.omega))))
    return fastest_mode_time(modes), dt


def rectification_coefficient(params: ModelParams, r: float, t_truncation: float | None = None,
                              dt: float | None = None,
                              zeta_override: float | None = None) -> RectificationResult:
    """Ratio of the time-integrated right and left OTOCs.

    Both series are integrated with the trapezoid rule on [0, t_truncation]
    and again on [0, 2 t_truncation]; ``tail_estimate`` is the relative change
    of R between the two windows.
    """
    modes = build_mode_set(params.with_(d=abs(params.d)))
    default_t, default_dt = default_quadrature(params)
    t_truncation = default_t if t_truncation is None else float(t_truncation)
    if not t_truncation > 0:
        raise ValueError(f"t_truncation must be positive, got {t_truncation}")
    if dt is None:
        dt = default_dt
    elif dt > resolution_limit(modes) * (1 + 1e-12):
        raise ValueError(
            f"dt={dt} under-resolves the fastest mode; need dt <= {resolution_limit(modes):.6g}")

    short = TimeGrid.spanning(t_truncation, dt)
    grid = TimeGrid(dt=short.dt, steps=2 * short.steps - 1)
    series = otoc_series(params, r, grid, zeta_override)

    half = short.steps
    il_short = np.trapezoid(series.c_left[:half], dx=grid.dt)
    ir_short = np.trapezoid(series.c_right[:half], dx=grid.dt)
    il_long = np.trapezoid(series.c_left, dx=grid.dt)
    ir_long = np.trapezoid(series.c_right, dx=grid.dt)
    if not il_short > 0:
        raise ValueError("left OTOC integral vanished; R is undefined")

    r_short = ir_short / il_short
    r_long = ir_long / il_long
    tail = abs(r_long - r_short) / abs(r_short)
    return RectificationResult(
        r_coeff=float(r_short),
        integral_left=float(il_short),
        integral_right=float(ir_short),
        t_truncation=t_truncation,
        dt=grid.dt,
        tail_estimate=float(tail),
        converged=bool(tail < CONVERGENCE_TOL),
        integral_tail=float(abs(il_long - il_short) / il_short),
        zeta=series.zeta,
    )


def sweep_rectification(params: ModelParams, d_values, r: float | None = None,
                        t_truncation: float | None = None,
                        dt: float | None = None) -> RectificationSweep:
    """R(D) for each D, every row integrated on the same time grid."""
    d_values = np.atleast_1d(np.asarray(d_values, dtype=float))
    if d_values.ndim != 1 or d_values.size == 0:
        raise ValueError("d_values must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(d_values)) or np.any(d_values < 0):
        raise ValueError("d_values must be finite and non-negative")
    r = 10 * params.a if r is None else r

    # shared settings: finest step and longest window over the sweep
    defaults = [default_quadrature(params.with_(d=float(d))) for d in d_values]
    if t_truncation is None:
        t_truncation = max(t for t, _ in defaults)
    if dt is None:
        dt = min(step for _, step in defaults)

    rows = []
    for d in d_values:
        p = params.with_(d=float(d))
        res = rectification_coefficient(p, r, t_truncation=t_truncation, dt=dt)
        rows.append(SweepRow(d=float(d), zeta=res.zeta, r_coeff=res.r_coeff,
                             r_analytic=res.zeta ** 4, converged=res.converged,
                             tail_estimate=res.tail_estimate, integral_tail=res.integral_tail))
    return RectificationSweep(rows=rows, r=float(r), t_truncation=float(t_truncation), dt=float(dt))
