"""Magnon dispersion, Bragg mode construction and the suppression model.

Units: hbar = 1 and energies are measured in units of the exchange J1, so
times come out in units of 1/J1.  Wave vectors are in radians per length,
with lengths in the same units as the lattice constant ``a``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np

Branch = Union[int, str]

# below this |v_g| the wrap-around time is treated as infinite
DEGENERATE_VELOCITY = 1e-12


class DegenerateVelocityError(ValueError):
    """Raised when the group velocity at the reference wave vector vanishes."""


def branch_sign(branch: Branch) -> int:
    """Normalize a branch label (+1, -1, '+', '-') to +1 or -1."""
    if branch in (1, "+", "plus", "right"):
        return 1
    if branch in (-1, "-", "minus", "left"):
        return -1
    raise ValueError(f"unknown branch {branch!r}; use +1/-1 or '+'/'-'")


@dataclass(frozen=True)
class ModelParams:
    """Couplings and geometry of the DMI chain.

    ``d`` may be negative; flipping its sign corresponds to reversing the
    applied electric field.
    """

    j1: float = 1.0
    j2: float = 0.5
    d: float = 1.0
    a: float = 1e-3
    a0: float = 1.0
    n: int = 1000
    g_me: float = 1.0
    zeta_decay: float = 5.0

    def __post_init__(self):
        for name in ("j1", "j2", "d", "a", "a0", "g_me", "zeta_decay"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.j1 <= 0:
            raise ValueError(f"j1 must be positive, got {self.j1}")
        if self.j2 < 0:
            raise ValueError(f"j2 must be non-negative, got {self.j2}")
        if self.a <= 0 or self.a0 <= 0:
            raise ValueError("lattice constants a and a0 must be positive")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n!r}")
        if self.zeta_decay <= 0:
            raise ValueError(f"zeta_decay must be positive, got {self.zeta_decay}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def stiffness(self) -> float:
        """J1 + 2*J2, the coefficient of -cos(ka) in the chain band."""
        return self.j1 + 2.0 * self.j2

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class Mode:
    m0: int
    k_plus: float
    k_minus: float
    omega: float


@dataclass(frozen=True)
class ModeSet:
    """Bragg-resonant modes m0 = 1..n, stored as parallel arrays."""

    params: ModelParams
    m0: np.ndarray = field(repr=False)
    k_plus: np.ndarray = field(repr=False)
    k_minus: np.ndarray = field(repr=False)
    omega: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.m0)

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def __getitem__(self, i: int) -> Mode:
        return Mode(int(self.m0[i]), float(self.k_plus[i]),
                    float(self.k_minus[i]), float(self.omega[i]))

    @property
    def modes(self) -> list[Mode]:
        return list(self)


def dmi_from_field(e_y, g_me):
    """DMI strength induced by an electric field through the magnetoelectric coupling."""
    return e_y * g_me


def dispersion_2d(params: ModelParams, kx, ky, branch: Branch = 1):
    """Square-lattice magnon band with a DMI term along x."""
    s = branch_sign(branch)
    a = params.a
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    gamma1 = 0.5 * (np.cos(kx * a) + np.cos(ky * a))
    gamma2 = 0.5 * (np.cos((kx + ky) * a) + np.cos((kx - ky) * a))
    omega = (2.0 * params.j1 * (1.0 - gamma1) + 2.0 * params.j2 * (1.0 - gamma2)
             + s * params.d * np.sin(kx * a))
    return omega if omega.ndim else float(omega)


def dispersion_1d(params: ModelParams, k, branch: Branch = 1):
    """Band of the propagating modes along x (the one used for the OTOC)."""
    s = branch_sign(branch)
    ka = np.asarray(k, dtype=float) * params.a
    omega = (2.0 * params.j1 * (1.0 - 0.5 * np.cos(ka))
             + 2.0 * params.j2 * (1.0 - np.cos(ka))
             + s * params.d * np.sin(ka))
    return omega if omega.ndim else float(omega)


def group_velocity_1d(params: ModelParams, k, branch: Branch = 1):
    """Analytic derivative d(omega)/dk of :func:`dispersion_1d`."""
    s = branch_sign(branch)
    ka = np.asarray(k, dtype=float) * params.a
    v = params.a * (params.stiffness * np.sin(ka) + s * params.d * np.cos(ka))
    return v if v.ndim else float(v)


def bragg_wavevector(m0, a0: float):
    """Wave vector m0*pi/a0 resonantly back-scattered by a crystal of period a0."""
    m0_arr = np.asarray(m0)
    if not np.issubdtype(m0_arr.dtype, np.integer):
        if not np.all(np.mod(m0_arr, 1) == 0):
            raise ValueError("m0 must be an integer")
    if np.any(m0_arr < 1):
        raise ValueError(f"m0 must be a positive integer, got {m0!r}")
    if a0 <= 0:
        raise ValueError(f"a0 must be positive, got {a0}")
    k = m0_arr * np.pi / a0
    return k if np.ndim(k) else float(k)


def wavevector_shift(params: ModelParams) -> float:
    """Mode-independent offset k_minus - k_plus, (2/a) * arctan(D / (J1 + 2 J2))."""
    return 2.0 / params.a * math.atan(params.d / params.stiffness)


def left_wavevector(params: ModelParams, k_plus):
    """Wave vector of the left mover sharing the frequency of the right mover at k_plus.

    Solves dispersion_1d(+D, k_plus) == dispersion_1d(-D, k_minus) on the
    principal arctan branch.
    """
    k_minus = np.asarray(k_plus, dtype=float) + wavevector_shift(params)
    return k_minus if k_minus.ndim else float(k_minus)


def build_mode_set(params: ModelParams) -> ModeSet:
    m0 = np.arange(1, params.n + 1)
    k_plus = bragg_wavevector(m0, params.a0)
    return ModeSet(
        params=params,
        m0=m0,
        k_plus=k_plus,
        k_minus=left_wavevector(params, k_plus),
        omega=dispersion_1d(params, k_plus, +1),
    )


def suppression_rate(params: ModelParams, override: float | None = None) -> float:
    """Attenuation zeta of the Bragg-matched magnon current.

    Defaults to exp(-|D| / zeta_decay).  The magnitude of D is used because
    reversing the field only swaps which direction is Bragg matched.  An
    explicit ``override`` in (0, 1] wins.
    """
    if override is not None:
        if not 0.0 < override <= 1.0:
            raise ValueError(f"suppression override must lie in (0, 1], got {override}")
        return float(override)
    return math.exp(-abs(params.d) / params.zeta_decay)


def max_time(params: ModelParams, k, branch: Branch = 1) -> float:
    """Time N*a/|v_g| for an excitation at k to wrap the periodic chain."""
    v = abs(group_velocity_1d(params, float(k), branch))
    if v < DEGENERATE_VELOCITY:
        raise DegenerateVelocityError(
            f"group velocity vanishes at k={k}; pick another reference wave vector")
    return params.n * params.a / v


def fastest_mode_time(mode_set: ModeSet) -> float:
    """max_time evaluated at the mode with the largest group velocity."""
    v = np.abs(group_velocity_1d(mode_set.params, mode_set.k_plus, +1))
    i = int(np.argmax(v))
    return max_time(mode_set.params, mode_set.k_plus[i], +1)
