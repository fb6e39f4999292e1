"""Quantum information diode built from a DMI-coupled magnonic crystal."""
from .model import (
    DegenerateVelocityError,
    Mode,
    ModelParams,
    ModeSet,
    bragg_wavevector,
    build_mode_set,
    dispersion_1d,
    dispersion_2d,
    dmi_from_field,
    group_velocity_1d,
    left_wavevector,
    max_time,
    suppression_rate,
)
from .oracle import (
    OneMagnonHamiltonian,
    OracleMismatchError,
    SpectralDecomposition,
    asymmetry_probe,
    build_chain_hamiltonian,
    cross_validate,
    g2_zero,
    otoc_exact,
    spectral_decompose,
)
from .otoc import (
    OtocSeries,
    RectificationResult,
    TimeGrid,
    lattice_propagator_otoc,
    omega_sum,
    otoc_series,
    rectification_coefficient,
    sweep_rectification,
)

__version__ = "0.1.0"
