"""Exact single-excitation treatment of the periodic DMI chain.

Everything here works with dense N x N matrices in the one-magnon sector and
evaluates the OTOC straight from its operator definition.  It deliberately
shares no code path with the plane-wave sums in :mod:`qidiode.otoc` beyond
the model parameters, so the two can check each other.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .model import ModelParams

HERMITICITY_TOL = 1e-14
RECONSTRUCTION_TOL = 1e-10
ORACLE_TOL = 1e-10
MAX_DENSE_SITES = 128


class OracleMismatchError(AssertionError):
    """The closed-form engine disagrees with the exact oracle."""


@dataclass(frozen=True)
class OneMagnonHamiltonian:
    matrix: np.ndarray = field(repr=False)
    params: ModelParams

    def __post_init__(self):
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("Hamiltonian must be a square matrix")
        err = np.max(np.abs(m - m.conj().T))
        if err >= HERMITICITY_TOL:
            raise ValueError(f"Hamiltonian is not Hermitian (max |H - H^dag| = {err:.3g})")

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def is_circulant(self) -> bool:
        first = self.matrix[0]
        return all(np.array_equal(self.matrix[i], np.roll(first, i)) for i in range(self.size))


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.eigenvalues)

    def propagator(self, t) -> np.ndarray:
        """exp(-iHt); a stack of shape (T, N, N) when t is an array."""
        v = self.eigenvectors
        phases = np.exp(-1j * np.multiply.outer(np.asarray(t, dtype=float), self.eigenvalues))
        return (v * phases[..., None, :]) @ v.conj().T

    def evolve(self, state: np.ndarray, t) -> np.ndarray:
        v = self.eigenvectors
        coeffs = v.conj().T @ state
        phases = np.exp(-1j * np.multiply.outer(np.asarray(t, dtype=float), self.eigenvalues))
        return (phases * coeffs) @ v.T


def build_chain_hamiltonian(params: ModelParams, n_sites: int | None = None) -> OneMagnonHamiltonian:
    """Hopping matrix of the effective chain in the single-excitation sector.

    On-site energy 2 J1 + 2 J2 and hopping -(J1 + 2 J2)/2 - i D/2 from site
    n+1 to site n, with its conjugate on the reverse bond and periodic
    closure.  The band is exactly :func:`qidiode.model.dispersion_1d`.
    Constant offsets and quartic hard-core terms are dropped.
    """
    n_sites = params.n if n_sites is None else n_sites
    if int(n_sites) != n_sites or n_sites < 4:
        raise ValueError(f"n_sites must be an integer >= 4, got {n_sites}")
    n_sites = int(n_sites)
    onsite = 2.0 * params.j1 + 2.0 * params.j2
    hop = -0.5 * params.stiffness - 0.5j * params.d

    h = np.zeros((n_sites, n_sites), dtype=complex)
    idx = np.arange(n_sites)
    h[idx, idx] = onsite
    h[idx, (idx + 1) % n_sites] = hop
    h[(idx + 1) % n_sites, idx] = np.conj(hop)
    if params.d == 0:
        h = h.real.astype(complex)
    return OneMagnonHamiltonian(matrix=h, params=params.with_(n=n_sites))


def spectral_decompose(h: OneMagnonHamiltonian) -> SpectralDecomposition:
    values, vectors = np.linalg.eigh(h.matrix)
    rebuilt = (vectors * values) @ vectors.conj().T
    err = np.max(np.abs(rebuilt - h.matrix))
    if err > RECONSTRUCTION_TOL:
        raise np.linalg.LinAlgError(f"eigendecomposition reconstruction error {err:.3g}")
    return SpectralDecomposition(eigenvalues=values, eigenvectors=vectors)


def eta_operator(site: int, size: int, sector: str = "one") -> np.ndarray:
    """sigma^z = 2 a^dag a - 1 restricted to a fixed-particle-number sector.

    In the one-magnon sector it is -I + 2 P_site; on the vacuum it is -1.
    """
    if sector == "vacuum":
        return -np.ones((1, 1))
    if sector != "one":
        raise ValueError(f"unknown sector {sector!r}")
    if not 0 <= site < size:
        raise IndexError(f"site {site} out of range for {size} sites")
    eta = -np.eye(size)
    eta[site, site] = 1.0
    return eta


def _as_decomposition(h) -> SpectralDecomposition:
    if isinstance(h, SpectralDecomposition):
        return h
    return spectral_decompose(h)


def otoc_exact(h, n: int, m: int, t):
    """OTOC between sites n and m, from the four-term operator expression.

    The average is over the one-magnon state localized on n, and
    eta_m(t) = U^dag eta_m U with U = exp(-iHt).  Accepts a Hamiltonian or
    a precomputed decomposition; t may be a scalar or an array.
    """
    dec = _as_decomposition(h)
    size = dec.size
    if n == m:
        raise ValueError("source and probe sites must differ")
    for s in (n, m):
        if not 0 <= s < size:
            raise IndexError(f"site {s} out of range for {size} sites")

    scalar = np.ndim(t) == 0
    u = dec.propagator(np.atleast_1d(np.asarray(t, dtype=float)))
    w = u.conj().transpose(0, 2, 1) @ eta_operator(m, size) @ u
    v = eta_operator(n, size)
    psi = np.zeros((size, 1))
    psi[n, 0] = 1.0

    def expect(*ops):
        vec = psi
        for op in reversed(ops):
            vec = op @ vec
        return vec[..., n, 0]

    c = 0.5 * (expect(v, w, w, v) + expect(w, v, v, w) - expect(w, v, w, v) - expect(v, w, v, w))
    residue = np.max(np.abs(c.imag))
    if residue > 1e-12:
        raise ArithmeticError(f"OTOC has imaginary residue {residue:.3g}")
    c = c.real
    return float(c[0]) if scalar else c


def transition_probability(h, n: int, m: int, t):
    """|<m| exp(-iHt) |n>|^2 from the dense propagator."""
    dec = _as_decomposition(h)
    psi = np.zeros(dec.size)
    psi[n] = 1.0
    amp = dec.evolve(psi, np.asarray(t, dtype=float))[..., m]
    return np.abs(amp) ** 2


@dataclass(frozen=True)
class AsymmetryProbe:
    forward: np.ndarray = field(repr=False)
    backward: np.ndarray = field(repr=False)
    max_gap: float


def asymmetry_probe(h, n: int, d: int, times) -> AsymmetryProbe:
    """Compare the OTOC towards n + d with the one towards n - d."""
    dec = _as_decomposition(h)
    size = dec.size
    if int(d) != d or d < 1 or 2 * d >= size:
        raise ValueError(f"displacement must satisfy 1 <= d < N/2, got {d}")
    forward = otoc_exact(dec, n, (n + d) % size, times)
    backward = otoc_exact(dec, n, (n - d) % size, times)
    return AsymmetryProbe(forward=forward, backward=backward,
                          max_gap=float(np.max(np.abs(forward - backward))))


@dataclass(frozen=True)
class G2Result:
    g2: float
    numerator: float
    denominator: float
    site: int

    @property
    def blockade_trivial(self) -> bool:
        """True when the probed mode is empty, so the ratio is 0/0."""
        return self.denominator == 0.0


def _fock_state(state, size_hint=None) -> dict[tuple[int, ...], complex]:
    if isinstance(state, Mapping):
        return {tuple(int(x) for x in occ): complex(amp) for occ, amp in state.items()}
    amps = np.asarray(state, dtype=complex)
    if amps.ndim != 1:
        raise ValueError("one-magnon amplitudes must be a 1-D array")
    size = amps.size
    out = {}
    for j, amp in enumerate(amps):
        if amp != 0:
            occ = [0] * size
            occ[j] = 1
            out[tuple(occ)] = amp
    return out or {(0,) * size: 0j}


def _annihilate(state: dict, site: int) -> dict:
    out: dict[tuple[int, ...], complex] = {}
    for occ, amp in state.items():
        k = occ[site]
        if k == 0:
            continue
        lowered = occ[:site] + (k - 1,) + occ[site + 1:]
        out[lowered] = out.get(lowered, 0j) + amp * np.sqrt(k)
    return out


def _norm2(state: dict) -> float:
    return float(sum(abs(a) ** 2 for a in state.values()))


def g2_zero(state, site: int | None = None) -> G2Result:
    """Equal-time second-order correlation <a^dag2 a^2> / <a^dag a>^2 of one site.

    ``state`` is either an array of one-magnon amplitudes over the sites or a
    mapping from occupation tuples to amplitudes.  Any component with more
    than one magnon in total is rejected.  Without ``site`` the most
    occupied site is probed.
    """
    fock = _fock_state(state)
    sizes = {len(occ) for occ in fock}
    if len(sizes) != 1:
        raise ValueError("all occupation tuples must have the same length")
    size = sizes.pop()
    for occ, amp in fock.items():
        if amp != 0 and (min(occ) < 0 or sum(occ) > 1):
            raise ValueError(f"component {occ} lies outside the 0/1-magnon sectors")

    norm = _norm2(fock)
    if site is None:
        occupations = [_norm2(_annihilate(fock, j)) for j in range(size)]
        site = int(np.argmax(occupations))
    scale = 1.0 / norm if norm > 0 else 0.0
    single = _annihilate(fock, site)
    numerator = _norm2(_annihilate(single, site)) * scale
    denominator = (_norm2(single) * scale) ** 2
    g2 = numerator / denominator if denominator > 0 else 0.0
    return G2Result(g2=g2, numerator=numerator, denominator=denominator, site=site)


@dataclass(frozen=True)
class CrossValidationReport:
    max_abs_error: float
    n_comparisons: int
    n_sites: int
    passed: bool
    worst: tuple[int, int, float] | None = None


def cross_validate(params: ModelParams, n_sites: int, pairs: Sequence[tuple[int, int]], times,
                   hamiltonian: OneMagnonHamiltonian | None = None,
                   strict: bool = True) -> CrossValidationReport:
    """Check the exact OTOC against the engine's plane-wave propagator formula.

    ``pairs`` are 0-based (source, probe) sites.  Pass ``hamiltonian`` to test a
    modified chain.  With ``strict`` any discrepancy of 1e-10 or more raises.
    """
    from .otoc import lattice_propagator_otoc

    if n_sites > MAX_DENSE_SITES:
        raise ValueError(f"n_sites={n_sites} exceeds the dense budget of {MAX_DENSE_SITES}")
    chain = params.with_(n=n_sites)
    h = hamiltonian if hamiltonian is not None else build_chain_hamiltonian(chain)
    dec = spectral_decompose(h)
    times = np.asarray(times, dtype=float)

    max_err, worst, count = 0.0, None, 0
    for n, m in pairs:
        exact = otoc_exact(dec, n, m, times)
        formula = lattice_propagator_otoc(chain, m - n, times).c
        err = np.abs(exact - formula)
        i = int(np.argmax(err))
        if err[i] > max_err or worst is None:
            max_err, worst = float(err[i]), (n, m, float(times[i]))
        count += err.size
    report = CrossValidationReport(max_abs_error=max_err, n_comparisons=count, n_sites=n_sites,
                                   passed=max_err < ORACLE_TOL, worst=worst)
    if strict and not report.passed:
        raise OracleMismatchError(
            f"oracle mismatch {max_err:.3g} at (n, m, t) = {worst} for N={n_sites}")
    return report
