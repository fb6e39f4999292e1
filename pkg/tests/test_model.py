import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from qidiode.model import (
    DegenerateVelocityError,
    ModelParams,
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

UNIT = ModelParams(j1=1.0, j2=0.5, d=1.0, a=1.0, a0=1.0, n=10)

params_strategy = st.builds(
    ModelParams,
    j1=st.floats(0.1, 5.0),
    j2=st.floats(0.0, 3.0),
    d=st.floats(-4.0, 4.0),
    a=st.sampled_from([1e-3, 0.1, 1.0]),
    a0=st.sampled_from([0.5, 1.0, 2.0]),
    n=st.integers(2, 200),
)


class TestParams:
    @pytest.mark.parametrize("bad", [dict(j1=0.0), dict(j2=-0.1), dict(a=0.0), dict(a0=-1.0),
                                     dict(n=1), dict(n=2.5), dict(zeta_decay=0.0),
                                     dict(d=float("nan"))])
    def test_invalid_rejected(self, bad):
        with pytest.raises(ValueError):
            ModelParams(**bad)

    def test_negative_dmi_allowed(self):
        assert ModelParams(d=-2.0).d == -2.0

    def test_defaults_are_reference_parameters(self):
        p = ModelParams()
        assert (p.j1, p.j2, p.d, p.a, p.a0, p.n) == (1.0, 0.5, 1.0, 1e-3, 1.0, 1000)


@pytest.mark.parametrize("e_y, g_me, expected", [(0.0, 0.7, 0.0), (2.0, 0.5, 1.0), (-2.0, 0.5, -1.0)])
def test_dmi_from_field(e_y, g_me, expected):
    assert dmi_from_field(e_y, g_me) == expected


class TestDispersion2D:
    def test_zero_momentum(self):
        for b in (+1, -1):
            assert dispersion_2d(UNIT, 0.0, 0.0, b) == 0.0

    def test_zone_edge_without_dmi(self):
        # gamma1 = 0, gamma2 = -1
        assert dispersion_2d(UNIT.with_(d=0.0), np.pi, 0.0) == pytest.approx(4.0, abs=1e-14)

    def test_diagonal_point(self):
        assert dispersion_2d(UNIT, np.pi / 2, np.pi / 2, "+") == pytest.approx(4.0, abs=1e-14)

    @settings(max_examples=50, deadline=None)
    @given(params_strategy, st.floats(-10, 10), st.floats(-10, 10))
    def test_mirror(self, p, x, y):
        kx, ky = x / p.a, y / p.a
        assert dispersion_2d(p, kx, ky, +1) == dispersion_2d(p, -kx, ky, -1)

    def test_y_axis_reciprocal(self):
        ky = np.linspace(-np.pi, np.pi, 101)
        np.testing.assert_array_equal(dispersion_2d(UNIT, 0.0, ky, +1), dispersion_2d(UNIT, 0.0, ky, -1))


class TestDispersion1D:
    def test_hand_values(self):
        assert dispersion_1d(UNIT, np.pi / 2, +1) == pytest.approx(4.0, abs=1e-14)
        assert dispersion_1d(UNIT, np.pi / 2, -1) == pytest.approx(2.0, abs=1e-14)

    @pytest.mark.parametrize("j1", [0.5, 1.0, 3.0])
    def test_zero_momentum_equals_j1(self, j1):
        assert dispersion_1d(UNIT.with_(j1=j1), 0.0) == pytest.approx(j1, abs=1e-15)

    def test_differs_from_2d_cut_by_j1(self):
        k = np.linspace(-np.pi, np.pi, 37)
        np.testing.assert_allclose(dispersion_1d(UNIT, k) - dispersion_2d(UNIT, k, 0.0), UNIT.j1,
                                   atol=1e-14)

    @settings(max_examples=50, deadline=None)
    @given(params_strategy, st.floats(-4, 4))
    def test_branch_gap(self, p, ka):
        k = ka / p.a
        gap = dispersion_1d(p, k, +1) - dispersion_1d(p, k, -1)
        assert gap == pytest.approx(2 * p.d * math.sin(ka), abs=1e-13)

    def test_bad_branch(self):
        with pytest.raises(ValueError):
            dispersion_1d(UNIT, 0.0, 0)


class TestGroupVelocity:
    def test_at_zero(self):
        assert group_velocity_1d(UNIT, 0.0, +1) == pytest.approx(1.0)
        assert group_velocity_1d(UNIT, 0.0, -1) == pytest.approx(-1.0)

    def test_asymmetry_at_zero_is_2da(self):
        p = UNIT.with_(a=0.25, d=0.7)
        gap = group_velocity_1d(p, 0.0, +1) - group_velocity_1d(p, 0.0, -1)
        assert gap == pytest.approx(2 * p.d * p.a)

    def test_quarter_zone(self):
        assert group_velocity_1d(UNIT, np.pi / 2, +1) == pytest.approx(2.0)

    def test_reciprocal_limit(self):
        k = np.linspace(-3, 3, 11)
        p = UNIT.with_(d=0.0)
        np.testing.assert_array_equal(group_velocity_1d(p, k, +1), group_velocity_1d(p, k, -1))

    @settings(max_examples=30, deadline=None)
    @given(params_strategy)
    def test_matches_central_difference(self, p):
        k = np.linspace(-np.pi, np.pi, 200) / p.a
        h = 1e-6
        for b in (+1, -1):
            fd = (dispersion_1d(p, k + h, b) - dispersion_1d(p, k - h, b)) / (2 * h)
            np.testing.assert_allclose(group_velocity_1d(p, k, b), fd, rtol=0, atol=1e-8)


class TestBragg:
    @pytest.mark.parametrize("m0, a0, expected", [(1, 1.0, np.pi), (3, 1.0, 3 * np.pi), (2, 0.5, 4 * np.pi)])
    def test_values(self, m0, a0, expected):
        assert bragg_wavevector(m0, a0) == pytest.approx(expected, rel=1e-15)

    @pytest.mark.parametrize("m0", [0, -1, 1.5])
    def test_rejects(self, m0):
        with pytest.raises(ValueError):
            bragg_wavevector(m0, 1.0)


def _brute_force_left(p, k_plus):
    """Root of omega(-D, k) = omega(+D, k_plus) away from the mirror root -k_plus."""
    target = dispersion_1d(p, k_plus, +1)
    f = lambda k: dispersion_1d(p, k, -1) - target  # noqa: E731
    period = 2 * np.pi / p.a
    grid = k_plus - period / 2 + period * np.linspace(0, 1, 4001)
    vals = f(grid)
    roots = [brentq(f, grid[i], grid[i + 1], xtol=1e-15 / p.a)
             for i in np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]]
    mirror = -k_plus
    # keep the root that is not the parity image of k_plus
    roots = [r for r in roots if abs(((r - mirror) * p.a + np.pi) % (2 * np.pi) - np.pi) > 1e-6]
    return roots


class TestLeftWavevector:
    def test_reciprocal_limit(self):
        assert left_wavevector(UNIT.with_(d=0.0), 1.3) == 1.3

    def test_hand_value(self):
        assert left_wavevector(UNIT.with_(d=2.0), np.pi) == pytest.approx(np.pi + np.pi / 2)

    @pytest.mark.parametrize("k_plus", [0.3, 1.0, 2.2, np.pi])
    def test_matches_root_finder(self, k_plus):
        roots = _brute_force_left(UNIT, k_plus)
        assert len(roots) == 1
        shift = (left_wavevector(UNIT, k_plus) - roots[0]) * UNIT.a
        assert abs((shift + np.pi) % (2 * np.pi) - np.pi) < 1e-9

    @settings(max_examples=50, deadline=None)
    @given(params_strategy, st.floats(0.0, 4.0))
    def test_frequency_match(self, p, ka):
        k_plus = ka / p.a
        k_minus = left_wavevector(p, k_plus)
        assert dispersion_1d(p, k_minus, -1) == pytest.approx(dispersion_1d(p, k_plus, +1), abs=1e-12)


class TestModeSet:
    def test_small_set(self):
        ms = build_mode_set(UNIT.with_(n=3))
        np.testing.assert_allclose(ms.k_plus, [np.pi, 2 * np.pi, 3 * np.pi])
        assert [m.m0 for m in ms] == [1, 2, 3]
        assert len(ms.modes) == 3

    def test_reciprocal(self):
        ms = build_mode_set(UNIT.with_(d=0.0))
        np.testing.assert_array_equal(ms.k_minus, ms.k_plus)

    def test_reference_span(self):
        ms = build_mode_set(ModelParams())
        ka = ms.k_plus * 1e-3
        assert ka[0] == pytest.approx(0.001 * np.pi)
        assert ka[-1] == pytest.approx(np.pi)
        assert len(ms) == 1000

    def test_frequencies_match_on_reference_set(self):
        p = ModelParams()
        ms = build_mode_set(p)
        mismatch = np.abs(dispersion_1d(p, ms.k_plus, +1) - dispersion_1d(p, ms.k_minus, -1))
        assert mismatch.max() < 1e-12
        np.testing.assert_array_equal(ms.omega, dispersion_1d(p, ms.k_plus, +1))


class TestSuppression:
    @pytest.mark.parametrize("d, expected", [(0.0, 1.0), (5.0, math.exp(-1)), (1.0, 0.8187307530779818)])
    def test_values(self, d, expected):
        assert suppression_rate(UNIT.with_(d=d)) == pytest.approx(expected, rel=1e-15)

    def test_override(self):
        assert suppression_rate(UNIT, 0.6) == 0.6
        for bad in (0.0, 1.2, -0.3):
            with pytest.raises(ValueError):
                suppression_rate(UNIT, bad)

    @given(st.floats(0, 50), st.floats(0, 50))
    def test_monotone(self, d1, d2):
        if d2 - d1 > 1e-9:  # below this exp() cannot resolve the difference
            assert suppression_rate(UNIT.with_(d=d1)) > suppression_rate(UNIT.with_(d=d2))

    def test_field_reversal_keeps_magnitude(self):
        assert suppression_rate(UNIT.with_(d=-2.0)) == suppression_rate(UNIT.with_(d=2.0))


class TestMaxTime:
    def test_large_dmi_scale(self):
        # v = a * D at k = 0, so D = 1000 gives v = 1
        p = ModelParams(n=1000, a=1e-3, d=1000.0)
        assert max_time(p, 0.0) == pytest.approx(1.0)

    def test_small_chain(self):
        # v = 2 at ka = pi/2 with a = 1
        assert max_time(UNIT.with_(n=10), np.pi / 2) == pytest.approx(5.0)

    def test_degenerate(self):
        with pytest.raises(DegenerateVelocityError):
            max_time(UNIT.with_(d=0.0), 0.0)
