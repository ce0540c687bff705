import math

import numpy as np
import pytest

from pcqed import (
    ConvergenceError,
    CouplingTrace,
    GenericProfile,
    generic_coupling,
    pulse_area,
    scaled_pair,
    trace_from_csv,
    trace_to_csv,
)

from conftest import LATTICE_GENERIC, OMEGA0_GENERIC, generic_family


def simpson_oracle(f, a, b, n_start=4096, max_doublings=8, tol=1e-12):
    """Brute-force composite Simpson with refinement until stable."""
    n = n_start
    prev = None
    for _ in range(max_doublings):
        xs = np.linspace(a, b, n + 1)
        ys = np.asarray(f(xs), dtype=float)
        h = (b - a) / n
        val = h / 3 * (ys[0] + ys[-1] + 4 * ys[1:-1:2].sum() + 2 * ys[2:-1:2].sum())
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val
        prev = val
        n *= 2
    return prev


class TestGenericCoupling:
    def test_peak_at_cavity_center(self, fig_family):
        t_peak = fig_family.path_half_length / fig_family.velocity
        assert generic_coupling(t_peak, fig_family) == pytest.approx(
            fig_family.omega0, rel=1e-12
        )

    def test_zero_at_half_lattice_offset(self, fig_family):
        t = (fig_family.path_half_length + fig_family.lattice_const / 2) / fig_family.velocity
        assert abs(generic_coupling(t, fig_family)) < 1e-6 * fig_family.omega0

    def test_entry_value(self, fig_family):
        # ten periods before the center: envelope e^-10, oscillation cos(10 pi) = 1
        assert generic_coupling(0.0, fig_family) == pytest.approx(
            fig_family.omega0 * math.exp(-10), rel=1e-9
        )

    def test_envelope_symmetry(self, fig_family):
        t_peak = fig_family.path_half_length / fig_family.velocity
        offsets = np.linspace(0, t_peak, 17)
        np.testing.assert_allclose(
            generic_coupling(t_peak + offsets, fig_family),
            generic_coupling(t_peak - offsets, fig_family),
            rtol=1e-12,
        )

    def test_zeta_scales_amplitude(self, fig_family):
        tilted = generic_family(zeta=math.pi / 3)
        t = np.linspace(0, 2e-8, 50)
        np.testing.assert_allclose(
            generic_coupling(t, tilted),
            0.5 * generic_coupling(t, fig_family),
            rtol=1e-12,
        )


class _Constant:
    def __init__(self, value):
        self.value = value

    def __call__(self, t):
        return self.value * np.ones_like(np.asarray(t, dtype=float))


class TestPulseArea:
    def test_constant_profile(self):
        assert pulse_area(_Constant(2.5), 0.0, 3.0) == pytest.approx(7.5, rel=1e-12)

    def test_zero_profile(self):
        assert pulse_area(_Constant(0.0), 0.0, 1.0) == pytest.approx(0.0, abs=1e-12)

    def test_full_transit_against_oracles(self, fig_family):
        profile = GenericProfile(fig_family)
        area = pulse_area(profile)
        # brute-force Simpson oracle on the same window
        t0, t1 = profile.window
        oracle = simpson_oracle(profile, t0, t1)
        assert area == pytest.approx(oracle, abs=1e-8)
        # analytic value of the truncated integral:
        # Omega0/V * 2 l (1 - e^-10) / (1 + pi^2)
        analytic = (
            OMEGA0_GENERIC
            / fig_family.velocity
            * 2
            * LATTICE_GENERIC
            * (1 - math.exp(-10))
            / (1 + math.pi**2)
        )
        assert area == pytest.approx(analytic, rel=1e-9)
        # order of magnitude quoted for this transit
        assert area == pytest.approx(2.9, abs=0.05)

    def test_linearity(self, fig_family):
        profile = GenericProfile(fig_family)
        scaled = scaled_pair(profile, 0.37)
        assert pulse_area(scaled) == pytest.approx(0.37 * pulse_area(profile), rel=1e-9)

    def test_inverse_velocity_scaling(self, fig_family):
        area_v = pulse_area(GenericProfile(fig_family))
        area_2v = pulse_area(GenericProfile(generic_family(velocity=866.0)))
        assert area_v == pytest.approx(2 * area_2v, rel=1e-9)

    def test_bad_window_rejected(self):
        with pytest.raises(ValueError):
            pulse_area(_Constant(1.0), 1.0, 1.0)

    def test_non_convergent_integrand(self):
        # violently oscillating integrand starves the subdivision budget
        f = lambda t: math.sin(1.0 / (t + 1e-12))
        with pytest.raises(ConvergenceError):
            pulse_area(f, 0.0, 1.0, tol=1e-13)


class TestScaledPair:
    def test_zero_factor(self, fig_family):
        profile = scaled_pair(GenericProfile(fig_family), 0.0)
        t = np.linspace(0, 2e-8, 7)
        np.testing.assert_allclose(profile(t), 0.0, atol=1e-30)

    def test_unit_factor(self, fig_family):
        base = GenericProfile(fig_family)
        same = scaled_pair(base, 1.0)
        t = np.linspace(0, 2e-8, 7)
        np.testing.assert_allclose(same(t), base(t), rtol=1e-12)

    def test_ratio_is_exact_in_area(self, fig_family):
        base = GenericProfile(fig_family)
        companion = scaled_pair(base, 0.414)
        assert pulse_area(companion) / pulse_area(base) == pytest.approx(0.414, rel=1e-9)

    def test_dipole_angle_realization(self, fig_family):
        companion = scaled_pair(GenericProfile(fig_family), 0.414)
        assert isinstance(companion, GenericProfile)
        assert math.cos(companion.params.zeta) == pytest.approx(0.414, rel=1e-12)

    def test_unphysical_ratio_warns_but_computes(self, fig_family):
        base = GenericProfile(fig_family)
        with pytest.warns(UserWarning):
            stretched = scaled_pair(base, 1.5)
        t = np.linspace(0, 2e-8, 7)
        np.testing.assert_allclose(stretched(t), 1.5 * base(t), rtol=1e-12)

    def test_trace_scaling(self):
        trace = CouplingTrace([0.0, 1.0, 2.0], [1.0, 2.0, 3.0])
        scaled = scaled_pair(trace, -0.5)
        np.testing.assert_allclose(scaled.values, [-0.5, -1.0, -1.5])


class TestCouplingTrace:
    def test_requires_increasing_times(self):
        with pytest.raises(ValueError):
            CouplingTrace([0.0, 0.0, 1.0], [1.0, 2.0, 3.0])

    def test_trapezoid_area(self):
        trace = CouplingTrace([0.0, 1.0, 2.0], [0.0, 1.0, 0.0])
        assert pulse_area(trace) == pytest.approx(1.0, rel=1e-12)

    def test_partial_window(self):
        trace = CouplingTrace([0.0, 1.0, 2.0], [1.0, 1.0, 1.0])
        assert pulse_area(trace, 0.25, 0.75) == pytest.approx(0.5, rel=1e-12)

    def test_csv_round_trip_real(self, tmp_path):
        trace = CouplingTrace([0.0, 1e-9, 2e-9], [1.0e6, -2.0e6, 0.5e6])
        back = trace_from_csv(trace_to_csv(trace, tmp_path / "t.csv"))
        np.testing.assert_array_equal(back.times, trace.times)
        np.testing.assert_array_equal(back.values, trace.values)

    def test_csv_round_trip_complex(self, tmp_path):
        trace = CouplingTrace([0.0, 1e-9], [1e6 + 2e6j, -3e6 + 0.5e6j])
        back = trace_from_csv(trace_to_csv(trace, tmp_path / "t.csv"))
        np.testing.assert_array_equal(back.values, trace.values)

    def test_interpolation_outside_is_zero(self):
        trace = CouplingTrace([1.0, 2.0], [5.0, 5.0])
        assert trace(0.0) == 0.0
        assert trace(3.0) == 0.0
