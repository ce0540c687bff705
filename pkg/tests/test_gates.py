import math

import numpy as np
import pytest

from pcqed import (
    AmplitudeVector,
    CalibrationError,
    CouplingTrace,
    ENTANGLER_HADAMARD,
    GateSettings,
    GateTarget,
    GenericProfile,
    NOT,
    PathSpec,
    PulseAreas,
    SWAP,
    Z,
    calibrate_velocity,
    closed_form_amplitudes,
    effective_interaction_time,
    fidelity,
    operation_time,
    photon_lifetime,
    truth_table,
)

from conftest import (
    LATTICE_2D,
    OMEGA_GENERIC,
    OMEGA_MM,
    generic_family,
)

P_STAR = math.sqrt(2.0) - 1.0
RATIO_NOT_TO_HADAMARD = math.sqrt(2.0) / math.hypot(1.0, 0.414)


class TestFidelity:
    def test_identical_states(self):
        psi = AmplitudeVector.from_amplitudes(1, np.array([0.6, 0.8j, 0.0]))
        assert fidelity(psi, psi) == pytest.approx(1.0, abs=1e-15)

    def test_orthogonal_kets(self):
        a = AmplitudeVector.basis_state("100")
        b = AmplitudeVector.basis_state("010")
        assert fidelity(a, b) == 0.0

    def test_basis_mismatch_rejected(self):
        with pytest.raises(ValueError):
            fidelity(AmplitudeVector.basis_state("100"), AmplitudeVector.basis_state("110"))

    def test_entangler_output_against_bell_target(self):
        target = AmplitudeVector.from_amplitudes(
            1, np.array([1.0, 1.0, 0.0]) / math.sqrt(2)
        )
        # exact ratio: the overlap is 1 up to rounding
        g_a = math.pi / math.hypot(1.0, P_STAR)
        state = AmplitudeVector.from_amplitudes(
            1, closed_form_amplitudes(PulseAreas(g_a, P_STAR * g_a))
        )
        assert fidelity(state, target) == pytest.approx(1.0, abs=1e-10)
        # quoted three-digit ratio: still essentially perfect
        g_a = math.pi / math.hypot(1.0, 0.414)
        state = AmplitudeVector.from_amplitudes(
            1, closed_form_amplitudes(PulseAreas(g_a, 0.414 * g_a))
        )
        assert fidelity(state, target) >= 0.9999


class TestCalibrateVelocity:
    def test_entangler_velocity(self, fig_family):
        v = calibrate_velocity(fig_family, 0.414, "ENTANGLER_HADAMARD")
        assert v == pytest.approx(433.0, rel=0.03)

    def test_rail_swap_velocity(self, fig_family):
        v = calibrate_velocity(fig_family, 1.0, "NOT")
        assert v == pytest.approx(565.0, rel=0.03)

    def test_velocity_ratio_is_exact(self, fig_family):
        v_had = calibrate_velocity(fig_family, 0.414, "ENTANGLER_HADAMARD")
        v_not = calibrate_velocity(fig_family, 1.0, "NOT")
        assert v_not / v_had == pytest.approx(RATIO_NOT_TO_HADAMARD, rel=1e-9)

    def test_quoted_velocity_pairs_consistent(self):
        # one calibrated family, three quoted operating pairs
        for v_had, v_not, tol in ((433.0, 565.0, 0.015), (374.0, 490.0, 0.015), (353.0, 459.0, 0.015)):
            assert v_had * RATIO_NOT_TO_HADAMARD == pytest.approx(v_not, rel=tol)

    def test_peak_rabi_scales_velocity(self, fig_family):
        doubled = generic_family().__class__(
            omega0=2 * fig_family.omega0,
            path_half_length=fig_family.path_half_length,
            defect_radius=fig_family.defect_radius,
            lattice_const=fig_family.lattice_const,
            velocity=fig_family.velocity,
            zeta=fig_family.zeta,
        )
        v1 = calibrate_velocity(fig_family, 1.0, "NOT", v_bounds=(100.0, 1300.0))
        v2 = calibrate_velocity(doubled, 1.0, "NOT", v_bounds=(100.0, 1300.0))
        assert v2 == pytest.approx(2 * v1, rel=1e-12)

    def test_phase_flip_calibration(self, fig_family):
        v = calibrate_velocity(fig_family, 0.0, "Z")
        # single-atom area pi condition
        assert 150 <= v <= 650

    def test_ratio_mismatch_rejected(self, fig_family):
        with pytest.raises(ValueError):
            calibrate_velocity(fig_family, 0.5, "ENTANGLER_HADAMARD")
        with pytest.raises(ValueError):
            calibrate_velocity(fig_family, 0.9, "NOT")

    def test_no_solution_reports_candidates(self, fig_family):
        with pytest.raises(CalibrationError) as err:
            calibrate_velocity(fig_family, 0.414, "ENTANGLER_HADAMARD", v_bounds=(150.0, 160.0))
        assert len(err.value.candidates) > 0

    def test_trace_family(self, fig_family):
        profile = GenericProfile(fig_family)
        t0, t1 = profile.window
        ts = np.linspace(t0, t1, 4001)
        trace = CouplingTrace(ts, np.abs(profile(ts)), velocity=fig_family.velocity)
        v = calibrate_velocity(trace, 1.0, "NOT", v_bounds=(150.0, 3000.0))
        # magnitude drive has no sign cancellation: much larger area, so a
        # higher odd multiple (same 1/V law)
        assert 150.0 <= v <= 3000.0

    def test_trace_without_velocity_rejected(self):
        trace = CouplingTrace([0.0, 1.0], [1.0, 1.0])
        with pytest.raises(ValueError):
            calibrate_velocity(trace, 1.0, "NOT")


def settings_for(target, p, fig_velocity, engine_q=1e8):
    family = generic_family(velocity=fig_velocity)
    v = calibrate_velocity(family, p, target)
    profile = GenericProfile(family.replace_velocity(v))
    return GateSettings(
        target=target,
        profile_a=profile,
        p=p,
        velocity=v,
        omega_cav=OMEGA_GENERIC,
        q_factor=engine_q,
    )


class TestTruthTable:
    @pytest.mark.parametrize("engine", ["analytic", "ode"])
    def test_entangler(self, engine):
        report = truth_table(settings_for(ENTANGLER_HADAMARD, 0.414, 433.0), engine)
        assert report.fidelities["10"] >= 0.99
        assert report.fidelities["01"] >= 0.99
        assert report.global_phase == pytest.approx(math.pi, abs=0.05)
        assert abs(report.relative_phases["01"]) <= 0.05
        assert report.classified_label == "ENTANGLER_HADAMARD"

    @pytest.mark.parametrize("engine", ["analytic", "ode"])
    def test_rail_swap(self, engine):
        report = truth_table(settings_for(NOT, 1.0, 433.0), engine)
        assert report.fidelities["10"] >= 0.99
        assert report.fidelities["01"] >= 0.99
        assert report.classified_label == "NOT"

    def test_phase_flip(self):
        report = truth_table(settings_for(Z, 0.0, 433.0), "analytic")
        assert report.fidelities["10"] >= 0.99
        assert report.fidelities["01"] >= 0.99
        assert report.classified_label == "Z"
        # -|10>, +|01> relative to the target's own signs: phases agree
        assert abs(report.relative_phases["01"]) <= 1e-6

    def test_swap_reports_outer_inputs(self):
        report = truth_table(settings_for(SWAP, 1.0, 433.0), "ode")
        assert report.classified_label == "SWAP"
        assert report.fidelities["00"] == 1.0
        # measured double-excitation return: (2 + cos(sqrt(3) pi))^2 / 9
        frozen = ((2 + math.cos(math.sqrt(3) * math.pi)) / 3) ** 2
        assert report.fidelities["11"] == pytest.approx(frozen, abs=1e-6)
        assert any("measured" in note for note in report.notes)
        # the no-excitation input keeps phase 0 while the rails flip sign
        assert abs(abs(report.relative_phases["00"]) - math.pi) <= 0.05

    def test_misratioed_gate_declassified(self, fig_family):
        v = calibrate_velocity(fig_family, 1.0, "NOT")
        profile = GenericProfile(fig_family.replace_velocity(v))
        report = truth_table(
            GateSettings(
                target=ENTANGLER_HADAMARD,
                profile_a=profile,
                p=1.0,
                velocity=v,
                omega_cav=OMEGA_GENERIC,
            ),
            "analytic",
        )
        assert report.classified_label is None

    def test_classification_is_global_phase_invariant(self):
        # same dynamics judged against a target rotated by a common phase
        rotated = GateTarget(
            "NOT", (("10", (0.0, -1.0)), ("01", (-1.0, 0.0)))
        )
        base = truth_table(settings_for(NOT, 1.0, 433.0), "analytic")
        settings = settings_for(NOT, 1.0, 433.0)
        settings = GateSettings(
            target=rotated,
            profile_a=settings.profile_a,
            p=settings.p,
            velocity=settings.velocity,
            omega_cav=settings.omega_cav,
        )
        flipped = truth_table(settings, "analytic")
        assert flipped.classified_label == "NOT"
        for key in ("10", "01"):
            assert flipped.fidelities[key] == pytest.approx(base.fidelities[key], abs=1e-12)
            assert abs(flipped.relative_phases[key]) == pytest.approx(
                abs(base.relative_phases[key]), abs=1e-9
            )
        assert abs(flipped.global_phase - base.global_phase) == pytest.approx(
            math.pi, abs=1e-9
        )

    def test_lifetime_margin_present(self):
        report = truth_table(settings_for(NOT, 1.0, 433.0), "analytic")
        tau = photon_lifetime(1e8, OMEGA_GENERIC)
        assert report.lifetime_margin == pytest.approx(tau / report.operation_time, rel=1e-12)

    def test_entangler_only_near_p_star(self, fig_family):
        # sweep the coupling ratio at the rail condition; the worst-case rail
        # fidelity peaks at the silver-ratio point
        ps = np.linspace(0.3, 0.5, 401)
        def min_fid(p):
            g_a = math.pi / math.hypot(1.0, p)
            u_col0 = closed_form_amplitudes(PulseAreas(g_a, p * g_a))
            out0 = AmplitudeVector.from_amplitudes(1, u_col0)
            t0 = AmplitudeVector.from_amplitudes(1, np.array([1, 1, 0]) / math.sqrt(2))
            u_col1 = closed_form_amplitudes(PulseAreas(p * g_a, g_a))  # exchange symmetry
            out1 = AmplitudeVector.from_amplitudes(
                1, [u_col1[1], u_col1[0], u_col1[2]]
            )
            t1 = AmplitudeVector.from_amplitudes(1, np.array([1, -1, 0]) / math.sqrt(2))
            return min(fidelity(out0, t0), fidelity(out1, t1))

        fids = [min_fid(p) for p in ps]
        best = ps[int(np.argmax(fids))]
        assert abs(best - 0.41421) <= 0.005

    def test_full_rail_transfer_needs_equal_couplings(self):
        # |b| = (p / (1 + p^2)) |cos(Lambda) - 1| touches 1 only at p = 1 and
        # Lambda an odd multiple of pi; a grid search finds no other point
        ps = np.linspace(0.0, 1.0, 201)[:, None]
        lams = np.linspace(0.0, 4 * math.pi, 801)[None, :]
        b = (ps / (1 + ps**2)) * np.abs(np.cos(lams) - 1.0)
        assert float(np.max(b)) <= 1.0 + 1e-12
        near = np.argwhere(b >= 0.999)
        for i, j in near:
            assert abs(ps[i, 0] - 1.0) <= 0.05
            lam = lams[0, j]
            assert min(abs(lam - math.pi), abs(lam - 3 * math.pi)) <= 0.1


class TestTimes:
    def test_generic_transit(self, fig_family):
        t = operation_time(fig_family)
        assert t == pytest.approx(2 * 10 * fig_family.lattice_const / 433.0, rel=1e-12)
        assert t == pytest.approx(29e-9, rel=0.02)

    def test_velocity_halves_time(self, fig_family):
        fast = fig_family.replace_velocity(866.0)
        assert operation_time(fast) == pytest.approx(operation_time(fig_family) / 2, rel=1e-12)

    def test_effective_interaction_under_20ns(self, fig_family):
        assert effective_interaction_time(fig_family) < 20e-9

    def test_millimeter_wave_transit(self):
        # ten lattice periods of a 2.202 mm crystal at 374 m/s
        path = PathSpec(
            entry=(0.0, 0.0, 0.0),
            direction=(1.0, 0.0, 0.0),
            length=10 * LATTICE_2D,
            velocity=374.0,
        )
        t = operation_time(path)
        assert 50e-6 <= t <= 60e-6

    def test_lifetime_margin_at_quality_1e8(self):
        tau = photon_lifetime(1e8, OMEGA_MM)
        hadamard_time = 10 * LATTICE_2D / 374.0
        assert tau / hadamard_time >= 5.0

    def test_operation_time_rejects_other_types(self):
        with pytest.raises(TypeError):
            operation_time(3.0)
