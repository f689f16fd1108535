import math

import numpy as np
import pytest

from spinshuttle import (AdiabaticProtocol, PhysicalScales, QuadratureError,
                         SingularDesignError, StaProtocol,
                         adiabatic_design_report, phase_sigma, sample_controls,
                         spin_flip_length, spin_flip_time, sta_design_report,
                         validate)

SINGULAR_TF = math.sqrt(66.0 / 5.0)  # ~3.63318


class TestStaTrajectories:
    def test_xc_endpoints(self, sta_default):
        assert sta_default.xc(0.0) == 0.0
        assert sta_default.xc(8.0) == pytest.approx(10.0, abs=1e-12)

    def test_xc_midpoint(self, sta_default):
        assert sta_default.xc(4.0) == pytest.approx(5.0, abs=1e-12)

    def test_xc_quarter_point(self, sta_default):
        # 10*(10/64 - 15/256 + 6/1024) = 1060/1024, a dyadic rational
        assert sta_default.xc(2.0) == pytest.approx(1.03515625, abs=1e-14)

    def test_x0_endpoints_and_midpoint(self, sta_default):
        assert sta_default.x0(0.0) == pytest.approx(0.0, abs=1e-12)
        assert sta_default.x0(8.0) == pytest.approx(10.0, abs=1e-12)
        assert sta_default.x0(4.0) == pytest.approx(5.0, abs=1e-12)

    def test_x0_mirror_symmetry(self, sta_default):
        t = np.linspace(0.0, 8.0, 1001)
        assert np.max(np.abs(sta_default.x0(t) + sta_default.x0(8.0 - t) - 10.0)) < 1e-12

    def test_xc_mirror_symmetry(self, sta_default):
        t = np.linspace(0.0, 8.0, 1001)
        assert np.max(np.abs(sta_default.xc(t) + sta_default.xc(8.0 - t) - 10.0)) < 1e-12

    def test_ac_endpoints(self, sta_default):
        assert sta_default.ac(0.0) == 0.0
        assert abs(sta_default.ac(8.0)) < 1e-12

    def test_ac_midpoint_value(self, sta_default):
        # amplitude * s^3(s-1)^3 at s=1/2 reduces to 231*pi/2540
        assert sta_default.ac(4.0) == pytest.approx(231.0 * math.pi / 2540.0, abs=1e-12)

    def test_ac_symmetric(self, sta_default):
        t = np.linspace(0.0, 8.0, 1001)
        assert np.max(np.abs(sta_default.ac(t) - sta_default.ac(8.0 - t))) < 1e-12

    def test_alpha_midpoint_against_finite_differences(self, sta_default):
        # independent oracle: alpha = a_c + ac_ddot/omega^2 with ac_ddot from a
        # 5-point central difference of the implemented a_c
        h = 1e-2
        t = 4.0
        acdd = (-sta_default.ac(t - 2 * h) + 16 * sta_default.ac(t - h)
                - 30 * sta_default.ac(t) + 16 * sta_default.ac(t + h)
                - sta_default.ac(t + 2 * h)) / (12 * h * h)
        oracle = sta_default.ac(t) + acdd
        assert sta_default.alpha(t) == pytest.approx(oracle, abs=1e-8)
        # frozen value from symbolic differentiation of the closed form
        assert sta_default.alpha(t) == pytest.approx(0.17856985801654582, abs=1e-13)

    def test_alpha_boundary_and_symmetry(self, sta_default):
        assert abs(sta_default.alpha(0.0)) < 1e-12
        assert abs(sta_default.alpha(8.0)) < 1e-12
        t = np.linspace(0.0, 8.0, 1001)
        assert np.max(np.abs(sta_default.alpha(t) - sta_default.alpha(8.0 - t))) < 1e-12

    def test_alpha_peak_bounded(self, sta_default):
        t = np.linspace(0.0, 8.0, 20001)
        peak = np.max(np.abs(sta_default.alpha(t)))
        assert peak < 2.0
        assert peak == pytest.approx(0.17856985801654582, abs=1e-6)

    def test_derivatives_against_finite_differences(self, sta_default):
        h = 1e-3
        for t in (1.0, 3.3, 6.25):
            fd = (sta_default.xc(t + h) - sta_default.xc(t - h)) / (2 * h)
            assert sta_default.xc_dot(t) == pytest.approx(fd, abs=1e-5)
            fd2 = (sta_default.ac(t + h) - 2 * sta_default.ac(t) + sta_default.ac(t - h)) / h ** 2
            assert sta_default.ac_ddot(t) == pytest.approx(fd2, abs=1e-5)

    def test_auxiliary_equation_residuals(self, sta_default):
        # both defining relations hold identically for the closed forms
        t = np.linspace(0.0, 8.0, 10001)
        w2 = 1.0
        r1 = sta_default.xc_ddot(t) + w2 * (sta_default.xc(t) - sta_default.x0(t))
        r2 = sta_default.ac_ddot(t) + w2 * (sta_default.ac(t) - sta_default.alpha(t))
        assert np.max(np.abs(r1)) < 1e-10
        assert np.max(np.abs(r2)) < 1e-10

    def test_all_twelve_boundary_conditions(self, sta_default):
        p = sta_default
        for name in ("xc", "xc_dot", "xc_ddot", "ac", "ac_dot", "ac_ddot"):
            f = getattr(p, name)
            assert abs(f(0.0)) < 1e-12
            ref = 10.0 if name == "xc" else 0.0
            assert abs(f(8.0) - ref) < 1e-12

    def test_ac_amplitude_scales_inversely_with_d(self):
        a1 = StaProtocol(d=5.0, t_f=8.0).ac_amplitude
        a2 = StaProtocol(d=10.0, t_f=8.0).ac_amplitude
        assert a1 == pytest.approx(2.0 * a2, rel=1e-12)

    def test_range_check(self, sta_default):
        with pytest.raises(ValueError):
            sta_default.xc(-0.5)
        with pytest.raises(ValueError):
            sta_default.alpha(8.5)

    def test_singular_duration_rejected(self):
        with pytest.raises(SingularDesignError):
            StaProtocol(d=10.0, t_f=SINGULAR_TF)

    def test_invalid_parameters_rejected(self):
        with pytest.raises(ValueError):
            StaProtocol(d=0.0, t_f=8.0)
        with pytest.raises(ValueError):
            StaProtocol(d=10.0, t_f=-1.0)


class TestAdiabatic:
    def test_linear_ramp(self):
        p = AdiabaticProtocol(alpha0=1.0, d=10.0, t_f=100.0)
        assert p.x0(0.0) == 0.0
        assert p.x0(50.0) == pytest.approx(5.0)
        assert p.x0(100.0) == pytest.approx(10.0)
        assert p.alpha(37.0) == 1.0

    def test_ac_closed_form(self):
        p = AdiabaticProtocol(alpha0=0.7, d=10.0, t_f=8 * np.pi)
        assert p.ac(0.0) == 0.0
        assert p.ac(np.pi) == pytest.approx(1.4, rel=1e-12)  # 2*alpha0 at omega*t=pi
        assert abs(p.ac(8 * np.pi)) < 1e-12
        assert abs(p.ac_dot(8 * np.pi)) < 1e-12

    def test_controls_vectorized(self):
        p = AdiabaticProtocol(alpha0=1.0, d=10.0, t_f=100.0)
        t = np.linspace(0, 100.0, 11)
        x0, al = p.controls(t)
        assert np.allclose(x0, t / 10.0)
        assert np.all(al == 1.0)


class TestPhaseSigma:
    @pytest.mark.parametrize("d", [2.0, 10.0, 25.0])
    @pytest.mark.parametrize("t_f", [2.0, 8.0, 20.0])
    def test_sta_phase_is_quarter_turn(self, d, t_f):
        p = StaProtocol(d=d, t_f=t_f)
        assert phase_sigma(p) == pytest.approx(np.pi / 2, abs=1e-6)

    def test_sta_phase_nondefault_scales(self):
        sc = PhysicalScales(m=2.0, omega=0.5, hbar=3.0)
        p = StaProtocol(d=7.0, t_f=30.0, scales=sc)
        assert phase_sigma(p) == pytest.approx(np.pi / 2, abs=1e-6)

    def test_adiabatic_periodic_phase(self):
        # omega*t_f = 2*pi*k  ->  phase = m*alpha0*d/hbar
        p = AdiabaticProtocol(alpha0=0.2, d=4.0, t_f=6 * np.pi)
        assert phase_sigma(p, n_samples=20001) == pytest.approx(0.8, abs=1e-6)

    def test_zero_coupling_gives_zero_phase(self):
        p = AdiabaticProtocol(alpha0=0.0, d=10.0, t_f=20.0)
        assert phase_sigma(p) == 0.0

    def test_insufficient_samples_raise(self):
        p = AdiabaticProtocol(alpha0=1.0, d=10.0, t_f=100 * np.pi)
        with pytest.raises(QuadratureError):
            phase_sigma(p, n_samples=4001)

    def test_matches_integrated_phase(self, sta_default):
        from spinshuttle import integrate_auxiliary
        trace = integrate_auxiliary(sta_default, 8.0, 8001)
        assert phase_sigma(sta_default) == pytest.approx(trace.phi_sigma[-1], abs=1e-8)


class TestSpinFlipNumbers:
    def test_flip_length(self):
        assert spin_flip_length(1.0) == pytest.approx(np.pi / 2, rel=1e-12)
        assert spin_flip_length(2.0) == pytest.approx(np.pi / 4, rel=1e-12)

    def test_flip_length_zero_coupling(self):
        with pytest.raises(ValueError):
            spin_flip_length(0.0)

    def test_flip_time(self):
        p = AdiabaticProtocol(alpha0=1.0, d=10.0, t_f=100 * np.pi)
        assert spin_flip_time(p) == pytest.approx(0.157 * p.t_f, rel=1e-2)
        assert spin_flip_time(p) == pytest.approx(5 * np.pi ** 2, rel=1e-12)


class TestValidation:
    def test_singular_design_flagged(self):
        rep = sta_design_report(10.0, SINGULAR_TF)
        assert not rep.ok
        assert "singular" in rep.errors

    def test_healthy_sta_design(self):
        rep = sta_design_report(10.0, 8.0)
        assert rep.ok
        assert rep.details["alpha_peak"] == pytest.approx(0.178570, abs=1e-4)

    def test_adiabatic_reference_passes(self):
        rep = adiabatic_design_report(1.0, 10.0, 100 * np.pi)
        assert rep.ok and not rep.warnings
        assert rep.details["d_sp"] == pytest.approx(np.pi / 2, rel=1e-12)
        assert rep.details["adiabatic_bound"] == pytest.approx(7.0710678, abs=1e-6)

    def test_fast_adiabatic_warned(self):
        rep = adiabatic_design_report(1.0, 10.0, 5.0)
        assert "adiabaticity_violated" in rep.warnings

    def test_nonperiodic_duration_warned(self):
        rep = adiabatic_design_report(1.0, 10.0, 99.0)
        assert "residual_excitation" in rep.warnings

    def test_validate_dispatch(self, sta_default):
        assert validate(sta_default).kind == "sta"
        p = AdiabaticProtocol(alpha0=1.0, d=10.0, t_f=100 * np.pi)
        assert validate(p).kind == "adiabatic"


class TestControlTrace:
    def test_sampling_and_csv(self, sta_default, tmp_path):
        trace = sample_controls(sta_default, 101)
        assert len(trace.times) == 101
        assert trace.x0[0] == pytest.approx(0.0, abs=1e-12)
        assert trace.x0[-1] == pytest.approx(10.0, abs=1e-12)
        path = tmp_path / "controls.csv"
        trace.write_csv(path)
        header = path.read_text().splitlines()[0]
        assert header == "t,x0,alpha,xc,ac"
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        assert data.shape == (101, 5)
        # 17-significant-digit round trip
        assert data[50, 3] == trace.xc[50]
