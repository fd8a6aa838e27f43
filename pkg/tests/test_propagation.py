import numpy as np
import pytest

from afcsim import (
    AbsorptionProfile,
    CombParams,
    FrequencyGrid,
    InhomogeneousLine,
    ValidationError,
    acausal_energy_fraction,
    analytic_efficiency,
    build_line_profile,
    delay_trace,
    discrete_atom_oracle,
    echo_efficiency,
    gaussian_pulse,
    grid_for_comb,
    impulse_response,
    kk_phase,
    parametric_comb,
    propagate,
)
from afcsim.comb import comb_depth

# exact first-Fourier-coefficient constants for gaussian teeth (periodized
# gaussian of FWHM delta/F, peak depth d): average depth = C_AVG * d / F and
# the first-harmonic dephasing exponent is 2 * K_G / F^2
C_AVG = 0.5 * np.sqrt(np.pi / np.log(2.0))
K_G = np.pi**2 / (4.0 * np.log(2.0))


def uniform_profile(depth_value, span=4.0, n=1024):
    grid = FrequencyGrid(span_mhz=span, n_points=n)
    return AbsorptionProfile(
        grid=grid, depth=np.full(n, depth_value), background_depth=depth_value
    )


class TestKKPhase:
    def test_vacuum_has_zero_phase(self):
        profile = uniform_profile(0.0)
        assert np.allclose(kk_phase(profile), 0.0)

    def test_uniform_background_has_zero_phase(self):
        profile = uniform_profile(0.7)
        assert np.allclose(kk_phase(profile), 0.0, atol=1e-12)

    def test_lorentzian_gives_dispersive_counterpart(self):
        # Hilbert pair of a/(1+u^2) is a*u/(1+u^2), u = 2x/fwhm
        fwhm, depth = 10.0, 0.8
        grid = FrequencyGrid(span_mhz=500.0, n_points=8192)
        profile = build_line_profile(
            InhomogeneousLine(shape="lorentzian", fwhm_mhz=fwhm, peak_depth=depth),
            grid,
        )
        phase = kk_phase(profile)
        x = grid.detunings()
        u = 2.0 * x / fwhm
        expected = (depth / 2.0) * u / (1.0 + u**2)
        assert np.allclose(phase, expected, atol=6e-3 * depth)
        assert abs(np.interp(0.0, x, phase)) < 1e-6
        # antisymmetric about line center
        assert np.allclose(phase + phase[::-1], 0.0, atol=1e-12)

    def test_non_decayed_edges_warn_and_apodize(self):
        grid = FrequencyGrid(span_mhz=20.0, n_points=1024)
        profile = build_line_profile(
            InhomogeneousLine(shape="lorentzian", fwhm_mhz=10.0, peak_depth=1.0),
            grid,
        )
        with pytest.warns(UserWarning):
            phase = kk_phase(profile)
        assert np.all(np.isfinite(phase))


class TestCausality:
    def test_comb_impulse_response_is_causal(self, paper_comb):
        profile = parametric_comb(paper_comb, grid_for_comb(paper_comb))
        h, _ = impulse_response(profile)
        assert acausal_energy_fraction(h) < 1e-6

    def test_gaussian_line_is_causal(self):
        grid = FrequencyGrid(span_mhz=5000.0, n_points=4096)
        profile = build_line_profile(
            InhomogeneousLine(shape="gaussian", fwhm_mhz=2000.0, peak_depth=0.9),
            grid,
        )
        h, _ = impulse_response(profile, n_bins=2**15)
        assert acausal_energy_fraction(h) < 1e-8


class TestPropagate:
    def test_transparent_profile_is_identity(self, input_pulse):
        out = propagate(input_pulse, uniform_profile(0.0), pad_factor=4)
        assert np.allclose(out.samples, input_pulse.samples, atol=1e-12)

    def test_uniform_absorber_beer_lambert(self, input_pulse):
        # amplitude scales by exp(-d/2) = exp(-0.45) ~ 0.6376
        out = propagate(input_pulse, uniform_profile(0.9), pad_factor=4)
        ratio = np.abs(out.samples).max() / np.abs(input_pulse.samples).max()
        assert ratio == pytest.approx(np.exp(-0.45), rel=1e-9)

    def test_echo_appears_one_period_after_input(self, paper_comb, input_pulse):
        profile = parametric_comb(paper_comb, grid_for_comb(paper_comb))
        out = propagate(input_pulse, profile)
        report = echo_efficiency(out, input_pulse, input_pulse.centroid_us() + 8.0)
        delay = report.echo_time_us - input_pulse.centroid_us()
        assert abs(delay - 8.0) <= max(input_pulse.dt_us, 0.075)

    def test_efficiency_matches_analytic_square(self, paper_comb, input_pulse):
        profile = parametric_comb(paper_comb, grid_for_comb(paper_comb))
        out = propagate(input_pulse, profile)
        report = echo_efficiency(out, input_pulse, input_pulse.centroid_us() + 8.0)
        eta = analytic_efficiency(paper_comb)
        assert eta == pytest.approx(0.0328, abs=0.0005)
        assert report.echo_efficiency == pytest.approx(eta, rel=0.05)

    def test_background_scales_efficiency_by_beer_lambert(self, input_pulse):
        base = dict(delta_mhz=0.125, finesse=4.0, bandwidth_mhz=2.0, peak_depth=0.9)
        etas = {}
        for d0 in (0.0, 0.3):
            params = CombParams(**base, background_depth=d0)
            profile = parametric_comb(params, grid_for_comb(params))
            out = propagate(input_pulse, profile)
            rep = echo_efficiency(out, input_pulse, input_pulse.centroid_us() + 8.0)
            etas[d0] = rep.echo_efficiency
        assert etas[0.3] / etas[0.0] == pytest.approx(np.exp(-0.3), rel=1e-3)

    def test_gaussian_teeth_match_exact_fourier_oracle(self, input_pulse):
        params = CombParams(delta_mhz=0.125, finesse=4.0, bandwidth_mhz=2.0,
                            peak_depth=0.9, tooth_shape="gaussian")
        profile = parametric_comb(params, grid_for_comb(params))
        out = propagate(input_pulse, profile)
        rep = echo_efficiency(out, input_pulse, input_pulse.centroid_us() + 8.0)
        d_avg = C_AVG * params.peak_depth / params.finesse
        eta_exact = d_avg**2 * np.exp(-d_avg) * np.exp(-2 * K_G / params.finesse**2)
        assert rep.echo_efficiency == pytest.approx(eta_exact, rel=0.02)

    def test_refuses_clipped_spectrum(self):
        # 50 ns pulse is ~9 MHz wide, far beyond a 2 MHz grid
        pulse = gaussian_pulse(fwhm_us=0.05, peak_time_us=2.0, dt_us=0.005,
                               n_samples=1024)
        grid = FrequencyGrid(span_mhz=2.0, n_points=512)
        profile = AbsorptionProfile(grid=grid, depth=np.zeros(512))
        with pytest.raises(ValidationError):
            propagate(pulse, profile)

    def test_passivity_over_random_profiles(self, input_pulse):
        rng = np.random.default_rng(7)
        e_in = input_pulse.energy
        for _ in range(10):
            grid = FrequencyGrid(span_mhz=6.0, n_points=4096)
            x = grid.detunings()
            depth = np.zeros(grid.n_points)
            for _ in range(rng.integers(1, 4)):
                c = rng.uniform(-2, 2)
                w = rng.uniform(0.3, 3.0)
                a = rng.uniform(0.05, 1.5)
                depth += a * np.exp(-4 * np.log(2) * (x - c) ** 2 / w**2)
            profile = AbsorptionProfile(grid=grid, depth=depth)
            out = propagate(input_pulse, profile, pad_factor=8)
            assert out.energy <= e_in * (1.0 + 1e-9)


class TestDelayTrace:
    def test_integer_sample_delay(self, input_pulse):
        moved = delay_trace(input_pulse, 2.5)
        assert moved.centroid_us() == pytest.approx(
            input_pulse.centroid_us() + 2.5, abs=1e-6
        )

    def test_fractional_delay(self, input_pulse):
        moved = delay_trace(input_pulse, 1.2345)
        assert moved.centroid_us() == pytest.approx(
            input_pulse.centroid_us() + 1.2345, abs=1e-4
        )
        assert moved.energy == pytest.approx(input_pulse.energy, rel=1e-9)


class TestEchoEfficiencyWindows:
    def test_transparent_medium_reports_zero_echo(self, input_pulse):
        out = propagate(input_pulse, uniform_profile(0.0), pad_factor=4)
        rep = echo_efficiency(out, input_pulse, input_pulse.centroid_us() + 8.0)
        assert rep.echo_efficiency == pytest.approx(0.0, abs=1e-12)
        assert rep.transmitted_fraction == pytest.approx(1.0, abs=1e-5)

    def test_overlapping_window_refused(self, input_pulse):
        out = propagate(input_pulse, uniform_profile(0.0), pad_factor=4)
        with pytest.raises(ValidationError):
            echo_efficiency(out, input_pulse, input_pulse.centroid_us() + 1.0)


class TestAnalyticEfficiency:
    def test_zero_depth_gives_zero(self):
        params = CombParams(delta_mhz=0.125, finesse=4.0, bandwidth_mhz=2.0,
                            peak_depth=0.0)
        assert analytic_efficiency(params) == 0.0

    def test_forward_retrieval_maximum(self):
        # (d/F)^2 exp(-d/F) peaks at d/F = 2 with value 4 e^-2 ~ 0.541
        params = CombParams(delta_mhz=0.125, finesse=200.0, bandwidth_mhz=2.0,
                            peak_depth=400.0)
        assert analytic_efficiency(params) == pytest.approx(4 * np.exp(-2), rel=1e-3)

    def test_bounded_by_forward_retrieval_limit(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            params = CombParams(
                delta_mhz=0.125,
                finesse=float(rng.uniform(1.01, 50)),
                bandwidth_mhz=2.0,
                peak_depth=float(rng.uniform(0, 30)),
                tooth_shape=str(rng.choice(["square", "gaussian", "lorentzian"])),
                background_depth=float(rng.uniform(0, 1)),
            )
            assert analytic_efficiency(params) <= 0.55


class TestDiscreteAtomOracle:
    def test_zero_atoms_is_identity(self, input_pulse):
        out = discrete_atom_oracle([], input_pulse)
        assert np.array_equal(out.samples, input_pulse.samples)

    def test_single_atom_produces_tail_but_no_echo(self, input_pulse):
        out = discrete_atom_oracle([(0.0, 0.05)], input_pulse)
        t = out.times()
        tp = input_pulse.centroid_us()
        diff = np.abs(out.samples - input_pulse.samples)
        tail = diff[(t > tp + 2.0) & (t < tp + 6.0)]
        assert tail.max() > 0  # free-induction tail exists
        echo_win = (t > tp + 7.0) & (t < tp + 9.0)
        mid_win = (t > tp + 3.0) & (t < tp + 5.0)
        e_echo = (np.abs(out.samples[echo_win]) ** 2).sum()
        e_mid = (np.abs(out.samples[mid_win]) ** 2).sum()
        assert e_echo < 3.0 * e_mid  # one frequency cannot rephase

    def test_comb_of_atoms_rephases_at_one_over_delta(self, input_pulse):
        dets = np.arange(-8, 9) * 0.125
        atoms = [(float(d), 0.01) for d in dets]
        out = discrete_atom_oracle(atoms, input_pulse)
        t = out.times()
        tp = input_pulse.centroid_us()
        burst = (np.abs(out.samples[(t > tp + 7.0) & (t < tp + 9.0)]) ** 2).sum()
        gap = (np.abs(out.samples[(t > tp + 3.0) & (t < tp + 5.0)]) ** 2).sum()
        assert burst > 1e3 * gap

    def test_atom_cap(self, input_pulse):
        atoms = np.column_stack([np.linspace(-1, 1, 10_001),
                                 np.full(10_001, 1e-5)])
        with pytest.raises(ValidationError):
            discrete_atom_oracle(atoms, input_pulse)

    def test_thin_medium_matches_propagate(self, input_pulse):
        params = CombParams(delta_mhz=0.125, finesse=4.0, bandwidth_mhz=2.0,
                            peak_depth=0.06)
        profile = parametric_comb(params, grid_for_comb(params))
        out_p = propagate(input_pulse, profile)
        f = np.linspace(-1.5, 1.5, 4001)
        df = f[1] - f[0]
        weights = comb_depth(params, f) * df
        atoms = np.column_stack([f, weights])
        out_a = discrete_atom_oracle(atoms, input_pulse)
        peak = np.abs(input_pulse.samples).max()
        assert np.abs(out_p.samples - out_a.samples).max() <= 0.01 * peak
