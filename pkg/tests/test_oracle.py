import math
import warnings

import numpy as np
import pytest
from scipy.optimize import brentq

from pbgspec.errors import GridMismatch, NormDrift, StepTooLarge, TruncationWarning, ValidationError
from pbgspec.oracle import (
    ModeComb,
    Trajectory,
    build_comb,
    comb_trajectory,
    compare_spectra,
    discretized_mode_evolve,
    edge_tail_amplitude,
    edge_tail_integral,
    solve_volterra,
    spectrum_from_trajectory,
)
from pbgspec.reservoir import DomModel, dom_cumulative
from pbgspec.spectra import EmitterConfig, FrequencyGrid, Spectrum, eval_grid

GRID = FrequencyGrid(-6, 6, 241)


def _bound_state_population(delta_g):
    """|b2(inf)|**2 for the isotropic edge with g = 1 and no Markovian decay."""
    x0 = brentq(lambda x: x + 1 / math.sqrt(delta_g - x), -10.0, min(0.0, delta_g) - 1e-12)
    return (1 + 0.5 * (delta_g - x0) ** -1.5) ** -2


class TestVolterra:
    def test_markov_decay(self):
        cfg = EmitterConfig.lambda_type(DomModel.isotropic(0.0), g=0.0)
        traj = solve_volterra(cfg, 10.0, 0.01)
        np.testing.assert_allclose(np.abs(traj.b2) ** 2, np.exp(-traj.t), atol=1e-6)

    def test_rabi_oscillation_without_reservoirs(self):
        cfg = EmitterConfig.driven(DomModel.isotropic(0.0), 1.0, 0.0, gamma=0.0, g=0.0)
        traj = solve_volterra(cfg, 5.0, 0.001)
        np.testing.assert_allclose(traj.excited_population, 1.0, atol=1e-9)
        np.testing.assert_allclose(np.abs(traj.b2) ** 2, np.cos(traj.t) ** 2, atol=1e-6)

    @pytest.mark.parametrize("delta_g", [1.0, 3.0])
    def test_fractional_trapping(self, delta_g):
        cfg = EmitterConfig.lambda_type(DomModel.isotropic(delta_g), gamma=0.0)
        traj = solve_volterra(cfg, 60.0, 0.01)
        late = np.abs(traj.b2[-500:]) ** 2
        assert late.min() > 0.1
        assert late.mean() == pytest.approx(_bound_state_population(delta_g), abs=2e-3)

    def test_truncation_warning(self):
        cfg = EmitterConfig.lambda_type(DomModel.isotropic(0.0))
        traj = solve_volterra(cfg, 2.0, 0.01)
        with pytest.warns(TruncationWarning):
            spectrum_from_trajectory(traj, GRID)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            spectrum_from_trajectory(traj, GRID, trapping=True)

    def test_step_check(self):
        cfg = EmitterConfig.lambda_type(DomModel.isotropic(0.0))
        solve_volterra(cfg, 5.0, 0.01, check_convergence=True)
        with pytest.raises(StepTooLarge):
            solve_volterra(cfg.with_model(delta_g=0.0), 5.0, 0.5, check_convergence=True)

    @pytest.mark.parametrize("t_max, dt", [(0.0, 0.01), (1.0, 0.0), (1.0, -0.1)])
    def test_bad_steps(self, t_max, dt):
        with pytest.raises(ValidationError):
            solve_volterra(EmitterConfig.lambda_type(DomModel.isotropic(0.0)), t_max, dt)

    def test_trajectory_length_checked(self):
        with pytest.raises(ValidationError):
            Trajectory(0.1, np.zeros(5, dtype=complex), 1.0, 1.0)


class TestTail:
    @pytest.mark.parametrize("y", [-1.3, -0.2, 0.0, 0.4, 2.0])
    def test_tail_integral_against_quadrature(self, y):
        from scipy import integrate
        t_max = 20.0
        f_re = integrate.quad(lambda t: t ** -1.5, t_max, np.inf, weight="cos", wvar=y)[0] if y else None
        f_im = integrate.quad(lambda t: t ** -1.5, t_max, np.inf, weight="sin", wvar=y)[0] if y else 0.0
        if y == 0.0:
            f_re = 2 / math.sqrt(t_max)
        assert edge_tail_integral(y, t_max) == pytest.approx(complex(f_re, f_im), abs=1e-8)

    def test_no_tail_without_edge_coupling(self):
        cfg = EmitterConfig.lambda_type(DomModel.isotropic(0.0), g=0.0)
        assert edge_tail_amplitude(solve_volterra(cfg, 20.0, 0.02)) is None

    def test_tail_improves_smoothed_edge(self):
        cfg = EmitterConfig.lambda_type(DomModel.smoothed(0.0, 0.3))
        grid = FrequencyGrid(-0.5, 0.5, 11)
        ref = eval_grid(cfg, grid)
        traj = solve_volterra(cfg, 40.0, 0.02)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            plain = compare_spectra(ref, spectrum_from_trajectory(traj, grid, tail_correction=False))
            fixed = compare_spectra(ref, spectrum_from_trajectory(traj, grid))
        assert edge_tail_amplitude(traj) is not None
        assert fixed < plain / 3


class TestComb:
    def test_weights_follow_density(self):
        model = DomModel.smoothed(-1.0, 0.3)
        comb = build_comb(model, 1.0, spacing=0.05, bandwidth=10.0)
        assert len(comb) == 200
        assert np.sum(comb.couplings ** 2) == pytest.approx(dom_cumulative(model, 10.0), rel=1e-12)
        assert comb.level_shift < 0

    def test_delta_defect_is_one_mode(self):
        comb = build_comb(DomModel.delta_defect(0.0, 1.5, -2.0), 0.0)
        assert comb.frequencies.tolist() == [-2.0] and comb.couplings.tolist() == [1.5]
        assert comb.defect_frequency == -2.0 and comb.defect_coupling == 1.5

    def test_lorentzian_sub_comb(self):
        comb = build_comb(DomModel.lorentzian_defect(0.0, 1.0, -2.0, 1.0), 0.0)
        assert len(comb) == 2 * 10 * 40
        assert np.sum(comb.couplings ** 2) == pytest.approx(2 / math.pi * math.atan(20.0), rel=1e-12)

    def test_invalid(self):
        with pytest.raises(ValidationError):
            build_comb(DomModel.isotropic(0.0), 1.0, spacing=0.0)
        with pytest.raises(ValidationError):
            ModeComb(np.zeros(2), np.ones(3))

    def test_jaynes_cummings(self):
        cfg = EmitterConfig.lambda_type(DomModel.delta_defect(0.0, 1.0, 0.0), gamma=0.0, g=0.0)
        traj = comb_trajectory(cfg, build_comb(cfg.model, 0.0), 20.0, 0.01)
        np.testing.assert_allclose(np.abs(traj.b2) ** 2, np.cos(traj.t) ** 2, atol=1e-6)

    def test_trapping_matches_volterra(self):
        cfg = EmitterConfig.lambda_type(DomModel.isotropic(3.0), gamma=0.0)
        traj = comb_trajectory(cfg, build_comb(cfg.model, 1.0), 60.0, 0.02)
        late = np.abs(traj.b2[-250:]) ** 2
        assert late.mean() == pytest.approx(_bound_state_population(3.0), abs=5e-3)

    def test_damped_norm_decays(self):
        cfg = EmitterConfig.lambda_type(DomModel.isotropic(0.0))
        _, norm = discretized_mode_evolve(cfg, build_comb(cfg.model, 1.0, spacing=0.05), GRID, 10.0, 0.02)
        assert norm[0] == pytest.approx(1.0) and np.all(np.diff(norm) <= 1e-12)

    def test_norm_drift_raised(self):
        cfg = EmitterConfig.lambda_type(DomModel.isotropic(0.0))
        comb = build_comb(cfg.model, 1.0, spacing=0.1)
        with pytest.raises(NormDrift):
            discretized_mode_evolve(cfg, comb, GRID, 5.0, 0.02, full_unitarity=True, markov_spacing=0.1)

    def test_full_unitarity_short_run(self):
        cfg = EmitterConfig.lambda_type(DomModel.isotropic(0.0))
        comb = build_comb(cfg.model, 1.0, spacing=0.1)
        _, norm = discretized_mode_evolve(cfg, comb, GRID, 5.0, 0.0025, full_unitarity=True,
                                          markov_spacing=0.1)
        assert np.max(np.abs(norm - 1)) < 1e-6


class TestCompare:
    def test_identity(self):
        spec = eval_grid(EmitterConfig.lambda_type(DomModel.isotropic(0.0)), GRID)
        assert compare_spectra(spec, spec, 0.1) == 0.0

    def test_grid_mismatch(self):
        cfg = EmitterConfig.lambda_type(DomModel.isotropic(0.0))
        with pytest.raises(GridMismatch):
            compare_spectra(eval_grid(cfg, GRID), eval_grid(cfg, FrequencyGrid(-6, 6, 240)), 0.1)

    def test_floor(self):
        grid = FrequencyGrid(0, 1, 3)
        a = Spectrum(grid, np.array([1.0, 0.01, 0.5]))
        b = Spectrum(grid, np.array([1.0, 0.02, 0.55]))
        assert compare_spectra(a, b, 0.1) == pytest.approx(0.05 / 0.55)
        assert compare_spectra(a, b, 0.0) == pytest.approx(0.5)


@pytest.mark.parametrize("points", [
    np.linspace(-6, 6, 1201),
    np.linspace(-0.5, 0.5, 11),
    np.array([0.3]),
    np.array([-2.0, 0.1, 0.15, 3.0]),
])
def test_projection_matches_direct_sum(points):
    from pbgspec.oracle import _project, _project_direct
    rng = np.random.default_rng(7)
    b2 = (rng.normal(size=3001) + 1j * rng.normal(size=3001)) * np.exp(-0.002 * np.arange(3001))
    want = _project_direct(b2.copy(), 0.02, points)
    got = _project(b2.copy(), 0.02, points)
    assert np.max(np.abs(got - want)) <= 1e-10 * np.max(np.abs(want))


FIG_GRID = FrequencyGrid(-6, 6, 601)


@pytest.fixture(scope="module", params=[4, 7, 8])
def fig_runs(request):
    """Fig-parameter oracle runs at the horizon the figures need (t_max = 150)."""
    from pbgspec.presets import figure_config
    cfg = figure_config(request.param, "dotted")
    volterra = {dt: spectrum_from_trajectory(solve_volterra(cfg, 150.0, dt), FIG_GRID) for dt in (0.02, 0.01)}
    comb, _ = discretized_mode_evolve(cfg, build_comb(cfg.model, cfg.g, spacing=0.01), FIG_GRID, 150.0, 0.02)
    return cfg, volterra, comb


def test_halving_dt(fig_runs):
    _, volterra, _ = fig_runs
    assert compare_spectra(volterra[0.02], volterra[0.01], 0.1) < 0.01


def test_oracles_agree(fig_runs):
    _, volterra, comb = fig_runs
    assert compare_spectra(volterra[0.01], comb, 0.1) < 0.05


def test_oracle_zeros_on_catalogue(fig_runs):
    from pbgspec.darklines import predict_dark_lines
    cfg, volterra, _ = fig_runs
    s = volterra[0.01].values
    x = FIG_GRID.points
    i = np.arange(1, len(s) - 1)
    dips = x[i[(s[i] < s[i - 1]) & (s[i] < s[i + 1]) & (s[i] < 1e-3 * s.max())]]
    predicted = sorted(d.position for d in predict_dark_lines(cfg) if d.present)
    assert len(dips) == len(predicted)
    assert np.all(np.abs(np.sort(dips) - predicted) <= FIG_GRID.spacing)
