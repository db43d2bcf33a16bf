import numpy as np
import pytest

from kbf import (
    ExperimentSpec,
    GridMismatch,
    InitialConditionSpec,
    ModelParams,
    NonPositiveError,
    error_norm,
    make_grid,
    observed_order,
    report_from_csv,
    report_from_text,
    report_to_csv,
    report_to_text,
    spatial_convergence_study,
    temporal_convergence_study,
    to_spectral,
)

TWO_PI = 2.0 * np.pi


# ----- order estimation -----

def test_observed_order_simple():
    assert observed_order([4.0, 1.0]) == [2.0]
    assert observed_order([8.0, 4.0, 2.0]) == [1.0, 1.0]


def test_observed_order_recovers_synthetic_power_law():
    ns = np.array([10, 20, 40, 80], dtype=float)
    p = 2.37
    errors = 5.0 * ns**-p
    for order in observed_order(errors):
        assert order == pytest.approx(p, abs=1e-12)


def test_observed_order_other_refinement_factor():
    errors = [27.0, 1.0]
    assert observed_order(errors, refinement_factor=3.0) == [3.0]


def test_observed_order_rejects_bad_input():
    with pytest.raises(NonPositiveError):
        observed_order([1.0])
    with pytest.raises(NonPositiveError):
        observed_order([1.0, 0.0])


# ----- error norm -----

def test_error_norm_identical_states(rng):
    g = make_grid(16, 0.0, TWO_PI)
    s = to_spectral(rng.standard_normal(16), g)
    assert error_norm(s, s) == 0.0


def test_error_norm_constant_offset():
    g = make_grid(64, 0.0, TWO_PI)
    a = to_spectral(np.full(64, 0.6), g)
    b = to_spectral(np.full(64, 0.5), g)
    assert error_norm(a, b) == pytest.approx(0.1 * np.sqrt(TWO_PI), rel=1e-12)


def test_error_norm_cross_grid_band_limited():
    coarse = make_grid(32, 0.0, TWO_PI)
    fine = make_grid(256, 0.0, TWO_PI)
    f = lambda x: 0.2 + 0.3 * np.sin(2 * x) - 0.1 * np.cos(5 * x)
    a = to_spectral(f(coarse.points), coarse)
    b = to_spectral(f(fine.points), fine)
    assert error_norm(a, b) < 1e-12


def test_error_norm_interpolation_disabled():
    a = to_spectral(np.zeros(16), make_grid(16, 0.0, TWO_PI))
    b = to_spectral(np.zeros(32), make_grid(32, 0.0, TWO_PI))
    with pytest.raises(GridMismatch):
        error_norm(a, b, allow_interpolation=False)


def test_error_norm_different_domains_rejected():
    a = to_spectral(np.zeros(16), make_grid(16, 0.0, TWO_PI))
    b = to_spectral(np.zeros(32), make_grid(32, 0.0, np.pi))
    with pytest.raises(GridMismatch):
        error_norm(a, b)


# ----- studies -----

def _study_spec(full_params, grid256, axis, scheme="strang"):
    return ExperimentSpec(
        params=full_params,
        grid=grid256,
        initial_condition=InitialConditionSpec(kind="paper"),
        t_final=1.0,
        scheme=scheme,
        axis=axis,
    )


def test_temporal_study_exact_when_linear(grid256):
    params = ModelParams(nu=1.0, mu=1.0, gamma=1.0)
    spec = ExperimentSpec(
        params=params,
        grid=grid256,
        initial_condition=InitialConditionSpec(kind="paper"),
        t_final=1.0,
        axis=(10, 20, 40),
    )
    report = temporal_convergence_study(spec, quality="standard")
    assert max(report.errors) <= 1e-10
    assert report.orders == ()  # below the order floor


def test_temporal_study_canonical_orders(full_params, grid256):
    report = temporal_convergence_study(
        _study_spec(full_params, grid256, (12, 24, 48, 96, 192, 384))
    )
    assert len(report.orders) == 5
    for order in report.orders:
        assert 1.85 <= order <= 2.15
    # errors decrease monotonically along the ladder
    for a, b in zip(report.errors[:-1], report.errors[1:]):
        assert b < a


def test_temporal_study_lie_trotter_first_order(full_params, grid256):
    report = temporal_convergence_study(
        _study_spec(full_params, grid256, (12, 24, 48, 96, 192, 384), scheme="lie_trotter")
    )
    for order in report.orders:
        assert 0.8 <= order <= 1.2


def test_spatial_study_band_limited_ic(full_params, grid256):
    spec = _study_spec(full_params, grid256, (8, 16, 32))
    report = spatial_convergence_study(spec)
    errs = report.errors
    for a, b in zip(errs[:-1], errs[1:]):
        if a > 1e-10:
            assert a / b >= 10.0
    assert errs[-1] < 1e-10


def test_spatial_study_heat_only(grid256):
    # single-mode dynamics: already exact at N=8
    spec = ExperimentSpec(
        params=ModelParams(nu=1.0),
        grid=grid256,
        initial_condition=InitialConditionSpec(kind="paper"),
        t_final=1.0,
        axis=(8,),
    )
    report = spatial_convergence_study(spec)
    assert report.errors[0] <= 1e-10


def test_spatial_study_rejects_reference_collision(full_params, grid256):
    spec = _study_spec(full_params, grid256, (8, 256))
    with pytest.raises(ValueError):
        spatial_convergence_study(spec)


def test_study_determinism(full_params, grid256):
    spec = _study_spec(full_params, grid256, (24, 48))
    a = temporal_convergence_study(spec)
    b = temporal_convergence_study(spec)
    assert a == b
    assert report_to_csv(a) == report_to_csv(b)


def test_threaded_study_matches_serial(full_params, grid256, monkeypatch):
    spec = _study_spec(full_params, grid256, (24, 48, 96))
    serial = temporal_convergence_study(spec)
    monkeypatch.setenv("KBF_THREADS", "3")
    threaded = temporal_convergence_study(spec)
    assert serial == threaded


# ----- report serialization -----

def test_report_round_trips(full_params, grid256):
    report = temporal_convergence_study(_study_spec(full_params, grid256, (24, 48, 96)))
    assert report_from_csv(report_to_csv(report)) == report
    assert report_from_text(report_to_text(report)) == report


def test_spatial_report_round_trips(full_params, grid256):
    report = spatial_convergence_study(_study_spec(full_params, grid256, (8, 16)))
    assert report_from_csv(report_to_csv(report)) == report
    assert report_from_text(report_to_text(report)) == report
