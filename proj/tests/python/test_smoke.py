import math

import numpy as np
import pytest

import hoelderflow as hf


def test_version():
    assert hf.__version__


def test_fbm_covariance_closed_form():
    q = np.eye(1)
    assert hf.fbm_covariance(1.0, 1.0, 0.75, q)[0, 0] == pytest.approx(1.0)
    assert hf.fbm_covariance(1.0, 2.0, 0.75, q)[0, 0] == pytest.approx(math.sqrt(2.0))


def test_fbm_sample_deterministic_and_pinned():
    a = hf.fbm_sample(hurst=0.75, steps=64, seed=7)
    b = hf.fbm_sample(hurst=0.75, steps=64, seed=7)
    assert a.path.values[0, 0] == 0.0
    np.testing.assert_array_equal(a.path.values, b.path.values)
    assert a.method_used == "circulant"
    assert not a.fallback


def test_holder_seminorm_identity_path():
    t = np.linspace(0.0, 1.0, 257).reshape(-1, 1)
    path = hf.SampledPath(0.0, 1.0 / 256.0, t, 0.9)
    assert hf.holder_seminorm(path, 0.5, 0.0, 1.0) == pytest.approx(1.0)


def test_young_integral_against_calculus():
    n = 1 << 12
    ts = np.linspace(0.0, 1.0, n + 1)
    w = hf.SampledPath(0.0, 1.0 / n, (ts**2).reshape(-1, 1), 0.95)
    g = hf.as_integrand(hf.SampledPath(0.0, 1.0 / n, ts.reshape(-1, 1), 0.95), 0.95)
    result = hf.young_integral_rs(g, w, 0.0, 1.0)
    assert result.extrapolated[0] == pytest.approx(2.0 / 3.0, abs=1e-6)
    frac = hf.young_integral_fracrep(g, w, 0.0, 1.0, hf.FracOrder(0.45))
    assert frac[0] == pytest.approx(2.0 / 3.0, abs=1e-3)


def test_matrix_exponential_and_margin():
    a = np.array([[-2.0, 1.0], [0.0, -2.0]])
    e = hf.matrix_exp(a, 1.0)
    expected = math.exp(-2.0) * np.array([[1.0, 1.0], [0.0, 1.0]])
    np.testing.assert_allclose(e, expected, atol=1e-12)
    assert hf.spectral_abscissa(a) == pytest.approx(-2.0)
    assert hf.estimate_M(a, 1.0).m_const >= 1.0


def test_doss_solver_matches_closed_form():
    w = hf.fbm_sample(hurst=0.75, horizon=2.0, steps=1024, seed=3).path
    traj = hf.doss_solve(lambda_=1.0, gamma=0.5, omega=w, u0=0.7)
    i = 512
    t = traj.t0 + i * traj.dt
    expected = 0.7 * math.exp(-t + 0.5 * w.values[i, 0])
    assert traj.values[i, 0] == pytest.approx(expected, rel=1e-10)
    min_slack, ok = hf.doss_bound_check(traj, 1.0, 0.5, omega=w, u0=0.7)
    assert ok


def test_gronwall_and_eps_hat():
    eh = hf.eps_hat_max(1.0, 0.5)
    assert eh == pytest.approx(math.exp(-0.5))
    v = [2.0 * 0.3 * math.exp(-n) for n in range(20)]
    hyp_ok, concl_ok, slack = hf.gronwall_check(v, 0.3, 2.0, 1.0, 0.5, eh)
    assert hyp_ok and concl_ok
    assert slack >= -1e-12


def test_stability_iteration_smoke():
    spec = hf.CatalogSpec()
    spec.name = "quadratic"
    spec.a = np.array([[-1.2]])
    spec.rho = 1.0
    pair = hf.make_catalog_field(spec)
    lin = hf.split_linearization(pair)
    kit = hf.CutoffKit()
    bound = hf.HoelderBoundMap(lin, pair)
    omega = hf.fbm_sample(hurst=0.75, horizon=5.0, steps=5 * 128, seed=11,
                          beta_prime=0.73).path
    params = hf.StabilityParams(1.0, 0.5, hf.eps_hat_max(1.0, 0.5), 0.7, 0.73,
                                0.485, 4, np.array([1e-6]))
    report = hf.iterate_unit_intervals(lin, pair, kit, params, omega, bound)
    assert not report.escaped
    assert not any(report.cutoff_active)
    assert report.fitted_rate > report.theorem_rate - 0.1
    consistent, dist = hf.uncut_consistency(lin, pair, params, omega, report)
    assert consistent
    assert dist <= 1e-6
