import math

import pytest

import wdiffuse as wd


def test_vartheta_basics():
    assert wd.vartheta(0.5, 0.5) > 0
    assert wd.vartheta(0.2, 0.5) == pytest.approx(wd.vartheta(0.8, 0.5), abs=1e-9)
    assert wd.theta_cdf(0.5, 0.5) == pytest.approx(0.5, abs=1e-8)
    value, err = wd.theta_cdf_oscillatory(0.3, 0.5)
    assert value == pytest.approx(wd.theta_cdf(0.3, 0.5), abs=1e-5)


def test_sampling_is_deterministic():
    a = wd.sample_random_means(0.5, 100, seed=3)
    b = wd.sample_random_means(0.5, 100, seed=3)
    assert a == b
    assert all(0 < x < 1 for x in a)

    xs = wd.sample_mk(0.5, 3, 50, seed=1)
    assert all(x[0] < x[1] < x[2] for x in xs)


def test_density_model():
    m = wd.DensityModel(0.5, 2)
    value, err, warn = m.rho([0.3, 0.7])
    assert value > 0
    assert math.isfinite(err)
    assert m.log_rho([0.3, 0.7]) == pytest.approx(math.log(value), abs=1e-5)
    g = m.log_rho_grad([0.3, 0.7])
    # reflection antisymmetry at a symmetric point
    assert g[0] == pytest.approx(-g[1], rel=1e-3)


def test_hierarchy_and_rho_tilde():
    h = wd.check_hierarchy(0.4, 1, [0.5], mc_budget=20000, seed=2)
    assert h["relative_error"] <= 0.1
    assert wd.rho_tilde(0.5, 1, [0.5]) == pytest.approx(
        1.0 / math.exp(math.lgamma(0.25) * 2 - math.lgamma(0.5)) * 0.25 ** (-0.75),
        rel=1e-10,
    )


def test_measures_and_distance():
    atoms = wd.project_particles([0.0, 0.5, 1.0], [1 / 3, 1 / 3, 1 / 3], 3)
    assert atoms == sorted(atoms)
    d = wd.wasserstein_distance([0.0], [0.5])
    assert d == pytest.approx(0.5, abs=1e-12)


def test_simulate():
    cfg = wd.SimConfig()
    cfg.k = 2
    cfg.beta = 0.5
    cfg.drift = wd.DriftKind.explicit_gaps
    cfg.dt = 1e-4
    cfg.horizon = 0.01
    cfg.n_traj = 2
    cfg.seed = 5
    trajs = wd.simulate(cfg)
    assert len(trajs) == 2
    for t in trajs:
        for state in t["states"]:
            assert state[0] < state[1]
    again = wd.simulate(cfg)
    assert trajs[0]["states"] == again[0]["states"]


def test_drift_explicit_sign():
    # k=1: drift = (beta/2 - 1)(1/x - 1/(1-x)) pulls toward the nearer edge.
    d = wd.drift_explicit(0.5, 1, [0.2])[0]
    assert d == pytest.approx((0.25 - 1) * (1 / 0.2 - 1 / 0.8), rel=1e-12)
