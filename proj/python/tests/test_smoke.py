import json
import math

import numpy as np
import pytest

import iwsl


def test_importance_weight_values():
    params = iwsl.WeightParams(epsilon=3.0, sigma_obs=1.0)
    assert iwsl.importance_weight(5.0, params) == 1.0
    assert iwsl.importance_weight(1.0, params) == pytest.approx(math.exp(-2.0), abs=1e-12)
    assert iwsl.hinge_cost(1.0, 3.0) == pytest.approx(2.0)


def test_environment_distance_and_weights():
    env = iwsl.Environment(json.dumps(
        {"dimension": 2, "obstacles": [{"type": "sphere", "center": [0.0, 0.0], "radius": 1.0}]}))
    assert env.distance(np.array([2.0, 0.0])) == pytest.approx(1.0)
    states = np.array([[3.0, 0.0, 0.0, 0.0], [1.1, 0.0, 0.0, 0.0]])
    w = iwsl.weight_trajectory(states, env, iwsl.WeightParams(0.3, 0.01))
    assert w[0] == 1.0
    assert w[1] < 1e-10


def test_estimate_states_is_exact_for_linear_motion():
    t = np.linspace(0.0, 1.0, 30)
    pos = np.stack([2.0 * t + 1.0, -t], axis=1)
    states, dt = iwsl.estimate_states(t.tolist(), pos, 10)
    assert dt == pytest.approx(0.1)
    assert states.shape == (11, 4)
    np.testing.assert_allclose(states[:, 2:], np.tile([2.0, -1.0], (11, 1)), atol=1e-10)


def test_batch_step_matches_normal_equations():
    rng = np.random.default_rng(0)
    d, k, lam = 3, 9, 1e-2
    x = rng.normal(size=(d, k))
    y = rng.normal(size=(d, k))
    w = rng.uniform(0.1, 1.0, size=k)
    xt = np.vstack([np.ones(k), x])
    phi, q, z, degenerate = iwsl.batch_estimate_step(xt, y, w, lam)
    W = np.diag(w)
    expected = y @ W @ xt.T @ np.linalg.inv(xt @ W @ xt.T + lam * np.eye(d + 1))
    np.testing.assert_allclose(phi, expected, rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(q, q.T, atol=1e-14)
    assert not degenerate
    assert z > 0.0


def test_incremental_matches_batch():
    rng = np.random.default_rng(1)
    n, d, k = 6, 2, 7
    demos = [rng.normal(size=(n + 1, d)) for _ in range(k)]
    batch = iwsl.learn_batch(demos, 0.1, lam=1e-6)
    learner = iwsl.IncrementalLearner.init_prior(n, d, alpha=1e6, beta=1e10)
    for demo in demos:
        learner.assimilate(demo, 0.1, np.ones(n + 1))
    inc = learner.extract_map()
    assert learner.demos_seen == k
    assert len(inc) == n
    for i in range(n):
        np.testing.assert_allclose(inc.phi_tilde(i), batch.phi_tilde(i), rtol=1e-8, atol=1e-10)


def test_prior_precision_is_block_tridiagonal():
    rng = np.random.default_rng(2)
    demos = [rng.normal(size=(6, 2)) for _ in range(8)]
    model = iwsl.learn_batch(demos, 0.1)
    prior = iwsl.GaussianTrajectoryPrior(model, np.zeros(2), 0.1 * np.eye(2))
    inv = np.linalg.inv(prior.dense_covariance())
    scale = np.abs(inv).max()
    for i in range(6):
        for j in range(6):
            if abs(i - j) > 1:
                assert np.abs(inv[2 * i:2 * i + 2, 2 * j:2 * j + 2]).max() <= 1e-8 * scale
    assert len(prior.sample(3, 7)) == 3


def test_start_anchor_moves_reproduction():
    rng = np.random.default_rng(3)
    demos = [rng.normal(size=(6, 2)) for _ in range(8)]
    model = iwsl.learn_batch(demos, 0.1)
    prior = iwsl.GaussianTrajectoryPrior(model, np.zeros(2), np.eye(2))
    target = np.array([0.5, -0.5])
    sol = iwsl.optimize_map(prior, [(0, target, 1e-8 * np.eye(2))])
    assert sol["converged"]
    np.testing.assert_allclose(sol["trajectory"][0], target, atol=1e-5)


def test_errors_are_translated():
    with pytest.raises(iwsl.Error):
        iwsl.IncrementalLearner.init_prior(3, 2, alpha=-1.0)
    with pytest.raises(iwsl.Error):
        iwsl.Environment(json.dumps({"dimension": 2, "obstacles": [{"type": "torus"}]}))
