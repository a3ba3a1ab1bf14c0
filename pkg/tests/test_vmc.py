import dataclasses

import numpy as np
import pytest

from stagising import ed
from stagising.params import ModelParams
from stagising.vmc import (LookupTableAnsatz, MeanFieldAnsatz, RbmAnsatz,
                           TrainConfig, local_energy, sample_chains, sr_update,
                           staggered_m2, train, train_restarts)


def random_sigma(rng, shape):
    return rng.choice(np.array([-1, 1], dtype=np.int8), size=shape)


def test_rbm_flip_ratios_match_amplitude_differences():
    rng = np.random.default_rng(0)
    ans = RbmAnsatz(6, density=2, rng=rng, init_scale=0.3)
    sigma = random_sigma(rng, (20, 6))
    ratios = ans.all_flip_ratios(sigma)
    base = ans.log_amplitude(sigma)
    for i in range(6):
        flipped = sigma.copy()
        flipped[:, i] *= -1
        direct = ans.log_amplitude(flipped) - base
        assert ratios[:, i] == pytest.approx(direct, abs=1e-10)
        assert ans.log_amplitude_ratio(sigma, i) == pytest.approx(direct, abs=1e-10)


def test_meanfield_flip_ratios():
    rng = np.random.default_rng(1)
    ans = MeanFieldAnsatz(5, rng=rng, init_scale=0.4)
    sigma = random_sigma(rng, (8, 5))
    for i in range(5):
        flipped = sigma.copy()
        flipped[:, i] *= -1
        direct = ans.log_amplitude(flipped) - ans.log_amplitude(sigma)
        assert ans.all_flip_ratios(sigma)[:, i] == pytest.approx(direct, abs=1e-12)


def test_rbm_parameter_gradient_finite_difference():
    rng = np.random.default_rng(2)
    ans = RbmAnsatz(4, density=2, rng=rng, init_scale=0.2)
    sigma = random_sigma(rng, (3, 4))
    grad = ans.parameter_gradient(sigma)
    theta = ans.get_parameters()
    h = 1e-6
    for k in range(ans.n_params):
        step = np.zeros_like(theta)
        step[k] = h
        ans.set_parameters(theta + step)
        hi = ans.log_amplitude(sigma)
        ans.set_parameters(theta - step)
        lo = ans.log_amplitude(sigma)
        ans.set_parameters(theta)
        assert grad[:, k] == pytest.approx((hi - lo) / (2 * h), abs=1e-6)


def test_parameter_round_trip():
    ans = RbmAnsatz(5, density=2, rng=np.random.default_rng(3))
    theta = ans.get_parameters()
    ans.set_parameters(np.arange(ans.n_params, dtype=float))
    assert ans.get_parameters() == pytest.approx(np.arange(ans.n_params))
    ans.set_parameters(theta)
    assert ans.get_parameters() == pytest.approx(theta)


def test_rbm_sweep_helper_matches_direct_ratios():
    rng = np.random.default_rng(4)
    ans = RbmAnsatz(8, density=2, rng=rng, init_scale=0.3)
    state = random_sigma(rng, (5, 8))
    helper = ans.sweep_helper(state.copy())
    for _ in range(20):
        sites = rng.integers(0, 8, size=5)
        got = helper.propose(sites)
        want = ans.all_flip_ratios(helper.state)[np.arange(5), sites]
        assert got == pytest.approx(want, abs=1e-12)
        rows = np.flatnonzero(rng.random(5) < 0.5)
        helper.accept(rows, sites[rows])


def test_lookup_ansatz_matches_ed_ordering():
    rng = np.random.default_rng(5)
    n = 4
    amps = rng.uniform(0.1, 1.0, size=2 ** n)
    ans = LookupTableAnsatz(amps, n)
    sigma = (2.0 * ed.site_configurations(n, 0.5)).astype(np.int8)
    assert ans.log_amplitude(sigma) == pytest.approx(np.log(amps))
    with pytest.raises(ValueError):
        LookupTableAnsatz(np.zeros(2 ** n), n)


def test_zero_variance_on_exact_ground_state():
    p = ModelParams(n=4, alpha=0.0, omega_x=0.4, omega_z=0.6)
    res = ed.ground_state(p)
    vec = res.eigenvectors[:, 0]
    vec *= np.sign(vec[np.argmax(np.abs(vec))])
    ans = LookupTableAnsatz(vec, 4)
    sigma = (2.0 * ed.site_configurations(4, 0.5)).astype(np.int8)
    e_loc = local_energy(ans, sigma, p)
    assert np.ptp(e_loc) < 1e-10
    assert e_loc[0] == pytest.approx(float(res.eigenvalues[0]), abs=1e-10)


def test_sr_step_vanishes_for_constant_local_energy():
    rng = np.random.default_rng(6)
    o = rng.standard_normal((40, 7))
    step = sr_update(o, np.full(40, -3.2), learning_rate=1.0)
    assert np.abs(step).max() < 1e-12


def test_sr_dual_equals_primal():
    rng = np.random.default_rng(7)
    e = rng.standard_normal(12)
    shift = 1e-3
    for b, p_dim in ((12, 30), (12, 5)):
        o = rng.standard_normal((b, p_dim))
        a = (o - o.mean(axis=0)) / np.sqrt(b)
        de = (e[:b] - e[:b].mean()) / np.sqrt(b)
        explicit = -np.linalg.solve(a.T @ a + shift * np.eye(p_dim), a.T @ de)
        got = sr_update(o, e[:b], learning_rate=1.0, diag_shift=shift)
        assert got == pytest.approx(explicit, abs=1e-10)


def test_sr_large_shift_is_plain_gradient():
    rng = np.random.default_rng(8)
    o = rng.standard_normal((20, 6))
    e = rng.standard_normal(20)
    a = (o - o.mean(axis=0)) / np.sqrt(20)
    de = (e - e.mean()) / np.sqrt(20)
    shift = 1e8
    got = sr_update(o, e, learning_rate=1.0, diag_shift=shift)
    assert got == pytest.approx(-(a.T @ de) / shift, rel=1e-6)


def test_sr_rejects_nonfinite():
    o = np.ones((4, 3))
    with pytest.raises(FloatingPointError):
        sr_update(o, np.array([1.0, np.nan, 0.0, 2.0]), 1.0)
    o[0, 0] = np.inf
    with pytest.raises(FloatingPointError):
        sr_update(o, np.zeros(4), 1.0)


def test_sampler_deterministic_and_shaped():
    ans = RbmAnsatz(6, rng=np.random.default_rng(9), init_scale=0.1)
    a = sample_chains(ans, 20, 3, seed=11)
    b = sample_chains(ans, 20, 3, seed=11)
    assert np.array_equal(a.configurations, b.configurations)
    assert np.array_equal(a.final_state, b.final_state)
    assert a.configurations.shape == (20, 3, 6)
    assert set(np.unique(a.configurations)) <= {-1, 1}
    assert 0.0 < a.acceptance_rate <= 1.0
    c = sample_chains(ans, 20, 3, seed=12)
    assert not np.array_equal(a.configurations, c.configurations)


def test_sampler_detailed_balance_enumeration():
    # N = 4: empirical visit frequencies against the exact |psi|^2
    rng = np.random.default_rng(10)
    ans = RbmAnsatz(4, density=1, rng=rng, init_scale=0.3)
    sigma = (2.0 * ed.site_configurations(4, 0.5)).astype(np.int8)
    log_psi = ans.log_amplitude(sigma)
    target = np.exp(2.0 * (log_psi - log_psi.max()))
    target /= target.sum()
    batch = sample_chains(ans, 4000, 4, seed=13)
    idx = ((batch.configurations.reshape(-1, 4) < 0)
           @ (2 ** np.arange(3, -1, -1)))
    counts = np.bincount(idx, minlength=16)
    freq = counts / counts.sum()
    # generous: samples are autocorrelated, so plain multinomial sigma is
    # an underestimate; total-variation distance is the robust summary
    tv = 0.5 * np.abs(freq - target).sum()
    assert tv < 0.05


def test_staggered_m2_bounds_and_neel():
    neel = np.array([(-1) ** i for i in range(10)], dtype=np.int8)
    assert staggered_m2(neel) == pytest.approx(0.25)
    assert staggered_m2(np.ones(10, dtype=np.int8)) == pytest.approx(0.0)
    rng = np.random.default_rng(14)
    m2 = staggered_m2(random_sigma(rng, (100, 10)))
    assert np.all((m2 >= 0.0) & (m2 <= 0.25))


def test_local_energy_requires_spin_half():
    ans = MeanFieldAnsatz(4)
    with pytest.raises(ValueError):
        local_energy(ans, np.ones((1, 4)), ModelParams(n=4, s=1.0))


def test_local_energy_clamp_counter():
    ans = MeanFieldAnsatz(4)
    ans.set_parameters(np.full(4, -40.0))
    stats = {}
    sigma = np.ones((1, 4), dtype=np.int8)     # flip ratios are all +80
    p = ModelParams(n=4, omega_x=0.1, omega_z=0.2)
    e = local_energy(ans, sigma, p, stats=stats)
    assert np.isfinite(e).all()
    assert stats["n_clamped"] == 4


def test_learning_rate_schedule():
    cfg = TrainConfig()
    assert cfg.learning_rate(0) == pytest.approx(0.1)
    assert cfg.learning_rate(75) == pytest.approx(0.5 * (0.1 + 6.0))
    assert cfg.learning_rate(150) == pytest.approx(6.0)
    assert cfg.learning_rate(160) == pytest.approx(6.0 * 0.999 ** 10)


def test_training_deterministic_for_fixed_seed():
    p = ModelParams(n=6, alpha=2.0, b=None, omega_x=0.2, omega_z=0.3)
    cfg = TrainConfig(n_iters=5, n_chains=2, n_samples=16, seed=21)
    r1 = train(p, cfg)
    r2 = train(p, cfg)
    assert np.array_equal(r1.energy_history, r2.energy_history)
    assert r1.energy == r2.energy
    assert np.array_equal(r1.ansatz.get_parameters(), r2.ansatz.get_parameters())


def test_training_beats_variational_bound_and_matches_ed():
    p = ModelParams(n=8, alpha=2.0, b=None, omega_x=0.2, omega_z=0.6)
    e0 = float(ed.ground_state(p).eigenvalues[0]) / 8
    cfg = TrainConfig(n_iters=200, n_warm=60, n_chains=4, n_samples=64,
                      seed=5)
    res = train(p, cfg)
    assert res.energy >= e0 - 3.0 * res.energy_error   # variational bound
    assert abs(res.energy - e0) / abs(e0) < 1e-2
    assert res.converged
    assert res.n_skipped_steps == 0


def test_train_restarts_selects_best():
    p = ModelParams(n=6, alpha=2.0, b=None, omega_x=0.3, omega_z=0.4)
    cfg = TrainConfig(n_iters=30, n_warm=10, n_chains=2, n_samples=16, seed=1)
    best, spread = train_restarts(p, cfg, n_restarts=2)
    assert best.energy == pytest.approx(spread["energies"].min())
    assert spread["spread"] >= 0.0
    assert len(spread["m_s2"]) == 2
