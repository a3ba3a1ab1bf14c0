"""Variational ansatze over sigma = +-1 configurations.

Every ansatz exposes the same three operations on batches of
configurations (shape (..., n)):

  log_amplitude(sigma)        -> (...,) real log psi
  all_flip_ratios(sigma)      -> (..., n) log[psi(flip i) / psi] for each site
  parameter_gradient(sigma)   -> (..., n_params) d log psi / d theta

Parameters are a single flat real vector (get_parameters /
set_parameters), which keeps the stochastic-reconfiguration step
ansatz-agnostic.
"""

from __future__ import annotations

import numpy as np


def _logcosh(x):
    # log cosh without overflow: |x| + log((1 + e^{-2|x|}) / 2)
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax)) - np.log(2.0)


class Ansatz:
    n_params: int
    n_sites: int

    def log_amplitude(self, sigma: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def all_flip_ratios(self, sigma: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def log_amplitude_ratio(self, sigma: np.ndarray, site: int) -> np.ndarray:
        """log[psi(sigma with one site flipped) / psi(sigma)]."""
        return self.all_flip_ratios(sigma)[..., site]

    def parameter_gradient(self, sigma: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def get_parameters(self) -> np.ndarray:
        raise NotImplementedError

    def set_parameters(self, theta: np.ndarray) -> None:
        raise NotImplementedError

    def sweep_helper(self, state: np.ndarray) -> "SweepHelper":
        """Incremental single-flip machinery for the sampler.  Subclasses
        with cheap per-site updates (RBM theta cache) override this."""
        return SweepHelper(self, state)


class SweepHelper:
    """Fallback: evaluates all flip ratios and picks one column per chain.
    Correct for any ansatz, O(n) more work per proposal than a cache."""

    def __init__(self, ansatz: Ansatz, state: np.ndarray):
        self.ansatz = ansatz
        self.state = state

    def propose(self, sites: np.ndarray) -> np.ndarray:
        """log[psi(flip site_c)/psi] per chain c for the current state."""
        rows = np.arange(self.state.shape[0])
        return self.ansatz.all_flip_ratios(self.state)[rows, sites]

    def accept(self, rows: np.ndarray, sites: np.ndarray) -> None:
        """Apply the accepted flips (rows, sites index chains/sites)."""
        self.state[rows, sites] *= -1


class MeanFieldAnsatz(Ansatz):
    """Product state log psi = sum_i a_i sigma_i.  Mostly a test fixture."""

    def __init__(self, n: int, rng: np.random.Generator | None = None,
                 init_scale: float = 0.01):
        self.n_sites = n
        self.n_params = n
        rng = np.random.default_rng() if rng is None else rng
        self.a = init_scale * rng.standard_normal(n)

    def log_amplitude(self, sigma):
        return sigma @ self.a

    def all_flip_ratios(self, sigma):
        return -2.0 * sigma * self.a

    def parameter_gradient(self, sigma):
        return np.asarray(sigma, dtype=float)

    def get_parameters(self):
        return self.a.copy()

    def set_parameters(self, theta):
        self.a = np.asarray(theta, dtype=float).copy()


class RbmAnsatz(Ansatz):
    """Real restricted Boltzmann machine.

    log psi = sum_i a_i sigma_i + sum_j log cosh(b_j + sum_i W_ji sigma_i),
    with M = density * n hidden units.  Parameter order in the flat vector:
    a (n), b (M), W row-major (M, n).
    """

    def __init__(self, n: int, density: int = 2,
                 rng: np.random.Generator | None = None,
                 init_scale: float = 0.01):
        self.n_sites = n
        self.m_hidden = density * n
        self.n_params = n + self.m_hidden + self.m_hidden * n
        rng = np.random.default_rng() if rng is None else rng
        self.a = init_scale * rng.standard_normal(n)
        self.b = init_scale * rng.standard_normal(self.m_hidden)
        self.w = init_scale * rng.standard_normal((self.m_hidden, n))

    def _theta(self, sigma):
        return self.b + sigma @ self.w.T

    def log_amplitude(self, sigma):
        sigma = np.asarray(sigma, dtype=float)
        return sigma @ self.a + _logcosh(self._theta(sigma)).sum(axis=-1)

    def all_flip_ratios(self, sigma):
        sigma = np.asarray(sigma, dtype=float)
        theta = self._theta(sigma)                       # (..., M)
        # flipping site i sends theta_j -> theta_j - 2 W_ji sigma_i
        shifted = theta[..., :, None] - 2.0 * self.w * sigma[..., None, :]
        delta_hidden = (_logcosh(shifted) - _logcosh(theta)[..., :, None]).sum(axis=-2)
        return -2.0 * sigma * self.a + delta_hidden

    def parameter_gradient(self, sigma):
        sigma = np.asarray(sigma, dtype=float)
        t = np.tanh(self._theta(sigma))                  # (..., M)
        grad_w = t[..., :, None] * sigma[..., None, :]   # (..., M, n)
        return np.concatenate(
            [sigma, t, grad_w.reshape(*sigma.shape[:-1], -1)], axis=-1)

    def get_parameters(self):
        return np.concatenate([self.a, self.b, self.w.ravel()])

    def set_parameters(self, theta):
        theta = np.asarray(theta, dtype=float)
        n, m = self.n_sites, self.m_hidden
        self.a = theta[:n].copy()
        self.b = theta[n:n + m].copy()
        self.w = theta[n + m:].reshape(m, n).copy()

    def sweep_helper(self, state):
        return _RbmSweepHelper(self, state)


class _RbmSweepHelper:
    """Caches theta = b + W sigma per chain; a proposal at site i costs one
    logcosh pass over the hidden units instead of all n * M of them."""

    def __init__(self, ansatz: RbmAnsatz, state: np.ndarray):
        self.ansatz = ansatz
        self.state = state
        self.theta = ansatz.b + state @ ansatz.w.T       # (n_chains, M)
        self.logcosh_theta = _logcosh(self.theta).sum(axis=-1)

    def propose(self, sites):
        a = self.ansatz
        sigma_i = self.state[np.arange(len(sites)), sites]
        w_cols = a.w[:, sites].T                          # (n_chains, M)
        shifted = self.theta - 2.0 * w_cols * sigma_i[:, None]
        self._shifted = shifted
        self._hidden_sum = _logcosh(shifted).sum(axis=-1)
        return (-2.0 * sigma_i * a.a[sites]
                + self._hidden_sum - self.logcosh_theta)

    def accept(self, rows, sites):
        self.theta[rows] = self._shifted[rows]
        self.logcosh_theta[rows] = self._hidden_sum[rows]
        self.state[rows, sites] *= -1


class LookupTableAnsatz(Ansatz):
    """Wraps an exact state vector as an ansatz.

    Indexing matches the exact-diagonalization product basis: site 0 is
    the most significant digit and sigma = +1 comes first (the all-plus
    configuration is entry 0).  Used to test the sampler and the
    local-energy estimator: with the exact ground state the local energy
    is constant across configurations.
    """

    def __init__(self, amplitudes: np.ndarray, n: int):
        amplitudes = np.asarray(amplitudes, dtype=float)
        if amplitudes.shape != (2 ** n,):
            raise ValueError("amplitude vector does not match 2^n")
        if np.any(amplitudes == 0):
            raise ValueError("lookup ansatz requires strictly nonzero amplitudes")
        self.n_sites = n
        self.n_params = 0
        self.log_table = np.log(np.abs(amplitudes))

    def _index(self, sigma):
        bits = (np.asarray(sigma) < 0).astype(np.int64)
        weights = 2 ** np.arange(self.n_sites - 1, -1, -1)
        return bits @ weights

    def log_amplitude(self, sigma):
        return self.log_table[self._index(sigma)]

    def all_flip_ratios(self, sigma):
        base = self._index(sigma)
        weights = 2 ** np.arange(self.n_sites - 1, -1, -1)
        bits = (np.asarray(sigma) < 0).astype(np.int64)
        flipped = base[..., None] + (1 - 2 * bits) * weights
        return self.log_table[flipped] - self.log_table[base][..., None]

    def parameter_gradient(self, sigma):
        return np.zeros((*np.asarray(sigma).shape[:-1], 0))

    def get_parameters(self):
        return np.zeros(0)

    def set_parameters(self, theta):
        if len(theta) != 0:
            raise ValueError("lookup ansatz has no parameters")
