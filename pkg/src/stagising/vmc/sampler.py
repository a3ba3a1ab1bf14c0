"""Chain-vectorized single-flip Metropolis sampler.

All chains advance in lockstep as rows of one (n_chains, n) array; each
sweep proposes n single-site flips at uniformly random sites and accepts
with probability min(1, exp(2 * log-amplitude-ratio)) (amplitudes are
real, probabilities |psi|^2).

Chains are statistically independent and individually seeded: every chain
gets its own SeedSequence spawned from the master seed (a counter-based
splitter), its site/threshold streams are drawn up-front from that
sequence, and only the amplitude evaluations are batched across chains.
Results are therefore reproducible for a fixed seed and invariant to how
the chain loop is vectorized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ansatz import Ansatz


@dataclass
class SampleBatch:
    configurations: np.ndarray   # (n_samples_per_chain, n_chains, n), +-1
    acceptance_rate: float
    final_state: np.ndarray      # (n_chains, n) chain state after sampling


def _sweep(helper, sites: np.ndarray, thresholds: np.ndarray) -> int:
    """One sweep = n proposed flips; sites/thresholds are (n, n_chains)."""
    rows = np.arange(helper.state.shape[0])
    accepted = 0
    for step in range(sites.shape[0]):
        logr = helper.propose(sites[step])
        accept = thresholds[step] < np.exp(np.minimum(2.0 * logr, 0.0))
        helper.accept(rows[accept], sites[step][accept])
        accepted += int(accept.sum())
    return accepted


def sample_chains(ansatz: Ansatz, n_samples_per_chain: int, n_chains: int,
                  seed, n_sweeps_per_sample: int = 1,
                  burn_in_sweeps: int | None = None,
                  initial_state: np.ndarray | None = None) -> SampleBatch:
    """Draw n_samples_per_chain configurations from each of n_chains chains.

    burn_in_sweeps defaults to 10% of the total sweep count (at least 10)
    and is skipped when an initial_state from a previous batch is supplied
    (warm start between training iterations).
    """
    n = ansatz.n_sites
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    chain_rngs = [np.random.default_rng(s) for s in ss.spawn(n_chains)]

    if initial_state is not None:
        state = np.array(initial_state, dtype=np.int8)
        if state.shape != (n_chains, n):
            raise ValueError("initial_state shape mismatch")
        burn = 0 if burn_in_sweeps is None else burn_in_sweeps
    else:
        state = np.stack([
            rng.choice(np.array([-1, 1], dtype=np.int8), size=n)
            for rng in chain_rngs])
        total = n_samples_per_chain * n_sweeps_per_sample
        burn = max(10, total // 10) if burn_in_sweeps is None else burn_in_sweeps

    n_sweeps = burn + n_samples_per_chain * n_sweeps_per_sample
    # per-chain streams, drawn in chain order, then batched for the lockstep
    sites = np.stack([rng.integers(0, n, size=(n_sweeps, n))
                      for rng in chain_rngs], axis=-1)
    thresholds = np.stack([rng.random(size=(n_sweeps, n))
                           for rng in chain_rngs], axis=-1)

    helper = ansatz.sweep_helper(state)
    accepted = 0
    sweep = 0
    for _ in range(burn):
        _sweep(helper, sites[sweep], thresholds[sweep])
        sweep += 1

    out = np.empty((n_samples_per_chain, n_chains, n), dtype=np.int8)
    for k in range(n_samples_per_chain):
        for _ in range(n_sweeps_per_sample):
            accepted += _sweep(helper, sites[sweep], thresholds[sweep])
            sweep += 1
        out[k] = state
    proposed = n_samples_per_chain * n_sweeps_per_sample * n * n_chains
    rate = accepted / proposed if proposed else 0.0
    return SampleBatch(out, rate, state.copy())
