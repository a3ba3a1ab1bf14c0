"""Stochastic reconfiguration (natural gradient) parameter update.

For real amplitudes and parameters the covariance S = cov(O, O) and the
force f = -cov(O, E_loc) give the update dtheta = lr * S^-1 f with a
diagonal shift for stability.  Writing the centered, 1/sqrt(B)-scaled
gradient matrix as A (B samples x P parameters), S + shift = A^T A + shift
and the solve is pushed through the identity

    (A^T A + shift)^-1 A^T = A^T (A A^T + shift)^-1

whenever B < P, so the linear system is always the smaller of the two
dimensions.  This is what keeps the N = 50-70 runs (P ~ 5000, B ~ 500)
cheap.
"""

from __future__ import annotations

import numpy as np


def sr_update(o_matrix: np.ndarray, e_loc: np.ndarray, learning_rate: float,
              diag_shift: float = 1e-4) -> np.ndarray:
    """Parameter increment from one batch of samples.

    o_matrix: (B, P) log-derivatives, e_loc: (B,) local energies.
    Raises FloatingPointError with a diagnostic if the batch contains
    non-finite entries (diverged ansatz or overflowing local energy).
    """
    if not np.all(np.isfinite(o_matrix)):
        raise FloatingPointError("non-finite log-derivatives in SR batch")
    if not np.all(np.isfinite(e_loc)):
        raise FloatingPointError(
            f"non-finite local energies in SR batch "
            f"(min {np.nanmin(e_loc)}, max {np.nanmax(e_loc)})")
    b = o_matrix.shape[0]
    a = (o_matrix - o_matrix.mean(axis=0)) / np.sqrt(b)
    de = (e_loc - e_loc.mean()) / np.sqrt(b)
    g = a.T @ de                 # cov(O, E_loc)

    p = a.shape[1]
    if b < p:
        # dual solve: since g = A^T de, the identity gives
        # (A^T A + shift)^-1 g = A^T (A A^T + shift)^-1 de exactly.
        gram = a @ a.T
        gram[np.diag_indices_from(gram)] += diag_shift
        dual = np.linalg.solve(gram, de)
        step = a.T @ dual
    else:
        s = a.T @ a
        s[np.diag_indices_from(s)] += diag_shift
        step = np.linalg.solve(s, g)
    return -learning_rate * step
