"""Thermal single-spin functions: Brillouin function and log-sinh ratios.

Everything here must stay finite for arguments up to beta*epsilon ~ 1e8,
so the naive sinh/coth expressions are rewritten with expm1/log1p.
All arguments are assumed non-negative (energies epsilon >= 0).
"""

from __future__ import annotations

import numpy as np


def log_sinh_ratio(x, s: float):
    """log[ sinh((2s+1) x) / sinh(x) ] for x >= 0, overflow-safe.

    Equals (2s) x + log1p(-exp(-2(2s+1)x)) - log1p(-exp(-2x)); tends to
    log(2s+1) as x -> 0 (free-spin degeneracy).
    """
    x = np.asarray(x, dtype=float)
    a = 2.0 * s + 1.0
    tiny = x < 1e-15
    xs = np.where(tiny, 1.0, x)
    out = 2.0 * s * xs + np.log1p(-np.exp(-2.0 * a * xs)) - np.log1p(-np.exp(-2.0 * xs))
    # Series about 0: log(2s+1) + x^2 ((2s+1)^2 - 1)/6 + O(x^4)
    return np.where(tiny, np.log(a) + x * x * (a * a - 1.0) / 6.0, out)


def _coth(y):
    with np.errstate(over="ignore"):
        return 1.0 + 2.0 / np.expm1(2.0 * y)


def _csch2(y):
    with np.errstate(over="ignore", under="ignore"):
        e = np.exp(-2.0 * y)
    return 4.0 * e / (1.0 - e) ** 2


def brillouin(s: float, x):
    """Brillouin function B_s(x) for x >= 0; B_{1/2}(x) = tanh(x)."""
    x = np.asarray(x, dtype=float)
    c1 = (2.0 * s + 1.0) / (2.0 * s)
    c2 = 1.0 / (2.0 * s)
    small = x < 1e-5
    xs = np.where(small, 1.0, x)
    out = c1 * _coth(c1 * xs) - c2 * _coth(c2 * xs)
    series = (c1 * c1 - c2 * c2) / 3.0 * x - (c1 ** 4 - c2 ** 4) / 45.0 * x ** 3
    return np.where(small, series, out)


def brillouin_prime(s: float, x):
    """Derivative B_s'(x) for x >= 0."""
    x = np.asarray(x, dtype=float)
    c1 = (2.0 * s + 1.0) / (2.0 * s)
    c2 = 1.0 / (2.0 * s)
    small = x < 1e-5
    xs = np.where(small, 1.0, x)
    out = -c1 * c1 * _csch2(c1 * xs) + c2 * c2 * _csch2(c2 * xs)
    series = (c1 * c1 - c2 * c2) / 3.0 - (c1 ** 4 - c2 ** 4) / 15.0 * x ** 2
    return np.where(small, series, out)
