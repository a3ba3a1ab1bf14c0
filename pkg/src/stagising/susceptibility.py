"""Closed-form susceptibility matrix and power-law correlation decay.

chi = A^-1 diag(Y) with A = I - 2 diag(Y) J; the per-site weights Y_i come
from the thermal single-spin response at the variational minimum.  At zero
temperature Y_i = s wz^2 / (8 eps_i^3).  The decay analysis fits |chi_r|
against distance in log-log space per sublattice family and tracks how the
fitted exponent depends on the interaction range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import slr
from .interactions import build_dense_J
from .params import ModelParams
from .thermal import brillouin, brillouin_prime

FAMILIES = ("01", "00", "11")


class CriticalDivergenceError(RuntimeError):
    """The response matrix is numerically singular: the point sits on (or too
    close to) a critical line and chi diverges there."""


def y_vector(params: ModelParams, u_bar: float | None = None) -> np.ndarray:
    """Per-site response weights Y_i at the variational minimum.

    Finite beta uses the general Brillouin-function expression; beta = inf
    reduces to s wz^2 / (8 eps_i^3).  u_bar defaults to the minimizer.
    """
    if u_bar is None:
        u_bar = slr.minimize_univariate(params).u_bar
    s, wx, wz = params.s, params.omega_x, params.omega_z
    sign = (-1.0) ** np.arange(params.n)
    field = wx + 2.0 * sign * u_bar
    eps = 0.5 * np.hypot(wz, field)

    if params.zero_temperature:
        if wz == 0.0:
            return np.zeros(params.n)
        return s * wz * wz / (8.0 * eps ** 3)

    beta = params.beta
    x = 2.0 * s * beta * eps
    bs = brillouin(s, x)
    bsp = brillouin_prime(s, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (s / (2.0 * eps ** 2)) * (
            eps * bs + field ** 2 * (0.5 * s * beta * bsp - bs / (4.0 * eps))
        )
    # eps -> 0 limit (wz = 0 and field = 0): free spin, Y = s(s+1) beta / 3.
    return np.where(eps > 0, out, s * (s + 1.0) * beta / 3.0)


@dataclass(frozen=True)
class SusceptibilityMatrix:
    chi: np.ndarray
    params: ModelParams
    u_bar: float
    condition_number: float


def chi_matrix(params: ModelParams, cond_limit: float = 1e12) -> SusceptibilityMatrix:
    """Solve (I - 2 diag(Y) J) chi = diag(Y) by dense LU.

    Raises CriticalDivergenceError when the system is ill-conditioned
    beyond cond_limit instead of returning garbage.
    """
    if params.n > 4096:
        raise ValueError("dense solve limited to n <= 4096")
    point = slr.minimize_univariate(params)
    y = y_vector(params, point.u_bar)
    J = build_dense_J(params)
    a = np.eye(params.n) - 2.0 * y[:, None] * J
    cond = float(np.linalg.cond(a))
    if not math.isfinite(cond) or cond > cond_limit:
        raise CriticalDivergenceError(
            f"response matrix condition number {cond:.3e} exceeds {cond_limit:.1e}")
    chi = np.linalg.solve(a, np.diag(y))
    return SusceptibilityMatrix(chi, params, point.u_bar, cond)


def locate_divergence(params: ModelParams, axis: str, lo: float, hi: float,
                      xtol: float | None = None) -> float:
    """Localize the critical divergence of chi along a field axis.

    With Y evaluated at the variational minimum the smallest singular value
    of A = I - 2 diag(Y) J dips to zero exactly at the critical point and is
    positive on both sides, so the divergence is found by minimizing it over
    the bracket.
    """
    if axis not in ("omega_x", "omega_z"):
        raise ValueError(f"axis must be omega_x or omega_z, got {axis!r}")
    xtol = 1e-6 * params.sgamma if xtol is None else xtol

    def min_singular(value: float) -> float:
        p = params.replace(**{axis: value})
        y = y_vector(p)
        a = np.eye(p.n) - 2.0 * y[:, None] * build_dense_J(p)
        return float(np.linalg.svd(a, compute_uv=False)[-1])

    res = optimize.minimize_scalar(min_singular, bounds=(lo, hi),
                                   method="bounded",
                                   options={"xatol": xtol})
    interior = lo + xtol < res.x < hi - xtol
    if not interior or res.fun > 0.5 * min(min_singular(lo), min_singular(hi)):
        raise ValueError("no divergence of chi inside the bracket")
    return float(res.x)


def family_profile(chi: np.ndarray, family: str) -> tuple[np.ndarray, np.ndarray]:
    """Distances r and susceptibility values chi_r for one sublattice family.

    01: chi_{0, 2r+1}; 00: chi_{0, 2r}; 11: chi_{1, 2r+1}.  Only separations
    up to n/4 are kept, to stay clear of the periodic wrap.
    """
    n = chi.shape[0]
    r_max = n // 4
    rs = np.arange(1, r_max + 1)
    if family == "01":
        vals = chi[0, 2 * rs - 1]
    elif family == "00":
        vals = chi[0, 2 * rs]
    elif family == "11":
        vals = chi[1, (2 * rs + 1) % n]
    else:
        raise ValueError(f"family must be one of {FAMILIES}, got {family!r}")
    return rs.astype(float), vals


@dataclass(frozen=True)
class DecayFit:
    family: str
    exponent: float        # alpha_chi in |chi_r| ~ r^-alpha_chi
    amplitude: float
    r_squared: float
    ok: bool
    reason: str = ""


def decay_fit(chi: np.ndarray, family: str) -> DecayFit:
    """Least-squares power-law fit of |chi_r| vs r in log-log space.

    Uses r in [1, n/4]; rejects families whose |chi_r| is non-monotonic
    (no meaningful power law) or touches zero.
    """
    rs, vals = family_profile(chi, family)
    mags = np.abs(vals)
    if len(rs) < 3:
        return DecayFit(family, 0.0, 0.0, 0.0, False, "window too short")
    if np.any(mags <= 0):
        return DecayFit(family, 0.0, 0.0, 0.0, False, "zero entries")
    if not (np.all(np.diff(mags) <= 0) or np.all(np.diff(mags) >= 0)):
        return DecayFit(family, 0.0, 0.0, 0.0, False, "non-monotonic profile")
    logr, logm = np.log(rs), np.log(mags)
    slope, intercept = np.polyfit(logr, logm, 1)
    pred = slope * logr + intercept
    ss_res = float(np.sum((logm - pred) ** 2))
    ss_tot = float(np.sum((logm - logm.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(family, -float(slope), math.exp(float(intercept)), r2, True)


@dataclass(frozen=True)
class SlopeScan:
    slope: float           # a in alpha_chi = a * alpha + b
    intercept: float       # b
    alphas: tuple[float, ...]
    exponents: tuple[float, ...]
    family: str


def slope_scan(alphas, params: ModelParams, family: str = "01") -> SlopeScan:
    """Fit alpha_chi against alpha at a fixed field point."""
    exps = []
    for alpha in alphas:
        mat = chi_matrix(params.replace(alpha=float(alpha), b=None))
        fit = decay_fit(mat.chi, family)
        if not fit.ok:
            raise RuntimeError(
                f"decay fit failed at alpha={alpha}: {fit.reason}")
        exps.append(fit.exponent)
    a, b = np.polyfit(np.asarray(alphas, dtype=float), np.asarray(exps), 1)
    return SlopeScan(float(a), float(b), tuple(float(x) for x in alphas),
                     tuple(exps), family)
