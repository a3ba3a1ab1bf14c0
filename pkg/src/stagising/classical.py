"""Classical two-angle analysis of the all-to-all (alpha = 0) limit.

Each sublattice is replaced by a classical magnetization confined to the
x-z plane, leaving an energy landscape over the two polar angles.  Its
global minima reproduce the exact alpha < 1 phase diagram, including the
first- and second-order portions of the critical line.  A variant without
the ferromagnetic intrasublattice coupling is included: there the
transition is second order everywhere except the classical omega_z = 0
point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .params import ModelParams


@dataclass(frozen=True)
class AngleConfig:
    theta_a: float
    theta_b: float
    energy: float
    m_s: float
    degenerate: bool


def _require_alpha0(params: ModelParams):
    if params.alpha != 0.0:
        raise ValueError(
            f"classical big-spin analysis is only valid at alpha = 0, "
            f"got alpha = {params.alpha}")


def classical_energy(theta_a, theta_b, params: ModelParams,
                     intersublattice_only: bool = False):
    """Energy per site over the sublattice angles.

    Full model:   -s wz (sinA + sinB)/2 - s wx (cosA + cosB)/2
                  - s^2 G (cosA - cosB)^2 / 4.
    Variant (no ferromagnetic intrasublattice coupling, Kac-normalized to
    keep the staggered coupling at G):  + s^2 G cosA cosB  instead of the
    quadratic difference term.
    """
    _require_alpha0(params)
    s, wx, wz, g = params.s, params.omega_x, params.omega_z, params.gamma
    theta_a = np.asarray(theta_a, dtype=float)
    theta_b = np.asarray(theta_b, dtype=float)
    ca, cb = np.cos(theta_a), np.cos(theta_b)
    field = (-0.5 * s * wz * (np.sin(theta_a) + np.sin(theta_b))
             - 0.5 * s * wx * (ca + cb))
    if intersublattice_only:
        return field + s * s * g * ca * cb
    return field - 0.25 * s * s * g * (ca - cb) ** 2


def classical_gradient(theta_a, theta_b, params: ModelParams,
                       intersublattice_only: bool = False):
    """Analytic (d e/d thetaA, d e/d thetaB)."""
    _require_alpha0(params)
    s, wx, wz, g = params.s, params.omega_x, params.omega_z, params.gamma
    ca, cb = math.cos(theta_a), math.cos(theta_b)
    sa, sb = math.sin(theta_a), math.sin(theta_b)
    da = -0.5 * s * wz * ca + 0.5 * s * wx * sa
    db = -0.5 * s * wz * cb + 0.5 * s * wx * sb
    if intersublattice_only:
        da += -s * s * g * sa * cb
        db += -s * s * g * ca * sb
    else:
        da += 0.5 * s * s * g * (ca - cb) * sa
        db += -0.5 * s * s * g * (ca - cb) * sb
    return da, db


def staggered_magnetization(theta_a: float, theta_b: float, s: float) -> float:
    return 0.5 * s * (math.cos(theta_a) - math.cos(theta_b))


def minimize_classical(params: ModelParams, n_grid: int = 181,
                       intersublattice_only: bool = False) -> AngleConfig:
    """Global minimum over the angle torus: coarse grid + local refinement.

    Degenerate (A <-> B swapped) minima report the representative with
    m_s >= 0 and set the degeneracy flag.
    """
    _require_alpha0(params)
    thetas = np.linspace(0.0, 2.0 * math.pi, n_grid, endpoint=False)
    ta, tb = np.meshgrid(thetas, thetas, indexing="ij")
    grid = classical_energy(ta, tb, params, intersublattice_only)
    i, j = np.unravel_index(np.argmin(grid), grid.shape)

    fun = lambda x: float(classical_energy(x[0], x[1], params,
                                           intersublattice_only))
    jac = lambda x: np.array(classical_gradient(x[0], x[1], params,
                                                intersublattice_only))
    res = optimize.minimize(fun, np.array([thetas[i], thetas[j]]), jac=jac,
                            method="BFGS", options={"gtol": 1e-13})
    theta_a, theta_b = (float(t) % (2.0 * math.pi) for t in res.x)
    energy = float(res.fun)
    m_s = staggered_magnetization(theta_a, theta_b, params.s)

    # The swap (A <-> B) flips m_s at equal energy.
    e_swapped = fun([theta_b, theta_a])
    degenerate = (abs(m_s) > 1e-9 * params.s
                  and abs(e_swapped - energy) <= 1e-12 * max(1.0, abs(energy)))
    if degenerate and m_s < 0:
        theta_a, theta_b = theta_b, theta_a
        m_s = -m_s
    return AngleConfig(theta_a, theta_b, energy, m_s, degenerate)


def landscape(params: ModelParams, n_grid: int = 181,
              intersublattice_only: bool = False):
    """(theta grid, energy grid) for heatmap dumps."""
    thetas = np.linspace(0.0, 2.0 * math.pi, n_grid)
    ta, tb = np.meshgrid(thetas, thetas, indexing="ij")
    return thetas, classical_energy(ta, tb, params, intersublattice_only)
