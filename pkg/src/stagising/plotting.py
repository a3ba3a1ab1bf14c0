"""Figure rendering for the CLI report paths (Agg backend, files only).

Each function renders one PNG next to the delimited data the CLI already
wrote; figures are a convenience view, the CSV/JSON artifacts remain the
canonical output.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def phase_diagram_heatmap(path, omega_x, omega_z, m_s, sgamma,
                          critical_line=None, tricritical=None):
    fig, ax = plt.subplots(figsize=(5.2, 4.2))
    grid = np.abs(np.asarray(m_s)).reshape(len(omega_z), len(omega_x))
    mesh = ax.pcolormesh(np.asarray(omega_x) / sgamma,
                         np.asarray(omega_z) / sgamma, grid, shading="auto")
    fig.colorbar(mesh, ax=ax, label=r"$|\bar m_s| / s$")
    if critical_line is not None and len(critical_line):
        line = np.asarray(critical_line) / sgamma
        ax.plot(line[:, 0], line[:, 1], "w-", lw=1.5)
    if tricritical is not None:
        ax.plot(tricritical[0] / sgamma, tricritical[1] / sgamma, "wo", ms=6)
    ax.set_xlabel(r"$\omega_x / (s\Gamma)$")
    ax.set_ylabel(r"$\omega_z / (s\Gamma)$")
    _save(fig, path)


def slice_curve(path, axis_values, values, errors=None, xlabel="", ylabel=""):
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    if errors is not None:
        ax.errorbar(axis_values, values, yerr=errors, fmt="o-", ms=3, capsize=2)
    else:
        ax.plot(axis_values, values, "o-", ms=3)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    _save(fig, path)


def matrix_heatmap(path, matrix, mask_diagonal=False, label=r"$\chi_{ij}$"):
    mat = np.array(matrix, dtype=float)
    if mask_diagonal:
        np.fill_diagonal(mat, np.nan)
    fig, ax = plt.subplots(figsize=(4.6, 4.0))
    vmax = np.nanmax(np.abs(mat))
    mesh = ax.pcolormesh(mat, cmap="RdBu_r", vmin=-vmax, vmax=vmax,
                         shading="auto")
    fig.colorbar(mesh, ax=ax, label=label)
    ax.set_xlabel("j")
    ax.set_ylabel("i")
    ax.invert_yaxis()
    _save(fig, path)


def decay_loglog(path, profiles, fits):
    """profiles: {family: (r, values)}; fits: {family: DecayFit}."""
    fig, ax = plt.subplots(figsize=(5.2, 3.8))
    for family, (rs, vals) in profiles.items():
        ax.loglog(rs, np.abs(vals), "o", ms=4, label=f"family {family}")
        fit = fits.get(family)
        if fit is not None and fit.ok:
            ax.loglog(rs, fit.amplitude * rs ** (-fit.exponent), "-",
                      lw=1, alpha=0.7)
    ax.set_xlabel("r")
    ax.set_ylabel(r"$|\chi_r|$")
    ax.legend(fontsize=8)
    _save(fig, path)


def landscape_heatmap(path, thetas, energies, minimum=None):
    fig, ax = plt.subplots(figsize=(4.8, 4.0))
    mesh = ax.pcolormesh(thetas, thetas, np.asarray(energies).T,
                         shading="auto")
    fig.colorbar(mesh, ax=ax, label="energy per site")
    if minimum is not None:
        ax.plot(minimum[0], minimum[1], "r*", ms=10)
    ax.set_xlabel(r"$\theta_A$")
    ax.set_ylabel(r"$\theta_B$")
    _save(fig, path)


def level_comparison(path, axis_values, full_levels, bigspin_levels, xlabel):
    """Fig-8-style overlay: full-chain levels as lines, big-spin as dots."""
    fig, ax = plt.subplots(figsize=(5.2, 3.8))
    full_levels = np.asarray(full_levels)
    bigspin_levels = np.asarray(bigspin_levels)
    for k in range(full_levels.shape[1]):
        ax.plot(axis_values, full_levels[:, k], "-", color="C0", lw=1,
                label="full chain" if k == 0 else None)
    for k in range(bigspin_levels.shape[1]):
        ax.plot(axis_values, bigspin_levels[:, k], ".", color="C1", ms=5,
                label="big spin" if k == 0 else None)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("energy")
    ax.legend(fontsize=8)
    _save(fig, path)


def training_trace(path, result):
    fig, axes = plt.subplots(2, 1, figsize=(5.2, 5.2), sharex=True)
    iters = np.arange(len(result.energy_history))
    axes[0].errorbar(iters, result.energy_history,
                     yerr=result.energy_err_history, fmt="-", lw=1,
                     errorevery=max(1, len(iters) // 40))
    axes[0].set_ylabel("energy per site")
    axes[1].errorbar(iters, result.ms2_history, yerr=result.ms2_err_history,
                     fmt="-", lw=1, errorevery=max(1, len(iters) // 40))
    axes[1].set_ylabel(r"$\langle m_s^2 \rangle$")
    axes[1].set_xlabel("iteration")
    _save(fig, path)
