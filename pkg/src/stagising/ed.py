"""Exact diagonalization oracles: full chain and two-big-spin model.

The full Hamiltonian is built in the S^x product basis, where the
interaction and the longitudinal field are diagonal and the transverse
field is the only (non-positive) off-diagonal term; the ground state is
therefore stoquastic for omega_z > 0.  At alpha = 0 the model is also
representable with one collective spin j = s N / 2 per sublattice, and the
two ground energies coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import eigsh

from .interactions import build_dense_J
from .params import ModelParams

DIMENSION_GUARD = 2 ** 24
DENSE_LIMIT = 4096


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray     # ascending
    eigenvectors: np.ndarray    # columns, unit-normalized
    basis: str                  # "site_x_basis" | "bigspin"
    params: ModelParams


def _spin_matrices(s: float):
    """(diagonal S^x values, symmetric ladder matrix) in the S^x eigenbasis.

    The ladder matrix is the representation of S^z in this basis: real,
    symmetric, with non-negative entries sqrt(s(s+1) - m m') / 2 on the
    first off-diagonals.
    """
    dim = int(round(2 * s + 1))
    m = s - np.arange(dim)
    off = 0.5 * np.sqrt(s * (s + 1.0) - m[:-1] * m[1:])
    ladder = np.diag(off, 1) + np.diag(off, -1)
    return m, ladder


def site_configurations(n: int, s: float) -> np.ndarray:
    """All product-basis configurations as S^x eigenvalues, shape (dim^n, n).

    Site 0 varies slowest.  For s = 1/2 the rows are +-1/2 patterns matching
    the bits of the row index (bit of site 0 most significant).
    """
    dim = int(round(2 * s + 1))
    m, _ = _spin_matrices(s)
    total = dim ** n
    out = np.empty((total, n))
    for i in range(n):
        block = dim ** (n - 1 - i)
        pattern = np.repeat(m, block)
        out[:, i] = np.tile(pattern, total // (dim * block))
    return out


def build_full_hamiltonian(params: ModelParams,
                           probe_fields: np.ndarray | None = None) -> sparse.csr_matrix:
    """Sparse Hamiltonian of the chain in the S^x product basis.

    probe_fields adds -sum_i h_i S_i^x (used by the finite-field
    susceptibility oracle).
    """
    n, s = params.n, params.s
    dim = int(round(2 * s + 1))
    total = dim ** n
    if total > DIMENSION_GUARD:
        raise ValueError(f"basis dimension {total} exceeds guard {DIMENSION_GUARD}")
    configs = site_configurations(n, s)
    J = build_dense_J(params)

    diag = -params.omega_x * configs.sum(axis=1)
    diag -= np.einsum("ci,ij,cj->c", configs, J, configs)
    if probe_fields is not None:
        diag -= configs @ np.asarray(probe_fields, dtype=float)
    H = sparse.diags(diag).tolil()

    # -omega_z S_i^z couples states differing by one ladder step at site i.
    if params.omega_z != 0.0:
        _, ladder = _spin_matrices(s)
        idx = np.arange(total)
        for i in range(n):
            block = dim ** (n - 1 - i)
            local = (idx // block) % dim
            for step in (1,):
                movable = local + step < dim
                rows = idx[movable]
                cols = rows + step * block
                amp = ladder[local[movable], local[movable] + step]
                mat = sparse.coo_matrix(
                    (-params.omega_z * amp, (rows, cols)), shape=(total, total))
                H = H + mat + mat.T
    return sparse.csr_matrix(H)


def build_bigspin_hamiltonian(params: ModelParams) -> np.ndarray:
    """Two collective spins j_A = j_B = s N / 2 coupled at alpha = 0.

    H = -wz (JzA + JzB) - wx (JxA + JxB) - (G/N) (JxA - JxB)^2, dense,
    in the product of the two S^x eigenbases.
    """
    if params.alpha != 0.0:
        raise ValueError("big-spin construction is only valid at alpha = 0")
    n, s = params.n, params.s
    j = s * n / 2.0
    m, ladder = _spin_matrices(j)
    d = len(m)
    eye = np.eye(d)
    jx_a = np.kron(np.diag(m), eye)
    jx_b = np.kron(eye, np.diag(m))
    jz_a = np.kron(ladder, eye)
    jz_b = np.kron(eye, ladder)
    stag = jx_a - jx_b
    return (-params.omega_z * (jz_a + jz_b)
            - params.omega_x * (jx_a + jx_b)
            - (params.gamma / n) * (stag @ stag))


def lowest_k(operator, k: int, params: ModelParams,
             basis: str = "site_x_basis", maxiter: int = 100000) -> SpectrumResult:
    """Lowest k eigenpairs: dense below DENSE_LIMIT, Lanczos above."""
    if k > 32:
        raise ValueError("k must be <= 32")
    dim = operator.shape[0]
    if dim <= DENSE_LIMIT:
        dense = operator.toarray() if sparse.issparse(operator) else np.asarray(operator)
        vals, vecs = np.linalg.eigh(dense)
        vals, vecs = vals[:k], vecs[:, :k]
    else:
        op = sparse.csr_matrix(operator)
        vals, vecs = eigsh(op, k=k, which="SA", maxiter=maxiter, tol=0)
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    scale = np.abs(vals).max() if len(vals) else 1.0
    for c in range(vecs.shape[1]):
        res = operator @ vecs[:, c] - vals[c] * vecs[:, c]
        if np.linalg.norm(res) > 1e-10 * max(scale, 1.0) * math.sqrt(dim):
            raise RuntimeError(
                f"eigenpair {c} residual {np.linalg.norm(res):.2e} too large")
    return SpectrumResult(vals, vecs, basis, params)


def ground_state(params: ModelParams) -> SpectrumResult:
    return lowest_k(build_full_hamiltonian(params), 1, params)


@dataclass(frozen=True)
class Observables:
    energy_per_site: float
    m_s: float
    m_s2: float
    sx: np.ndarray              # per-site <S_i^x>
    correlations: np.ndarray    # <S_i^x S_j^x>


def observables(state: np.ndarray, params: ModelParams,
                energy: float | None = None) -> Observables:
    """Diagonal observables of a product-basis state vector."""
    n, s = params.n, params.s
    configs = site_configurations(n, s)
    weights = np.abs(state) ** 2
    sign = (-1.0) ** np.arange(n)
    stag = configs @ sign / n
    sx = configs.T @ weights
    corr = (configs * weights[:, None]).T @ configs
    if energy is None:
        H = build_full_hamiltonian(params)
        energy = float(state @ (H @ state))
    return Observables(
        energy_per_site=energy / n,
        m_s=float(weights @ stag),
        m_s2=float(weights @ stag ** 2),
        sx=sx,
        correlations=corr,
    )


def onsite_shift_energy(params: ModelParams) -> float:
    """Constant energy carried by the on-site b term, per site.

    In the product basis J_ii multiplies <(S_i^x)^2>; for s = 1/2 this is a
    pure constant shift -J_ii / 4 per site.  Reported so energies can be
    compared with and without the tuned shift.
    """
    J = build_dense_J(params)
    if params.s == 0.5:
        return -float(np.trace(J)) / (4.0 * params.n)
    raise ValueError("constant on-site shift only well-defined for s = 1/2")


def chi_finite_field(params: ModelParams, step: float | None = None) -> np.ndarray:
    """Susceptibility oracle: central second differences of the ground energy.

    chi_ij = -d^2 E0 / dh_i dh_j with per-site probe fields, mixed central
    differences at step 1e-4 s*gamma by default.  Exploits nothing about
    the model; this is the slow, independent route.
    """
    n = params.n
    h = 1e-4 * params.sgamma if step is None else step

    def e0_of(fields):
        H = build_full_hamiltonian(params, probe_fields=fields)
        return float(lowest_k(H, 1, params).eigenvalues[0])

    base = e0_of(np.zeros(n))
    chi = np.empty((n, n))
    plus = np.empty(n)
    minus = np.empty(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        plus[i] = e0_of(e)
        minus[i] = e0_of(-e)
        chi[i, i] = -(plus[i] - 2.0 * base + minus[i]) / h ** 2
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros(n)
            e[i] = h
            e[j] = h
            epp = e0_of(e)
            e[j] = -h
            epm = e0_of(e)
            e[i], e[j] = -h, h
            emp = e0_of(e)
            e[j] = -h
            emm = e0_of(e)
            chi[i, j] = chi[j, i] = -(epp - epm - emp + emm) / (4.0 * h ** 2)
    return chi
