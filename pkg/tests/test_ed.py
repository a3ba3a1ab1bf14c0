import math

import numpy as np
import pytest

from stagising import ed, slr
from stagising.interactions import build_dense_J
from stagising.params import ModelParams


def kron_oracle(params, probe_fields=None):
    """Independent dense construction in the conventional S^z eigenbasis.

    Eigenvalues are basis independent, so matching spectra validates the
    product-basis build without sharing any code path with it.
    """
    n, s = params.n, params.s
    dim = int(round(2 * s + 1))
    m = s - np.arange(dim)
    off = 0.5 * np.sqrt(s * (s + 1.0) - m[:-1] * m[1:])
    sz = np.diag(m)
    sx = np.diag(off, 1) + np.diag(off, -1)

    def site_op(op, i):
        mats = [np.eye(dim)] * n
        mats[i] = op
        out = mats[0]
        for mat in mats[1:]:
            out = np.kron(out, mat)
        return out

    sxs = [site_op(sx, i) for i in range(n)]
    szs = [site_op(sz, i) for i in range(n)]
    J = build_dense_J(params)
    H = -params.omega_x * sum(sxs) - params.omega_z * sum(szs)
    for i in range(n):
        for j in range(n):
            if J[i, j] != 0.0:
                H = H - J[i, j] * (sxs[i] @ sxs[j])
    if probe_fields is not None:
        for i in range(n):
            H = H - probe_fields[i] * sxs[i]
    return H


@pytest.mark.parametrize("n,s,alpha", [
    (4, 0.5, 0.0), (4, 0.5, 1.5), (4, 1.0, 0.7), (6, 0.5, math.inf),
])
def test_full_hamiltonian_matches_kron_oracle(n, s, alpha):
    p = ModelParams(n=n, s=s, alpha=alpha, omega_x=0.23, omega_z=0.61)
    built = ed.build_full_hamiltonian(p).toarray()
    want = np.linalg.eigvalsh(kron_oracle(p))
    got = np.linalg.eigvalsh(built)
    assert got == pytest.approx(want, abs=1e-12)


def test_probe_fields_match_kron_oracle():
    rng = np.random.default_rng(3)
    p = ModelParams(n=4, s=0.5, alpha=1.0, omega_x=0.3, omega_z=0.5)
    fields = rng.normal(scale=0.2, size=4)
    built = ed.build_full_hamiltonian(p, probe_fields=fields).toarray()
    want = np.linalg.eigvalsh(kron_oracle(p, fields))
    assert np.linalg.eigvalsh(built) == pytest.approx(want, abs=1e-12)


def test_hamiltonian_real_symmetric():
    p = ModelParams(n=6, s=1.0, alpha=0.5, omega_x=0.4, omega_z=0.8)
    H = ed.build_full_hamiltonian(p)
    assert np.abs((H - H.T).toarray()).max() == 0.0


def test_wz0_diagonal_with_product_ground_state():
    # omega_z = 0, large omega_x: the all-plus product state is exact
    p = ModelParams(n=6, omega_x=2.0, omega_z=0.0)
    H = ed.build_full_hamiltonian(p)
    assert (H - ed.sparse.diags(H.diagonal())).nnz == 0
    res = ed.ground_state(p)
    assert abs(res.eigenvectors[0, 0]) == pytest.approx(1.0)
    configs = ed.site_configurations(6, 0.5)
    assert configs[0] == pytest.approx(np.full(6, 0.5))


def test_bigspin_matches_full_at_alpha0():
    for n, s in ((4, 0.5), (6, 0.5), (4, 1.0)):
        p = ModelParams(n=n, s=s, alpha=0.0, omega_x=0.3, omega_z=0.4)
        full = ed.ground_state(p).eigenvalues[0]
        big = ed.lowest_k(ed.build_bigspin_hamiltonian(p), 1, p,
                          basis="bigspin").eigenvalues[0]
        assert big == pytest.approx(full, abs=1e-12 * abs(full))


def test_bigspin_rejects_finite_alpha():
    with pytest.raises(ValueError):
        ed.build_bigspin_hamiltonian(ModelParams(n=4, alpha=1.0))


def test_spectrum_invariant_under_wx_sign_flip():
    p = ModelParams(n=6, alpha=0.8, omega_x=0.5, omega_z=0.3)
    a = np.linalg.eigvalsh(ed.build_full_hamiltonian(p).toarray())
    q = ModelParams(n=6, alpha=0.8, omega_x=-0.5, omega_z=0.3)
    b = np.linalg.eigvalsh(ed.build_full_hamiltonian(q).toarray())
    assert a == pytest.approx(b, abs=1e-12)


def test_observables_symmetric_ground_state():
    # finite symmetric chain: <m_s> = 0 exactly, <m_s^2> > 0 in the AF regime
    p = ModelParams(n=8, omega_x=0.1, omega_z=0.2)
    res = ed.ground_state(p)
    obs = ed.observables(res.eigenvectors[:, 0], p,
                         energy=float(res.eigenvalues[0]))
    assert obs.m_s == pytest.approx(0.0, abs=1e-8)
    assert obs.m_s2 > 0.15
    # the small uniform omega_x polarizes all sites equally
    assert obs.sx == pytest.approx(np.full(8, obs.sx[0]), abs=1e-10)
    assert abs(obs.sx[0]) < 0.05
    assert obs.correlations[0, 1] < 0 < obs.correlations[0, 2]


def test_energy_per_site_approaches_mean_field():
    # alpha = 0 strong long range: E0/N converges to the variational e0
    p = ModelParams(n=4, omega_x=0.4, omega_z=0.5)
    target = float(slr.minimize_univariate(p).energy)
    errs = []
    for n in (4, 6, 8, 10):
        q = p.replace(n=n)
        e = float(ed.ground_state(q).eigenvalues[0]) / n
        errs.append(abs(e - target))
    assert errs == sorted(errs, reverse=True)
    assert errs[-1] < 0.03


def test_lowest_k_dense_and_sparse_agree():
    p = ModelParams(n=6, alpha=1.0, omega_x=0.3, omega_z=0.6)
    H = ed.build_full_hamiltonian(p)
    dense = ed.lowest_k(H, 3, p)
    sparse_vals, _ = ed.eigsh(H, k=3, which="SA")
    assert dense.eigenvalues == pytest.approx(np.sort(sparse_vals), abs=1e-9)


def test_onsite_shift_energy():
    p = ModelParams(n=4, alpha=1.0, b=1.5)
    J = build_dense_J(p)
    assert ed.onsite_shift_energy(p) == pytest.approx(-J[0, 0] / 4.0)
    with pytest.raises(ValueError):
        ed.onsite_shift_energy(ModelParams(n=4, s=1.0))


def test_chi_finite_field_symmetric_and_sane():
    p = ModelParams(n=4, omega_x=0.5, omega_z=2.0)
    chi = ed.chi_finite_field(p)
    assert chi.shape == (4, 4)
    assert np.abs(chi - chi.T).max() < 1e-6
    assert np.all(np.diag(chi) > 0)
    # nearest neighbors anticorrelate under the staggered AF coupling
    assert chi[0, 1] < 0
