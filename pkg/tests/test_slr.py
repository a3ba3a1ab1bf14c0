import math

import numpy as np
import pytest

from stagising import slr
from stagising.params import ModelParams


def sympy_landau(params, n_orders=3):
    """Symbolic series oracle for the Landau coefficients."""
    import sympy as sp

    u = sp.symbols("u")
    s, g = sp.Rational(params.s).limit_denominator(4), sp.nsimplify(params.gamma)
    wx = sp.nsimplify(params.omega_x)
    wz = sp.nsimplify(params.omega_z)
    ep = sp.sqrt(wz ** 2 + (wx + 2 * u) ** 2) / 2
    em = sp.sqrt(wz ** 2 + (wx - 2 * u) ** 2) / 2
    if params.zero_temperature:
        f = u ** 2 / g - s * (ep + em)
    else:
        beta = sp.nsimplify(params.beta)
        f = u ** 2 / g - (
            sp.log(sp.sinh((2 * s + 1) * beta * ep) / sp.sinh(beta * ep))
            + sp.log(sp.sinh((2 * s + 1) * beta * em) / sp.sinh(beta * em))
        ) / (2 * beta)
    series = sp.series(f, u, 0, 2 * n_orders + 1).removeO()
    poly = sp.Poly(sp.expand(series), u)
    # convert from powers of u to powers of m = u / gamma
    out = []
    for k in range(1, n_orders + 1):
        coeff = poly.coeff_monomial(u ** (2 * k))
        out.append(float(coeff) * float(g) ** (2 * k))
    return out


def test_e0_even_and_value():
    p = ModelParams(n=8, omega_x=0.3, omega_z=0.4)
    u = np.linspace(-0.5, 0.5, 11)
    assert slr.e0(u, p) == pytest.approx(slr.e0(-u, p), abs=1e-15)
    # hand value at u = 0: -s * sqrt(wz^2 + wx^2)
    assert slr.e0(0.0, p) == pytest.approx(-0.5 * math.hypot(0.4, 0.3))


def test_minimizer_closed_form_wx0():
    # at omega_x = 0: u_bar^2 = (s Gamma)^2 - wz^2/4 below the transition
    for wz in (0.1, 0.5, 0.9):
        p = ModelParams(n=8, omega_z=wz)
        point = slr.minimize_univariate(p)
        assert point.degenerate
        assert point.u_bar == pytest.approx(math.sqrt(0.25 - wz * wz / 4),
                                            abs=1e-10)
        assert point.m_s == pytest.approx(point.u_bar / p.gamma)
    # above wz = 2 s Gamma the minimum sits at u = 0
    point = slr.minimize_univariate(ModelParams(n=8, omega_z=1.5))
    assert point.u_bar == pytest.approx(0.0, abs=1e-12)
    assert not point.degenerate


def test_derivative_is_zero_at_minimum():
    for beta in (math.inf, 10.0, 3.0):
        p = ModelParams(n=8, omega_x=0.2, omega_z=0.3, beta=beta)
        point = slr.minimize_univariate(p)
        assert abs(float(slr.objective_derivative(point.u_bar, p))) < 1e-9


def test_derivative_matches_finite_difference():
    h = 1e-7
    for beta in (math.inf, 5.0):
        p = ModelParams(n=8, omega_x=0.17, omega_z=0.41, beta=beta)
        for u in (-0.3, 0.05, 0.4):
            fd = float(slr.objective(u + h, p) - slr.objective(u - h, p)) / (2 * h)
            assert float(slr.objective_derivative(u, p)) == pytest.approx(
                fd, rel=1e-6, abs=1e-9)


def test_classical_branch_wz0():
    # omega_z = 0, beta = inf: frozen AF below the level crossing at
    # omega_x = s Gamma, fully polarized PM above it
    p = ModelParams(n=8, omega_x=0.3, omega_z=0.0)
    point = slr.minimize_univariate(p)
    assert abs(point.m_s) == pytest.approx(0.5)
    p = ModelParams(n=8, omega_x=0.7, omega_z=0.0)
    point = slr.minimize_univariate(p)
    assert point.m_s == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("fields,beta", [
    ((0.2, 0.8), math.inf),
    ((0.5, 1.2), math.inf),
    ((0.3, 0.9), 8.0),
])
def test_landau_vs_sympy_series(fields, beta):
    wx, wz = fields
    p = ModelParams(n=8, omega_x=wx, omega_z=wz, beta=beta)
    got = slr.landau_coefficients(p)
    want = sympy_landau(p)
    assert got.c2 == pytest.approx(want[0], rel=1e-8, abs=1e-10)
    assert got.c4 == pytest.approx(want[1], rel=1e-6, abs=1e-8)
    # c6 comes from a sixth finite difference, so its accuracy is limited
    assert got.c6 == pytest.approx(want[2], rel=2e-3, abs=1e-4)


def test_landau_rejects_wz0():
    with pytest.raises(slr.NonAnalyticError):
        slr.landau_coefficients(ModelParams(n=8, omega_x=0.3, omega_z=0.0))


def test_second_order_line_is_c2_zero():
    for wx in (0.0, 0.1, 0.25, 0.34):
        wz = slr.second_order_line(wx, 0.5, 1.0)
        assert wz is not None
        if wx == 0.0:
            assert wz == pytest.approx(1.0, abs=1e-9)  # 2 s Gamma
        c2 = slr.landau_coefficients(
            ModelParams(n=8, omega_x=wx, omega_z=wz)).c2
        assert c2 == pytest.approx(0.0, abs=1e-8)
    # beyond the tricritical point there is no second-order solution
    assert slr.second_order_line(0.40, 0.5, 1.0) is None


def test_tricritical_closed_form_and_scan_agree():
    closed = slr.tricritical_point(0.5, 1.0)
    assert closed[0] == pytest.approx(0.715542 * 0.5, abs=1e-6 * 0.5)
    assert closed[1] == pytest.approx(1.431084 * 0.5, abs=1e-6 * 0.5)
    scanned = slr.scan_tricritical(ModelParams(n=8))
    assert scanned is not None
    assert scanned[0] == pytest.approx(closed[0], abs=1e-6)
    assert scanned[1] == pytest.approx(closed[1], abs=1e-6)


def test_classify_first_and_second_order():
    p = ModelParams(n=8)
    first = slr.classify_transition(p.replace(omega_z=0.1), "omega_x",
                                    0.3, 0.7)
    assert first.order == "first"
    assert first.jump > 0.45
    second = slr.classify_transition(p.replace(omega_x=0.0), "omega_z",
                                     0.5, 1.5)
    assert second.order == "second"
    assert second.critical_value == pytest.approx(1.0, abs=1e-4)
    none = slr.classify_transition(p.replace(omega_z=1.8), "omega_x",
                                   0.0, 0.8)
    assert none.order == "none"


def test_finite_t_thresholds():
    p = ModelParams(n=8)
    lo, hi = [s for s in slr.finite_T_summary([0.9 / 0.5, 2.0 / 0.5], p)]
    assert not lo.has_ordered_phase
    assert hi.has_ordered_phase and hi.has_first_order


def test_multivariate_reduction_small():
    p = ModelParams(n=16, alpha=0.5, omega_x=0.2, omega_z=0.25)
    report = slr.check_univariate_reduction(p, n_starts=5, seed=1)
    assert report.max_nonstaggered_u < 1e-7
    ref = slr.minimize_univariate(p)
    assert abs(report.staggered_u) == pytest.approx(abs(ref.u_bar), abs=1e-6)


def test_multivariate_energy_matches_univariate_on_staggered_axis():
    p = ModelParams(n=12, alpha=0.5, omega_x=0.1, omega_z=0.3)
    spec = None
    from stagising.interactions import spectrum
    spec = spectrum(p)
    from stagising.slr import _active_modes, multivariate_free_energy
    active = _active_modes(spec)
    stag_pos = list(active).index(spec.staggered_index)
    for u in (0.0, 0.2, -0.35):
        vec = np.zeros(len(active))
        vec[stag_pos] = u
        assert multivariate_free_energy(vec, p, spec) == pytest.approx(
            float(slr.objective(u, p)), rel=1e-12)


def test_phase_diagram_grid_and_line():
    p = ModelParams(n=8)
    wxs = np.linspace(0.0, 0.75, 6)
    wzs = np.linspace(0.0, 1.25, 6)
    diagram = slr.phase_diagram(p, wxs, wzs)
    assert diagram.m_s.shape == (6, 6)
    assert abs(diagram.m_s[0, 0]) == pytest.approx(0.5)       # deep AF corner
    assert diagram.m_s[-1, -1] == pytest.approx(0.0, abs=1e-9)  # deep PM
    assert diagram.tricritical is not None
    assert len(diagram.critical_line) > 0


def test_phase_diagram_parallel_matches_serial():
    p = ModelParams(n=8)
    wxs = np.linspace(0.0, 0.6, 4)
    wzs = np.linspace(0.0, 1.2, 4)
    serial = slr.phase_diagram(p, wxs, wzs, jobs=1)
    parallel = slr.phase_diagram(p, wxs, wzs, jobs=2)
    assert serial.m_s == pytest.approx(parallel.m_s, abs=0)
    assert serial.energy == pytest.approx(parallel.energy, abs=0)
