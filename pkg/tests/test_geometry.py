import numpy as np
import pytest

from shockfront import geometry as geo
from shockfront import model as mo
from shockfront.errors import DegenerateCharacteristic, NonpositiveMu


def test_eikonal_root_flat():
    assert geo.eikonal_time_root(0.0, 1.0) == pytest.approx(1.0)


def test_eikonal_root_quadratic_formula():
    p = geo.eikonal_time_root(0.3, 0.91)
    assert p == pytest.approx(1.3)
    # verify by substitution into -p^2 + 2 b p + c = 0
    assert -p * p + 2 * 0.3 * p + 0.91 == pytest.approx(0.0, abs=1e-14)


def test_eikonal_root_degenerate():
    with pytest.raises(DegenerateCharacteristic):
        geo.eikonal_time_root(0.0, 0.0)


def test_mu_from_bc():
    assert geo.mu_from_bc(0.0, 1.0) == pytest.approx(1.0)
    assert geo.mu_from_bc(0.3, 0.91) == pytest.approx(1.0)


def test_mu_cross_check_via_gbar(diag_model):
    # mu^-2 = (gbar^-1)^{ab} d_a u d_b u must agree with 1/sqrt(b^2+c)
    psi = 0.1
    g = mo.evaluate_metric(diag_model, psi)
    ginv = mo.inv_sym3(g)
    du_sp = np.array([-1.3, 0.4])
    b, c = geo.eikonal_bc(ginv, du_sp)
    mu = geo.mu_from_bc(b, c)
    gbar_inv, _ = geo.spatial_block_inverse(g)
    mu_alt = 1.0 / np.sqrt(gbar_inv[0, 0] * du_sp[0] ** 2
                           + 2 * gbar_inv[0, 1] * du_sp[0] * du_sp[1]
                           + gbar_inv[1, 1] * du_sp[1] ** 2)
    assert mu == pytest.approx(mu_alt, abs=1e-12)


def test_build_frame_flat(diag_model):
    fr = geo.build_frame(diag_model, 0.0, np.array([1.0, -1.0, 0.0]),
                         tol_id=1e-10)
    assert fr.mu == pytest.approx(1.0)
    assert np.allclose(fr.L, [1.0, 1.0, 0.0])
    assert np.allclose(fr.X, [0.0, -1.0, 0.0])
    assert np.allclose(fr.N, [1.0, 0.0, 0.0])


def test_build_frame_oblique(diag_model):
    phi = 0.7
    du_sp = np.array([-np.cos(phi), -np.sin(phi)])
    g = mo.evaluate_metric(diag_model, 0.05)
    ginv = mo.inv_sym3(g)
    b, c = geo.eikonal_bc(ginv, du_sp)
    p = geo.eikonal_time_root(b, c)
    fr = geo.build_frame(diag_model, 0.05, np.array([p, *du_sp]), tol_id=1e-10)
    res = geo.frame_norm_residuals(g, fr.L, fr.X)
    for v in res.values():
        assert abs(v) < 1e-12
    assert fr.L[0] == 1.0
    assert fr.X[0] == 0.0


def test_build_frame_degenerate_gradient(diag_model):
    with pytest.raises(DegenerateCharacteristic):
        geo.build_frame(diag_model, 0.0, np.zeros(3))


def test_mu_negative_raises(diag_model):
    with pytest.raises(NonpositiveMu):
        geo.build_frame(diag_model, 0.0, np.array([-1.0, 1.0, 0.0]))


def test_sigma0_flat(diag_model):
    mu0, Ls, Xi = geo.sigma0_relations(diag_model, 0.0)
    assert mu0 == pytest.approx(1.0)
    assert np.allclose(Ls, 0.0)
    assert np.allclose(Xi, 0.0)


def test_sigma0_handworked(diag_model):
    # g11 = 1.1: (gbar^-1)^11 = 1/1.1, mu = sqrt(1.1)
    mu0, Ls, Xi = geo.sigma0_relations(diag_model, 0.1)
    assert mu0 == pytest.approx(np.sqrt(1.1), abs=1e-12)


def test_sigma0_consistent_with_build_frame(offdiag_model):
    # on Sigma_0 the eikonal data is u = 1 - x^1: du = (p, -1, 0)
    for psi in (-0.2, 0.0, 0.15):
        g = mo.evaluate_metric(offdiag_model, psi)
        ginv = mo.inv_sym3(g)
        b, c = geo.eikonal_bc(ginv, np.array([-1.0, 0.0]))
        p = geo.eikonal_time_root(b, c)
        fr = geo.build_frame(offdiag_model, psi, np.array([p, -1.0, 0.0]))
        mu0, Ls, Xi = geo.sigma0_relations(offdiag_model, psi)
        assert fr.mu == pytest.approx(mu0, abs=1e-10)
        assert np.allclose(fr.Lsmall, Ls, atol=1e-10)


def test_mu_transport_rhs_values():
    gf = geo.GFrameComponents(G_LL=1.0, G_LX=0.0, G_XX=0.0,
                              Gslash_L=0.0, Gslash_X=0.0, Gslash=0.0)
    assert geo.mu_transport_rhs(1.0, gf, 0.0, -0.5) == pytest.approx(-0.25)
    assert geo.mu_transport_rhs(1.0, gf, 0.0, 0.0) == 0.0
    gf2 = geo.GFrameComponents(G_LL=1.0, G_LX=0.2, G_XX=0.0,
                               Gslash_L=0.0, Gslash_X=0.0, Gslash=0.0)
    out = geo.mu_transport_rhs(2.0, gf2, 0.01, -0.5)
    assert out == pytest.approx(-0.25 - 0.01 - 0.004)


def test_lsmall_transport_background(diag_model):
    g = mo.evaluate_metric(diag_model, 0.0)
    ginv = mo.inv_sym3(g)
    L = np.array([1.0, 1.0, 0.0])
    X = np.array([0.0, -1.0, 0.0])
    T = geo.torus_direction(g, ginv, L, X)
    G = mo.metric_derivatives(diag_model, 0.0).G
    gf = geo.frame_g_components(G, L, X, T)
    eps = 0.01
    out = geo.lsmall_transport_rhs(gf, L, ginv, eps, 0.0, T)
    # background: (g^-1)^{01} = 0, so the i = 1 component is -G_LL eps / 2
    assert out[0] == pytest.approx(-0.5 * gf.G_LL * eps)
    assert out[1] == pytest.approx(0.0)
    # degree-1 homogeneity in the psi-derivatives
    out2 = geo.lsmall_transport_rhs(gf, L, ginv, -eps, 0.0, T)
    assert np.allclose(out2, -out)
    assert np.allclose(geo.lsmall_transport_rhs(gf, L, ginv, 0.0, 0.0, T), 0.0)


def test_torus_direction_flat(diag_model):
    g = mo.evaluate_metric(diag_model, 0.0)
    ginv = mo.inv_sym3(g)
    L = np.array([1.0, 1.0, 0.0])
    X = np.array([0.0, -1.0, 0.0])
    T = geo.torus_direction(g, ginv, L, X)
    assert np.allclose(T, [0.0, 0.0, 1.0])
    assert T[0] == 0.0


def test_trchi_zero_cases(diag_model):
    g = mo.evaluate_metric(diag_model, 0.0)
    ginv = mo.inv_sym3(g)
    L = np.array([1.0, 1.0, 0.0])
    X = np.array([0.0, -1.0, 0.0])
    T = geo.torus_direction(g, ginv, L, X)
    G = mo.metric_derivatives(diag_model, 0.0).G
    gf = geo.frame_g_components(G, L, X, T)
    # flat background; and plane symmetry with Gslash = 0
    assert geo.trchi(g, np.zeros(2), T, gf, 0.0) == 0.0
    assert gf.Gslash == 0.0
    assert geo.trchi(g, np.zeros(2), T, gf, 0.3) == 0.0


def test_jacobian_det_values():
    assert geo.jacobian_det(1.0, 1.0, 1.0) == 1.0
    assert geo.jacobian_det(0.5, 1.21, 1.0) == pytest.approx(0.5 / 1.1)


def test_delta_star_examples():
    assert geo.delta_star(np.array([0.1, 0.0, 2.0])) == 0.0
    assert geo.delta_star(np.array([0.2, -0.5, 0.1])) == pytest.approx(0.25)
    u = np.linspace(0.0, 1.0, 20001)
    samples = -np.sin(np.pi * u) ** 2
    assert geo.delta_star(samples) == pytest.approx(0.5, abs=1e-8)


def test_delta_star_properties():
    rng = np.random.default_rng(5)
    base = rng.uniform(-1.0, 1.0, size=50)
    d0 = geo.delta_star(base)
    # invariant under adding non-negative samples
    assert geo.delta_star(np.concatenate([base, rng.uniform(0, 2, 10)])) == d0
    # monotone under deepening the most negative sample
    deeper = base.copy()
    deeper[np.argmin(deeper)] -= 0.3
    assert geo.delta_star(deeper) >= d0


def test_delta_star_argmin_ties():
    u = np.array([0.2, 0.4, 0.6])
    th = np.array([0.5, 0.1, 0.9])
    samples = np.array([-1.0, -1.0, -0.5])
    val, u_at, th_at = geo.delta_star_argmin(samples, u, th)
    assert val == 0.5
    assert u_at == 0.2 and th_at == 0.5      # smallest u wins the tie


def test_frame_identity_residuals_flat(diag_model):
    res = geo.frame_identity_residuals(diag_model, 0.0,
                                       np.array([1.0, -1.0, 0.0]))
    for v in res.values():
        assert np.max(np.abs(v)) < 1e-14


def test_frame_identity_residuals_perturbed(diag_model):
    # injecting an error e into d_1 u perturbs the eikonal residual by
    # about 2 e |d_1 u| at first order
    du = np.array([1.0, -1.0, 0.0])
    e = 1e-3
    bad = du + np.array([0.0, e, 0.0])
    res = geo.frame_identity_residuals(diag_model, 0.0, bad)
    assert abs(res["eikonal"]) == pytest.approx(2 * e, rel=1e-2)


def test_gframe_components_recomputable(offdiag_model):
    rng = np.random.default_rng(9)
    psi = 0.1
    g = mo.evaluate_metric(offdiag_model, psi)
    ginv = mo.inv_sym3(g)
    du_sp = np.array([-1.1, 0.2])
    b, c = geo.eikonal_bc(ginv, du_sp)
    p = geo.eikonal_time_root(b, c)
    fr = geo.build_frame(offdiag_model, psi, np.array([p, *du_sp]))
    T = geo.torus_direction(g, ginv, fr.L, fr.X)
    G = mo.metric_derivatives(offdiag_model, psi).G
    gf = geo.frame_g_components(G, fr.L, fr.X, T)
    assert gf.G_LL == pytest.approx(fr.L @ G @ fr.L)
    assert gf.G_LX == pytest.approx(fr.L @ G @ fr.X)
    assert gf.Gslash == pytest.approx(T @ G @ T)
    # torus norm is unit and T is g-orthogonal to L and X
    assert T @ g @ T == pytest.approx(1.0, abs=1e-12)
    assert T @ g @ fr.L == pytest.approx(0.0, abs=1e-12)
    assert T @ g @ fr.X == pytest.approx(0.0, abs=1e-12)
