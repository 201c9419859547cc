import numpy as np
import pytest

from shockfront import model as mo
from shockfront.errors import (
    DegenerateTimeComponent,
    SignatureLost,
    SingularMetric,
    ValidityExceeded,
)


def test_metric_at_zero_is_minkowski(diag_model):
    assert np.array_equal(mo.evaluate_metric(diag_model, 0.0),
                          np.diag([-1.0, 1.0, 1.0]))


def test_affine_evaluation(diag_model):
    g = mo.evaluate_metric(diag_model, 0.1)
    assert np.allclose(g, np.diag([-1.0, 1.1, 1.0]))


def test_signature_survives_moderate_a00():
    A = np.zeros((3, 3))
    A[0, 0] = 0.2
    m = mo.quadratic_model(A)
    g = mo.evaluate_metric(m, 0.5)
    assert np.allclose(np.diag(g), [-0.9, 1.0, 1.0])


def test_validity_exceeded(diag_model):
    with pytest.raises(ValidityExceeded):
        mo.evaluate_metric(diag_model, 0.7)


def test_signature_lost():
    A = np.zeros((3, 3))
    A[1, 1] = -3.0
    m = mo.quadratic_model(A, psi_max=0.6)
    with pytest.raises(SignatureLost):
        mo.evaluate_metric(m, 0.5)


def test_inverse_metric_diag(diag_model):
    ginv = mo.inverse_metric(diag_model, 0.1)
    assert np.allclose(ginv, np.diag([-1.0, 1.0 / 1.1, 1.0]))


def test_inverse_identity_random(offdiag_model):
    rng = np.random.default_rng(3)
    psi = rng.uniform(-0.4, 0.4, size=20)
    g = mo.evaluate_metric(offdiag_model, psi)
    ginv = mo.inv_sym3(g)
    assert np.max(np.abs(g @ ginv - np.eye(3))) < 1e-12


def test_singular_metric_raises():
    g = np.zeros((3, 3))
    with pytest.raises(SingularMetric):
        mo.inv_sym3(g)


def test_normalize_fixed_point(diag_model):
    m2 = mo.normalize_time_component(diag_model)
    assert m2.normalized
    psi = np.linspace(-0.4, 0.4, 7)
    assert np.array_equal(m2.small(psi), diag_model.small(psi))


def test_normalize_custom_division():
    # g00 = -(1 + psi), spatial identity: rescaling gives g00 = -1,
    # g11 = 1/(1 + psi)
    def small(psi):
        out = np.zeros(np.shape(psi) + (3, 3))
        out[..., 0, 0] = -np.asarray(psi)
        return out

    def dsmall(psi):
        out = np.zeros(np.shape(psi) + (3, 3))
        out[..., 0, 0] = -1.0
        return out

    def d2small(psi):
        return np.zeros(np.shape(psi) + (3, 3))

    m = mo.custom_model(small, dsmall, d2small, psi_max=0.5)
    mhat = mo.normalize_time_component(m)
    for psi in (-0.3, 0.0, 0.2, 0.45):
        g = mo.evaluate_metric(mhat, psi)
        assert abs(g[0, 0] + 1.0) < 1e-14
        assert abs(g[1, 1] - 1.0 / (1.0 + psi)) < 1e-14
        ginv = mo.inverse_metric(mhat, psi)
        assert abs(ginv[0, 0] + 1.0) < 1e-12


def test_normalized_ginv00_sampled(offdiag_model):
    psi = np.linspace(-0.45, 0.45, 100)
    ginv = mo.inv_sym3(mo.evaluate_metric(offdiag_model, psi))
    assert np.max(np.abs(ginv[..., 0, 0] + 1.0)) < 1e-12


def test_normalize_degenerate_time_component():
    A = np.zeros((3, 3))
    A[0, 0] = 4.0          # g00 = -1 + 4 psi crosses zero inside psi range
    m = mo.quadratic_model(A, psi_max=0.5)
    with pytest.raises((DegenerateTimeComponent, SignatureLost)):
        mo.normalize_time_component(m)


def test_normalized_derivatives_match_finite_difference(offdiag_model):
    h = 1e-5
    for psi in (-0.2, 0.0, 0.3):
        G = mo.metric_derivatives(offdiag_model, psi).G
        fd = (mo.evaluate_metric(offdiag_model, psi + h)
              - mo.evaluate_metric(offdiag_model, psi - h)) / (2 * h)
        err1 = np.max(np.abs(G - fd))
        fd2 = (mo.evaluate_metric(offdiag_model, psi + h / 2)
               - mo.evaluate_metric(offdiag_model, psi - h / 2)) / h
        err2 = np.max(np.abs(G - fd2))
        assert err1 < 1e-8
        assert err2 < err1 / 2.0     # O(h^2) halving check


def test_second_derivative_matches_finite_difference(offdiag_model):
    h = 1e-4
    psi = 0.1
    Gp = mo.metric_derivatives(offdiag_model, psi).Gprime
    fd = (mo.metric_derivatives(offdiag_model, psi + h).G
          - mo.metric_derivatives(offdiag_model, psi - h).G) / (2 * h)
    assert np.max(np.abs(Gp - fd)) < 1e-7


def test_christoffel_zero_gradient(diag_model):
    out = mo.christoffel_lowered(diag_model, 0.1, np.zeros(3))
    assert np.array_equal(out, np.zeros((3, 3, 3)))


def test_christoffel_hand_values(diag_model):
    # only G11 = 1; dpsi = (1,0,0): Gamma_{011} = Gamma_{110} = 1/2,
    # Gamma_{101} = -1/2
    out = mo.christoffel_lowered(diag_model, 0.0, np.array([1.0, 0.0, 0.0]))
    expect = np.zeros((3, 3, 3))
    expect[0, 1, 1] = 0.5
    expect[1, 1, 0] = 0.5
    expect[1, 0, 1] = -0.5
    assert np.allclose(out, expect)


def test_christoffel_symmetry_and_linearity(offdiag_model):
    rng = np.random.default_rng(7)
    for _ in range(10):
        psi = rng.uniform(-0.3, 0.3)
        v = rng.standard_normal(3)
        out = mo.christoffel_lowered(offdiag_model, psi, v)
        assert np.allclose(out, np.swapaxes(out, 0, 2))      # (a,b) symmetry
        a = rng.uniform(-2.0, 2.0)
        assert np.allclose(mo.christoffel_lowered(offdiag_model, psi, a * v),
                           a * out)


def test_christoffel_vs_finite_difference_of_metric(offdiag_model):
    # Gamma_{akb} = (d_a g_{kb} + d_b g_{ak} - d_k g_{ab})/2 with
    # d_a g = G dpsi_a for a psi field psi(x) = c . x
    rng = np.random.default_rng(11)
    dpsi = rng.standard_normal(3) * 0.1
    psi0 = 0.05
    out = mo.christoffel_lowered(offdiag_model, psi0, dpsi)
    G = mo.metric_derivatives(offdiag_model, psi0).G
    dg = dpsi[:, None, None] * G[None, :, :]
    expect = 0.5 * (np.moveaxis(dg, (0, 1, 2), (0, 1, 2))
                    + np.moveaxis(dg, (0, 1, 2), (2, 0, 1))
                    - np.moveaxis(dg, (0, 1, 2), (1, 0, 2)))
    assert np.allclose(out, expect)


def test_genuine_nonlinearity_examples(diag_model, linear_model):
    assert mo.genuine_nonlinearity_coefficient(diag_model) == pytest.approx(1.0)
    assert mo.genuine_nonlinearity_coefficient(linear_model) == 0.0
    A = np.zeros((3, 3))
    A[0, 0] = 1.0
    A[0, 1] = A[1, 0] = -0.5
    m = mo.quadratic_model(A)
    assert mo.genuine_nonlinearity_coefficient(m) == pytest.approx(0.0)


def test_calibrated_model_exact_properties(calibrated):
    psi = np.linspace(-0.55, 0.55, 41)
    g, ginv, G = mo.metric_bundle(calibrated, psi)
    assert np.max(np.abs(ginv[..., 0, 0] + 1.0)) == 0.0
    assert np.max(np.abs(g[..., 1, 1] - 1.0)) == 0.0
    assert np.max(np.abs(g[..., 1, 2])) == 0.0
    # G(L, L) = 1 exactly with the slice frame L = (1, 1 - psi/2, 0)
    L1 = 1.0 - 0.5 * psi
    gll = G[..., 0, 0] + 2.0 * G[..., 0, 1] * L1 + G[..., 1, 1] * L1 ** 2
    assert np.max(np.abs(gll - 1.0)) < 1e-15
    # bundle path agrees with the generic path
    assert np.allclose(g, mo.evaluate_metric(calibrated, psi))
    assert np.allclose(ginv, mo.inv_sym3(g), atol=1e-14)
