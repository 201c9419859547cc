"""Metric laws g(psi) = m + g_small(psi) for the scalar quasilinear wave equation.

The metric is a 3x3 symmetric Lorentzian matrix field over the scalar wave
variable psi, expanded around Minkowski m = diag(-1, 1, 1).  Everything here
is pointwise algebra; all functions broadcast over leading array axes so the
2-D solver can evaluate whole grids in one call.

Conventions: indices run 0 (time), 1, 2 (space); x^2 is the periodic
direction.  A "normalized" model satisfies (g^-1)^00 == -1 identically,
obtained by scaling the metric with -(g^-1)^00.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import (
    DegenerateTimeComponent,
    SignatureLost,
    SingularMetric,
    ValidityExceeded,
)

MINKOWSKI = np.diag([-1.0, 1.0, 1.0])

#: determinant floor below which inversion raises SingularMetric
DET_FLOOR = 1e-14

#: default validity bound for quadratic models with unit-norm coefficient
DEFAULT_PSI_MAX = 0.5


def inv_sym3(g):
    """Cofactor inverse of symmetric 3x3 matrices, vectorized over leading axes.

    Raises SingularMetric when |det| < DET_FLOOR anywhere.
    """
    g = np.asarray(g, dtype=float)
    a, b, c = g[..., 0, 0], g[..., 0, 1], g[..., 0, 2]
    d, e, f = g[..., 1, 1], g[..., 1, 2], g[..., 2, 2]
    ca = d * f - e * e
    cb = c * e - b * f
    cc = b * e - c * d
    det = a * ca + b * cb + c * cc
    if np.any(np.abs(det) < DET_FLOOR):
        raise SingularMetric(f"metric determinant magnitude below {DET_FLOOR}")
    inv = np.empty_like(g)
    inv[..., 0, 0] = ca
    inv[..., 0, 1] = inv[..., 1, 0] = cb
    inv[..., 0, 2] = inv[..., 2, 0] = cc
    inv[..., 1, 1] = a * f - c * c
    inv[..., 1, 2] = inv[..., 2, 1] = b * c - a * e
    inv[..., 2, 2] = a * d - b * b
    inv /= det[..., None, None]
    return inv


@dataclass(frozen=True)
class MetricDerivatives:
    """First and second psi-derivatives of the metric at a state."""

    G: np.ndarray
    Gprime: np.ndarray


@dataclass(frozen=True)
class MetricModel:
    """A smooth metric law psi -> g(psi) with analytic derivatives.

    ``small``, ``dsmall``, ``d2small`` map psi (any shape) to arrays of shape
    ``psi.shape + (3, 3)`` holding g - m and its first two psi-derivatives.
    Custom models must supply analytic derivatives; the solver never
    differentiates the metric numerically.
    """

    kind: str
    small: Callable[[np.ndarray], np.ndarray]
    dsmall: Callable[[np.ndarray], np.ndarray]
    d2small: Callable[[np.ndarray], np.ndarray]
    psi_max: float = DEFAULT_PSI_MAX
    coeff: np.ndarray | None = None
    normalized: bool = False
    bundle: Callable | None = None      # optional one-pass (g, g^-1, G) path

    def check_validity(self, psi) -> None:
        if np.any(np.abs(psi) > self.psi_max):
            raise ValidityExceeded(
                f"|psi| exceeds validity bound psi_max={self.psi_max}"
            )


def quadratic_model(A, psi_max: float = DEFAULT_PSI_MAX) -> MetricModel:
    """Affine law g(psi) = m + psi * A with A a 3x3 symmetric matrix."""
    A = np.asarray(A, dtype=float)
    if A.shape != (3, 3) or not np.allclose(A, A.T):
        raise ValueError("A must be a symmetric 3x3 matrix")
    zeros = np.zeros((3, 3))

    def small(psi):
        psi = np.asarray(psi, dtype=float)
        return psi[..., None, None] * A

    def dsmall(psi):
        psi = np.asarray(psi, dtype=float)
        return np.broadcast_to(A, psi.shape + (3, 3))

    def d2small(psi):
        psi = np.asarray(psi, dtype=float)
        return np.broadcast_to(zeros, psi.shape + (3, 3))

    return MetricModel("quadratic", small, dsmall, d2small, psi_max, coeff=A)


def custom_model(small, dsmall, d2small, psi_max: float = DEFAULT_PSI_MAX) -> MetricModel:
    """Wrap user-supplied analytic callables psi -> 3x3 arrays.

    ``small(0)`` must vanish; this is evaluated, not assumed.
    """
    model = MetricModel("custom", _vectorize33(small), _vectorize33(dsmall),
                        _vectorize33(d2small), psi_max)
    s0 = model.small(np.asarray(0.0))
    if np.max(np.abs(s0)) > 1e-12:
        raise ValueError("g_small(0) != 0")
    return model


def _vectorize33(fn):
    """Allow scalar-only callables: broadcast over leading psi axes if needed."""

    def wrapped(psi):
        psi = np.asarray(psi, dtype=float)
        out = np.asarray(fn(psi))
        if out.shape == psi.shape + (3, 3):
            return out
        flat = np.empty(psi.size * 9, dtype=float).reshape(psi.size, 3, 3)
        for i, p in enumerate(np.ravel(psi)):
            flat[i] = fn(p)
        return flat.reshape(psi.shape + (3, 3))

    return wrapped


def _signature_ok(g) -> np.ndarray:
    """Lorentzian check: g00 < 0 and spatial 2x2 block positive definite."""
    g = np.asarray(g)
    lead = g[..., 1, 1] > 0.0
    minor = g[..., 1, 1] * g[..., 2, 2] - g[..., 1, 2] ** 2 > 0.0
    return (g[..., 0, 0] < 0.0) & lead & minor


def evaluate_metric(model: MetricModel, psi) -> np.ndarray:
    """g(psi) = m + g_small(psi); raises if out of validity or non-Lorentzian."""
    model.check_validity(psi)
    psi = np.asarray(psi, dtype=float)
    g = MINKOWSKI + model.small(psi)
    if not np.all(_signature_ok(g)):
        raise SignatureLost("metric signature is not (-,+,+)")
    return g


def inverse_metric(model: MetricModel, psi) -> np.ndarray:
    return inv_sym3(evaluate_metric(model, psi))


def metric_derivatives(model: MetricModel, psi) -> MetricDerivatives:
    model.check_validity(psi)
    psi = np.asarray(psi, dtype=float)
    return MetricDerivatives(G=model.dsmall(psi), Gprime=model.d2small(psi))


def metric_bundle(model: MetricModel, psi):
    """One-pass (g, g^-1, G) evaluation for solver hot loops."""
    if model.bundle is not None:
        model.check_validity(psi)
        return model.bundle(np.asarray(psi, dtype=float))
    g = evaluate_metric(model, psi)
    return g, inv_sym3(g), model.dsmall(np.asarray(psi, dtype=float))


def normalize_time_component(model: MetricModel, n_samples: int = 101) -> MetricModel:
    """Rescale the metric by -(g^-1)^00 so that (g^-1)^00 == -1.

    Derivative callables are rescaled by the analytic chain rule:
        ghat  = phi g,   phi  = -(g^-1)^00
        Ghat  = phi' g + phi G
        Ghat' = phi'' g + 2 phi' G + phi G'
    with phi'  = (g^-1 G g^-1)^00 and
         phi'' = (g^-1 G' g^-1 - 2 g^-1 G g^-1 G g^-1)^00.
    Already-normalized models are returned unchanged (fixed point).
    """
    samples = np.linspace(-model.psi_max, model.psi_max, n_samples)
    ginv00 = inv_sym3(MINKOWSKI + model.small(samples))[..., 0, 0]
    if np.any(ginv00 >= 0.0):
        raise DegenerateTimeComponent("(g^-1)^00 >= 0 on the validity range")
    if np.max(np.abs(ginv00 + 1.0)) <= 1e-12:
        return replace(model, normalized=True)

    base_small, base_d, base_d2 = model.small, model.dsmall, model.d2small

    def _parts(psi):
        g = MINKOWSKI + base_small(psi)
        ginv = inv_sym3(g)
        return g, ginv

    def small_hat(psi):
        g, ginv = _parts(psi)
        phi = -ginv[..., 0, 0]
        return phi[..., None, None] * g - MINKOWSKI

    def dsmall_hat(psi):
        g, ginv = _parts(psi)
        G = base_d(psi)
        phi = -ginv[..., 0, 0]
        phi1 = (ginv @ G @ ginv)[..., 0, 0]
        return phi1[..., None, None] * g + phi[..., None, None] * G

    def d2small_hat(psi):
        g, ginv = _parts(psi)
        G = base_d(psi)
        Gp = base_d2(psi)
        phi = -ginv[..., 0, 0]
        gG = ginv @ G
        phi1 = (gG @ ginv)[..., 0, 0]
        phi2 = (ginv @ Gp @ ginv - 2.0 * gG @ gG @ ginv)[..., 0, 0]
        return (phi2[..., None, None] * g + 2.0 * phi1[..., None, None] * G
                + phi[..., None, None] * Gp)

    def bundle_hat(psi):
        # single inversion; ghat^-1 = g^-1 / phi needs no second inverse
        g = MINKOWSKI + base_small(psi)
        if not np.all(_signature_ok(g)):
            raise SignatureLost("metric signature is not (-,+,+)")
        ginv = inv_sym3(g)
        phi = -ginv[..., 0, 0]
        G = base_d(psi)
        row = np.einsum("...a,...ab,...b->...", ginv[..., 0, :], G, ginv[..., 0, :])
        ghat = phi[..., None, None] * g
        ghat_inv = ginv / phi[..., None, None]
        Ghat = row[..., None, None] * g + phi[..., None, None] * G
        return ghat, ghat_inv, Ghat

    return MetricModel(model.kind, small_hat, dsmall_hat, d2small_hat,
                       model.psi_max, coeff=model.coeff, normalized=True,
                       bundle=bundle_hat)


def christoffel_lowered(model: MetricModel, psi, dpsi) -> np.ndarray:
    """Lowered Christoffel symbols of g(psi) at gradient dpsi.

    Gamma_{a k b} = (G_{kb} dpsi_a + G_{ak} dpsi_b - G_{ab} dpsi_k) / 2,
    symmetric in (a, b) and exactly linear in dpsi.
    """
    G = metric_derivatives(model, psi).G
    dpsi = np.asarray(dpsi, dtype=float)
    t1 = dpsi[..., :, None, None] * G[..., None, :, :]    # G_{kb} d_a
    t2 = dpsi[..., None, None, :] * G[..., :, :, None]    # G_{ak} d_b
    t3 = dpsi[..., None, :, None] * G[..., :, None, :]    # G_{ab} d_k
    return 0.5 * (t1 + t2 - t3)


def genuine_nonlinearity_coefficient(model: MetricModel) -> float:
    """G(L_flat, L_flat) at psi = 0 with L_flat = d_t + d_1.

    Zero means Klainerman's null condition holds and no shock is predicted;
    callers treat |value| < 1e-10 as a rejected model for shock runs.
    """
    G0 = model.dsmall(np.asarray(0.0))
    return float(G0[0, 0] + 2.0 * G0[0, 1] + G0[1, 1])


def shock_model(strength: float = 1.0, psi_max: float = DEFAULT_PSI_MAX,
                normalized: bool = True) -> MetricModel:
    """Off-diagonal quadratic model g_01 = strength * psi / 2.

    The workhorse genuinely-nonlinear example: G(L_flat, L_flat)(0) = strength
    while mu and the spatial metric deviate from flat only at O(psi^2), which
    keeps mu|_{t=0} within O(amplitude^2) of 1 for bump data.
    """
    A = np.zeros((3, 3))
    A[0, 1] = A[1, 0] = 0.5 * strength
    m = quadratic_model(A, psi_max=psi_max)
    return normalize_time_component(m) if normalized else m


def calibrated_shock_model(strength: float = 1.0, psi_max: float = 0.6) -> MetricModel:
    """Metric law with g_01 = h, g_00 = -1 + h^2, h = strength * psi / 2.

    Exact properties, for every |psi| <= psi_max:
        (g^-1)^00 = -1        (already normalized),
        spatial block == id   (so mu = 1 exactly on the initial slice),
        G(L, L) = strength    with the slice frame L = (1, 1 - h, 0).
    With plateau-profile data this makes the initial L mu field exactly
    strength * Psi'(u) / 2, i.e. a flat-bottomed mu dip of full plateau
    width: the discrete min over a grid then tracks the continuum mu_star
    all the way to the stopping threshold.
    """
    c = 0.5 * strength

    def small(psi):
        psi = np.asarray(psi, dtype=float)
        h = c * psi
        out = np.zeros(psi.shape + (3, 3))
        out[..., 0, 0] = h * h
        out[..., 0, 1] = out[..., 1, 0] = h
        return out

    def dsmall(psi):
        psi = np.asarray(psi, dtype=float)
        out = np.zeros(psi.shape + (3, 3))
        out[..., 0, 0] = 2.0 * c * c * psi
        out[..., 0, 1] = out[..., 1, 0] = c
        return out

    def d2small(psi):
        psi = np.asarray(psi, dtype=float)
        out = np.zeros(psi.shape + (3, 3))
        out[..., 0, 0] = 2.0 * c * c
        return out

    def bundle(psi):
        psi = np.asarray(psi, dtype=float)
        h = c * psi
        g = np.zeros(psi.shape + (3, 3))
        g[..., 0, 0] = h * h - 1.0
        g[..., 0, 1] = g[..., 1, 0] = h
        g[..., 1, 1] = 1.0
        g[..., 2, 2] = 1.0
        ginv = np.zeros_like(g)
        ginv[..., 0, 0] = -1.0
        ginv[..., 0, 1] = ginv[..., 1, 0] = h
        ginv[..., 1, 1] = 1.0 - h * h
        ginv[..., 2, 2] = 1.0
        return g, ginv, dsmall(psi)

    return MetricModel("custom", small, dsmall, d2small, psi_max,
                       normalized=True, bundle=bundle)
