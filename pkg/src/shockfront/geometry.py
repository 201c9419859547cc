"""Pointwise eikonal and null-frame algebra.

Everything is built from the eikonal function u, whose gradient du and the
metric g(psi) determine the inverse foliation density mu, the rescaled null
vectorfield L (with L^0 = 1), and the transversal unit vectorfield X
(with X^0 = 0).  With one periodic torus dimension, all line-tangent tensor
operations reduce to scalars: they are stored as contractions with the unit
torus direction T = Theta / upsilon, so e.g. the torus gradient of a scalar f
enters formulas only through Tf and the frame components of dg/dpsi only
through G(T, .) contractions.

All functions broadcast over leading array axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCharacteristic, FrameDegenerate, NonpositiveMu
from .model import MetricModel, evaluate_metric, inv_sym3, metric_bundle

#: default identity-residual tolerance on exact/analytic inputs
TOL_ID = 1e-10


@dataclass
class FrameState:
    """Per-point frame bundle: psi, mu, and rectangular L, X components."""

    psi: np.ndarray
    mu: np.ndarray
    L: np.ndarray      # (..., 3), L[..., 0] == 1 exactly
    X: np.ndarray      # (..., 3), X[..., 0] == 0 exactly

    @property
    def Lsmall(self):
        """L^i - delta^{i1}, the perturbation of the flat null direction."""
        out = self.L[..., 1:].copy()
        out[..., 0] -= 1.0
        return out

    @property
    def N(self):
        """Future-directed unit normal N = L + X."""
        return self.L + self.X


@dataclass(frozen=True)
class GFrameComponents:
    """Frame contractions of a metric-derivative matrix.

    Torus components are Theta-contracted and upsilon-normalized, i.e.
    built with the unit torus direction T: Gslash_L = G(L, T), etc.
    """

    G_LL: np.ndarray
    G_LX: np.ndarray
    G_XX: np.ndarray
    Gslash_L: np.ndarray
    Gslash_X: np.ndarray
    Gslash: np.ndarray


def eikonal_time_root(b, c):
    """Positive root d_t u = b + sqrt(b^2 + c) of -p^2 + 2 b p + c = 0.

    b = (g^-1)^{0i} d_i u and c = (g^-1)^{ij} d_i u d_j u are built from the
    spatial gradient of u under the normalization (g^-1)^00 = -1.
    """
    b = np.asarray(b, dtype=float)
    disc = b * b + c
    if np.any(disc <= 0.0):
        raise DegenerateCharacteristic("b^2 + c <= 0: no positive eikonal root")
    return b + np.sqrt(disc)


def eikonal_bc(ginv, du_spatial):
    """(b, c) coefficients of the eikonal quadratic from spatial du."""
    u1 = du_spatial[..., 0]
    u2 = du_spatial[..., 1]
    b = ginv[..., 0, 1] * u1 + ginv[..., 0, 2] * u2
    c = (ginv[..., 1, 1] * u1 * u1 + 2.0 * ginv[..., 1, 2] * u1 * u2
         + ginv[..., 2, 2] * u2 * u2)
    return b, c


def mu_from_bc(b, c):
    """mu = 1 / sqrt(b^2 + c), the inverse foliation density."""
    b = np.asarray(b, dtype=float)
    disc = b * b + c
    if np.any(disc <= 0.0):
        raise NonpositiveMu("b^2 + c <= 0 while computing mu")
    return 1.0 / np.sqrt(disc)


def mu_from_eikonal(du, ginv):
    """mu = -1 / ((g^-1)^{0 a} d_a u) with the full spacetime gradient du."""
    denom = np.einsum("...a,...a->...", ginv[..., 0, :], du)
    if np.any(denom == 0.0):
        raise DegenerateCharacteristic("vanishing eikonal gradient")
    mu = -1.0 / denom
    if np.any(mu <= 0.0):
        raise NonpositiveMu("mu <= 0: shock crossed or corrupted data")
    return mu


def build_frame(model: MetricModel, psi, du, tol_id: float | None = None) -> FrameState:
    """Construct (mu, L, X) from the full eikonal gradient du = (d_t u, d_i u).

    L^nu = -mu (g^-1)^{nu a} d_a u with L^0 = 1 enforced exactly, and
    X^nu = -L^nu - (g^-1)^{0 nu}.  When ``tol_id`` is given, the frame norm
    identities are checked and FrameDegenerate is raised past 10 * tol_id.
    """
    psi = np.asarray(psi, dtype=float)
    du = np.asarray(du, dtype=float)
    g, ginv, _ = metric_bundle(model, psi)
    mu = mu_from_eikonal(du, ginv)
    L = -mu[..., None] * np.einsum("...ab,...b->...a", ginv, du)
    if np.max(np.abs(L[..., 0] - 1.0)) > 1e-12:
        raise FrameDegenerate("L^0 != 1 beyond 1e-12 after mu rescaling")
    L[..., 0] = 1.0
    X = -L - ginv[..., 0, :]
    X[..., 0] = 0.0
    frame = FrameState(psi=psi, mu=mu, L=L, X=X)
    if tol_id is not None:
        res = frame_norm_residuals(g, L, X)
        worst = max(np.max(np.abs(v)) for v in res.values())
        if worst > 10.0 * tol_id:
            raise FrameDegenerate(f"frame identity residual {worst:.3e} > 10*tol_id")
    return frame


def frame_norm_residuals(g, L, X) -> dict:
    """Residuals of g(L,L), g(X,X)-1, g(L,X)+1, g(N,N)+1."""
    def ip(v, w):
        return np.einsum("...a,...ab,...b->...", v, g, w)

    N = L + X
    return {
        "g_LL": ip(L, L),
        "g_XX_minus_1": ip(X, X) - 1.0,
        "g_LX_plus_1": ip(L, X) + 1.0,
        "g_NN_plus_1": ip(N, N) + 1.0,
    }


def spatial_block_inverse(g):
    """Inverse and determinant of the spatial 2x2 block g_ij (= gbar on Sigma_t)."""
    a = g[..., 1, 1]
    b = g[..., 1, 2]
    d = g[..., 2, 2]
    det = a * d - b * b
    inv = np.empty(g.shape[:-2] + (2, 2), dtype=float)
    inv[..., 0, 0] = d
    inv[..., 0, 1] = inv[..., 1, 0] = -b
    inv[..., 1, 1] = a
    inv /= det[..., None, None]
    return inv, det


def sigma0_relations(model: MetricModel, psi):
    """Frame seeds on the initial slice, where u = 1 - x^1.

    Returns (mu0, Lsmall, Xi) with
        mu0      = 1 / sqrt((gbar^-1)^11)
        Lsmall^i = (gbar^-1)^{i1} / sqrt((gbar^-1)^11) - delta^{i1} - (g^-1)^{0i}
        Xi^i     = (gbar^-1)^{i1} / (gbar^-1)^11 - delta^{i1}
    """
    psi = np.asarray(psi, dtype=float)
    g = evaluate_metric(model, psi)
    ginv = inv_sym3(g)
    gbar_inv, _ = spatial_block_inverse(g)
    col = gbar_inv[..., :, 0]          # (gbar^-1)^{i1}
    g11 = gbar_inv[..., 0, 0]
    mu0 = 1.0 / np.sqrt(g11)
    delta = np.array([1.0, 0.0])
    Lsmall = col / np.sqrt(g11)[..., None] - delta - ginv[..., 0, 1:]
    Xi = col / g11[..., None] - delta
    return mu0, Lsmall, Xi


def torus_direction(g, ginv, L, X):
    """Unit torus vector T = Theta / upsilon as rectangular components.

    Built by projecting the covector dx^2 with the line-projected inverse
    metric gslash^-1 = g^-1 + L (x) L + L (x) X + X (x) L and normalizing.
    T^0 = 0 exactly.  The overall sign is a gauge choice that cancels in
    every formula where T appears (always in pairs).
    """
    gsl = (ginv + L[..., :, None] * L[..., None, :]
           + L[..., :, None] * X[..., None, :]
           + X[..., :, None] * L[..., None, :])
    T = gsl[..., :, 2].copy()
    T[..., 0] = 0.0
    norm2 = np.einsum("...a,...ab,...b->...", T, g, T)
    if np.any(norm2 <= 0.0):
        raise FrameDegenerate("torus direction has nonpositive norm")
    return T / np.sqrt(norm2)[..., None]


def frame_g_components(G, L, X, T) -> GFrameComponents:
    """Contract a metric-derivative matrix against the non-rescaled frame."""
    def ip(v, w):
        return np.einsum("...a,...ab,...b->...", v, G, w)

    return GFrameComponents(
        G_LL=ip(L, L), G_LX=ip(L, X), G_XX=ip(X, X),
        Gslash_L=ip(L, T), Gslash_X=ip(X, T), Gslash=ip(T, T),
    )


def mu_transport_rhs(mu, gf: GFrameComponents, LPsi, XbrevePsi):
    """Exact right-hand side of L mu along characteristics:

        L mu = G_LL XbrevePsi / 2 - mu G_LL LPsi / 2 - mu G_LX LPsi.

    The first (transversal) term drives the shock; the rest are tangential.
    """
    return (0.5 * gf.G_LL * XbrevePsi
            - 0.5 * mu * gf.G_LL * LPsi
            - mu * gf.G_LX * LPsi)


def lsmall_transport_rhs(gf: GFrameComponents, L, ginv, LPsi, TPsi, T):
    """Right-hand side of L L^i_small, both spatial components at once.

        L L^i_small = -G_LL LPsi L^i / 2 - G_LL LPsi (g^-1)^{0i} / 2
                      - G(L,T) T^i LPsi + G_LL (TPsi) T^i / 2.
    """
    Li = L[..., 1:]
    Ti = T[..., 1:]
    g0i = ginv[..., 0, 1:]
    a = (-0.5 * gf.G_LL * LPsi)[..., None]
    return (a * Li + a * g0i
            - (gf.Gslash_L * LPsi)[..., None] * Ti
            + (0.5 * gf.G_LL * TPsi)[..., None] * Ti)


def trchi(g, TL, T, gf: GFrameComponents, LPsi):
    """Trace of the null second fundamental form of the lines l_{t,u}:

        tr chi = g_ab (T L^a) T^b + Gslash LPsi / 2,

    where TL holds the torus-direction derivatives (T^j d_j L^a) of the two
    rectangular component functions L^a, a = 1, 2.  Equals L ln(upsilon).
    """
    gab = g[..., 1:, 1:]
    term = np.einsum("...ab,...a,...b->...", gab, TL, T[..., 1:])
    return term + 0.5 * gf.Gslash * LPsi


def jacobian_det(mu, det_gbar, upsilon):
    """Jacobian determinant of the geometric-to-rectangular chart:

        det d(x) / d(t, u, theta) = mu (det gbar)^{-1/2} upsilon.
    """
    return mu * det_gbar ** (-0.5) * upsilon


def delta_star(samples) -> float:
    """Half the sup of the negative part of G_LL XbrevePsi over the slab.

    Returns 0.0 when the coefficient is nowhere negative (no shock
    predicted); its inverse is the leading-order shock time.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise ValueError("empty sample list")
    worst = float(np.min(samples))
    return 0.5 * max(0.0, -worst)


def delta_star_argmin(samples, u, theta=None):
    """delta_star plus the minimizing labels; ties -> smallest u then theta."""
    samples = np.asarray(samples, dtype=float)
    u = np.asarray(u, dtype=float)
    val = delta_star(samples)
    mask = samples == np.min(samples)
    idx = np.nonzero(mask.ravel())[0]
    if theta is None:
        order = np.argsort(u.ravel()[idx], kind="stable")
    else:
        th = np.asarray(theta, dtype=float).ravel()[idx]
        uu = u.ravel()[idx]
        order = np.lexsort((th, uu))
    pick = idx[order[0]]
    if theta is None:
        return val, float(u.ravel()[pick])
    return val, float(u.ravel()[pick]), float(np.asarray(theta).ravel()[pick])


def frame_identity_residuals(model: MetricModel, psi, du) -> dict:
    """Pure measurement of every pointwise frame/eikonal identity.

    du must contain the full gradient (d_t u, d_1 u, d_2 u); the residuals
    vanish identically in the continuum, so on solver output they measure
    discretization error and must converge at O(h^2).
    """
    psi = np.asarray(psi, dtype=float)
    du = np.asarray(du, dtype=float)
    g, ginv, _ = metric_bundle(model, psi)
    frame = build_frame(model, psi, du)
    res = frame_norm_residuals(g, frame.L, frame.X)
    eik = np.einsum("...a,...ab,...b->...", du, ginv, du)
    Ldu = np.einsum("...a,...a->...", frame.L, du)
    Xdu = frame.mu * np.einsum("...a,...a->...", frame.X, du)
    gbar_inv, _ = spatial_block_inverse(g)
    mu2_alt = np.einsum("...ab,...a,...b->...", gbar_inv, du[..., 1:], du[..., 1:])
    X_low = np.einsum("...ab,...b->...a", g, frame.X)
    mu_du = frame.mu[..., None] * du[..., 1:] - X_low[..., 1:]
    res.update({
        "eikonal": eik,
        "L_du": Ldu,
        "Xbreve_du_minus_1": Xdu - 1.0,
        "mu_identity": frame.mu ** (-2.0) - mu2_alt,
        "mu_du_minus_Xlow": np.max(np.abs(mu_du), axis=-1),
    })
    return res
