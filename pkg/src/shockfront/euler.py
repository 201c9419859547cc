"""Irrotational relativistic Euler specialization.

The fluid reduces to a quasilinear wave equation for a potential Phi whose
Lagrangian L(sigma) depends on sigma = -(m^-1)^{ab} d_a Phi d_b Phi (the
squared enthalpy per particle).  This module holds:

* the Lagrangian/sound-speed/acoustical-metric algebra and its physicality
  checks;
* the rescaled coordinates in which the background sound speed is 1 and the
  first-order system variables Psi_vec = (Psi_0', Psi_1', Psi_2');
* the per-point system algebra: metric derivatives G^lam_{mu nu}, the
  log-volume derivative Omega^lam, the null-form source Q, and the
  mu-transport right-hand side of the system;
* the eps-delta hierarchy data constructor (a right-moving near-simple wave
  written in Riemann invariants, R_minus identically zero).

The model Lagrangian L(sigma) = sigma^(s+1) has constant sound speed
c_s = (1+2s)^(-1/2) and equation of state p = rho/(2s+1); it is the default
throughout and its Riemann-invariant integral has a closed form that the
quadrature path must reproduce.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .bumps import BumpProfile
from .errors import FluidValidity, PhysicalityViolated
from .geometry import delta_star
from .model import inv_sym3

_EPS_QUAD = 1e-12


@dataclass(frozen=True)
class FluidModel:
    """A fluid Lagrangian sigma -> L(sigma) with analytic derivatives.

    ``k`` is the background potential slope (Phi = k t); the derived
    background sound speed cbar and rescaled slope kprime = k/cbar are
    filled in by the factories.  ``sigma_range`` bounds the validity
    interval; the default comfortably covers eps-perturbations of the
    constant state.
    """

    lagrangian: Callable
    dL: Callable
    d2L: Callable
    d3L: Callable
    k: float
    sigma_range: tuple
    cbar: float
    constant_sound_speed: bool = False
    s_exponent: float | None = None

    @property
    def kprime(self) -> float:
        return self.k / self.cbar

    def check_sigma(self, sigma) -> None:
        sigma = np.asarray(sigma)
        if np.any(sigma <= 0.0):
            raise FluidValidity("sigma <= 0")
        lo, hi = self.sigma_range
        if np.any(sigma < lo) or np.any(sigma > hi):
            raise FluidValidity(f"sigma outside validity range [{lo}, {hi}]")


def F_of_sigma(fm: FluidModel, sigma):
    """F = (2/G) dG/dsigma with G = 2 dL/dsigma."""
    return 2.0 * fm.d2L(sigma) / fm.dL(sigma)


def H_of_sigma(fm: FluidModel, sigma):
    F = F_of_sigma(fm, sigma)
    return F / (1.0 + sigma * F)


def sound_speed(fm: FluidModel, sigma):
    """c_s = sqrt(1 / (1 + sigma F)); PhysicalityViolated outside (0, 1].

    The boundary c_s = 1 (F = 0, linear wave) is accepted.
    """
    fm.check_sigma(sigma)
    sF = np.asarray(sigma) * F_of_sigma(fm, sigma)
    if np.any(sF < 0.0):
        raise PhysicalityViolated("1 + sigma F < 1 from below: c_s > 1")
    cs = 1.0 / np.sqrt(1.0 + sF)
    if np.any(cs <= 0.0):
        raise PhysicalityViolated("sound speed not in (0, 1]")
    return cs


def model_lagrangian(s: float, k: float = 1.0, sigma_range=None) -> FluidModel:
    """L(sigma) = sigma^(s+1): constant c_s = (1+2s)^(-1/2), p = rho/(2s+1)."""
    if sigma_range is None:
        sigma_range = (k * k / 4.0, 4.0 * k * k)

    def L(sig):
        return np.asarray(sig, dtype=float) ** (s + 1.0)

    def dL(sig):
        return (s + 1.0) * np.asarray(sig, dtype=float) ** s

    def d2L(sig):
        return s * (s + 1.0) * np.asarray(sig, dtype=float) ** (s - 1.0)

    def d3L(sig):
        return (s - 1.0) * s * (s + 1.0) * np.asarray(sig, dtype=float) ** (s - 2.0)

    cbar = 1.0 / np.sqrt(1.0 + 2.0 * s)
    return FluidModel(L, dL, d2L, d3L, k=k, sigma_range=sigma_range,
                      cbar=cbar, constant_sound_speed=True, s_exponent=s)


def custom_fluid(lagrangian, dL, d2L, d3L, k: float, sigma_range=None) -> FluidModel:
    """General fluid; cbar is computed from the Lagrangian at sigma = k^2."""
    if sigma_range is None:
        sigma_range = (k * k / 4.0, 4.0 * k * k)
    probe = FluidModel(lagrangian, dL, d2L, d3L, k=k, sigma_range=sigma_range, cbar=1.0)
    cbar = float(sound_speed(probe, k * k))
    return FluidModel(lagrangian, dL, d2L, d3L, k=k, sigma_range=sigma_range, cbar=cbar)


def sigma_from_dphi(dphi, minkowski=None):
    """sigma = -(m^-1)^{ab} d_a Phi d_b Phi; FluidValidity if <= 0."""
    dphi = np.asarray(dphi, dtype=float)
    if minkowski is None:
        minv = np.diag([-1.0, 1.0, 1.0])
    else:
        minv = inv_sym3(np.asarray(minkowski, dtype=float))
    sig = -np.einsum("...a,ab,...b->...", dphi, minv, dphi)
    if np.any(sig <= 0.0):
        raise FluidValidity("sigma <= 0: fluid velocity not timelike")
    return sig


def acoustical_metric(fm: FluidModel, dphi, minkowski=None):
    """(g, g^-1) of the sound cones:  g = m + H dPhi (x) dPhi,
    g^-1 = m^-1 - F (m^-1 dPhi) (x) (m^-1 dPhi).

    Verifies g . g^-1 = identity to 1e-10.
    """
    dphi = np.asarray(dphi, dtype=float)
    m = np.diag([-1.0, 1.0, 1.0]) if minkowski is None else np.asarray(minkowski, dtype=float)
    minv = inv_sym3(m)
    sig = sigma_from_dphi(dphi, m)
    fm.check_sigma(sig)
    F = F_of_sigma(fm, sig)
    H = H_of_sigma(fm, sig)
    g = m + H[..., None, None] * dphi[..., :, None] * dphi[..., None, :]
    P = np.einsum("ab,...b->...a", minv, dphi)
    ginv = minv - F[..., None, None] * P[..., :, None] * P[..., None, :]
    err = np.max(np.abs(g @ ginv - np.eye(3)))
    if err > 1e-10:
        raise PhysicalityViolated(f"acoustical pair inconsistent: |g ginv - I| = {err:.2e}")
    return g, ginv


@dataclass
class PhysicalityReport:
    ok: bool
    first_violation: str | None
    sigma_samples: np.ndarray
    minima: dict


def physicality_check(fm: FluidModel, sigma_range=None, n: int = 256) -> PhysicalityReport:
    """Sample the four positivity conditions on the Lagrangian:

        L, dL/dsigma, d(L/sqrt(sigma))/dsigma, d2L/dsigma2  all > 0.
    """
    lo, hi = sigma_range if sigma_range is not None else fm.sigma_range
    sig = np.linspace(lo, hi, n)
    conds = {
        "lagrangian": fm.lagrangian(sig),
        "dL": fm.dL(sig),
        # d/dsigma (L / sqrt(sigma)) = dL / sqrt(sigma) - L / (2 sigma^(3/2))
        "d_L_over_sqrt_sigma": fm.dL(sig) / np.sqrt(sig) - fm.lagrangian(sig) / (2.0 * sig ** 1.5),
        "d2L": fm.d2L(sig),
    }
    minima = {name: float(np.min(v)) for name, v in conds.items()}
    for name, v in conds.items():
        bad = np.nonzero(v <= 0.0)[0]
        if bad.size:
            return PhysicalityReport(False, f"{name} <= 0 at sigma={sig[bad[0]]:.6g}",
                                     sig, minima)
    return PhysicalityReport(True, None, sig, minima)


# ---------------------------------------------------------------------------
# Rescaled coordinates and the first-order system algebra
# ---------------------------------------------------------------------------

class SystemModel:
    """The Euler system in rescaled coordinates t' = cbar t.

    In these coordinates the background sound speed is 1, the Minkowski
    metric reads m' = diag(-cbar^-2, 1, 1), the system variables are
    Psi_vec = (Psi_0', Psi_1', Psi_2') with d Phi = (Psi_0' + k', Psi_1',
    Psi_2'), and the acoustical metric is additionally scaled by
    -(g^-1)^00 so that (g^-1)^00 = -1.  Applying the rescaling twice is the
    identity (cbar' = 1).

    All evaluation methods broadcast over leading axes of ``psi_vec``.
    """

    def __init__(self, fm: FluidModel):
        self.fluid = fm
        self.cbar = fm.cbar
        self.kprime = fm.kprime
        self._mprime = np.diag([-1.0 / fm.cbar ** 2, 1.0, 1.0])
        self._mprime_inv = np.diag([-fm.cbar ** 2, 1.0, 1.0])

    # -- state algebra ----------------------------------------------------

    def dphi(self, psi_vec):
        dphi = np.array(psi_vec, dtype=float, copy=True)
        dphi[..., 0] += self.kprime
        return dphi

    def sigma(self, psi_vec):
        dphi = self.dphi(psi_vec)
        sig = (self.cbar ** 2 * dphi[..., 0] ** 2
               - dphi[..., 1] ** 2 - dphi[..., 2] ** 2)
        if np.any(sig <= 0.0):
            raise FluidValidity("sigma <= 0 in rescaled coordinates")
        return sig

    def _raw_metric(self, psi_vec):
        dphi = self.dphi(psi_vec)
        sig = self.sigma(psi_vec)
        self.fluid.check_sigma(sig)
        H = H_of_sigma(self.fluid, sig)
        g = self._mprime + H[..., None, None] * dphi[..., :, None] * dphi[..., None, :]
        return g, dphi, sig

    def metric(self, psi_vec):
        """Normalized acoustical metric ghat with (ghat^-1)^00 = -1."""
        g, _, _ = self._raw_metric(psi_vec)
        phi = -inv_sym3(g)[..., 0, 0]
        return phi[..., None, None] * g

    def metric_inverse(self, psi_vec):
        return inv_sym3(self.metric(psi_vec))

    def G_lowered(self, psi_vec):
        """G^lam_{mu nu} = d ghat_{mu nu} / d Psi_lam, analytic chain rule.

        Returned with the lam axis first: shape (..., 3, 3, 3) as [lam, mu, nu].
        """
        g, dphi, sig = self._raw_metric(psi_vec)
        F = F_of_sigma(self.fluid, sig)
        H = H_of_sigma(self.fluid, sig)
        # H' = (F' - F^2) / (1 + sigma F)^2, from H = F / (1 + sigma F)
        Fp = self._dF_dsigma(sig)
        Hp = (Fp - F * F) / (1.0 + sig * F) ** 2
        P = np.einsum("ab,...b->...a", self._mprime_inv, dphi)
        dsig = -2.0 * P                                    # d sigma / d Psi_lam
        outer = dphi[..., :, None] * dphi[..., None, :]
        # raw dG^lam_{mu nu}
        Graw = (Hp[..., None, None, None] * dsig[..., :, None, None] * outer[..., None, :, :]
                + H[..., None, None, None]
                * (np.eye(3)[:, :, None] * dphi[..., None, None, :]
                   + dphi[..., None, :, None] * np.eye(3)[:, None, :]))
        ginv = inv_sym3(g)
        phi = -ginv[..., 0, 0]
        # phi_lam = (g^-1 Graw^lam g^-1)^00
        phil = np.einsum("...a,...lab,...b->...l", ginv[..., 0, :], Graw, ginv[..., 0, :])
        Ghat = (phil[..., :, None, None] * g[..., None, :, :]
                + phi[..., None, None, None] * Graw)
        return Ghat

    def _dF_dsigma(self, sig):
        # F = 2 L'' / L'  =>  F' = 2 L''' / L' - 2 (L'')^2 / (L')^2
        d1, d2, d3 = self.fluid.dL(sig), self.fluid.d2L(sig), self.fluid.d3L(sig)
        return 2.0 * d3 / d1 - 2.0 * (d2 / d1) ** 2

    def G_raised(self, psi_vec):
        """G^{lam alpha beta} = (ghat^-1 G^lam ghat^-1)^{alpha beta}."""
        Gl = self.G_lowered(psi_vec)
        ginv = self.metric_inverse(psi_vec)
        return np.einsum("...ac,...lcd,...db->...lab", ginv, Gl, ginv)

    def Omega(self, psi_vec):
        """Omega^lam = d ln sqrt|det ghat| / d Psi_lam = tr(ghat^-1 G^lam)/2."""
        Gl = self.G_lowered(psi_vec)
        ginv = self.metric_inverse(psi_vec)
        return 0.5 * np.einsum("...ab,...lba->...l", ginv, Gl)

    def lagrangian_third_derivative(self, psi_vec):
        """d^3 L / d dPhi_lam d dPhi_alpha d dPhi_beta, fully symmetric.

        This is the array whose total symmetry expresses the Euler-Lagrange
        structure; the acoustical-normalized raised array G^{lam alpha beta}
        differs from a multiple of it by trace terms and is NOT symmetric
        under (lam <-> beta).
        """
        dphi = self.dphi(psi_vec)
        sig = self.sigma(psi_vec)
        d2, d3 = self.fluid.d2L(sig), self.fluid.d3L(sig)
        P = np.einsum("ab,...b->...a", self._mprime_inv, dphi)
        m = self._mprime_inv
        sym = (P[..., :, None, None] * m[None, :, :]
               + P[..., None, :, None] * m[:, None, :]
               + P[..., None, None, :] * m[:, :, None])
        return (4.0 * d2[..., None, None, None] * sym
                - 8.0 * d3[..., None, None, None]
                * P[..., :, None, None] * P[..., None, :, None] * P[..., None, None, :])

    # -- plane-symmetric characteristic speeds and frame -------------------

    def char_speeds(self, psi0, psi1):
        """(s_plus, s_minus): x'-speeds of the L and Lbar characteristics."""
        psi0 = np.asarray(psi0, dtype=float)
        psi1 = np.asarray(psi1, dtype=float)
        denom = psi0 + self.kprime
        if np.any(denom <= 0.0):
            raise FluidValidity("Psi_0' + k' <= 0")
        v = psi1 / denom
        if np.any(np.abs(v) >= self.cbar):
            raise FluidValidity("|v| >= cbar")
        sig = self.cbar ** 2 * denom ** 2 - psi1 ** 2
        self.fluid.check_sigma(sig)
        csp = sound_speed(self.fluid, sig) / self.cbar
        s_plus = (-v / self.cbar ** 2 + csp) / (1.0 - v * csp)
        s_minus = -(v / self.cbar ** 2 + csp) / (1.0 + v * csp)
        return s_plus, s_minus

    def plane_frame(self, psi0, psi1):
        """Rectangular components of L and X = (Lbar - L)/2 in plane symmetry.

        Holds exactly:  ghat(L,L) = ghat(Lbar,Lbar) = 0, ghat(X,X) = 1,
        ghat(L,X) = -1, with L^0 = 1 and X^0 = 0.
        """
        sp, sm = self.char_speeds(psi0, psi1)
        shape = np.broadcast(np.asarray(psi0), np.asarray(psi1)).shape
        L = np.zeros(shape + (3,))
        X = np.zeros(shape + (3,))
        L[..., 0] = 1.0
        L[..., 1] = sp
        X[..., 1] = 0.5 * (sm - sp)
        return L, X


def system_G(fm: FluidModel, psi_vec):
    """Evaluate the system arrays at a state: (G_lowered, G_raised, Omega)."""
    sys = fm if isinstance(fm, SystemModel) else SystemModel(fm)
    return sys.G_lowered(psi_vec), sys.G_raised(psi_vec), sys.Omega(psi_vec)


#: spec-facing alias for the system transport right-hand side
def system_mu_transport_rhs(sys, psi_vec, mu, L, X, L_psi_vec, Xbreve_psi_vec,
                            T=None, T_psi_vec=None):
    return mu_transport_rhs_system(sys, psi_vec, mu, L, X, L_psi_vec,
                                   Xbreve_psi_vec, T, T_psi_vec)


def plane_transport_coefficients(sys: "SystemModel", psi0, psi1, sp, sm,
                                 L_psi0, L_psi1, X_psi0, X_psi1):
    """(omega_unit, omega_tan) of the plane-symmetric mu transport:

        L mu = omega_unit * (mu_field X Psi contraction) + mu * omega_tan,

    returned so that L mu = omega_unit_scaled + mu omega_tan with
    omega_unit = -G^L_LL X^a (X Psi_a) / 2 (per unit mu, to be multiplied by
    the measured mu) and omega_tan the tangential bracket of Lemma-form
    transport.  Component-wise specialization of
    :func:`mu_transport_rhs_system` to psi_2 = 0; the general routine is its
    test oracle.
    """
    psi0 = np.asarray(psi0, dtype=float)
    psi1 = np.asarray(psi1, dtype=float)
    cb = sys.cbar
    kp = sys.kprime
    d0 = psi0 + kp
    sig = cb * cb * d0 * d0 - psi1 * psi1
    fm = sys.fluid
    F = F_of_sigma(fm, sig)
    H = H_of_sigma(fm, sig)
    Fp = sys._dF_dsigma(sig)
    Hp = (Fp - F * F) / (1.0 + sig * F) ** 2
    # raw metric block g_{mu nu} = m'_{mu nu} + H dPhi_mu dPhi_nu, mu,nu in {0,1}
    m00 = -1.0 / (cb * cb)
    g00 = m00 + H * d0 * d0
    g01 = H * d0 * psi1
    g11 = 1.0 + H * psi1 * psi1
    g22 = 1.0 + 0.0 * g11
    det = g00 * g11 - g01 * g01
    gi00 = g11 / det
    gi01 = -g01 / det
    gi11 = g00 / det
    # raw dg/dPsi_lam for lam, (mu nu) in {0,1}: dsig_lam = -2 P^lam
    P0 = -cb * cb * d0           # (m'^-1)^00 = -cbar^2
    P1 = psi1
    dphi = (d0, psi1)
    Graw = {}
    for lam, Pl in ((0, P0), (1, P1)):
        dl = -2.0 * Pl
        for (mu_i, nu_i) in ((0, 0), (0, 1), (1, 1)):
            term = Hp * dl * dphi[mu_i] * dphi[nu_i]
            if mu_i == lam:
                term = term + H * dphi[nu_i]
            if nu_i == lam:
                term = term + H * dphi[mu_i]
            Graw[(lam, mu_i, nu_i)] = term
        Graw[(lam, 2, 2)] = 0.0 * term
    # normalization ghat = phi g, phi = -(g^-1)^00; phi_lam = (g^-1 Graw g^-1)^00
    phi = -gi00
    Ghat = {}
    for lam in (0, 1):
        phil = (gi00 * gi00 * Graw[(lam, 0, 0)]
                + 2.0 * gi00 * gi01 * Graw[(lam, 0, 1)]
                + gi01 * gi01 * Graw[(lam, 1, 1)])
        Ghat[(lam, 0, 0)] = phil * g00 + phi * Graw[(lam, 0, 0)]
        Ghat[(lam, 0, 1)] = phil * g01 + phi * Graw[(lam, 0, 1)]
        Ghat[(lam, 1, 1)] = phil * g11 + phi * Graw[(lam, 1, 1)]
    # frame contractions with L = (1, sp), X = (0, (sm - sp)/2) and the
    # normalized metric ghat = phi g
    X1 = 0.5 * (sm - sp)
    G_kLL = {}
    G_kLX = {}
    for lam in (0, 1):
        G_kLL[lam] = (Ghat[(lam, 0, 0)] + 2.0 * Ghat[(lam, 0, 1)] * sp
                      + Ghat[(lam, 1, 1)] * sp * sp)
        G_kLX[lam] = X1 * (Ghat[(lam, 0, 1)] + Ghat[(lam, 1, 1)] * sp)
    gh00, gh01, gh11 = phi * g00, phi * g01, phi * g11
    L_low0 = gh00 + gh01 * sp
    L_low1 = gh01 + gh11 * sp
    X_low0 = gh01 * X1
    X_low1 = gh11 * X1
    G_L_LL = G_kLL[0] * L_low0 + G_kLL[1] * L_low1
    G_X_LL = G_kLL[0] * X_low0 + G_kLL[1] * X_low1
    # X^a contractions run over spatial a only; a = 1 is the only nonzero
    XdotL = X1 * L_psi1
    omega_unit = -0.5 * G_L_LL * (X1 * X_psi1)
    omega_tan = (-0.5 * G_L_LL * XdotL - 0.5 * G_X_LL * XdotL
                 - 0.5 * (G_kLL[0] * L_psi0 + G_kLL[1] * L_psi1)
                 - (G_kLX[0] * L_psi0 + G_kLX[1] * L_psi1))
    return omega_unit, omega_tan


def rescale_coordinates(fm: FluidModel) -> SystemModel:
    """Move to rescaled coordinates (background sound speed 1); idempotent."""
    if isinstance(fm, SystemModel):
        return fm
    return SystemModel(fm)


def null_form_Q(sys: SystemModel, psi_vec, dpsi_matrix, dpsi_component):
    """The null-form source

        Q = G^{mu a b} { d_b Psi_a d_mu Psi - d_mu Psi_a d_b Psi }
            + (g^-1)^{a b} Omega^lam d_a Psi_lam d_b Psi,

    with ``dpsi_matrix[mu, a] = d_mu Psi_a`` and ``dpsi_component[mu]`` the
    gradient of the component being evolved.
    """
    Gr = sys.G_raised(psi_vec)
    Om = sys.Omega(psi_vec)
    ginv = sys.metric_inverse(psi_vec)
    dM = np.asarray(dpsi_matrix, dtype=float)
    dc = np.asarray(dpsi_component, dtype=float)
    first = (np.einsum("...mab,...ba,...m->...", Gr, dM, dc)
             - np.einsum("...mab,...ma,...b->...", Gr, dM, dc))
    # d_a Psi_lam is dM[a, lam]; contract lam with Omega, then a-b with g^-1
    second = np.einsum("...ab,...al,...l,...b->...", ginv, dM, Om, dc)
    return first + second


def mu_transport_rhs_system(sys: SystemModel, psi_vec, mu, L, X,
                            L_psi_vec, Xbreve_psi_vec, T=None, T_psi_vec=None):
    """L mu for the first-order system:

        L mu = omega_trans + mu * omega_tan
        omega_trans = -G^L_{LL} X^a XbrevePsi_a / 2
        omega_tan   = -G^L_{LL} X^a LPsi_a / 2 - G^X_{LL} X^a LPsi_a / 2
                      + G^T_{LL} X^a (T Psi_a) / 2
                      - G^lam_{LL} LPsi_lam / 2 - G^lam_{LX} LPsi_lam,

    with G^V_{LL} = G^kap_{ab} L^a L^b V_kap (kap lowered with ghat) and the
    torus term reduced to the unit-direction contraction.  Plane-symmetric
    callers pass T = None (all torus contractions vanish).  Returns
    (L mu, omega_trans); the transversal part alone is the exact L mu for
    simple waves and seeds the system delta_star.
    """
    psi_vec = np.asarray(psi_vec, dtype=float)
    g = sys.metric(psi_vec)
    Gl = sys.G_lowered(psi_vec)                    # (..., lam, mu, nu)
    G_kLL = np.einsum("...lab,...a,...b->...l", Gl, L, L)   # upper lam slot
    G_kLX = np.einsum("...lab,...a,...b->...l", Gl, L, X)
    L_low = np.einsum("...ab,...b->...a", g, L)
    X_low = np.einsum("...ab,...b->...a", g, X)
    G_L_LL = np.einsum("...l,...l->...", G_kLL, L_low)
    G_X_LL = np.einsum("...l,...l->...", G_kLL, X_low)
    XdotXbreve = np.einsum("...a,...a->...", X[..., 1:], Xbreve_psi_vec[..., 1:])
    XdotL = np.einsum("...a,...a->...", X[..., 1:], L_psi_vec[..., 1:])
    omega_trans = -0.5 * G_L_LL * XdotXbreve
    omega_tan = (-0.5 * G_L_LL * XdotL
                 - 0.5 * G_X_LL * XdotL
                 - 0.5 * np.einsum("...l,...l->...", G_kLL, L_psi_vec)
                 - np.einsum("...l,...l->...", G_kLX, L_psi_vec))
    if T is not None and T_psi_vec is not None:
        T_low = np.einsum("...ab,...b->...a", g, T)
        G_T_LL = np.einsum("...l,...l->...", G_kLL, T_low)
        XdotT = np.einsum("...a,...a->...", X[..., 1:], T_psi_vec[..., 1:])
        omega_tan = omega_tan + 0.5 * G_T_LL * XdotT
    return omega_trans + mu * omega_tan, omega_trans


# ---------------------------------------------------------------------------
# Riemann invariants (plane symmetry)
# ---------------------------------------------------------------------------

def _sigma_integral(sys: SystemModel, sqrt_sigma):
    """I(sqrt sigma) = (1/cbar) int_k^{sqrt sigma} dr / (c_s'(r) r).

    Closed form (1/cbar) ln(sqrt sigma / k) for constant sound speed;
    adaptive quadrature to 1e-12 absolute otherwise.
    """
    fm = sys.fluid
    if fm.constant_sound_speed:
        return np.log(np.asarray(sqrt_sigma, dtype=float) / fm.k) / fm.cbar

    def integrand(r):
        return 1.0 / (sound_speed(fm, r * r) / fm.cbar * r)

    def one(rs):
        val, _ = integrate.quad(integrand, fm.k, rs, epsabs=_EPS_QUAD, epsrel=1e-13)
        return val / fm.cbar

    arr = np.asarray(sqrt_sigma, dtype=float)
    if arr.ndim == 0:
        return one(float(arr))
    return np.array([one(rs) for rs in arr.ravel()]).reshape(arr.shape)


def _sigma_integral_quadrature(sys: SystemModel, sqrt_sigma):
    """Quadrature path regardless of closed form; the test oracle."""
    fm = sys.fluid

    def integrand(r):
        return 1.0 / (sound_speed(fm, r * r) / fm.cbar * r)

    val, _ = integrate.quad(integrand, fm.k, float(sqrt_sigma),
                            epsabs=_EPS_QUAD, epsrel=1e-13)
    return val / fm.cbar


def riemann_invariants(sys: SystemModel, psi0, psi1):
    """(R_minus, R_plus) of a plane-symmetric state, zero at the constant state:

        R_-+ = I(sqrt sigma) +- artanh(v / cbar),   v = Psi_1'/(Psi_0' + k').

    R_plus is constant along L and R_minus along Lbar; R_minus == 0
    characterizes simple outgoing waves.
    """
    sys = rescale_coordinates(sys)
    psi0 = np.asarray(psi0, dtype=float)
    psi1 = np.asarray(psi1, dtype=float)
    denom = psi0 + sys.kprime
    if np.any(denom <= 0.0):
        raise FluidValidity("Psi_0' + k' <= 0")
    v = psi1 / denom
    if np.any(np.abs(v) >= sys.cbar):
        raise FluidValidity("|v| >= cbar")
    sig = sys.cbar ** 2 * denom ** 2 - psi1 ** 2
    sys.fluid.check_sigma(sig)
    I = _sigma_integral(sys, np.sqrt(sig))
    A = np.arctanh(v / sys.cbar)
    return I + A, I - A


def _solve_sqrt_sigma(sys: SystemModel, I_target):
    """Invert the strictly increasing sigma-integral."""
    fm = sys.fluid
    if fm.constant_sound_speed:
        return fm.k * np.exp(fm.cbar * np.asarray(I_target, dtype=float))
    lo = np.sqrt(fm.sigma_range[0])
    hi = np.sqrt(fm.sigma_range[1])

    def one(tgt):
        f = lambda rs: _sigma_integral(sys, rs) - tgt
        flo, fhi = f(lo), f(hi)
        if flo > 0.0 or fhi < 0.0:
            from .errors import RootBracketFailure
            raise RootBracketFailure(
                f"sqrt(sigma) solve target {tgt:.6g} outside validity range")
        return optimize.brentq(f, lo, hi, xtol=1e-14, rtol=1e-15)

    arr = np.asarray(I_target, dtype=float)
    if arr.ndim == 0:
        return one(float(arr))
    return np.array([one(t) for t in arr.ravel()]).reshape(arr.shape)


def reconstruct_psi(sys: SystemModel, r_minus, r_plus):
    """Invert the Riemann-invariant map:

        Psi_0' = sqrt(sigma) cosh((R_- - R_+)/2) / cbar - k'
        Psi_1' = sqrt(sigma) sinh((R_- - R_+)/2)

    with sqrt(sigma) solved from I(sqrt sigma) = (R_- + R_+)/2.  Exact
    inverse of :func:`riemann_invariants`; swapping R_- and R_+ flips the
    sign of Psi_1' and fixes Psi_0'.
    """
    sys = rescale_coordinates(sys)
    r_minus = np.asarray(r_minus, dtype=float)
    r_plus = np.asarray(r_plus, dtype=float)
    sqrt_sig = _solve_sqrt_sigma(sys, 0.5 * (r_minus + r_plus))
    half = 0.5 * (r_minus - r_plus)
    psi0 = sqrt_sig * np.cosh(half) / sys.cbar - sys.kprime
    psi1 = sqrt_sig * np.sinh(half)
    return psi0, psi1


# ---------------------------------------------------------------------------
# eps-delta hierarchy data
# ---------------------------------------------------------------------------

@dataclass
class HierarchyData:
    """Right-moving near-simple-wave data: R_- == 0, R_+ = eps0 * bump."""

    system: SystemModel
    eps0: float
    delta0: float
    bump: BumpProfile
    delta_star: float = 0.0
    report: dict = field(default_factory=dict)

    def r_plus(self, x):
        return self.bump(x)

    def r_minus(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def psi(self, x):
        return reconstruct_psi(self.system, self.r_minus(x), self.r_plus(x))


def build_hierarchy_data(fm, eps0: float, delta0: float,
                         center: float = 0.5, width: float | None = None,
                         profile: str = "bump", n_check: int = 8193,
                         max_cancellation_ratio: float = 10.0) -> HierarchyData:
    """Construct the eps-delta data and measure its size hierarchy.

    With ``profile="bump"`` the invariant is R_+(x) = eps0 B((x-center)/width)
    with B the C-infinity bump; width defaults to 5 eps0/delta0 so
    max|d_x R_+| is a fixed O(1) multiple of delta0.  With
    ``profile="plateau"`` the derivative of R_+ sits on an exact plateau of
    the same amplitude and derivative scale, which keeps the mu dip
    flat-bottomed and trackable on a grid (see PlateauProfile).  A
    single-scale profile cannot make all three of d_x, d_x^2, d_x^3 exactly
    Theta(delta0); the measured scales are reported instead.  The verified
    hierarchy property is the cancellation max|Xbreve(Psi_0'+Psi_1')| <=
    max_cancellation_ratio * eps0 * (transversal reference scale), which is
    what R_- == 0 buys.
    """
    from .bumps import PlateauProfile

    sys = rescale_coordinates(fm)
    if eps0 < 0.0 or delta0 <= 0.0:
        raise ValueError("need eps0 >= 0 and delta0 > 0")
    if width is None:
        width = 5.0 * max(eps0, 1e-6) / delta0
    if profile == "bump":
        prof = BumpProfile(amplitude=eps0, center=center, width=width)
    elif profile == "plateau":
        # derivative plateau at -eps0/(0.6 width): amplitude still eps0
        edge = 0.2 * width
        ell = 0.4 * width
        prof = PlateauProfile(slope=eps0 / (ell + edge),
                              u_up=center - width, u_down=center + 0.1 * width,
                              plateau=ell, edge=edge)
    else:
        raise ValueError(f"unknown hierarchy profile {profile!r}")
    data = HierarchyData(system=sys, eps0=eps0, delta0=delta0, bump=prof)

    x = np.linspace(0.0, 1.0, n_check)
    if eps0 == 0.0:
        data.report = {"delta_star": 0.0, "scales": {}, "cancellation_ratio": 0.0}
        return data
    psi0, psi1 = data.psi(x)
    dx = x[1] - x[0]
    d_psi0 = np.gradient(psi0, dx)
    d_psi1 = np.gradient(psi1, dx)

    mu0, omega_trans = sigma0_mu_and_transversal(sys, psi0, psi1, d_psi0, d_psi1)
    dstar = delta_star(2.0 * omega_trans)
    data.delta_star = dstar

    ref = float(np.max(np.abs(d_psi1)) + np.max(np.abs(d_psi0)))
    cancel = float(np.max(np.abs(d_psi0 + d_psi1)))
    ratio = cancel / (eps0 * ref) if ref > 0 else 0.0
    scales = {
        "max_abs_Rplus": float(np.max(np.abs(prof(x)))),
        "max_abs_d1_Rplus": float(np.max(np.abs(prof.derivative(x)))),
        "max_abs_d2_Rplus": float(np.max(np.abs(prof.derivative2(x)))),
        "max_abs_d3_Rplus": float(np.max(np.abs(prof.derivative3(x)))),
        "max_abs_d1_psi0": float(np.max(np.abs(d_psi0))),
        "max_abs_d1_psi1": float(np.max(np.abs(d_psi1))),
        "mu0_min": float(np.min(mu0)),
        "mu0_max": float(np.max(mu0)),
    }
    data.report = {
        "delta_star": dstar,
        "eps0": eps0,
        "delta0": delta0,
        "width": width,
        "scales": scales,
        "cancellation": cancel,
        "cancellation_ratio": ratio,
    }
    if ratio > max_cancellation_ratio:
        from .errors import HierarchyUnsatisfied
        raise HierarchyUnsatisfied(
            f"cancellation ratio {ratio:.3g} > {max_cancellation_ratio}")
    return data


def sigma0_mu_and_transversal(sys: SystemModel, psi0, psi1, d_psi0, d_psi1):
    """mu and omega_trans on the initial slice from spatial data alone.

    On Sigma_0 the eikonal data u = 1 - x' gives mu = ((gbar^-1)^11)^(-1/2);
    Xbreve Psi_a = mu X^1 d_x Psi_a with the plane frame.  Returns
    (mu0, omega_trans) where omega_trans = -G^L_{LL} X^a Xbreve Psi_a / 2
    is the exact initial L mu for simple waves.
    """
    from .geometry import spatial_block_inverse

    psi_vec = np.stack([np.asarray(psi0, dtype=float),
                        np.asarray(psi1, dtype=float),
                        np.zeros_like(np.asarray(psi0, dtype=float))], axis=-1)
    g = sys.metric(psi_vec)
    gbar_inv, _ = spatial_block_inverse(g)
    mu0 = 1.0 / np.sqrt(gbar_inv[..., 0, 0])
    L, X = sys.plane_frame(psi0, psi1)
    xbr0 = mu0 * X[..., 1] * np.asarray(d_psi0, dtype=float)
    xbr1 = mu0 * X[..., 1] * np.asarray(d_psi1, dtype=float)
    xbr = np.stack([xbr0, xbr1, np.zeros_like(xbr0)], axis=-1)
    zeros = np.zeros_like(xbr)
    _, omega_trans = mu_transport_rhs_system(sys, psi_vec, mu0, L, X, zeros, xbr)
    return mu0, omega_trans
