"""Plane-symmetric solvers.

Two independent routes to the shock:

* the exact simple-wave *fan* for scalar metric models: for data constant
  along one characteristic family, characteristics are straight lines in
  (t, x^1), L mu is constant along each of them, and mu(t, u) = mu_0(u) +
  t * coeff(u) exactly with coeff = G_LL(u) Psi'(u) / 2.  The fan is the
  oracle the 2-D solver is checked against.

* a Riemann-invariant characteristic solver for the irrotational Euler
  system: R_plus is advected along the L family and R_minus along the Lbar
  family by semi-Lagrangian backtracing with cubic interpolation, which
  preserves simple waves (R_minus == 0) to round-off.  mu is integrated
  along traced L-characteristics from the system transport equation, and
  independently reproduced from an evolved eikonal field.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import euler as eu
from .bumps import BumpProfile
from .errors import CFLViolation, NoShockPredicted
from .geometry import sigma0_relations, spatial_block_inverse
from .model import MetricModel, evaluate_metric, genuine_nonlinearity_coefficient
from .numerics import interp1_cubic, interp1_multi


@dataclass(frozen=True)
class SimpleWaveData:
    """A simple-wave profile u -> Psi(u) with analytic derivative.

    Support must sit inside [0, 1] with Psi and Psi' vanishing at the
    endpoints (checked), |Psi| below the model validity bound.
    """

    profile: object     # any callable with .derivative
    n_u: int = 4096

    def __post_init__(self):
        for s in (0.0, 1.0):
            if abs(float(self.profile(s))) > 1e-12 or abs(float(self.profile.derivative(s))) > 1e-12:
                raise ValueError("profile must vanish with its derivative at u = 0, 1")


@dataclass
class CharacteristicFan:
    """Per-u-sample data of the exact simple wave.

    ``coeff`` is the constant-in-t value of L mu = G_LL Psi'(u) / 2; the
    characteristic through (0, x0(u)) is the straight line x^1 = x0 + slope*t
    and mu(t, u) = mu0(u) + t coeff(u) exactly.
    """

    u: np.ndarray
    x0: np.ndarray
    slope: np.ndarray
    mu0: np.ndarray
    coeff: np.ndarray
    gll: np.ndarray
    psi: np.ndarray
    x1_low: np.ndarray          # X_1(u), for rectangular-gradient reconstruction
    exact_eval: Callable | None = None

    @property
    def delta_star(self) -> float:
        """Half the sup of [G_LL XbrevePsi]_- = max(0, -min coeff)."""
        return max(0.0, -float(np.min(self.coeff)))


def _fan_point(model: MetricModel, profile, u):
    """Exact fan quantities at arbitrary u (scalar or array)."""
    u = np.asarray(u, dtype=float)
    psi = profile(u)
    dpsi = profile.derivative(u)
    mu0, Lsmall, _ = sigma0_relations(model, psi)
    L = np.zeros(u.shape + (3,))
    L[..., 0] = 1.0
    L[..., 1] = 1.0 + Lsmall[..., 0]
    L[..., 2] = Lsmall[..., 1]
    G = model.dsmall(psi)
    gll = np.einsum("...ab,...a,...b->...", G, L, L)
    g = evaluate_metric(model, psi)
    gbar_inv, _ = spatial_block_inverse(g)
    # X^i = -mu (gbar^-1)^{i1} on Sigma_0; lower with g
    Xup = np.zeros(u.shape + (3,))
    Xup[..., 1] = -mu0 * gbar_inv[..., 0, 0]
    Xup[..., 2] = -mu0 * gbar_inv[..., 1, 0]
    X_low = np.einsum("...ab,...b->...a", g, Xup)
    return psi, dpsi, mu0, L[..., 1], 0.5 * gll * dpsi, gll, X_low[..., 1]


def simple_wave_fan(model: MetricModel, data: SimpleWaveData) -> CharacteristicFan:
    """Build the exact fan from initial-slice identities.

    Requires a normalized model with nonzero genuine-nonlinearity
    coefficient (else no shock forms and the caller should reject).
    """
    if abs(genuine_nonlinearity_coefficient(model)) < 1e-10:
        raise NoShockPredicted("null condition holds: G(L_flat, L_flat)(0) = 0")
    u = np.linspace(0.0, 1.0, data.n_u)
    psi, dpsi, mu0, slope, coeff, gll, x1low = _fan_point(model, data.profile, u)

    def exact_eval(uq):
        p = _fan_point(model, data.profile, uq)
        return p[2], p[4]          # mu0, coeff

    return CharacteristicFan(u=u, x0=1.0 - u, slope=slope, mu0=mu0,
                             coeff=coeff, gll=gll, psi=psi, x1_low=x1low,
                             exact_eval=exact_eval)


def synthetic_fan(u, mu0, coeff) -> CharacteristicFan:
    """Fan from raw arrays (tests and analytic studies)."""
    u = np.asarray(u, dtype=float)
    z = np.zeros_like(u)
    return CharacteristicFan(u=u, x0=1.0 - u, slope=1.0 + z, mu0=np.asarray(mu0, float) + z,
                             coeff=np.asarray(coeff, float) + z, gll=z, psi=z,
                             x1_low=z - 1.0, exact_eval=None)


def simple_wave_mu(fan: CharacteristicFan, t, u):
    """mu(t, u) = mu0(u) + t coeff(u), linear interpolation between samples."""
    mu0 = np.interp(u, fan.u, fan.mu0)
    coeff = np.interp(u, fan.u, fan.coeff)
    return mu0 + np.asarray(t, dtype=float) * coeff


def _golden_min(f, a, b, iters: int = 90):
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def simple_wave_blowup_time(fan: CharacteristicFan):
    """(T_star, u_star): first vanishing time of mu over the fan.

    T(u) = -mu0(u)/coeff(u) restricted to coeff < 0; the discrete minimum is
    sharpened by golden-section refinement of the exact map when available
    (ties broken toward smaller u by the argmin convention).
    """
    neg = fan.coeff < 0.0
    if not np.any(neg):
        raise NoShockPredicted("coefficient nonnegative for every u sample")
    times = np.where(neg, -fan.mu0 / np.where(neg, fan.coeff, -1.0), np.inf)
    i = int(np.argmin(times))
    T, ustar = float(times[i]), float(fan.u[i])
    if fan.exact_eval is not None:
        lo = fan.u[max(i - 1, 0)]
        hi = fan.u[min(i + 1, len(fan.u) - 1)]

        def obj(uq):
            mu0, coeff = fan.exact_eval(np.asarray(uq))
            c = float(coeff)
            return -float(mu0) / c if c < 0.0 else np.inf

        ustar = float(_golden_min(obj, lo, hi))
        refined = obj(ustar)
        if refined < T:
            T = refined
    return T, ustar


def fan_series(fan: CharacteristicFan, times):
    """Exact-fan time series: (t, mu_star, max_abs_dxpsi).

    mu_star is min(1, min_u mu(t,u)); the rectangular slope is recovered from
    |d_1 Psi| = |Psi'(u)| |X_1(u)| / mu(t,u), which blows up like 1/mu.
    """
    times = np.asarray(times, dtype=float)
    mu = fan.mu0[None, :] + times[:, None] * fan.coeff[None, :]
    mu_star = np.minimum(1.0, np.min(mu, axis=1))
    dpsi_abs = np.abs(fan.coeff * 2.0 / np.where(fan.gll == 0.0, np.inf, fan.gll))
    with np.errstate(divide="ignore"):
        slope = np.abs(dpsi_abs[None, :] * fan.x1_low[None, :]) / np.maximum(mu, 1e-300)
    max_dxpsi = np.max(np.where(mu > 0.0, slope, 0.0), axis=1)
    return mu_star, max_dxpsi


# ---------------------------------------------------------------------------
# Euler plane solver (Riemann invariants)
# ---------------------------------------------------------------------------

@dataclass
class EulerFan:
    """Exact affine-mu oracle for Euler simple waves (R_minus == 0).

    [L, Xbreve] = 0 in plane symmetry, so Xbreve Psi_a and hence
    omega_trans = L mu are constant along each L-characteristic; with
    L Psi_a = 0 this makes mu(t; u) = mu0(u) + t omega_trans(u) exact.
    """

    u: np.ndarray
    x0: np.ndarray
    mu0: np.ndarray
    omega: np.ndarray
    speed: np.ndarray

    @property
    def delta_star(self) -> float:
        return max(0.0, -float(np.min(self.omega)))


def euler_simple_wave_fan(data: eu.HierarchyData, n_u: int = 4096) -> EulerFan:
    sys = data.system
    u = np.linspace(0.0, 1.0, n_u)
    x = 1.0 - u
    psi0, psi1 = data.psi(x)
    # spatial derivatives of the state, analytic through the invariant map
    dRp = data.bump.derivative(x)
    a0, a1 = _dpsi_dR(sys, data.r_minus(x), data.r_plus(x))
    d_psi0 = a0[1] * dRp
    d_psi1 = a1[1] * dRp
    mu0, omega = eu.sigma0_mu_and_transversal(sys, psi0, psi1, d_psi0, d_psi1)
    sp, _ = sys.char_speeds(psi0, psi1)
    return EulerFan(u=u, x0=x, mu0=mu0, omega=omega, speed=sp)


def euler_blowup_time(fan: EulerFan):
    neg = fan.omega < 0.0
    if not np.any(neg):
        raise NoShockPredicted("omega_trans nonnegative for every u sample")
    times = np.where(neg, -fan.mu0 / np.where(neg, fan.omega, -1.0), np.inf)
    i = int(np.argmin(times))
    return float(times[i]), float(fan.u[i])


def _dpsi_dR(sys: eu.SystemModel, r_minus, r_plus):
    """Analytic (dPsi_0'/dR_-, dPsi_0'/dR_+), (dPsi_1'/dR_-, dPsi_1'/dR_+).

    With I = (R_- + R_+)/2, h = (R_- - R_+)/2, S = sqrt(sigma)(I) and
    S'(I) = cbar c_s'(S) S:
        dPsi_0'/dR_-+ = ( S' cosh h / cbar +- S sinh h / cbar ) / 2
        dPsi_1'/dR_-+ = ( S' sinh h +- S cosh h ) / 2.
    """
    rm = np.asarray(r_minus, dtype=float)
    rp = np.asarray(r_plus, dtype=float)
    I = 0.5 * (rm + rp)
    h = 0.5 * (rm - rp)
    S = eu._solve_sqrt_sigma(sys, I)
    csp = eu.sound_speed(sys.fluid, np.asarray(S) ** 2) / sys.cbar
    Sp = sys.cbar * csp * S
    d0 = (0.5 * Sp * np.cosh(h) / sys.cbar + 0.5 * S * np.sinh(h) / sys.cbar,
          0.5 * Sp * np.cosh(h) / sys.cbar - 0.5 * S * np.sinh(h) / sys.cbar)
    d1 = (0.5 * Sp * np.sinh(h) + 0.5 * S * np.cosh(h),
          0.5 * Sp * np.sinh(h) - 0.5 * S * np.cosh(h))
    return d0, d1


@dataclass
class RiemannTrajectory:
    x: np.ndarray
    series: dict
    char_t: list
    char_x: list
    char_mu: list
    char_rp: list
    char_mu_field: list
    seeds_u: np.ndarray
    delta_star: float
    status: str
    t_end: float
    t_lifespan: float
    r_minus_max: float
    meta: dict = field(default_factory=dict)


def riemann_solve(fm, data: eu.HierarchyData, nx: int = 4096,
                  x_min: float | None = None, x_max: float | None = None,
                  t_max: float = 10.0, mu_stop: float = 0.05,
                  cfl: float = 0.4, n_seeds: int = 65,
                  store_every: int = 8) -> RiemannTrajectory:
    """Advance (R_-, R_+) by characteristic backtracing; trace mu along L.

    Each invariant is constant on its family, so the per-step update at a
    node backtraces the characteristic foot (midpoint rule) and cubically
    interpolates the old field there; constants are preserved exactly, hence
    R_- stays identically zero for simple-wave data.  An eikonal field u is
    evolved alongside and supplies the field-route mu; the traced mu
    integrates the system transport equation with the transversal drive
    written as the robust product mu_field * (X Psi contraction) = Xbreve Psi
    (the quantity that stays O(1) at the shock).  Fields are evaluated on
    the moving support window of the invariants; outside it the state is
    exactly constant.
    """
    sys = eu.rescale_coordinates(fm)
    if x_min is None:
        x_min = -0.2 - 0.1 * t_max
    if x_max is None:
        x_max = 1.0 + 1.2 * t_max + 0.2
    x = np.linspace(x_min, x_max, nx)
    dx = x[1] - x[0]
    rp = data.r_plus(x)
    rm = data.r_minus(x)
    u_field = 1.0 - x

    seeds_u = np.linspace(0.02, 0.98, n_seeds)
    xc = 1.0 - seeds_u
    psi0_c, psi1_c = data.psi(xc)
    dRp_c = data.bump.derivative(xc)
    a0, a1 = _dpsi_dR(sys, np.zeros_like(xc), data.r_plus(xc))
    mu_c, _ = eu.sigma0_mu_and_transversal(sys, psi0_c, psi1_c,
                                           a0[1] * dRp_c, a1[1] * dRp_c)
    mu_c = np.array(mu_c, dtype=float)
    alive = np.ones(xc.shape, dtype=bool)

    def window(rm_f, rp_f):
        nz = np.nonzero(np.abs(rm_f) + np.abs(rp_f) > 1e-13)[0]
        if nz.size == 0:
            return slice(0, 0)
        return slice(max(int(nz[0]) - 16, 0), min(int(nz[-1]) + 17, nx))

    def grid_fields(rm_f, rp_f, u_f, t, want_unit=False):
        """Derived fields on the support window; constant state elsewhere."""
        sl = window(rm_f, rp_f)
        sp = np.ones(nx)
        sm = np.full(nx, -1.0)
        psi0 = np.zeros(nx)
        psi1 = np.zeros(nx)
        w_unit = np.zeros(nx)
        w_tan = np.zeros(nx)
        d_psi1 = np.zeros(nx)
        unit0 = None
        if sl.stop > sl.start:
            p0, p1 = eu.reconstruct_psi(sys, rm_f[sl], rp_f[sl])
            psi0[sl], psi1[sl] = p0, p1
            s_p, s_m = sys.char_speeds(p0, p1)
            sp[sl], sm[sl] = s_p, s_m
            d_rm = np.gradient(rm_f[sl], dx)
            dd0, dd1 = _dpsi_dR(sys, rm_f[sl], rp_f[sl])
            d_p0 = np.gradient(p0, dx)
            d_p1 = np.gradient(p1, dx)
            d_psi1[sl] = d_p1
            # L Psi_a = (dPsi_a/dR_-)(s_+ - s_-) d_x R_- ;  X Psi_a = X^1 d_x Psi_a
            X1 = 0.5 * (s_m - s_p)
            LP0 = dd0[0] * (s_p - s_m) * d_rm
            LP1 = dd1[0] * (s_p - s_m) * d_rm
            XP1 = X1 * d_p1
            w_unit[sl], w_tan[sl] = eu.plane_transport_coefficients(
                sys, p0, p1, s_p, s_m, LP0, LP1, X1 * d_p0, XP1)
            if want_unit:
                unit0 = w_unit.copy()
        # eikonal-route mu from the advected u field: mu = -1/(g^-1)^{0a} d_a u
        # with d_t u eliminated through the positive root, i.e. mu = 1/sqrt(b^2+c)
        ux = np.gradient(u_f, dx)
        b = np.zeros(nx)
        c = ux * ux
        if sl.stop > sl.start:
            psi_vec = np.stack([psi0[sl], psi1[sl], np.zeros_like(psi0[sl])], -1)
            ginv = sys.metric_inverse(psi_vec)
            b[sl] = ginv[..., 0, 1] * ux[sl]
            c[sl] = ginv[..., 1, 1] * ux[sl] * ux[sl]
        disc = np.maximum(b * b + c, 1e-300)
        mu_field = 1.0 / np.sqrt(disc)
        return dict(sp=sp, sm=sm, psi0=psi0, psi1=psi1, w_unit=w_unit,
                    w_tan=w_tan, mu_field=mu_field,
                    d_psi1=d_psi1, unit0=unit0)

    t = 0.0
    n_step = 0
    series = {k: [] for k in ("t", "mu_star", "max_abs_dxpsi")}
    char_t, char_x, char_mu, char_rp, char_mu_field = [], [], [], [], []
    f_now = grid_fields(rm, rp, u_field, t, want_unit=True)
    dstar = max(0.0, -float(np.min(f_now["unit0"])))
    r_minus_max = 0.0
    status = "t_max"

    def record(flds):
        series["t"].append(t)
        series["mu_star"].append(min(1.0, float(np.min(mu_c[alive])) if alive.any() else 1.0))
        series["max_abs_dxpsi"].append(float(np.max(np.abs(flds["d_psi1"]))))
        if n_step % store_every == 0:
            char_t.append(t)
            char_x.append(xc.copy())
            char_mu.append(mu_c.copy())
            char_rp.append(interp1_cubic(x[0], dx, rp, xc, fill=0.0))
            char_mu_field.append(interp1_cubic(x[0], dx, flds["mu_field"], xc, fill=1.0))

    record(f_now)
    while t < t_max:
        vmax = max(float(np.max(np.abs(f_now["sp"]))), float(np.max(np.abs(f_now["sm"]))))
        dt = cfl * dx / vmax
        dt = min(dt, t_max - t)
        if dt < 1e-9:
            raise CFLViolation("time step underflow in riemann_solve")
        # semi-Lagrangian advection: R_+ and u are both constant along the
        # L family, so they share footpoints; R_- rides the Lbar family
        xm = x - 0.5 * dt * f_now["sp"]
        foot = x - dt * interp1_cubic(x[0], dx, f_now["sp"], xm, fill=1.0)
        rp_new = interp1_cubic(x[0], dx, rp, foot, fill=0.0)
        u_left = 1.0 - foot + t           # exact flat eikonal outside the grid
        u_field = np.where((foot >= x[0]) & (foot <= x[-1]),
                           interp1_cubic(x[0], dx, u_field, foot, fill=0.0),
                           u_left)
        xm = x - 0.5 * dt * f_now["sm"]
        foot = x - dt * interp1_cubic(x[0], dx, f_now["sm"], xm, fill=-1.0)
        rm_new = interp1_cubic(x[0], dx, rm, foot, fill=0.0)
        f_next = grid_fields(rm_new, rp_new, u_field, t + dt)
        # Heun for the traced characteristics:
        #   dx/dt = s_+(x),  dmu/dt = mu_field(x) w_unit(x) + mu w_tan(x)
        if alive.any():
            k1x, k1u, k1t, k1m = interp1_multi(
                x[0], dx, (f_now["sp"], f_now["w_unit"], f_now["w_tan"],
                           f_now["mu_field"]), xc, (1.0, 0.0, 0.0, 1.0))
            k1mu = k1m * k1u + mu_c * k1t
            x_star = xc + dt * k1x
            m_star = mu_c + dt * k1mu
            k2x, k2u, k2t, k2m = interp1_multi(
                x[0], dx, (f_next["sp"], f_next["w_unit"], f_next["w_tan"],
                           f_next["mu_field"]), x_star, (1.0, 0.0, 0.0, 1.0))
            k2mu = k2m * k2u + m_star * k2t
            xc = np.where(alive, xc + 0.5 * dt * (k1x + k2x), xc)
            mu_c = np.where(alive, mu_c + 0.5 * dt * (k1mu + k2mu), mu_c)
            alive &= (xc > x_min + 4 * dx) & (xc < x_max - 4 * dx)
        rp, rm, f_now = rp_new, rm_new, f_next
        t += dt
        n_step += 1
        r_minus_max = max(r_minus_max, float(np.max(np.abs(rm))))
        record(f_now)
        if alive.any() and np.min(mu_c[alive]) <= mu_stop:
            status = "shocked"
            break

    series = {k: np.asarray(v) for k, v in series.items()}
    t_lifespan = extrapolate_lifespan(series["t"], series["mu_star"])
    return RiemannTrajectory(
        x=x, series=series, char_t=char_t, char_x=char_x, char_mu=char_mu,
        char_rp=char_rp, char_mu_field=char_mu_field, seeds_u=seeds_u,
        delta_star=dstar, status=status, t_end=t, t_lifespan=t_lifespan,
        r_minus_max=r_minus_max,
        meta=dict(nx=nx, dx=dx, cfl=cfl, mu_stop=mu_stop))


def extrapolate_lifespan(t, mu_star, window: float = 0.25):
    """Linear tail extrapolation of mu_star to zero.

    The run halts at mu_stop > 0; for simple waves mu_star is eventually
    exactly affine in t, so the extrapolated zero crossing is the exact
    blowup time up to the scheme's own error.
    """
    t = np.asarray(t, dtype=float)
    mu = np.asarray(mu_star, dtype=float)
    sel = mu <= window
    if np.count_nonzero(sel) < 4:
        sel = np.zeros_like(mu, dtype=bool)
        sel[-max(4, len(mu) // 8):] = True
    A = np.stack([np.ones(np.count_nonzero(sel)), t[sel]], axis=1)
    coef, *_ = np.linalg.lstsq(A, mu[sel], rcond=None)
    a, b = coef
    if b >= 0.0:
        return float("inf")
    return float(-a / b)
