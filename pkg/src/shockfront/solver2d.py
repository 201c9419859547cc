"""Coupled evolution of the scalar wave and eikonal fields on R x T.

Psi is evolved in rectangular coordinates (4th-order centered stencils,
RK4, optional Kreiss-Oliger dissipation); u is evolved as a Hamilton-Jacobi
equation with its positive time root and 2nd-order upwind spatial
derivatives.  The geometric chart is materialized by tracing integral
curves of L through the evolving fields inside the same RK4 stages, which
carries mu (via its exact transport equation in log form) and ln(upsilon)
(via L ln upsilon = tr chi) along each (u0, theta0)-labeled curve.

The rectangular formulation is non-degenerate until the shock; runs stop
when mu_star = min(1, min mu) reaches mu_stop, and the lifespan is obtained
by linear tail extrapolation of mu_star (exact for simple waves, whose mu
is affine in t).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .bumps import BumpProfile, PlateauProfile
from .errors import CFLViolation, NonpositiveMu, SupportViolation, ValidationError
from .geometry import delta_star_argmin, sigma0_relations, spatial_block_inverse
from .model import MetricModel, metric_bundle
from .numerics import Slab, dx1_c2, dx2_c2, interp2_cubic, interp2_cubic_multi


def _dy4(f, dy):
    fp = np.concatenate([f[:, -2:], f, f[:, :2]], axis=1)
    return (-fp[:, 4:] + 8.0 * fp[:, 3:-1]
            - 8.0 * fp[:, 1:-3] + fp[:, :-4]) / (12.0 * dy)

from .plane import extrapolate_lifespan


@dataclass(frozen=True)
class Grid2D:
    """Rectangular grid: axis 0 spans [x_min, x_max], axis 1 is T = [0,1)."""

    nx: int
    ny: int
    x_min: float
    x_max: float

    def __post_init__(self):
        if self.ny < 8:
            raise ValidationError("grid.ny: need ny >= 8")
        if self.nx < 16:
            raise ValidationError("grid.nx: need nx >= 16")
        if self.x_max <= self.x_min:
            raise ValidationError("grid.x_max: must exceed grid.x_min")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def dy(self) -> float:
        return 1.0 / self.ny

    @property
    def x(self):
        return self.x_min + self.dx * np.arange(self.nx)

    @property
    def y(self):
        return self.dy * np.arange(self.ny)

    def mesh(self):
        return np.meshgrid(self.x, self.y, indexing="ij")

    def check_domain(self, t_max: float) -> None:
        """Domain-sizing rule: the grid must contain the support cone."""
        if self.x_max - self.x_min < 1.0 + 2.0 * t_max:
            raise ValidationError(
                "grid.x_max - grid.x_min must be >= 1 + 2*run.t_max "
                "(domain contains the support cone)")


@dataclass(frozen=True)
class DataSpec:
    """Initial data recipe; all profiles live in the eikonal label u = 1 - x^1.

    kinds:
      zero            trivial data
      simple_wave     Psi = f(u), d_t Psi chosen so L Psi = 0 at t = 0
      eps_delta       simple_wave plus O(eps0) theta-dependent perturbations
      lpsi_injection  eps_delta plus a theta-independent delta-size L Psi
                      (negative control for the smallness-propagation check)

    profiles:
      plateau  smoothed N-wave with a constant-derivative stretch (default;
               keeps the mu minimum resolvable all the way to mu_stop)
      bump     compactly supported C-infinity bump
    """

    kind: str = "simple_wave"
    profile: str = "plateau"
    # bump parameters
    amplitude: float = 0.085
    center: float = 0.5
    width: float = 0.185
    # plateau parameters
    slope: float = 1.0
    u_up: float = 0.05
    u_down: float = 0.50
    plateau: float = 0.25
    edge: float = 0.10
    # perturbation parameters
    eps0: float = 0.0
    theta_amp: float = 0.25
    pi_amp: float = 1.0
    ky: int = 1
    pert_center: float = 0.5
    pert_width: float = 0.3
    injection: float = 0.0


def make_profile(spec: DataSpec):
    if spec.profile == "plateau":
        return PlateauProfile(slope=spec.slope, u_up=spec.u_up,
                              u_down=spec.u_down, plateau=spec.plateau,
                              edge=spec.edge)
    if spec.profile == "bump":
        return BumpProfile(spec.amplitude, spec.center, spec.width)
    raise ValidationError(f"data.profile: unknown profile {spec.profile!r}")


def build_initial_data(model: MetricModel, grid: Grid2D, spec: DataSpec):
    """(psi, pi) on the grid; analytic gradients keep L Psi(0) exactly O(eps0)."""
    X1, X2 = grid.mesh()
    u0 = 1.0 - X1
    if spec.kind == "zero":
        return np.zeros_like(X1), np.zeros_like(X1)
    if spec.kind not in ("simple_wave", "eps_delta", "lpsi_injection"):
        raise ValidationError(f"data.kind: unknown kind {spec.kind!r}")
    f = make_profile(spec)
    lo, hi = f.support
    if lo < 0.0 or hi > 1.0:
        raise SupportViolation("profile support leaves the unit slab")
    psi = f(u0)
    d1psi = -f.derivative(u0)
    d2psi = np.zeros_like(psi)
    if spec.kind in ("eps_delta", "lpsi_injection") and spec.eps0 > 0.0:
        h = BumpProfile(spec.eps0 * spec.theta_amp, spec.pert_center, spec.pert_width)
        ph = 2.0 * np.pi * spec.ky * X2
        psi = psi + h(u0) * np.cos(ph)
        d1psi = d1psi - h.derivative(u0) * np.cos(ph)
        d2psi = d2psi - 2.0 * np.pi * spec.ky * h(u0) * np.sin(ph)
    _, Lsmall, _ = sigma0_relations(model, psi)
    L1 = 1.0 + Lsmall[..., 0]
    L2 = Lsmall[..., 1]
    pi = -(L1 * d1psi + L2 * d2psi)
    if spec.kind in ("eps_delta", "lpsi_injection") and spec.eps0 > 0.0:
        hp = BumpProfile(spec.eps0 * spec.pi_amp, spec.pert_center, spec.pert_width)
        pi = pi + hp(u0) * np.sin(2.0 * np.pi * spec.ky * X2)
    if spec.kind == "lpsi_injection":
        hi_ = BumpProfile(spec.injection, spec.pert_center, spec.pert_width)
        pi = pi + hi_(u0)
    outside = (u0 < 0.0) | (u0 > 1.0)
    if np.max(np.abs(psi[outside]), initial=0.0) > 1e-14 or \
       np.max(np.abs(pi[outside]), initial=0.0) > 1e-14:
        raise SupportViolation("data nonzero outside [0,1] x T")
    model.check_validity(psi)
    return psi, pi


@dataclass
class CurveSet:
    """Lattice of (u0, theta0)-labeled integral curves of L.

    mu and upsilon are integrated in log form: d ln(mu)/dt = w and
    d ln(upsilon)/dt = tr chi along each curve.
    """

    u0: np.ndarray            # (n_u,)
    th0: np.ndarray           # (n_th,)
    x: np.ndarray             # (n_u, n_th, 2)
    ln_mu: np.ndarray         # (n_u, n_th)
    lnups: np.ndarray
    alive: np.ndarray

    # sampled records, appended at the diagnostic cadence
    t_samples: list = field(default_factory=list)
    samples: list = field(default_factory=list)   # dict of per-curve arrays

    @property
    def mu(self):
        return np.exp(self.ln_mu)


@dataclass
class Trajectory:
    """Everything a run produces, sufficient to rebuild every verdict."""

    grid: Grid2D
    series: dict
    curves: CurveSet
    status: str
    t_end: float
    t_lifespan: float
    delta_star: float
    delta_star_location: tuple
    identity_max: dict
    identity_samples: list
    trigger: dict
    final: dict
    snapshots: list
    meta: dict


class Solver2D:
    def __init__(self, model: MetricModel, grid: Grid2D, cfl: float = 0.4,
                 dissipation: float = 0.05, mu_stop: float = 0.05,
                 mu_floor: float = 1e-4):
        self.model = model
        self.grid = grid
        self.cfl = cfl
        self.sigma_ko = dissipation
        self.mu_stop = mu_stop
        self.mu_floor = mu_floor
        probe = np.linspace(-model.psi_max, model.psi_max, 9)
        gi00 = metric_bundle(model, probe)[1][..., 0, 0]
        if np.max(np.abs(gi00 + 1.0)) > 1e-12:
            raise ValidationError(
                "model.kind: solver requires a normalized model ((g^-1)^00 = -1); "
                "apply normalize_time_component first")
        g = grid
        self._xl3 = g.x_min + g.dx * np.array([-3.0, -2.0, -1.0])[:, None]
        self._xr3 = g.x_max + g.dx * np.array([1.0, 2.0, 3.0])[:, None]

    # -- ghost values for u: exact flat eikonal 1 - x + t outside the cone --

    def _u_ghosts(self, t, width=3):
        ny = self.grid.ny
        return (np.broadcast_to(1.0 - self._xl3 + t, (3, ny)),
                np.broadcast_to(1.0 - self._xr3 + t, (3, ny)))

    def rhs(self, t, y, want_fields: bool = False):
        """Stage evaluation of the PDE right-hand sides (the hot loop).

        With ``want_fields`` also returns the derived frame/diagnostic
        fields, including the curve-ODE coefficient fields w (log-mu
        transport) and tr chi.
        """
        psi, pi, u = y
        g2 = self.grid
        dx, dy = g2.dx, g2.dy
        S_psi = Slab(psi, dx, dy, 0.0)
        S_pi = Slab(pi, dx, dy, 0.0)
        S_u = Slab(u, dx, dy, self._u_ghosts(t))
        g, ginv, G = metric_bundle(self.model, psi)
        gi01, gi02 = ginv[..., 0, 1], ginv[..., 0, 2]
        gi11, gi12, gi22 = ginv[..., 1, 1], ginv[..., 1, 2], ginv[..., 2, 2]
        d1psi = S_psi.d1()
        d2psi = S_psi.d2()
        G00, G01, G02 = G[..., 0, 0], G[..., 0, 1], G[..., 0, 2]
        G11, G12, G22 = G[..., 1, 1], G[..., 1, 2], G[..., 2, 2]

        # eikonal update from the positive root, upwind-biased derivatives;
        # the bias needs only the sign of L^i: L^1 > 0 throughout the
        # validity regime, and sign(L^2) is taken from its leading terms
        du1_up = S_u.d1_up3(1.0)
        du2_up = S_u.d2_up3(-(gi02 + gi22 * S_u.d2_c2()))
        bu = gi01 * du1_up + gi02 * du2_up
        cu = (gi11 * du1_up * du1_up + 2.0 * gi12 * du1_up * du2_up
              + gi22 * du2_up * du2_up)
        discu = bu * bu + cu
        if np.any(discu <= 0.0):
            raise NonpositiveMu("upwinded eikonal discriminant nonpositive")
        du_dt = bu + np.sqrt(discu)

        # wave equation solved for d_t^2 Psi with (g^-1)^00 = -1
        d1pi = S_pi.d1()
        d2pi = S_pi.d2()
        d11 = S_psi.d11()
        d22 = S_psi.d22()
        d12 = _dy4(d1psi, dy)
        V0 = -pi + gi01 * d1psi + gi02 * d2psi
        V1 = gi01 * pi + gi11 * d1psi + gi12 * d2psi
        V2 = gi02 * pi + gi12 * d1psi + gi22 * d2psi
        GV0 = G00 * V0 + G01 * V1 + G02 * V2
        GV1 = G01 * V0 + G11 * V1 + G12 * V2
        GV2 = G02 * V0 + G12 * V1 + G22 * V2
        trgG = (-G00 + gi11 * G11 + gi22 * G22
                + 2.0 * (gi01 * G01 + gi02 * G02 + gi12 * G12))
        lower = (V0 * GV0 + V1 * GV1 + V2 * GV2
                 - 0.5 * trgG * (pi * V0 + d1psi * V1 + d2psi * V2))
        dpi = (2.0 * (gi01 * d1pi + gi02 * d2pi)
               + gi11 * d11 + 2.0 * gi12 * d12 + gi22 * d22 - lower)
        dpsi = pi
        if not want_fields:
            return (dpsi, dpi, du_dt)

        du1 = S_u.d1()
        du2 = S_u.d2()
        b = gi01 * du1 + gi02 * du2
        c = gi11 * du1 * du1 + 2.0 * gi12 * du1 * du2 + gi22 * du2 * du2
        disc = b * b + c
        if np.any(disc <= 0.0):
            raise NonpositiveMu("eikonal discriminant nonpositive on the grid")
        root = np.sqrt(disc)
        p = b + root
        mu = 1.0 / root
        L1 = -mu * (gi01 * p + gi11 * du1 + gi12 * du2)
        L2 = -mu * (gi02 * p + gi12 * du1 + gi22 * du2)
        X1 = -L1 - gi01
        X2 = -L2 - gi02
        LPsi = pi + L1 * d1psi + L2 * d2psi
        XPsi = X1 * d1psi + X2 * d2psi
        w0 = G00 + G01 * L1 + G02 * L2          # (G L)_a with L^0 = 1
        w1 = G01 + G11 * L1 + G12 * L2
        w2 = G02 + G12 * L1 + G22 * L2
        G_LL = w0 + w1 * L1 + w2 * L2
        G_LX = w1 * X1 + w2 * X2
        # curve-feeding fields: log-mu transport coefficient and tr chi
        w_log = 0.5 * G_LL * XPsi - 0.5 * G_LL * LPsi - G_LX * LPsi
        T1 = gi12 + L1 * L2 + L1 * X2 + X1 * L2
        T2 = gi22 + L2 * (L2 + 2.0 * X2)
        g11, g12, g22 = g[..., 1, 1], g[..., 1, 2], g[..., 2, 2]
        tnorm = np.sqrt(g11 * T1 * T1 + 2.0 * g12 * T1 * T2 + g22 * T2 * T2)
        T1 = T1 / tnorm
        T2 = T2 / tnorm
        one = np.ones((1, g2.ny))
        d1L1 = dx1_c2(L1, dx, (one, one))
        d2L1 = dx2_c2(L1, dy)
        d1L2 = dx1_c2(L2, dx)
        d2L2 = dx2_c2(L2, dy)
        TL1 = T1 * d1L1 + T2 * d2L1
        TL2 = T1 * d1L2 + T2 * d2L2
        Gslash = G11 * T1 * T1 + 2.0 * G12 * T1 * T2 + G22 * T2 * T2
        trchi = ((g11 * TL1 + g12 * TL2) * T1 + (g12 * TL1 + g22 * TL2) * T2
                 + 0.5 * Gslash * LPsi)
        f = dict(t=t, g=g, ginv=ginv, G=G, d1psi=d1psi, d2psi=d2psi,
                 du1=du1, du2=du2, b=b, c=c, p=p, mu=mu,
                 L1=L1, L2=L2, X1=X1, X2=X2, LPsi=LPsi, XPsi=XPsi,
                 G_LL=G_LL, G_LX=G_LX, w=w_log, trchi=trchi, T1=T1, T2=T2)
        return (dpsi, dpi, du_dt), f

    def rk4(self, t, dt, y, k1):
        def up(a, k):
            return tuple(yi + a * ki for yi, ki in zip(y, k))

        k2 = self.rhs(t + 0.5 * dt, up(0.5 * dt, k1))
        k3 = self.rhs(t + 0.5 * dt, up(0.5 * dt, k2))
        k4 = self.rhs(t + dt, up(dt, k3))
        y_new = tuple(
            yi + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d)
            for yi, a, b, c, d in zip(y, k1, k2, k3, k4))
        if self.sigma_ko > 0.0:
            # operator-split Kreiss-Oliger dissipation on psi and pi: the
            # damping term is O(h^5) smooth-field small, so first-order
            # splitting costs nothing measurable and halves the stage count
            psi, pi, u = y_new
            dx, dy = self.grid.dx, self.grid.dy
            psi = psi + dt * Slab(psi, dx, dy, 0.0).ko(self.sigma_ko)
            pi = pi + dt * Slab(pi, dx, dy, 0.0).ko(self.sigma_ko)
            y_new = (psi, pi, u)
        return y_new

    def advance_curves(self, curves, f_old, f_new, dt):
        """Heun update of curve positions, ln(mu), ln(upsilon) using the
        step-endpoint fields (which are exact RK4 endpoint states)."""
        g2 = self.grid
        x0, dx, dy = g2.x_min, g2.dx, g2.dy
        cx = curves.x
        fills = (1.0, 0.0, 0.0, 0.0)
        names = ("L1", "L2", "w", "trchi")
        a1, a2, a3, a4 = interp2_cubic_multi(
            x0, dx, dy, [f_old[n] for n in names],
            cx[..., 0], cx[..., 1], fills)
        xs = cx[..., 0] + dt * a1
        ys = cx[..., 1] + dt * a2
        b1, b2, b3, b4 = interp2_cubic_multi(
            x0, dx, dy, [f_new[n] for n in names], xs, ys, fills)
        alive = curves.alive
        step_x = 0.5 * dt * (a1 + b1)
        step_y = 0.5 * dt * (a2 + b2)
        curves.x = np.stack([cx[..., 0] + np.where(alive, step_x, 0.0),
                             cx[..., 1] + np.where(alive, step_y, 0.0)], axis=-1)
        curves.ln_mu = curves.ln_mu + np.where(alive, 0.5 * dt * (a3 + b3), 0.0)
        curves.lnups = curves.lnups + np.where(alive, 0.5 * dt * (a4 + b4), 0.0)
        curves.alive = alive & ((curves.x[..., 0] > g2.x_min + 4 * dx)
                                & (curves.x[..., 0] < g2.x_max - 4 * dx))


def seed_curves(model, grid, psi, n_u: int, n_th: int, u_lo=0.1, u_hi=0.9):
    """Curve lattice on Sigma_0; mu and upsilon seeded from exact identities."""
    u0 = np.linspace(u_lo, u_hi, n_u)
    th0 = np.arange(n_th) / n_th
    U, TH = np.meshgrid(u0, th0, indexing="ij")
    x = np.stack([1.0 - U, TH], axis=-1)
    X1, X2 = grid.mesh()
    from .numerics import interp2_cubic as i2

    psi_seed = i2(grid.x_min, grid.dx, grid.dy, psi, x[..., 0], x[..., 1], fill=0.0)
    mu0, _, _ = sigma0_relations(model, psi_seed)
    from .model import evaluate_metric

    g = evaluate_metric(model, psi_seed)
    lnups = 0.5 * np.log(g[..., 2, 2])
    return CurveSet(u0=u0, th0=th0, x=x, ln_mu=np.log(mu0), lnups=lnups,
                    alive=np.ones(U.shape, dtype=bool))


def measure_delta_star(f):
    """delta_star and its argmin labels from t = 0 fields."""
    samples = f["G_LL"] * f["mu"] * f["XPsi"]
    return samples


def run(model: MetricModel, grid: Grid2D, spec: DataSpec, t_max: float,
        cfl: float = 0.4, dissipation: float = 0.05, mu_stop: float = 0.05,
        mu_floor: float = 1e-4, n_u_curves: int = 33, n_th_curves: int = 4,
        snapshot_stride: int = 0, sample_dt: float = 0.02,
        record_stride: int = 8, identity_window_mu: float = 0.25,
        collect_identities: bool = True) -> Trajectory:
    """Advance until t_max or mu_star <= mu_stop; collect all diagnostics.

    Identity residuals are sampled on a fixed mu_star ladder (0.9 down to
    ``identity_window_mu`` in steps of 0.05) plus a fixed time cadence while
    mu_star is still near 1, so per-identity maxima are comparable across
    resolutions for the convergence suite.
    """
    grid.check_domain(t_max)
    solver = Solver2D(model, grid, cfl, dissipation, mu_stop, mu_floor)
    psi, pi = build_initial_data(model, grid, spec)
    u = 1.0 - grid.mesh()[0]
    curves = seed_curves(model, grid, psi, n_u_curves, n_th_curves)
    y = (psi, pi, u)

    series = {k: [] for k in ("t", "mu_star", "max_abs_d1psi", "max_abs_LPsi",
                              "max_abs_d2psi", "argmin_x1", "argmin_x2",
                              "mu_xpsi_argmin", "max_abs_xpsi")}
    identity_max: dict = {}
    identity_samples: list = []
    trigger = dict(checked=0, violations=0, worst_margin=np.inf, threshold=None)
    hist = deque(maxlen=3)
    snapshots = []
    t = 0.0
    n_step = 0
    status = "t_max"
    dstar = 0.0
    dstar_loc = (np.nan, np.nan)
    X1g, X2g = grid.mesh()
    next_sample = 0.0
    ladder = list(np.arange(0.90, identity_window_mu - 1e-9, -0.05))

    from . import diagnostics as dg

    f_prev = None
    dt_prev = 0.0
    while True:
        k1, f = solver.rhs(t, y, want_fields=True)
        if f_prev is not None:
            solver.advance_curves(curves, f_prev, f, dt_prev)
        if n_step == 0:
            samples = measure_delta_star(f)
            u_lab = y[2]
            val, u_at, th_at = delta_star_argmin(samples.ravel(), u_lab.ravel(),
                                                 X2g.ravel())
            dstar, dstar_loc = val, (u_at, th_at)
            trigger["threshold"] = -dstar / 8.0
        mu = f["mu"]
        mu_star = min(1.0, float(np.min(mu)))
        flat_idx = int(np.argmin(mu))
        i, j = np.unravel_index(flat_idx, mu.shape)
        series["t"].append(t)
        series["mu_star"].append(mu_star)
        series["max_abs_d1psi"].append(float(np.max(np.abs(f["d1psi"]))))
        series["max_abs_LPsi"].append(float(np.max(np.abs(f["LPsi"]))))
        series["max_abs_d2psi"].append(float(np.max(np.abs(f["d2psi"]))))
        series["argmin_x1"].append(float(X1g[i, j]))
        series["argmin_x2"].append(float(X2g[i, j]))
        series["mu_xpsi_argmin"].append(float(mu[i, j] * np.abs(f["XPsi"][i, j])))
        series["max_abs_xpsi"].append(float(np.max(np.abs(f["XPsi"]))))

        hist.append(dict(t=t, psi=y[0], pi=y[1], u=y[2], mu=mu,
                         L1=f["L1"], L2=f["L2"], Lsm1=f["L1"] - 1.0, Lsm2=f["L2"]))
        if len(hist) == 3:
            dg.update_trigger(trigger, hist, grid)
            mu_mid = series["mu_star"][-2]
            take = False
            if ladder and mu_mid <= ladder[0]:
                while ladder and mu_mid <= ladder[0]:
                    ladder.pop(0)
                take = True
            elif mu_mid > 0.9 and hist[1]["t"] >= next_sample:
                take = True
                next_sample = hist[1]["t"] + 5.0 * sample_dt
            if collect_identities and take and mu_mid >= identity_window_mu:
                res = dg.field_identity_residuals(model, grid, hist[0], hist[1], hist[2])
                identity_samples.append((float(mu_mid), res))
                for kk, vv in res.items():
                    identity_max[kk] = max(identity_max.get(kk, 0.0), vv)
        if snapshot_stride and n_step % snapshot_stride == 0:
            snapshots.append(dict(t=t, psi=y[0].copy(), pi=y[1].copy(),
                                  u=y[2].copy(), mu=mu.copy()))
        if n_step % record_stride == 0 or mu_star <= mu_stop * 1.5:
            _record_curves(curves, y, f, solver, t)

        if mu_star <= mu_stop or np.min(mu) <= mu_floor:
            status = "shocked"
            break
        if t >= t_max:
            break

        vx = np.abs(f["ginv"][..., 0, 1]) + np.sqrt(f["ginv"][..., 0, 1] ** 2
                                                    + f["ginv"][..., 1, 1])
        vy = np.abs(f["ginv"][..., 0, 2]) + np.sqrt(f["ginv"][..., 0, 2] ** 2
                                                    + f["ginv"][..., 2, 2])
        dt = cfl * min(grid.dx / float(np.max(vx)), grid.dy / float(np.max(vy)))
        if len(series["mu_star"]) >= 2:
            dmu = series["mu_star"][-2] - series["mu_star"][-1]
            tprev = series["t"][-2]
            if dmu > 0.0 and t > tprev:
                rate = dmu / (t - tprev)
                dt = min(dt, 0.1 * mu_star / rate)
        dt = min(dt, t_max - t + 1e-15)
        if dt < 1e-9:
            raise CFLViolation("time step underflow")
        y = solver.rk4(t, dt, y, k1)
        f_prev, dt_prev = f, dt
        t += dt
        n_step += 1

    series = {k: np.asarray(v) for k, v in series.items()}
    t_lifespan = extrapolate_lifespan(series["t"], series["mu_star"]) \
        if status == "shocked" else float("inf")
    final = dict(t=t, psi=y[0], pi=y[1], u=y[2], mu=hist[-1]["mu"])
    return Trajectory(grid=grid, series=series, curves=curves, status=status,
                      t_end=t, t_lifespan=t_lifespan, delta_star=dstar,
                      delta_star_location=dstar_loc, identity_max=identity_max,
                      identity_samples=identity_samples,
                      trigger=trigger, final=final, snapshots=snapshots,
                      meta=dict(nx=grid.nx, ny=grid.ny, cfl=cfl,
                                dissipation=dissipation, mu_stop=mu_stop,
                                t_max=t_max, spec=spec.__dict__.copy(),
                                n_steps=n_step))


def _record_curves(curves: CurveSet, y, f, solver: Solver2D, t):
    grid = solver.grid
    cx = curves.x
    names = ("mu_field", "u_field", "psi", "trchi", "w", "LPsi")
    arrays = (f["mu"], y[2], y[0], f["trchi"], f["w"], f["LPsi"])
    fills = (1.0, np.nan, 0.0, 0.0, 0.0, 0.0)
    vals = interp2_cubic_multi(grid.x_min, grid.dx, grid.dy, arrays,
                               cx[..., 0], cx[..., 1], fills)
    qs = dict(zip(names, vals))
    curves.t_samples.append(t)
    curves.samples.append(dict(
        x=cx.copy(), mu_char=np.exp(curves.ln_mu), upsilon=np.exp(curves.lnups),
        alive=curves.alive.copy(), **qs))
