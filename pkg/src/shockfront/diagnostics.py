"""Theorem-level verdicts from run artifacts.

Every verdict is a pure function of stored series/curve/meta data, so
re-running diagnostics on saved CSVs reproduces the report bit-exactly.

The identity engine measures the continuum identities on solver output
with an all-O(h^2) recipe: temporal derivatives come from non-uniform
three-point differences of consecutive stored states, spatial ones from
2nd-order centered stencils, so every nonzero residual must shrink by
about 4x under grid refinement (ratio band [2.5, 6]).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import spatial_block_inverse
from .model import MetricModel, metric_bundle
from .numerics import dx1_c2, dx2_c2

#: residuals below this floor are round-off; ratio tests skip them
RESIDUAL_FLOOR = 1e-12


def _time_deriv(f_prev, f_cur, f_next, dt1, dt2):
    """Non-uniform centered derivative at the middle level (exact on quadratics)."""
    w_prev = -dt2 / (dt1 * (dt1 + dt2))
    w_cur = (dt2 - dt1) / (dt1 * dt2)
    w_next = dt1 / (dt2 * (dt1 + dt2))
    return w_prev * f_prev + w_cur * f_cur + w_next * f_next


def _u_ghost_pair(grid, t, width=1):
    xl = grid.x_min + grid.dx * np.arange(-width, 0)[:, None]
    xr = grid.x_max + grid.dx * np.arange(1, width + 1)[:, None]
    ny = grid.ny
    return (np.broadcast_to(1.0 - xl + t, (width, ny)),
            np.broadcast_to(1.0 - xr + t, (width, ny)))


def field_identity_residuals(model: MetricModel, grid, prev, cur, nxt) -> dict:
    """Max-abs residuals of the pointwise identities on one state triple.

    ``prev/cur/nxt`` are dicts with keys t, psi, pi, u, mu, L1, L2 as stored
    by the solver.  The frame used here is rebuilt from measured gradients
    (time derivative of u included), making every residual a genuine
    discretization error rather than zero by construction.
    """
    t = cur["t"]
    dt1 = cur["t"] - prev["t"]
    dt2 = nxt["t"] - cur["t"]
    dx, dy = grid.dx, grid.dy
    psi, pi, u = cur["psi"], cur["pi"], cur["u"]
    g, ginv, G = metric_bundle(model, psi)
    gh = _u_ghost_pair(grid, t)
    du1 = dx1_c2(u, dx, gh)
    du2 = dx2_c2(u, dy)
    p_fd = _time_deriv(prev["u"], u, nxt["u"], dt1, dt2)
    du = np.stack([p_fd, du1, du2], axis=-1)

    eik = np.einsum("...a,...ab,...b->...", du, ginv, du)
    b = ginv[..., 0, 1] * du1 + ginv[..., 0, 2] * du2
    mu_id = 1.0 / (p_fd - b)
    L = -mu_id[..., None] * np.einsum("...ab,...b->...a", ginv, du)
    X = -L - ginv[..., 0, :]

    def ip(v, w, m):
        return np.einsum("...a,...ab,...b->...", v, m, w)

    gbar_inv, _ = spatial_block_inverse(g)
    mu2_alt = np.einsum("...ab,...a,...b->...", gbar_inv, du[..., 1:], du[..., 1:])
    X_low = np.einsum("...ab,...b->...a", g, X)
    res = {
        "eikonal": eik,
        "frame_gLL": ip(L, L, g),
        "frame_gXX": ip(X, X, g) - 1.0,
        "frame_gLX": ip(L, X, g) + 1.0,
        "L_du": np.einsum("...a,...a->...", L, du),
        "Xbreve_du": mu_id * np.einsum("...a,...a->...",
                                       X[..., 1:], du[..., 1:]) - 1.0,
        "mu_inverse_sq": mu_id ** (-2.0) - mu2_alt,
        "mu_du_X": np.max(np.abs(mu_id[..., None] * du[..., 1:]
                                 - X_low[..., 1:]), axis=-1),
    }

    # transport consistency for mu: FD L mu against the exact right-hand side
    mu = cur["mu"]
    L1f, L2f = cur["L1"], cur["L2"]
    dmu_dt = _time_deriv(prev["mu"], mu, nxt["mu"], dt1, dt2)
    one = np.ones((1, grid.ny))
    d1mu = dx1_c2(mu, dx, (one, one))
    d2mu = dx2_c2(mu, dy)
    Lmu_fd = dmu_dt + L1f * d1mu + L2f * d2mu
    d1psi = dx1_c2(psi, dx)
    d2psi = dx2_c2(psi, dy)
    Lvec = np.stack([np.ones_like(L1f), L1f, L2f], axis=-1)
    Xvec = np.stack([np.zeros_like(L1f), -L1f - ginv[..., 0, 1],
                     -L2f - ginv[..., 0, 2]], axis=-1)
    G_LL = ip(Lvec, Lvec, G)
    G_LX = ip(Lvec, Xvec, G)
    LPsi = pi + L1f * d1psi + L2f * d2psi
    XPsi = Xvec[..., 1] * d1psi + Xvec[..., 2] * d2psi
    murhs = 0.5 * G_LL * mu * XPsi - 0.5 * mu * G_LL * LPsi - mu * G_LX * LPsi
    res["transport_mu"] = Lmu_fd - murhs

    # transport consistency for the L^i_small component functions
    gsl = (ginv + Lvec[..., :, None] * Lvec[..., None, :]
           + Lvec[..., :, None] * Xvec[..., None, :]
           + Xvec[..., :, None] * Lvec[..., None, :])
    T = gsl[..., :, 2].copy()
    T[..., 0] = 0.0
    T /= np.sqrt(ip(T, T, g))[..., None]
    TPsi = T[..., 1] * d1psi + T[..., 2] * d2psi
    G_LT = ip(Lvec, T, G)
    a = -0.5 * G_LL * LPsi
    worst = np.zeros_like(mu)
    for i, key in ((0, "Lsm1"), (1, "Lsm2")):
        Lsm_dt = _time_deriv(prev[key], cur[key], nxt[key], dt1, dt2)
        ghl = (np.zeros((1, grid.ny)), np.zeros((1, grid.ny)))
        d1L = dx1_c2(cur[key], dx, ghl)
        d2L = dx2_c2(cur[key], dy)
        lhs = Lsm_dt + L1f * d1L + L2f * d2L
        rhs = (a * Lvec[..., 1 + i] + a * ginv[..., 0, 1 + i]
               - G_LT * T[..., 1 + i] * LPsi + 0.5 * G_LL * TPsi * T[..., 1 + i])
        worst = np.maximum(worst, np.abs(lhs - rhs))
    res["transport_Lsmall"] = worst
    return {k: float(np.max(np.abs(v))) for k, v in res.items()}


def update_trigger(trigger: dict, hist, grid) -> None:
    """Check the point-of-no-return property on the middle history level:
    wherever mu <= 1/4, the finite-difference L mu must be <= -delta_star/8.

    L mu is differenced along the characteristic direction,
    (mu_next(x + L dt2) - mu_prev(x - L dt1)) / (dt1 + dt2), which stays
    accurate where mu has steep spatial gradients transverse to L.
    """
    from .numerics import interp2_cubic

    prev, cur, nxt = hist
    mask = cur["mu"] <= 0.25
    if not np.any(mask) or trigger["threshold"] is None:
        return
    dt1 = cur["t"] - prev["t"]
    dt2 = nxt["t"] - cur["t"]
    X1, X2 = grid.mesh()
    x1, x2 = X1[mask], X2[mask]
    L1, L2 = cur["L1"][mask], cur["L2"][mask]
    m_next = interp2_cubic(grid.x_min, grid.dx, grid.dy, nxt["mu"],
                           x1 + L1 * dt2, x2 + L2 * dt2, fill=1.0)
    m_prev = interp2_cubic(grid.x_min, grid.dx, grid.dy, prev["mu"],
                           x1 - L1 * dt1, x2 - L2 * dt1, fill=1.0)
    vals = (m_next - m_prev) / (dt1 + dt2)
    trigger["checked"] += int(vals.size)
    trigger["violations"] += int(np.count_nonzero(vals > trigger["threshold"]))
    margin = float(trigger["threshold"] - np.max(vals))
    trigger["worst_margin"] = min(trigger["worst_margin"], margin)


# ---------------------------------------------------------------------------
# curve-lattice identities: upsilon, Jacobian, label transport
# ---------------------------------------------------------------------------

def curve_identity_residuals(traj, model: MetricModel,
                             mu_window: float = 0.2,
                             reduce_max: bool = True) -> dict:
    """Residuals living on the traced (u0, theta0) lattice.

    * ``L_ln_upsilon``: d/dt ln(upsilon_geo) - tr chi, with upsilon_geo
      measured geometrically from theta-neighbor curves (independent of the
      upsilon ODE).
    * ``jacobian``: lattice determinant of the chart Jacobian against
      mu (det gbar)^(-1/2) upsilon, mixing the field mu with the ODE upsilon.
    * ``mu_char_vs_field``: ODE-integrated mu against the interpolated field.
    * ``u_label``: eikonal transport consistency L u = 0 along curves.
    * ``mu_transport_curve``: d/dt ln(mu_field) along curves against the
      log-form transport coefficient w.
    """
    curves = traj.curves
    times_all = np.asarray(curves.t_samples)
    # restrict to the window mu_star >= mu_window (identities are checked
    # where the run is resolved; mu below that is the blowup approach)
    st, smu = traj.series["t"], traj.series["mu_star"]
    inside = smu >= mu_window
    t_gate = float(st[inside][-1]) if np.any(inside) else float(st[-1])
    keep = times_all <= t_gate + 1e-12
    samples = [s for s, k in zip(curves.samples, keep) if k]
    times = times_all[keep]
    n_t = len(samples)
    if n_t < 5:
        return {}
    n_u = curves.u0.size
    n_th = curves.th0.size
    du_seed = curves.u0[1] - curves.u0[0]
    dth = 1.0 / n_th

    def stack(key):
        return np.stack([s[key] for s in samples])   # (n_t, n_u, n_th, ...)

    x = stack("x")
    psi = stack("psi")
    mu_field = stack("mu_field")
    u_field = stack("u_field")
    ups_char = stack("upsilon")
    mu_char = stack("mu_char")
    trchi = stack("trchi")
    wlog = stack("w")
    alive = stack("alive")
    ok = np.all(alive, axis=0)

    from .model import evaluate_metric

    g = evaluate_metric(model, psi)

    # geometric upsilon from theta neighbors (periodic, seam-unwrapped)
    dx1_dth = (np.roll(x[..., 0], -1, axis=2) - np.roll(x[..., 0], 1, axis=2)) / (2 * dth)
    raw = np.roll(x[..., 1], -1, axis=2) - np.roll(x[..., 1], 1, axis=2)
    dx2_dth = (np.mod(raw + 0.5, 1.0) - 0.5) / (2 * dth)
    theta_vec = np.stack([dx1_dth, dx2_dth], axis=-1)
    gab = g[..., 1:, 1:]
    ups_geo2 = np.einsum("...ab,...a,...b->...", gab, theta_vec, theta_vec)
    ups_geo = np.sqrt(np.maximum(ups_geo2, 1e-300))

    # d/dt along curves via interior centered differences in sample time
    def ddt(q):
        return (q[2:] - q[:-2]) / (times[2:] - times[:-2])[:, None, None]

    mid = slice(1, -1)
    res_ups = ddt(np.log(ups_geo)) - trchi[mid]
    res_mu_curve = ddt(np.log(mu_field)) - wlog[mid]
    res_ulabel = u_field - curves.u0[None, :, None]
    res_mu_dual = mu_char - mu_field

    # Jacobian: lattice chart derivatives against mu (det gbar)^(-1/2) ups
    dx_du = (x[:, 2:, :, :] - x[:, :-2, :, :]) / (2 * du_seed)
    dx_dth_full = theta_vec
    det_chart = (dx_du[..., 0] * dx_dth_full[:, 1:-1, :, 1]
                 - dx_du[..., 1] * dx_dth_full[:, 1:-1, :, 0])
    _, det_gbar = spatial_block_inverse(g[:, 1:-1])
    jac_rhs = mu_field[:, 1:-1] * det_gbar ** (-0.5) * ups_char[:, 1:-1]
    res_jac = np.abs(det_chart) - jac_rhs

    okc = ok[None, :, :]
    out = {
        "L_ln_upsilon": res_ups * okc,
        "mu_transport_curve": res_mu_curve * okc,
        "u_label": res_ulabel * okc,
        "mu_char_vs_field": res_mu_dual * okc,
        "jacobian": res_jac * okc[:, 1:-1, :],
    }
    if not reduce_max:
        out["_times"] = times
        return out
    return {k: float(np.max(np.abs(v))) for k, v in out.items()}


def _interp_at_levels(mu_samples, values, levels):
    """Interpolate a residual sample series onto fixed mu_star checkpoints.

    Comparing residuals at matched mu_star levels removes the window-edge
    quantization that otherwise biases max-over-window comparisons between
    resolutions (the finer run samples closer to the window edge, where
    residuals are largest).
    """
    mu = np.asarray(mu_samples, dtype=float)
    v = np.asarray(values, dtype=float)
    order = np.argsort(mu, kind="stable")
    mu, v = mu[order], v[order]
    lo, hi = mu[0], mu[-1]
    out = {}
    for lev in levels:
        if lo - 1e-9 <= lev <= hi + 1e-9:
            out[lev] = float(np.interp(lev, mu, v))
    return out


def identity_level_table(traj, model: MetricModel,
                         levels=(0.3, 0.4, 0.5, 0.6, 0.7, 0.8)) -> dict:
    """Per-identity residuals at fixed mu_star checkpoints for one run.

    Field identities come from the in-run mu-ladder samples; curve
    identities from the per-record lattice residual series.
    """
    table: dict = {}
    if traj.identity_samples:
        mus = [m for m, _ in traj.identity_samples]
        names = traj.identity_samples[0][1].keys()
        for name in names:
            vals = [r[name] for _, r in traj.identity_samples]
            table[name] = _interp_at_levels(mus, vals, levels)
    mu_t, curve_series = curve_identity_series(traj, model)
    for name, vals in curve_series.items():
        table[name] = _interp_at_levels(mu_t, vals, levels)
    return table


def curve_identity_series(traj, model: MetricModel):
    """Per-record-time maxima of each curve-lattice identity residual.

    Returns (mu_star at the record times, {identity: series}).
    """
    full = curve_identity_residuals(traj, model, mu_window=0.0,
                                    reduce_max=False)
    if not full:
        return np.array([]), {}
    times = full.pop("_times")
    mu_t = np.interp(times, traj.series["t"], traj.series["mu_star"])
    series = {}
    for name, arr in full.items():
        flat = np.abs(arr).reshape(arr.shape[0], -1)
        r = np.max(flat, axis=1)
        if arr.shape[0] != times.shape[0]:        # interior-time residuals
            pad = np.full(times.shape[0], np.nan)
            pad[1:-1] = r
            r = pad
        series[name] = r
    good = ~np.isnan(np.stack(list(series.values()))).any(axis=0)
    return mu_t[good], {k: v[good] for k, v in series.items()}


def residual_convergence_suite(table_h: dict, table_h2: dict,
                               band=(2.5, 6.0), floor=RESIDUAL_FLOOR) -> dict:
    """Per-identity ratio table for two runs at h and h/2.

    Inputs are :func:`identity_level_table` outputs; each identity is
    compared through the max over the mu_star checkpoints present in both.
    Ratios inside ``band`` (about 4 for O(h^2)) pass; residuals at or below
    the round-off floor at both resolutions are skipped.
    """
    table = {}
    for name in sorted(set(table_h) & set(table_h2)):
        common = sorted(set(table_h[name]) & set(table_h2[name]))
        if not common:
            continue
        a = max(table_h[name][lev] for lev in common)
        b = max(table_h2[name][lev] for lev in common)
        if a <= floor and b <= floor:
            table[name] = dict(coarse=a, fine=b, ratio=None, verdict="skipped")
            continue
        ratio = a / max(b, 1e-300)
        ok = band[0] <= ratio <= band[1]
        table[name] = dict(coarse=a, fine=b, ratio=ratio,
                           verdict="pass" if ok else "fail")
    return table


# ---------------------------------------------------------------------------
# fits and verdicts
# ---------------------------------------------------------------------------

def fit_mu_star(t, mu_star, lo: float = 0.1, hi: float = 0.9):
    """Least-squares fit mu_star(t) ~ a (1 - kappa t) on the window [lo, hi].

    Returns (kappa, a, max relative residual); kappa = 0 flags no shock.
    """
    t = np.asarray(t, dtype=float)
    mu = np.asarray(mu_star, dtype=float)
    sel = (mu >= lo) & (mu <= hi)
    if np.count_nonzero(sel) < 4:
        return 0.0, float(mu[0]) if mu.size else 1.0, float("nan")
    A = np.stack([np.ones(np.count_nonzero(sel)), t[sel]], axis=1)
    coef, *_ = np.linalg.lstsq(A, mu[sel], rcond=None)
    a, b = float(coef[0]), float(coef[1])
    if b >= 0.0 or a <= 0.0:
        return 0.0, a, float("nan")
    kappa = -b / a
    fit = a * (1.0 - kappa * t[sel])
    resid = float(np.max(np.abs(mu[sel] - fit)) / a)
    return kappa, a, resid


def lifespan_check(t_lifespan: float, dstar: float, tol: float) -> dict:
    """|t_lifespan * delta_star - 1| <= tol."""
    if not np.isfinite(t_lifespan) or dstar <= 0.0:
        return dict(applicable=False, ok=True, product=None, tol=tol)
    product = t_lifespan * dstar
    return dict(applicable=True, ok=bool(abs(product - 1.0) <= tol),
                product=product, tol=tol)


def fit_blowup_rate(t, values, t_end, mu_end, kappa_hint):
    """Fit values(t) ~ C (T - t)^(-p), T searched past the halt time.

    Returns (p, T, fit residual).  T is a fit parameter, decoupled from the
    stopping threshold.
    """
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=float)
    if kappa_hint <= 0.0:
        kappa_hint = 0.5
    T_lo = t_end + 1e-3 * mu_end / kappa_hint
    T_hi = t_end + 4.0 * mu_end / kappa_hint

    def sse(T):
        z = np.log(T - t)
        A = np.stack([np.ones_like(z), z], axis=1)
        coef, res, *_ = np.linalg.lstsq(A, np.log(v), rcond=None)
        pred = A @ coef
        return float(np.sum((np.log(v) - pred) ** 2)), coef

    Ts = np.linspace(T_lo, T_hi, 200)
    costs = [sse(T)[0] for T in Ts]
    i = int(np.argmin(costs))
    lo = Ts[max(i - 1, 0)]
    hi = Ts[min(i + 1, len(Ts) - 1)]
    from .plane import _golden_min

    T_best = _golden_min(lambda T: sse(T)[0], lo, hi, iters=60)
    cost, coef = sse(T_best)
    p = -float(coef[1])
    resid = float(np.sqrt(cost / len(t)))
    return p, float(T_best), resid


def blowup_rate_check(series: dict, dstar: float, gll_flat: float,
                      t_end: float, mu_lo: float = 0.05, mu_hi: float = 0.5,
                      product_fraction: float = 0.8,
                      variation_limit: float = 0.2) -> dict:
    """Rate exponent of max|d_1 Psi|, and the mu |XPsi| product window.

    The product at the mu-argmin must stay above
    product_fraction * dstar / (4 |G_LL_flat|) and vary by less than
    variation_limit over the window.
    """
    t = np.asarray(series["t"])
    mu = np.asarray(series["mu_star"])
    sel = (mu >= mu_lo) & (mu <= mu_hi)
    report = dict(applicable=bool(np.count_nonzero(sel) >= 32))
    if not report["applicable"]:
        report.update(ok=True, rate_exponent=None, rate_T=None,
                      product_range=None, product_bound=None,
                      variation=None)
        return report
    kappa, _, _ = fit_mu_star(t, mu)
    p, T_fit, fit_res = fit_blowup_rate(t[sel], np.asarray(series["max_abs_d1psi"])[sel],
                                        t_end, float(mu[-1]), kappa)
    prod = np.asarray(series["mu_xpsi_argmin"])[sel]
    pmin, pmax = float(np.min(prod)), float(np.max(prod))
    bound = product_fraction * dstar / (4.0 * abs(gll_flat))
    variation = (pmax - pmin) / pmax if pmax > 0 else np.inf
    ok = (pmin >= bound) and (variation < variation_limit)
    report.update(ok=bool(ok), rate_exponent=p, rate_T=T_fit, rate_residual=fit_res,
                  product_range=[pmin, pmax], product_bound=bound,
                  variation=float(variation))
    return report


def _window_gate(series: dict, mu_window: float) -> float:
    """Last time with mu_star >= mu_window (the resolved window)."""
    st = np.asarray(series["t"])
    smu = np.asarray(series["mu_star"])
    inside = smu >= mu_window
    return float(st[inside][-1]) if np.any(inside) else float(st[-1])


def geometric_regularity_check(traj, eps0: float, limit: float = 3.0,
                               growth_required: float = 10.0,
                               mu_window: float = 0.08) -> dict:
    """Geometric-coordinate derivatives of Psi stay bounded while the
    rectangular slope blows up.

    d Psi/dt along curves, d Psi/du and d Psi/dtheta across neighbor curves,
    each normalized by its initial value plus eps0; the worst growth factor
    must stay <= limit while max|d_1 Psi| grows by >= growth_required.
    Both maxima are taken over the resolved window mu_star >= mu_window:
    below it the rectangular fields are steeper than the grid and the
    lattice samples measure interpolation noise, not the solution.
    """
    curves = traj.curves
    t_gate = _window_gate(traj.series, mu_window)
    keep = np.asarray(curves.t_samples) <= t_gate + 1e-12
    samples = [s for s, k in zip(curves.samples, keep) if k]
    if len(samples) < 5:
        return dict(applicable=False, ok=True, ratio=None, growth=None)
    times = np.asarray(curves.t_samples)[keep]
    psi = np.stack([s["psi"] for s in samples])
    alive = np.all(np.stack([s["alive"] for s in samples]), axis=0)
    du_seed = curves.u0[1] - curves.u0[0]
    dth = 1.0 / curves.th0.size

    dpsi_dt = (psi[2:] - psi[:-2]) / (times[2:] - times[:-2])[:, None, None]
    dpsi_du = (psi[:, 2:, :] - psi[:, :-2, :]) / (2 * du_seed)
    dpsi_dth = (np.roll(psi, -1, axis=2) - np.roll(psi, 1, axis=2)) / (2 * dth)

    def norm(q, mask):
        q = np.abs(q * mask[None])
        return np.max(q.reshape(q.shape[0], -1), axis=1)

    ratios = []
    for q, mask in ((dpsi_dt, alive), (dpsi_du, alive[1:-1, :]), (dpsi_dth, alive)):
        series = norm(q, mask)
        ratios.append(float(np.max(series) / (series[0] + eps0)))
    ratio = max(ratios)
    st = np.asarray(traj.series["t"])
    d1 = np.asarray(traj.series["max_abs_d1psi"])[st <= t_gate + 1e-12]
    growth = float(np.max(d1) / max(d1[0], 1e-300))
    applicable = traj.status == "shocked" and growth >= growth_required
    ok = (ratio <= limit) if applicable else True
    return dict(applicable=bool(applicable), ok=bool(ok), ratio=ratio,
                growth=growth, per_direction=ratios, t_gate=t_gate)


def smallness_propagation_check(series: dict, eps0: float,
                                c_prop: float = 5.0,
                                mu_window: float = 0.2) -> dict:
    """max_t of max|L Psi| and max|d_2 Psi| both <= c_prop * eps0.

    The maxima run over the resolved window mu_star >= mu_window: the
    rectangular d_2 Psi genuinely grows like eps0/mu near the shock (only
    its torus-projected part stays O(eps0)), so an unwindowed bound would
    contradict the blowup itself.
    """
    if eps0 <= 0.0:
        return dict(applicable=False, ok=True, max_LPsi=None, max_d2psi=None)
    t_gate = _window_gate(series, mu_window)
    sel = np.asarray(series["t"]) <= t_gate + 1e-12
    max_l = float(np.max(np.asarray(series["max_abs_LPsi"])[sel]))
    max_2 = float(np.max(np.asarray(series["max_abs_d2psi"])[sel]))
    ok = max_l <= c_prop * eps0 and max_2 <= c_prop * eps0
    return dict(applicable=True, ok=bool(ok), max_LPsi=max_l, max_d2psi=max_2,
                bound=c_prop * eps0, t_gate=t_gate)


def trigger_check(trigger: dict) -> dict:
    applicable = trigger.get("checked", 0) > 0
    return dict(applicable=bool(applicable),
                ok=bool(trigger.get("violations", 0) == 0) if applicable else True,
                **{k: (None if isinstance(v, float) and not np.isfinite(v) else v)
                   for k, v in trigger.items()})


@dataclass
class DiagnosticsConfig:
    eps0: float = 0.01
    tol_lifespan: float = 0.1
    c_prop: float = 5.0
    regularity_limit: float = 3.0
    rate_window: tuple = (0.05, 0.5)
    fit_window: tuple = (0.1, 0.9)
    checks: tuple = ("lifespan", "rate", "regularity", "smallness", "trigger")


def blowup_points_from_final(final: dict, grid, mu_stop: float, cap: int = 64):
    """Grid points with mu <= 2 mu_stop at the final slice, sorted by mu."""
    mu = final["mu"]
    u = final["u"]
    X1, X2 = grid.mesh()
    mask = mu <= 2.0 * mu_stop
    if not np.any(mask):
        return []
    idx = np.argsort(mu[mask], kind="stable")[:cap]
    rows = np.stack([u[mask][idx], X2[mask][idx], X1[mask][idx], X2[mask][idx]],
                    axis=1)
    return [[float(a) for a in row] for row in rows]


def build_shock_report(traj, model: MetricModel, cfg: DiagnosticsConfig,
                       residual_table=None) -> dict:
    """Assemble the ShockReport dict (stable key order via JSON sort)."""
    from .model import genuine_nonlinearity_coefficient

    series = traj.series
    kappa, offset, resid = fit_mu_star(series["t"], series["mu_star"],
                                       *cfg.fit_window)
    gll_flat = genuine_nonlinearity_coefficient(model)
    verdicts = {}
    report = dict(
        status=traj.status,
        t_end=traj.t_end,
        t_lifespan_num=traj.t_lifespan if np.isfinite(traj.t_lifespan) else None,
        delta_star=traj.delta_star,
        delta_star_location=list(traj.delta_star_location),
        kappa_fit=kappa,
        kappa_offset=offset,
        kappa_residual=resid if np.isfinite(resid) else None,
        gll_flat=gll_flat,
    )
    if "lifespan" in cfg.checks:
        chk = lifespan_check(traj.t_lifespan, traj.delta_star, cfg.tol_lifespan)
        report["lifespan"] = chk
        verdicts["lifespan"] = chk["ok"]
    if "rate" in cfg.checks:
        chk = blowup_rate_check(series, traj.delta_star, gll_flat, traj.t_end,
                                *cfg.rate_window)
        report["rate"] = chk
        report["rate_exponent"] = chk.get("rate_exponent")
        report["mu_xpsi_product_range"] = chk.get("product_range")
        verdicts["rate"] = chk["ok"]
    if "regularity" in cfg.checks:
        # the eps0 in the denominator needs a floor for exact simple waves,
        # whose initial tangential derivatives vanish identically
        chk = geometric_regularity_check(traj, max(cfg.eps0, 1e-2),
                                         cfg.regularity_limit)
        report["regularity"] = chk
        report["regularity_ratio"] = chk.get("ratio")
        verdicts["regularity"] = chk["ok"]
    if "smallness" in cfg.checks:
        chk = smallness_propagation_check(series, cfg.eps0, cfg.c_prop)
        report["smallness"] = chk
        verdicts["smallness"] = chk["ok"]
    if "trigger" in cfg.checks:
        chk = trigger_check(traj.trigger)
        report["trigger"] = chk
        verdicts["trigger"] = chk["ok"]
    report["blowup_points"] = blowup_points_from_final(
        traj.final, traj.grid, traj.meta.get("mu_stop", 0.05)) \
        if traj.status == "shocked" else []
    report["identity_max"] = {k: v for k, v in sorted(traj.identity_max.items())}
    report["residual_table"] = residual_table
    report["verdicts"] = verdicts
    report["all_pass"] = bool(all(verdicts.values())) if verdicts else True
    return report
