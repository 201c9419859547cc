"""Command-line entry points.

Subcommands:
  simulate <config>     full 2-D run + diagnostics -> run artifacts + report
  plane <config>        fan oracle and 1-D Euler Riemann run
  euler-data <config>   eps-delta hierarchy data builder + report
  verify <run-dir>      re-run diagnostics on saved artifacts; bit-exact check
  convergence <config>  paired h, h/2 runs + identity convergence suite

Exit codes: 0 success / verdicts pass, 2 verdict failure, 1 error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from types import SimpleNamespace

import numpy as np

from . import artifacts as art
from . import diagnostics as dg
from . import euler as eu
from . import plane as pl
from . import solver2d as s2
from .config import (
    RunConfig,
    build_data_spec,
    build_grid,
    build_model,
    output_dir,
    parse_config,
)
from .errors import NoShockPredicted, ShockfrontError


def _diag_config(cfg: RunConfig) -> dg.DiagnosticsConfig:
    d = cfg.diagnostics
    return dg.DiagnosticsConfig(eps0=float(d["eps0"]),
                                tol_lifespan=float(d["tol_lifespan"]),
                                c_prop=float(d["c_prop"]),
                                regularity_limit=float(d["regularity_limit"]),
                                checks=tuple(d["checks"]))


def _run_once(cfg: RunConfig):
    model = build_model(cfg)
    grid = build_grid(cfg)
    spec = build_data_spec(cfg)
    r = cfg.run
    d = cfg.diagnostics
    traj = s2.run(model, grid, spec, t_max=float(r["t_max"]),
                  cfl=float(r["cfl"]), dissipation=float(r["dissipation"]),
                  mu_stop=float(r["mu_stop"]), mu_floor=float(r["mu_floor"]),
                  n_u_curves=int(d["n_u_curves"]),
                  n_th_curves=int(d["n_th_curves"]),
                  snapshot_stride=int(cfg.output["stride"]))
    return model, grid, traj


def _write_run(outdir: Path, cfg: RunConfig, grid, traj) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    art.write_json(outdir / "config_resolved.json", cfg.resolved())
    art.write_series(outdir / "series.csv", traj.series)
    art.write_chars(outdir / "chars.csv", traj.curves)
    art.write_snapshot(outdir / "snapshot_final.csv", grid, traj.final)
    for i, snap in enumerate(traj.snapshots):
        art.write_snapshot(outdir / f"snapshot_{i:06d}.csv", grid, snap)
    meta = dict(
        status=traj.status, t_end=traj.t_end,
        t_lifespan=traj.t_lifespan if np.isfinite(traj.t_lifespan) else None,
        delta_star=traj.delta_star,
        delta_star_location=list(traj.delta_star_location),
        trigger=traj.trigger,
        identity_max=traj.identity_max,
        identity_samples=[[m, r] for m, r in traj.identity_samples],
        curves=dict(u0=traj.curves.u0.tolist(), th0=traj.curves.th0.tolist()),
        grid=dict(nx=grid.nx, ny=grid.ny, x_min=grid.x_min, x_max=grid.x_max),
        meta=traj.meta,
    )
    art.write_json(outdir / "run_meta.json", meta)


def _load_run(outdir: Path):
    meta = art.read_json(outdir / "run_meta.json")
    cfg_raw = art.read_json(outdir / "config_resolved.json")
    from .config import validate_config

    cfg = validate_config({k: v for k, v in cfg_raw.items() if v})
    grid = s2.Grid2D(**{k: meta["grid"][k] for k in ("nx", "ny", "x_min", "x_max")})
    series = art.read_csv(outdir / "series.csv")
    n_u = len(meta["curves"]["u0"])
    n_th = len(meta["curves"]["th0"])
    curves = art.read_chars(outdir / "chars.csv", n_u, n_th)
    curves.u0 = np.asarray(meta["curves"]["u0"])
    curves.th0 = np.asarray(meta["curves"]["th0"])
    snap = art.read_csv(outdir / "snapshot_final.csv")
    final = {k: snap[k].reshape(grid.nx, grid.ny)
             for k in ("psi", "pi", "u", "mu")}
    trigger = meta["trigger"]
    if isinstance(trigger.get("worst_margin"), str):
        trigger["worst_margin"] = float(trigger["worst_margin"])
    t_lifespan = meta["t_lifespan"]
    traj = SimpleNamespace(
        grid=grid, series=series, curves=curves, status=meta["status"],
        t_end=meta["t_end"],
        t_lifespan=float("inf") if t_lifespan is None else t_lifespan,
        delta_star=meta["delta_star"],
        delta_star_location=tuple(meta["delta_star_location"]),
        identity_max=meta["identity_max"],
        identity_samples=[(m, r) for m, r in meta["identity_samples"]],
        trigger=trigger, final=final, snapshots=[],
        meta=meta["meta"])
    return cfg, grid, traj


def cmd_simulate(args) -> int:
    cfg = parse_config(args.config)
    outdir = output_dir(cfg, args.out)
    model, grid, traj = _run_once(cfg)
    _write_run(outdir, cfg, grid, traj)
    # the report is built from the artifacts just written, so verify can
    # reproduce it bit-for-bit
    cfg2, grid2, traj2 = _load_run(outdir)
    report = dg.build_shock_report(traj2, model, _diag_config(cfg))
    art.write_json(outdir / "shock_report.json", report)
    if not args.quiet:
        _print_report(report)
    return 0 if report["all_pass"] else 2


def cmd_verify(args) -> int:
    outdir = Path(args.rundir)
    cfg, grid, traj = _load_run(outdir)
    model = build_model(cfg)
    report = dg.build_shock_report(traj, model, _diag_config(cfg))
    stored_path = outdir / "shock_report.json"
    fresh = art._jsonable(report)
    import json

    fresh_text = json.dumps(fresh, indent=2, sort_keys=True) + "\n"
    stored_text = stored_path.read_text()
    bit_exact = fresh_text == stored_text
    if not args.quiet:
        print(f"verify: report reproduction {'bit-exact' if bit_exact else 'MISMATCH'}")
        _print_report(report)
    if not bit_exact:
        return 2
    return 0 if report["all_pass"] else 2


def cmd_plane(args) -> int:
    cfg = parse_config(args.config)
    outdir = output_dir(cfg, args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    model = build_model(cfg)
    spec = build_data_spec(cfg)
    from .solver2d import make_profile

    profile = make_profile(spec)
    fan = pl.simple_wave_fan(model, pl.SimpleWaveData(profile))
    try:
        t_star, u_star = pl.simple_wave_blowup_time(fan)
        shock = True
    except NoShockPredicted:
        t_star, u_star, shock = float("inf"), float("nan"), False
    art.write_csv(outdir / "fan.csv",
                  dict(u=fan.u, x0=fan.x0, slope=fan.slope, mu0=fan.mu0,
                       coeff=fan.coeff))
    # Euler 1-D run on the hierarchy data from the euler section
    e = cfg.euler
    fm = eu.model_lagrangian(float(e["s"]), float(e["k"]))
    data = eu.build_hierarchy_data(fm, float(e["eps0"]), float(e["delta0"]),
                                   center=float(e["bump"]["center"]),
                                   width=float(e["bump"]["width"]),
                                   profile=e["bump"]["profile"])
    efan = pl.euler_simple_wave_fan(data)
    try:
        e_star, eu_star = pl.euler_blowup_time(efan)
        e_shock = True
    except NoShockPredicted:
        e_star, eu_star, e_shock = float("inf"), float("nan"), False
    report = dict(scalar=dict(delta_star=fan.delta_star, t_star=t_star,
                              u_star=u_star, shock=shock),
                  euler=dict(delta_star=data.delta_star, t_star=e_star,
                             u_star=eu_star, shock=e_shock))
    if e_shock:
        traj = pl.riemann_solve(fm, data, nx=int(e["nx"]),
                                t_max=min(float(e["t_max"]), 1.3 * e_star),
                                mu_stop=float(e["mu_stop"]))
        art.write_csv(outdir / "plane_series.csv",
                      dict(t=traj.series["t"], mu_star=traj.series["mu_star"],
                           max_abs_dxpsi=traj.series["max_abs_dxpsi"]))
        report["euler"].update(status=traj.status, t_lifespan=traj.t_lifespan,
                               lifespan_product=traj.t_lifespan * data.delta_star,
                               r_minus_max=traj.r_minus_max)
        ok = abs(traj.t_lifespan * data.delta_star - 1.0) <= \
            float(cfg.diagnostics["tol_lifespan"])
        report["euler"]["lifespan_ok"] = bool(ok)
    else:
        times = np.linspace(0.0, cfg.run["t_max"], 257)
        mu_star, dxpsi = pl.fan_series(fan, times)
        art.write_csv(outdir / "plane_series.csv",
                      dict(t=times, mu_star=mu_star, max_abs_dxpsi=dxpsi))
        ok = True
    art.write_json(outdir / "plane_report.json", report)
    if not args.quiet:
        print(f"scalar fan: delta*={fan.delta_star:.6g} T*={t_star:.6g}")
        print(f"euler: delta*={data.delta_star:.6g} T*={e_star:.6g} "
              + (f"t_lifespan={report['euler'].get('t_lifespan'):.6g}" if e_shock else ""))
    return 0 if ok else 2


def cmd_euler_data(args) -> int:
    cfg = parse_config(args.config)
    outdir = output_dir(cfg, args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    e = cfg.euler
    fm = eu.model_lagrangian(float(e["s"]), float(e["k"]))
    data = eu.build_hierarchy_data(fm, float(e["eps0"]), float(e["delta0"]),
                                   center=float(e["bump"]["center"]),
                                   width=float(e["bump"]["width"]),
                                   profile=e["bump"]["profile"])
    x = np.linspace(0.0, 1.0, 4097)
    psi0, psi1 = data.psi(x)
    dxp = x[1] - x[0]
    art.write_csv(outdir / "euler_data.csv",
                  dict(x=x, Rplus=data.r_plus(x), Psi0p=psi0, Psi1p=psi1,
                       d1_Psi0p=np.gradient(psi0, dxp),
                       d1_Psi1p=np.gradient(psi1, dxp)))
    art.write_json(outdir / "hierarchy_report.json", data.report)
    if not args.quiet:
        print(f"euler-data: delta*={data.delta_star:.6g} "
              f"cancellation_ratio={data.report['cancellation_ratio']:.4g}")
    return 0


def cmd_convergence(args) -> int:
    cfg = parse_config(args.config)
    outdir = output_dir(cfg, args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    model = build_model(cfg)
    spec = build_data_spec(cfg)
    tables = {}
    runs = {}
    for level, factor in (("coarse", 1), ("fine", 2)):
        g = cfg.grid
        grid = s2.Grid2D(nx=int(g["nx"]) * factor, ny=int(g["ny"]) * factor,
                         x_min=float(g["x_min"]), x_max=float(g["x_max"]))
        d = cfg.diagnostics
        traj = s2.run(model, grid, spec, t_max=float(cfg.run["t_max"]),
                      cfl=float(cfg.run["cfl"]),
                      dissipation=float(cfg.run["dissipation"]),
                      mu_stop=float(cfg.run["mu_stop"]),
                      n_u_curves=int(d["n_u_curves"]) * factor,
                      n_th_curves=int(d["n_th_curves"]) * factor)
        tables[level] = dg.identity_level_table(traj, model)
        runs[level] = traj
    suite = dg.residual_convergence_suite(tables["coarse"], tables["fine"])
    rows = dict(identity=[], coarse=[], fine=[], ratio=[], verdict=[])
    all_ok = True
    for name, row in suite.items():
        rows["identity"].append(name)
        rows["coarse"].append(row["coarse"])
        rows["fine"].append(row["fine"])
        rows["ratio"].append(np.nan if row["ratio"] is None else row["ratio"])
        rows["verdict"].append(row["verdict"])
        if row["verdict"] == "fail":
            all_ok = False
    with open(outdir / "residuals.csv", "w") as fh:
        fh.write("identity,coarse,fine,ratio,verdict\n")
        for i in range(len(rows["identity"])):
            fh.write(f'{rows["identity"][i]},{art.fmt(rows["coarse"][i])},'
                     f'{art.fmt(rows["fine"][i])},{art.fmt(rows["ratio"][i])},'
                     f'{rows["verdict"][i]}\n')
    art.write_json(outdir / "convergence_report.json",
                   dict(suite=suite,
                        t_lifespan=dict(coarse=runs["coarse"].t_lifespan,
                                        fine=runs["fine"].t_lifespan)))
    if not args.quiet:
        for name, row in suite.items():
            r = row["ratio"]
            print(f"{name:22s} ratio={'skip' if r is None else f'{r:5.2f}'} "
                  f"{row['verdict']}")
    return 0 if all_ok else 2


def _print_report(report: dict) -> None:
    print(f"status={report['status']} t_lifespan={report['t_lifespan_num']} "
          f"delta*={report['delta_star']:.6g}")
    for name, ok in report["verdicts"].items():
        print(f"  [{'pass' if ok else 'FAIL'}] {name}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="shockfront",
        description="Shock-formation simulator and verification suite for "
                    "quasilinear wave equations on R x T")
    parser.add_argument("--threads", type=int, default=os.cpu_count(),
                        help="cap worker threads (numpy vectorized paths)")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, arg in (("simulate", cmd_simulate, "config"),
                          ("plane", cmd_plane, "config"),
                          ("euler-data", cmd_euler_data, "config"),
                          ("verify", cmd_verify, "rundir"),
                          ("convergence", cmd_convergence, "config")):
        p = sub.add_parser(name)
        p.add_argument(arg)
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--quiet", action="store_true")
        p.set_defaults(fn=fn)
    args = parser.parse_args(argv)
    if args.threads:
        os.environ.setdefault("OMP_NUM_THREADS", str(args.threads))
    try:
        return args.fn(args)
    except ShockfrontError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
