"""Artifact emission and re-ingestion: CSV series, curve records, reports.

Reals are written with %.17g (full round-trip precision) and JSON reports
with sorted keys, so `verify` can reproduce a report bit-for-bit from the
saved files alone.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def write_csv(path, columns: dict) -> None:
    """Write named columns (equal length) as a headered CSV."""
    path = Path(path)
    names = list(columns)
    arrays = [np.asarray(columns[n]).ravel() for n in names]
    n = arrays[0].size
    with open(path, "w") as fh:
        fh.write(",".join(names) + "\n")
        for i in range(n):
            fh.write(",".join(fmt(a[i]) for a in arrays) + "\n")


def read_csv(path) -> dict:
    path = Path(path)
    with open(path) as fh:
        names = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    cols = {n: np.array([float(r[i]) for r in rows]) for i, n in enumerate(names)}
    return cols


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if np.isnan(v):
            return None
        if np.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True)
                          + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())


def write_series(path, series: dict) -> None:
    order = ["t", "mu_star", "max_abs_d1psi", "max_abs_LPsi", "max_abs_d2psi",
             "argmin_x1", "argmin_x2"]
    extras = [k for k in series if k not in order]
    write_csv(path, {k: series[k] for k in order + extras if k in series})


def write_snapshot(path, grid, snap: dict) -> None:
    X1, X2 = grid.mesh()
    write_csv(path, dict(x1=X1.ravel(), x2=X2.ravel(),
                         psi=snap["psi"].ravel(), pi=snap["pi"].ravel(),
                         u=snap["u"].ravel(), mu=snap["mu"].ravel()))


def write_chars(path, curves) -> None:
    """Flatten curve records: one row per (sample time, curve)."""
    rows = {k: [] for k in ("curve_id", "t", "x1", "x2", "mu_char", "upsilon",
                            "mu_field", "u_field", "psi", "trchi", "w",
                            "LPsi", "alive")}
    n_u = curves.u0.size
    n_th = curves.th0.size
    ids = np.arange(n_u * n_th).reshape(n_u, n_th)
    for t, s in zip(curves.t_samples, curves.samples):
        rows["curve_id"].append(ids.ravel())
        rows["t"].append(np.full(n_u * n_th, t))
        rows["x1"].append(s["x"][..., 0].ravel())
        rows["x2"].append(s["x"][..., 1].ravel())
        rows["mu_char"].append(s["mu_char"].ravel())
        rows["upsilon"].append(s["upsilon"].ravel())
        rows["mu_field"].append(s["mu_field"].ravel())
        rows["u_field"].append(s["u_field"].ravel())
        rows["psi"].append(s["psi"].ravel())
        rows["trchi"].append(s["trchi"].ravel())
        rows["w"].append(s["w"].ravel())
        rows["LPsi"].append(s["LPsi"].ravel())
        rows["alive"].append(s["alive"].ravel().astype(float))
    write_csv(path, {k: np.concatenate(v) for k, v in rows.items()})


def read_chars(path, n_u: int, n_th: int):
    """Rebuild a CurveSet-shaped record list from chars.csv."""
    from .solver2d import CurveSet

    cols = read_csv(path)
    ts = np.unique(cols["t"])
    per = n_u * n_th
    order = np.lexsort((cols["curve_id"], cols["t"]))
    for k in cols:
        cols[k] = cols[k][order]
    samples = []
    for i, t in enumerate(ts):
        sl = slice(i * per, (i + 1) * per)
        shape = (n_u, n_th)
        samples.append(dict(
            x=np.stack([cols["x1"][sl].reshape(shape),
                        cols["x2"][sl].reshape(shape)], axis=-1),
            mu_char=cols["mu_char"][sl].reshape(shape),
            upsilon=cols["upsilon"][sl].reshape(shape),
            mu_field=cols["mu_field"][sl].reshape(shape),
            u_field=cols["u_field"][sl].reshape(shape),
            psi=cols["psi"][sl].reshape(shape),
            trchi=cols["trchi"][sl].reshape(shape),
            w=cols["w"][sl].reshape(shape),
            LPsi=cols["LPsi"][sl].reshape(shape),
            alive=cols["alive"][sl].reshape(shape) > 0.5,
        ))
    curves = CurveSet(u0=np.zeros(n_u), th0=np.zeros(n_th),
                      x=samples[-1]["x"], ln_mu=np.log(samples[-1]["mu_char"]),
                      lnups=np.log(samples[-1]["upsilon"]),
                      alive=samples[-1]["alive"])
    curves.t_samples = [float(t) for t in ts]
    curves.samples = samples
    return curves
