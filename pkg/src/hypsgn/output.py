"""CSV emission for gauges, energy ledgers, snapshots and study tables.

All numeric fields are written in scientific notation with 17 significant
digits so doubles round-trip exactly; no locale-dependent formatting.
"""

from __future__ import annotations

import csv

import numpy as np

from .dg import ElementSolution, sample_equispaced


def fmt(x) -> str:
    return format(float(x), ".16e")


def write_gauges(path, gauges, time_shift: float = 0.0) -> None:
    """Gauge CSV: t plus per-gauge eta and A/H columns.

    time_shift is added to the emitted times (gauge alignment against
    external data is a fitted shift, exposed as a parameter).
    """
    header = ["t"]
    for g in gauges:
        header += [f"eta@{g.x:g}", f"AoverH@{g.x:g}"]
    with open(path, "w", newline="") as f:
        wr = csv.writer(f)
        wr.writerow(header)
        if not gauges:
            return
        nt = len(gauges[0].times)
        for i in range(nt):
            row = [fmt(gauges[0].times[i] + time_shift)]
            for g in gauges:
                row += [fmt(g.eta[i]), fmt(g.ratio[i])]
            wr.writerow(row)


def write_energy(path, times, energy, mass) -> None:
    """Energy/mass ledger CSV: (t, E_total, mass) per accepted step."""
    with open(path, "w", newline="") as f:
        wr = csv.writer(f)
        wr.writerow(["t", "E_total", "mass"])
        e = energy if energy is not None else [float("nan")] * len(times)
        for t, ei, mi in zip(times, e, mass):
            wr.writerow([fmt(t), fmt(ei), fmt(mi)])


def _snapshot_columns(model):
    if model.dim == 2:
        return ["h", "u", "v", "w", "sigma", "p", "pb"]
    if model.ncomp == 6:
        return ["h", "u", "w", "sigma", "p", "pb"]
    return ["h", "u", "w", "p"]


def write_snapshot(path, solution: ElementSolution, field, model,
                   points_per_cell: int = 5) -> None:
    """Snapshot CSV sampled at equispaced plot points per cell.

    Columns: x[, y], primitive state, zb, eta (eta = h + zb).
    """
    names = _snapshot_columns(model)
    zb_sol = ElementSolution(solution.mesh, solution.basis, field.zb[..., None])
    if solution.mesh.dim == 1:
        x, vals = sample_equispaced(solution, points_per_cell)
        _, zb = sample_equispaced(zb_sol, points_per_cell)
        zb = zb[:, 0]
        prim = vals.copy()
        prim[:, 1:] = vals[:, 1:] / vals[:, 0:1]
        with open(path, "w", newline="") as f:
            wr = csv.writer(f)
            wr.writerow(["x"] + names + ["zb", "eta"])
            for i in range(x.size):
                row = [x[i], *prim[i], zb[i], vals[i, 0] + zb[i]]
                wr.writerow([fmt(v) for v in row])
        return
    (x, y), vals = sample_equispaced(solution, points_per_cell)
    _, zb = sample_equispaced(zb_sol, points_per_cell)
    zb = zb[..., 0]
    prim = vals.copy()
    prim[..., 1:] = vals[..., 1:] / vals[..., 0:1]
    with open(path, "w", newline="") as f:
        wr = csv.writer(f)
        wr.writerow(["x", "y"] + names + ["zb", "eta"])
        for i in range(x.size):
            for j in range(y.size):
                row = [x[i], y[j], *prim[i, j], zb[i, j], vals[i, j, 0] + zb[i, j]]
                wr.writerow([fmt(v) for v in row])


def write_convergence(path, table) -> None:
    """Mesh-refinement error table CSV (errors and observed orders)."""
    with open(path, "w", newline="") as f:
        wr = csv.writer(f)
        wr.writerow(["N", "Nx", "L2_err_h", "L2_err_u", "L2_err_p",
                     "L2_ord_h", "L2_ord_u", "L2_ord_p"])
        for row in table.rows():
            wr.writerow([row["N"], row["Nx"], fmt(row["err_h"]), fmt(row["err_u"]),
                         fmt(row["err_p"]), fmt(row["ord_h"]), fmt(row["ord_u"]),
                         fmt(row["ord_p"])])


def write_comparison(path, cmp) -> None:
    with open(path, "w", newline="") as f:
        wr = csv.writer(f)
        wr.writerow(["window_lo", "window_hi", "TV_full", "TV_mild", "ratio",
                     "degenerate"])
        wr.writerow([fmt(cmp.window[0]), fmt(cmp.window[1]), fmt(cmp.tv_full),
                     fmt(cmp.tv_mild), fmt(cmp.ratio),
                     fmt(1.0 if cmp.degenerate else 0.0)])


def read_strict_csv(path) -> tuple[list[str], np.ndarray]:
    """Parse a CSV produced by this module, rejecting non-float payloads."""
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    header = rows[0]
    data = np.array([[float(v) for v in row] for row in rows[1:]], dtype=float)
    return header, data
