"""One-step ADER discontinuous-Galerkin scheme.

Each time step is (i) an element-local space-time predictor, a fixed-point
solve of the weak space-time form of the PDE that needs no neighbour data,
and (ii) a fully discrete corrector combining Rusanov interface fluxes,
path-conservative jump terms for the non-conservative products (linear
segment path in state and bottom jointly) and space-time-quadratured volume
terms.

The predictor phase is embarrassingly parallel over cells; the corrector
reads its own and face-neighbour predictors and writes its own cell, so all
predictors must complete before any corrector write (two-phase contract).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dg import Mesh, NodalBasis, gauss_legendre
from .model import ModelError, PhysParams


class PredictorError(RuntimeError):
    """The space-time fixed point diverged; the step must be rejected."""


class DepthFloorError(RuntimeError):
    """A nodal water depth fell below the positivity floor."""


@dataclass
class SchemeConfig:
    """Scheme knobs: CFL number, predictor stopping rule, path quadrature."""

    cfl: float = 0.45
    predictor_tol: float = 1e-12
    predictor_maxiter: int | None = None  # None -> degree + 3
    path_quad_points: int = 3
    riemann: str = "rusanov"
    depth_floor: float = 1e-10

    def __post_init__(self):
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError("CFL must lie in (0, 1]")
        if self.predictor_tol <= 0.0:
            raise ValueError("predictor tolerance must be positive")
        if self.riemann != "rusanov":
            raise ValueError(f"unknown Riemann solver {self.riemann!r}")

    def maxiter(self, degree: int) -> int:
        return self.predictor_maxiter if self.predictor_maxiter is not None else degree + 3


class SpaceTimeBasis:
    """Temporal extension of a nodal basis for the local predictor.

    The same Gauss-Legendre node set serves as temporal nodes on the
    reference interval tau in [0,1]; K1 collects the time boundary and
    stiffness terms of the space-time weak form after integrating the time
    derivative by parts, so one predictor sweep reads
    q <- K1^{-1} (phi(0) u + dt W L(q)).
    """

    def __init__(self, basis: NodalBasis):
        self.basis = basis
        self.nt = basis.n
        w, D = basis.weights, basis.diff
        self.K1 = np.outer(basis.at1, basis.at1) - (w[:, None] * D).T
        K1inv = np.linalg.inv(self.K1)
        self.M1 = K1inv @ basis.at0       # propagates the time-level data
        self.M2 = K1inv * w[None, :]      # weights the spatial operator


def _dmul(M: np.ndarray, arr: np.ndarray, axis: int) -> np.ndarray:
    """Contract M[i, j] against one axis of arr, keeping the axis in place."""
    return np.moveaxis(np.tensordot(M, arr, axes=(1, axis)), 0, axis)


def rusanov_flux(model, q_minus, q_plus, params: PhysParams, axis: int = 0) -> np.ndarray:
    """Rusanov interface flux 1/2 (F(q+) + F(q-)) - 1/2 s_max (q+ - q-).

    Oriented along +axis (q_minus on the low side); leading axes broadcast.
    """
    Fm = model.flux(q_minus, params, axis)
    Fp = model.flux(q_plus, params, axis)
    smax = model.max_signal_speed(q_minus, q_plus, params, axis)
    return 0.5 * (Fp + Fm) - 0.5 * smax[..., None] * (q_plus - q_minus)


def path_jump(model, q_minus, q_plus, zb_minus, zb_plus, params: PhysParams,
              axis: int = 0, quad_points: int = 3) -> np.ndarray:
    """Path-conservative jump 1/2 (int_0^1 B(psi(s)) ds) (q+ - q-).

    The linear segment path runs through state and bottom jointly, so bottom
    jumps enter through the z_b columns of B. Each side of the interface
    receives this same half contribution.
    """
    s, ws = gauss_legendre(quad_points)
    dq = q_plus - q_minus
    dzb = np.asarray(zb_plus) - np.asarray(zb_minus)
    acc = None
    for sk, wk in zip(s, ws):
        term = model.noncons_axis(q_minus + sk * dq, dq, dzb, params, axis)
        acc = wk * term if acc is None else acc + wk * term
    return 0.5 * acc


def compute_time_step(model, u: np.ndarray, mesh: Mesh, basis: NodalBasis,
                      params: PhysParams, config: SchemeConfig) -> float:
    """CFL time step: cfl * min(dx) / ((2N+1) * max nodal signal speed).

    In 2D the per-node speed is the sum of the two axis signal speeds.
    """
    s = model.signal_speed(u, params, 0)
    if mesh.dim == 2:
        s = s + model.signal_speed(u, params, 1)
    smax = float(np.max(s))
    if not np.isfinite(smax) or smax <= 0.0:
        raise ValueError(f"non-finite or zero signal speed (max {smax})")
    h = min(mesh.dx(ax) for ax in range(mesh.dim))
    return config.cfl * h / ((2 * basis.degree + 1) * smax)


# -- local space-time predictor ---------------------------------------------

def _spatial_operator(model, q, field, mesh, basis, params):
    """S - div F - B . grad q collocated at the space-time nodes."""
    if mesh.dim == 1:
        dx = mesh.dx(0)
        dqdx = _dmul(basis.diff, q, 2) / dx
        dFdx = _dmul(basis.diff, model.flux(q, params, 0), 2) / dx
        P = model.noncons_axis(q, dqdx, field.dzb[:, None, :, 0], params, 0)
        return model.source(q, params) - dFdx - P
    dx, dy = mesh.dx(0), mesh.dx(1)
    dqdx = _dmul(basis.diff, q, 3) / dx
    dqdy = _dmul(basis.diff, q, 4) / dy
    dFdx = _dmul(basis.diff, model.flux(q, params, 0), 3) / dx
    dFdy = _dmul(basis.diff, model.flux(q, params, 1), 4) / dy
    P = model.noncons_axis(q, dqdx, field.dzb[:, :, None, :, :, 0], params, 0)
    P += model.noncons_axis(q, dqdy, field.dzb[:, :, None, :, :, 1], params, 1)
    return model.source(q, params) - dFdx - dFdy - P


def local_predictor(model, u: np.ndarray, field, dt: float, mesh: Mesh,
                    stb: SpaceTimeBasis, params: PhysParams, config: SchemeConfig,
                    residuals: list | None = None) -> np.ndarray:
    """Element-local space-time polynomial solving the weak form in the small.

    Starts from the time-level data replicated across temporal nodes and
    iterates the fixed point until the relative increment drops below the
    configured tolerance or the sweep budget (degree + 3) is exhausted;
    a non-finite or growing increment raises :class:`PredictorError`.

    Returns space-time coefficients with the temporal axis inserted after
    the cell axes: (Nx, nt, n, ncomp) in 1D, (Nx, Ny, nt, n, n, ncomp) in 2D.
    """
    taxis = mesh.dim
    q = np.repeat(np.expand_dims(u, taxis), stb.nt, axis=taxis)
    shape = [1] * q.ndim
    shape[taxis] = stb.nt
    base = np.expand_dims(u, taxis) * stb.M1.reshape(shape)
    scale = float(np.max(np.abs(u))) + 1.0
    for it in range(config.maxiter(stb.basis.degree)):
        try:
            L = _spatial_operator(model, q, field, mesh, stb.basis, params)
        except ModelError as exc:
            if it == 0:
                raise
            raise PredictorError(
                f"space-time predictor diverged at sweep {it + 1}: {exc}") from exc
        qn = base + dt * _dmul(stb.M2, L, taxis)
        qmax = float(np.max(np.abs(qn)))
        if not np.isfinite(qmax) or qmax > 1e6 * scale:
            raise PredictorError(
                f"space-time predictor diverging (magnitude {qmax:.3e} "
                f"at sweep {it + 1})")
        rel = float(np.max(np.abs(qn - q))) / (qmax + 1e-300)
        q = qn
        if residuals is not None:
            residuals.append(rel)
        if rel <= config.predictor_tol:
            break
    return q


# -- corrector ----------------------------------------------------------------

def _face_arrays(trL, trR, zL, zR, periodic: bool, axis: int = 0):
    """Per-interface minus/plus traces along one axis, with boundary ghosts.

    trL/trR are the cell traces at the low/high cell face; periodic wraps,
    otherwise the ghost copies the interior trace (transmissive).
    """
    sl_first = (slice(None),) * axis + (slice(0, 1),)
    sl_last = (slice(None),) * axis + (slice(-1, None),)
    if periodic:
        qm = np.concatenate([trR[sl_last], trR], axis=axis)
        qp = np.concatenate([trL, trL[sl_first]], axis=axis)
        zm = np.concatenate([zR[sl_last], zR], axis=axis)
        zp = np.concatenate([zL, zL[sl_first]], axis=axis)
    else:
        qm = np.concatenate([trL[sl_first], trR], axis=axis)
        qp = np.concatenate([trL, trR[sl_last]], axis=axis)
        zm = np.concatenate([zL[sl_first], zR], axis=axis)
        zp = np.concatenate([zL, zR[sl_last]], axis=axis)
    return qm, qp, zm, zp


def _check_depth_floor(u: np.ndarray, floor: float, t_label: str = ""):
    hmin = float(np.min(u[..., 0]))
    if not np.isfinite(hmin) or hmin < floor:
        idx = np.unravel_index(int(np.argmin(u[..., 0])), u[..., 0].shape)
        raise DepthFloorError(
            f"nodal depth {hmin:.6e} below floor {floor:.1e} at cell/node {idx}{t_label}")


def corrector_update(model, u: np.ndarray, q: np.ndarray, field, dt: float,
                     mesh: Mesh, stb: SpaceTimeBasis, params: PhysParams,
                     config: SchemeConfig) -> np.ndarray:
    """Fully discrete one-step update from the space-time predictor."""
    if mesh.dim == 1:
        unew = _corrector_1d(model, u, q, field, dt, mesh, stb, params, config)
    else:
        unew = _corrector_2d(model, u, q, field, dt, mesh, stb, params, config)
    _check_depth_floor(unew, config.depth_floor)
    return unew


def _corrector_1d(model, u, q, field, dt, mesh, stb, params, config):
    basis = stb.basis
    D, w, wt = basis.diff, basis.weights, basis.weights
    at0, at1 = basis.at0, basis.at1
    dx = mesh.dx(0)

    F = model.flux(q, params, 0)
    dqdx = _dmul(D, q, 2) / dx
    P = model.noncons_axis(q, dqdx, field.dzb[:, None, :, 0], params, 0)
    S = model.source(q, params)
    VF = np.einsum("a,b,bk,cabj->ckj", wt, w, D, F, optimize=True)
    VPS = np.einsum("a,cakj->ckj", wt, P - S)

    qL = np.einsum("b,cabk->cak", at0, q)
    qR = np.einsum("b,cabk->cak", at1, q)
    zL = field.zb @ at0
    zR = field.zb @ at1
    qm, qp, zm, zp = _face_arrays(qL, qR, zL, zR, mesh.periodic[0], 0)

    G = rusanov_flux(model, qm, qp, params, 0)
    Dj = path_jump(model, qm, qp, zm[:, None], zp[:, None], params, 0,
                   config.path_quad_points)
    Gbar = np.einsum("a,fak->fk", wt, G)
    Dbar = np.einsum("a,fak->fk", wt, Dj)

    face = (at1[None, :, None] * (Gbar[1:] + Dbar[1:])[:, None, :]
            - at0[None, :, None] * (Gbar[:-1] - Dbar[:-1])[:, None, :])
    return u + dt * ((VF - face) / (dx * w[None, :, None]) - VPS)


def _corrector_2d(model, u, q, field, dt, mesh, stb, params, config):
    basis = stb.basis
    D, w, wt = basis.diff, basis.weights, basis.weights
    at0, at1 = basis.at0, basis.at1
    dx, dy = mesh.dx(0), mesh.dx(1)

    F1 = model.flux(q, params, 0)
    F2 = model.flux(q, params, 1)
    dqdx = _dmul(D, q, 3) / dx
    dqdy = _dmul(D, q, 4) / dy
    P = model.noncons_axis(q, dqdx, field.dzb[:, :, None, :, :, 0], params, 0)
    P += model.noncons_axis(q, dqdy, field.dzb[:, :, None, :, :, 1], params, 1)
    S = model.source(q, params)
    VFx = np.einsum("a,b,bm,xyabej->xymej", wt, w, D, F1, optimize=True)
    VFy = np.einsum("a,e,em,xyabej->xybmj", wt, w, D, F2, optimize=True)
    VPS = np.einsum("a,xyabej->xybej", wt, P - S)

    # x faces: tangential index e, trace over b
    qLx = np.einsum("b,xyabek->xyaek", at0, q)
    qRx = np.einsum("b,xyabek->xyaek", at1, q)
    zLx = np.einsum("b,xybe->xye", at0, field.zb)
    zRx = np.einsum("b,xybe->xye", at1, field.zb)
    qm, qp, zm, zp = _face_arrays(qLx, qRx, zLx, zRx, mesh.periodic[0], 0)
    Gx = rusanov_flux(model, qm, qp, params, 0)
    Dx = path_jump(model, qm, qp, zm[..., None, :], zp[..., None, :], params, 0,
                   config.path_quad_points)
    Gbx = np.einsum("a,fyaek->fyek", wt, Gx)
    Dbx = np.einsum("a,fyaek->fyek", wt, Dx)

    # y faces: tangential index b, trace over e
    qLy = np.einsum("e,xyabek->xyabk", at0, q)
    qRy = np.einsum("e,xyabek->xyabk", at1, q)
    zLy = np.einsum("e,xybe->xyb", at0, field.zb)
    zRy = np.einsum("e,xybe->xyb", at1, field.zb)
    qm, qp, zm, zp = _face_arrays(qLy, qRy, zLy, zRy, mesh.periodic[1], 1)
    Gy = rusanov_flux(model, qm, qp, params, 1)
    Dy = path_jump(model, qm, qp, zm[..., None, :], zp[..., None, :], params, 1,
                   config.path_quad_points)
    Gby = np.einsum("a,xfabk->xfbk", wt, Gy)
    Dby = np.einsum("a,xfabk->xfbk", wt, Dy)

    facex = (at1[:, None, None] * (Gbx[1:] + Dbx[1:])[:, :, None]
             - at0[:, None, None] * (Gbx[:-1] - Dbx[:-1])[:, :, None])
    facey = (at1[:, None] * (Gby[:, 1:] + Dby[:, 1:])[:, :, :, None]
             - at0[:, None] * (Gby[:, :-1] - Dby[:, :-1])[:, :, :, None])
    unew = u + dt * ((VFx - facex) / (dx * w[None, None, :, None, None])
                     + (VFy - facey) / (dy * w[None, None, None, :, None])
                     - VPS)
    return unew


class AderSolver:
    """Binds model, mesh, basis, bathymetry and config into a stepper."""

    def __init__(self, model, mesh: Mesh, basis: NodalBasis, field,
                 params: PhysParams, config: SchemeConfig | None = None):
        self.model = model
        self.mesh = mesh
        self.basis = basis
        self.field = field
        self.params = params
        self.config = config if config is not None else SchemeConfig()
        self.stb = SpaceTimeBasis(basis)

    def compute_dt(self, u: np.ndarray) -> float:
        return compute_time_step(self.model, u, self.mesh, self.basis,
                                 self.params, self.config)

    def predict(self, u: np.ndarray, dt: float, residuals: list | None = None):
        return local_predictor(self.model, u, self.field, dt, self.mesh,
                               self.stb, self.params, self.config, residuals)

    def step(self, u: np.ndarray, dt: float) -> np.ndarray:
        q = self.predict(u, dt)
        return corrector_update(self.model, u, q, self.field, dt, self.mesh,
                                self.stb, self.params, self.config)
