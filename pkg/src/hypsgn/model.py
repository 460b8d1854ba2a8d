"""Hyperbolic Serre-Green-Naghdi models in first-order form.

Two variants of the dispersive shallow-water system written as

    dU/dt + div F(U) + B(U) . grad U = S(U),

with an artificial sound speed c relaxing the non-hydrostatic pressure
constraints:

* ``HyperbolicSGN`` -- the full system valid for arbitrary bottom slopes.
  Conserved state (h, hu, hw, hsigma, hp, hpb) in 1D, plus hv in 2D.
* ``MildBottomSGN`` -- the four-equation variant that neglects higher-order
  bottom derivatives; state (h, hu, hw, hp), 1D only.

All operations are pure, fully vectorized over leading array axes with the
component axis last, and are safe for concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ModelError(ValueError):
    """Invalid state handed to a model operation (e.g. non-positive depth)."""


@dataclass(frozen=True)
class PhysParams:
    """Physical/relaxation parameters: gravity g and artificial sound speed c."""

    g: float = 9.81
    c: float = 20.0

    def __post_init__(self):
        if not (self.g > 0 and self.c > 0 and np.isfinite(self.c)):
            raise ValueError("need g > 0 and finite c > 0")


@dataclass
class StateGradient:
    """Spatial derivatives of the conserved state and of the bottom profile.

    du has shape (..., dim, ncomp); dzb has shape (..., dim).
    """

    du: np.ndarray
    dzb: np.ndarray


def _depth(U: np.ndarray) -> np.ndarray:
    h = U[..., 0]
    if np.any(h <= 0.0) or not np.all(np.isfinite(h)):
        raise ModelError(f"non-positive or non-finite depth (min h = {np.min(h):.3e})")
    return h


class HyperbolicSGN:
    """Full hyperbolic SGN model for general bottom topographies."""

    def __init__(self, dim: int = 1):
        if dim not in (1, 2):
            raise ValueError("dim must be 1 or 2")
        self.dim = dim
        self.ncomp = 6 if dim == 1 else 7
        self.iu = (1,) if dim == 1 else (1, 2)   # momentum component per axis
        off = 0 if dim == 1 else 1
        self.iw = 2 + off
        self.isg = 3 + off
        self.ip = 4 + off
        self.ipb = 5 + off

    # -- state conversions -------------------------------------------------

    def primitive(self, U: np.ndarray) -> np.ndarray:
        """(h, u[, v], w, sigma, p, pb): conserved components divided by h."""
        h = _depth(U)
        P = U / h[..., None]
        P[..., 0] = h
        return P

    def conserved(self, P: np.ndarray) -> np.ndarray:
        h = _depth(P)
        U = P * h[..., None]
        U[..., 0] = h
        return U

    # -- PDE building blocks -----------------------------------------------

    def flux(self, U: np.ndarray, params: PhysParams, axis: int = 0) -> np.ndarray:
        """Conservative flux along the given axis.

        1D: (hu, hu^2 + hp, huw, hu sigma, hu(p + c^2), hu pb); the 2D tensor
        advects every quantity with the axis velocity and carries hp and the
        c^2 relaxation term in the matching momentum/pressure slots.
        """
        h = _depth(U)
        q = U[..., self.iu[axis]]
        u = q / h
        F = U * u[..., None]
        F[..., 0] = q
        F[..., self.iu[axis]] += U[..., self.ip]  # hp pressure flux
        F[..., self.ip] += params.c**2 * q
        return F

    def noncons_axis(self, U, dU, dzb, params: PhysParams, axis: int = 0) -> np.ndarray:
        """Non-conservative product B_axis(U) applied to (dU, dzb).

        dU holds the state derivative along `axis` (component axis last),
        dzb the bottom derivative along the same axis.
        """
        h = _depth(U)
        u = U[..., self.iu[axis]] / h
        pb = U[..., self.ipb] / h
        c2 = params.c**2
        out = np.zeros(np.broadcast_shapes(U.shape, dU.shape), dtype=float)
        dh = dU[..., 0]
        out[..., self.iu[axis]] = params.g * h * dh + (params.g * h + pb) * dzb
        out[..., self.ip] = -c2 * u * dh
        out[..., self.ipb] = -6.0 * c2 * u * dzb
        return out

    def noncons_product(self, U, grad: StateGradient, params: PhysParams) -> np.ndarray:
        """B(U) . grad U summed over spatial directions."""
        out = self.noncons_axis(U, grad.du[..., 0, :], grad.dzb[..., 0], params, 0)
        for ax in range(1, self.dim):
            out += self.noncons_axis(U, grad.du[..., ax, :], grad.dzb[..., ax], params, ax)
        return out

    def source(self, U: np.ndarray, params: PhysParams) -> np.ndarray:
        """Algebraic relaxation source (0, 0[, 0], pb, -6pb+12p, -c^2 sigma, -6c^2(w - sigma/2))."""
        h = _depth(U)
        w = U[..., self.iw] / h
        sg = U[..., self.isg] / h
        p = U[..., self.ip] / h
        pb = U[..., self.ipb] / h
        c2 = params.c**2
        S = np.zeros_like(U)
        S[..., self.iw] = pb
        S[..., self.isg] = -6.0 * pb + 12.0 * p
        S[..., self.ip] = -c2 * sg
        S[..., self.ipb] = -6.0 * c2 * (w - 0.5 * sg)
        return S

    # -- wave structure ------------------------------------------------------

    def _celerity(self, U, params: PhysParams) -> np.ndarray:
        h = _depth(U)
        rad = U[..., self.ip] / h + params.g * h + params.c**2
        if np.any(rad <= 0.0):
            bad = np.argmin(rad)
            raise ModelError(
                "model breakdown: p + g h + c^2 <= 0 "
                f"(min {np.min(rad):.6e} at flat index {bad})")
        return np.sqrt(rad)

    def eigenvalues(self, U, params: PhysParams, normal=None) -> np.ndarray:
        """Eigenvalues of A(U).n: u.n with multiplicity ncomp-2 and u.n +- a.

        Returned in ascending fixed order (u-a, u, ..., u, u+a).
        """
        h = _depth(U)
        if normal is None:
            un = U[..., self.iu[0]] / h
        else:
            normal = np.asarray(normal, dtype=float)
            un = sum(normal[ax] * U[..., self.iu[ax]] for ax in range(self.dim)) / h
        a = self._celerity(U, params)
        lam = np.repeat(un[..., None], self.ncomp, axis=-1)
        lam[..., 0] = un - a
        lam[..., -1] = un + a
        return lam

    def eigenvectors(self, U, params: PhysParams) -> np.ndarray:
        """Right eigenvectors of the 1D quasilinear matrix, as rows r_1..r_6.

        Ordering matches eigenvalues (u, u, u, u, u+a, u-a):
        r1=(0,0,0,1,0,0), r2=(0,0,0,0,0,1), r3=(0,0,1,0,0,0),
        r4=(1,u,0,0,-gh,0), r5/r6=(1, u+-a, w, sigma, p+c^2, pb).
        """
        if self.dim != 1:
            raise NotImplementedError("eigenvectors are provided in 1D only")
        h = _depth(U)
        u = U[..., 1] / h
        w = U[..., 2] / h
        sg = U[..., 3] / h
        p = U[..., 4] / h
        pb = U[..., 5] / h
        a = self._celerity(U, params)
        R = np.zeros(U.shape[:-1] + (6, 6), dtype=float)
        R[..., 0, 3] = 1.0
        R[..., 1, 5] = 1.0
        R[..., 2, 2] = 1.0
        R[..., 3, 0] = 1.0
        R[..., 3, 1] = u
        R[..., 3, 4] = -params.g * h
        for i, sign in ((4, 1.0), (5, -1.0)):
            R[..., i, 0] = 1.0
            R[..., i, 1] = u + sign * a
            R[..., i, 2] = w
            R[..., i, 3] = sg
            R[..., i, 4] = p + params.c**2
            R[..., i, 5] = pb
        return R

    def eigenvector_values(self, U, params: PhysParams) -> np.ndarray:
        """Eigenvalues in the same order as the rows of eigenvectors()."""
        h = _depth(U)
        u = U[..., 1] / h
        a = self._celerity(U, params)
        lam = np.repeat(u[..., None], 6, axis=-1)
        lam[..., 4] = u + a
        lam[..., 5] = u - a
        return lam

    def quasilinear_matrix(self, U, params: PhysParams) -> np.ndarray:
        """1D quasilinear matrix A(U) = dF/dU + B(U), analytic."""
        if self.dim != 1:
            raise NotImplementedError("quasilinear matrix is provided in 1D only")
        h = _depth(U)
        u = U[..., 1] / h
        w = U[..., 2] / h
        sg = U[..., 3] / h
        p = U[..., 4] / h
        pb = U[..., 5] / h
        g, c2 = params.g, params.c**2
        A = np.zeros(U.shape[:-1] + (6, 6), dtype=float)
        A[..., 0, 1] = 1.0
        A[..., 1, 0] = -u * u + g * h
        A[..., 1, 1] = 2.0 * u
        A[..., 1, 4] = 1.0
        A[..., 2, 0] = -u * w
        A[..., 2, 1] = w
        A[..., 2, 2] = u
        A[..., 3, 0] = -u * sg
        A[..., 3, 1] = sg
        A[..., 3, 3] = u
        A[..., 4, 0] = -u * p - c2 * u
        A[..., 4, 1] = p + c2
        A[..., 4, 4] = u
        A[..., 5, 0] = -u * pb
        A[..., 5, 1] = pb
        A[..., 5, 5] = u
        return A

    def signal_speed(self, U, params: PhysParams, axis: int = 0) -> np.ndarray:
        """|u_axis| + sqrt(p + g h + c^2), the fastest signal along an axis."""
        h = _depth(U)
        return np.abs(U[..., self.iu[axis]] / h) + self._celerity(U, params)

    def max_signal_speed(self, UL, UR, params: PhysParams, axis: int = 0) -> np.ndarray:
        return np.maximum(self.signal_speed(UL, params, axis),
                          self.signal_speed(UR, params, axis))

    # -- energy and constraints ----------------------------------------------

    def energy_density(self, U, zb, params: PhysParams) -> np.ndarray:
        """E = h/2 [u^2(+v^2) + w^2 + g(h+2 zb) + sigma^2/12 + p^2/c^2 + pb^2/(6c^2)]."""
        h = _depth(U)
        c2 = params.c**2
        kin = sum((U[..., i] / h) ** 2 for i in self.iu) + (U[..., self.iw] / h) ** 2
        sg = U[..., self.isg] / h
        p = U[..., self.ip] / h
        pb = U[..., self.ipb] / h
        return 0.5 * h * (kin + params.g * (h + 2.0 * zb)
                          + sg**2 / 12.0 + p**2 / c2 + pb**2 / (6.0 * c2))

    def energy_flux(self, U, zb, params: PhysParams, axis: int = 0) -> np.ndarray:
        """u_axis (E + g h^2/2 + h p): every term advected by the axis velocity."""
        h = _depth(U)
        u = U[..., self.iu[axis]] / h
        E = self.energy_density(U, zb, params)
        return u * (E + 0.5 * params.g * h**2 + U[..., self.ip])

    def constraint_residuals(self, U, grad: StateGradient) -> tuple[np.ndarray, np.ndarray]:
        """Residuals (sigma + h du/dx, w - sigma/2 - u dzb/dx); both -> 0 as c -> inf."""
        if self.dim != 1:
            raise NotImplementedError("constraint residuals are defined in 1D")
        h = _depth(U)
        u = U[..., 1] / h
        du = (grad.du[..., 0, 1] - u * grad.du[..., 0, 0]) / h
        sg = U[..., 3] / h
        w = U[..., 2] / h
        r_sigma = sg + h * du
        r_w = w - 0.5 * sg - u * grad.dzb[..., 0]
        return r_sigma, r_w


class MildBottomSGN:
    """Hyperbolic SGN variant under the mild-bottom assumption (1D).

    State (h, hu, hw, hp). The pressure equation is kept in the same
    flux/non-conservative split as the full model: flux hu(p + c^2),
    non-conservative -c^2 u dh/dx - 2 c^2 u dzb/dx, source -2 c^2 w.
    """

    dim = 1
    ncomp = 4
    iu = (1,)
    iw = 2
    ip = 3

    def primitive(self, U: np.ndarray) -> np.ndarray:
        h = _depth(U)
        P = U / h[..., None]
        P[..., 0] = h
        return P

    def conserved(self, P: np.ndarray) -> np.ndarray:
        h = _depth(P)
        U = P * h[..., None]
        U[..., 0] = h
        return U

    def flux(self, U, params: PhysParams, axis: int = 0) -> np.ndarray:
        h = _depth(U)
        q = U[..., 1]
        u = q / h
        F = U * u[..., None]
        F[..., 0] = q
        F[..., 1] += U[..., 3]
        F[..., 3] += params.c**2 * q
        return F

    def noncons_axis(self, U, dU, dzb, params: PhysParams, axis: int = 0) -> np.ndarray:
        h = _depth(U)
        u = U[..., 1] / h
        p = U[..., 3] / h
        c2 = params.c**2
        out = np.zeros(np.broadcast_shapes(U.shape, dU.shape), dtype=float)
        dh = dU[..., 0]
        out[..., 1] = params.g * h * dh + (params.g * h + 1.5 * p) * dzb
        out[..., 3] = -c2 * u * dh - 2.0 * c2 * u * dzb
        return out

    def noncons_product(self, U, grad: StateGradient, params: PhysParams) -> np.ndarray:
        return self.noncons_axis(U, grad.du[..., 0, :], grad.dzb[..., 0], params, 0)

    def source(self, U, params: PhysParams) -> np.ndarray:
        h = _depth(U)
        S = np.zeros_like(U)
        S[..., 2] = 1.5 * U[..., 3] / h
        S[..., 3] = -2.0 * params.c**2 * U[..., 2] / h
        return S

    def signal_speed(self, U, params: PhysParams, axis: int = 0) -> np.ndarray:
        # same bound as the full model; the exact eigenstructure of this
        # variant is not derived here
        h = _depth(U)
        rad = U[..., 3] / h + params.g * h + params.c**2
        if np.any(rad <= 0.0):
            raise ModelError("model breakdown: p + g h + c^2 <= 0")
        return np.abs(U[..., 1] / h) + np.sqrt(rad)

    def max_signal_speed(self, UL, UR, params: PhysParams, axis: int = 0) -> np.ndarray:
        return np.maximum(self.signal_speed(UL, params, axis),
                          self.signal_speed(UR, params, axis))


def make_model(variant: str, dim: int = 1):
    """Model factory: variant 'full' or 'mild' (mild is 1D only)."""
    if variant == "full":
        return HyperbolicSGN(dim)
    if variant == "mild":
        if dim != 1:
            raise ValueError("the mild-bottom variant is implemented in 1D only")
        return MildBottomSGN()
    raise ValueError(f"unknown model variant {variant!r} (use 'full' or 'mild')")
