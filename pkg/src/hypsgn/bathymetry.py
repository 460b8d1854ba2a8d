"""Bottom-topography profiles and their projection onto the DG nodal space.

Profiles are analytic (or tabulated) callables z_b(x[, y]); the scheme never
uses them directly but through a :class:`BathymetryField`, the per-cell
polynomial interpolant whose derivative supplies the dzb entries of the
non-conservative terms. Interpolation goes through the per-cell
Gauss-Lobatto points so the discrete bottom is continuous across element
interfaces, which the well-balanced property of the scheme relies on.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import erf

from .dg import ElementSolution, Mesh, NodalBasis


class Flat:
    """Constant bottom z_b = z0."""

    def __init__(self, z0: float = 0.0):
        self.z0 = z0

    def __call__(self, x, y=None):
        return np.full_like(np.asarray(x, dtype=float), self.z0)

    def derivative(self, x, y=None, axis: int = 0):
        return np.zeros_like(np.asarray(x, dtype=float))


class SmoothedStep:
    """Error-function step: z_b = (height/2) (erf(steepness (x-center)) + 1)."""

    def __init__(self, height: float = 0.1, center: float = 0.0, steepness: float = 8.0):
        self.height = height
        self.center = center
        self.steepness = steepness

    def __call__(self, x, y=None):
        return 0.5 * self.height * (erf(self.steepness * (np.asarray(x, dtype=float)
                                                          - self.center)) + 1.0)

    def derivative(self, x, y=None, axis: int = 0):
        if axis != 0:
            return np.zeros_like(np.asarray(x, dtype=float))
        s = self.steepness * (np.asarray(x, dtype=float) - self.center)
        return self.height * self.steepness / np.sqrt(np.pi) * np.exp(-s * s)


class TrapezoidalBar:
    """Piecewise-linear submerged bar: rise over [x_a,x_b], flat crest over
    [x_b,x_c], fall over [x_c,x_d]. Corners are left non-smooth; meshes
    should align them with element interfaces."""

    def __init__(self, x_a=6.0, x_b=12.0, x_c=14.0, x_d=17.0, crest_height=0.3):
        if not (x_a < x_b <= x_c < x_d):
            raise ValueError("bar abscissae must satisfy x_a < x_b <= x_c < x_d")
        self.x_a, self.x_b, self.x_c, self.x_d = x_a, x_b, x_c, x_d
        self.crest_height = crest_height

    def __call__(self, x, y=None):
        x = np.asarray(x, dtype=float)
        up = (x - self.x_a) / (self.x_b - self.x_a)
        down = (self.x_d - x) / (self.x_d - self.x_c)
        return self.crest_height * np.clip(np.minimum(up, down), 0.0, 1.0)

    def derivative(self, x, y=None, axis: int = 0):
        x = np.asarray(x, dtype=float)
        d = np.zeros_like(x)
        d[(x > self.x_a) & (x < self.x_b)] = self.crest_height / (self.x_b - self.x_a)
        d[(x > self.x_c) & (x < self.x_d)] = -self.crest_height / (self.x_d - self.x_c)
        return d


class GaussianBump:
    """Gaussian obstacle A_g exp(-r^2 / (2 sigma_g^2)); radial in 2D."""

    def __init__(self, amplitude: float = 0.1, sigma: float = 1.0, center=(0.0, 0.0)):
        self.amplitude = amplitude
        self.sigma = sigma
        self.center = (center, 0.0) if np.isscalar(center) else tuple(center)

    def _r2(self, x, y):
        r2 = (np.asarray(x, dtype=float) - self.center[0]) ** 2
        if y is not None:
            r2 = r2 + (np.asarray(y, dtype=float) - self.center[1]) ** 2
        return r2

    def __call__(self, x, y=None):
        return self.amplitude * np.exp(-self._r2(x, y) / (2.0 * self.sigma**2))

    def derivative(self, x, y=None, axis: int = 0):
        co = np.asarray(x if axis == 0 else y, dtype=float) - self.center[axis]
        return self(x, y) * (-co / self.sigma**2)


class Tabulated:
    """Bottom profile from samples, monotone piecewise-cubic interpolated.

    Queries outside the sampled range raise (no extrapolation).
    """

    def __init__(self, x: np.ndarray, z: np.ndarray):
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        if x.ndim != 1 or x.size < 2 or np.any(np.diff(x) <= 0):
            raise ValueError("tabulated profile needs strictly increasing abscissae")
        self.x, self.z = x, z
        self._interp = PchipInterpolator(x, z)
        self._deriv = self._interp.derivative()

    @classmethod
    def from_csv(cls, path) -> "Tabulated":
        """Two-column CSV (x, z_b); a non-numeric first row is treated as header."""
        xs, zs = [], []
        with open(path, newline="") as f:
            for row in csv.reader(f):
                if not row:
                    continue
                try:
                    xs.append(float(row[0]))
                    zs.append(float(row[1]))
                except ValueError:
                    if xs:
                        raise
        return cls(np.array(xs), np.array(zs))

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < self.x[0]) or np.any(x > self.x[-1]):
            raise ValueError(
                f"query outside tabulated range [{self.x[0]}, {self.x[-1]}]")
        return x

    def __call__(self, x, y=None):
        return self._interp(self._check(x))

    def derivative(self, x, y=None, axis: int = 0):
        return self._deriv(self._check(x))


@dataclass
class BathymetryField:
    """Discrete bottom: nodal z_b and its per-cell polynomial derivative.

    zb matches the solution layout without the component axis; dzb stacks the
    per-axis derivatives along a new trailing axis, so dzb[..., ax] is the
    derivative of the interpolant along axis ax. Read-only after construction.
    """

    mesh: Mesh
    basis: NodalBasis
    profile: object
    zb: np.ndarray
    dzb: np.ndarray

    def eval_at(self, x: float, y: float | None = None) -> float:
        sol = ElementSolution(self.mesh, self.basis, self.zb[..., None])
        return float(sol.eval_at(x, y)[0])


def eval_zb(profile, x, y=None):
    """Exact analytic bottom height of a profile."""
    return profile(x, y)


def project_to_field(profile, mesh: Mesh, basis: NodalBasis) -> BathymetryField:
    """Interpolate a profile onto the DG nodal space, cell by cell.

    Sampling happens at the per-cell Gauss-Lobatto points (shared interface
    values), then the interpolant is re-expressed on the Gauss-Legendre
    nodes; dzb is the derivative matrix applied to the nodal values.
    """
    T = basis.lobatto_to_nodes
    if mesh.dim == 1:
        lo = mesh.bounds[0][0]
        dx = mesh.dx(0)
        xl = lo + (np.arange(mesh.ncells[0])[:, None] + basis.lobatto[None, :]) * dx
        zb = np.einsum("bl,cl->cb", T, np.asarray(profile(xl), dtype=float))
        dzb = (np.einsum("bB,cB->cb", basis.diff, zb) / dx)[..., None]
        return BathymetryField(mesh, basis, profile, zb, dzb)
    dx, dy = mesh.dx(0), mesh.dx(1)
    xl = mesh.bounds[0][0] + (np.arange(mesh.ncells[0])[:, None] + basis.lobatto[None, :]) * dx
    yl = mesh.bounds[1][0] + (np.arange(mesh.ncells[1])[:, None] + basis.lobatto[None, :]) * dy
    vals = np.asarray(profile(xl[:, None, :, None], yl[None, :, None, :]), dtype=float)
    zb = np.einsum("bl,em,cdlm->cdbe", T, T, vals)
    dzbx = np.einsum("bB,cdBe->cdbe", basis.diff, zb) / dx
    dzby = np.einsum("eE,cdbE->cdbe", basis.diff, zb) / dy
    return BathymetryField(mesh, basis, profile, zb, np.stack([dzbx, dzby], axis=-1))
