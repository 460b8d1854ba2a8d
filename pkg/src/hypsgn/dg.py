"""Nodal discontinuous-Galerkin function-space layer.

Cartesian meshes, tensor-product Gauss-Legendre nodal bases on the unit
reference element [0,1], quadrature, collocation projection, point
evaluation and L2 error norms. Everything here is shared by the space-time
predictor and the corrector.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_DEGREE = 9


def _legendre_and_derivative(n: int, x: float) -> tuple[float, float]:
    """Value and first derivative of the Legendre polynomial P_n at x."""
    p0, p1 = 1.0, x
    if n == 0:
        return p0, 0.0
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0,1].

    Newton iteration on P_n with 1e-15 stopping; roots are computed for one
    half and mirrored so the node set is exactly symmetric about 1/2.
    """
    if n < 1:
        raise ValueError("need at least one quadrature point")
    nodes = np.empty(n)
    weights = np.empty(n)
    for i in range(n // 2):
        # Chebyshev-like initial guess for the i-th positive root of P_n
        x = np.cos(np.pi * (i + 0.75) / (n + 0.5))
        for _ in range(100):
            p, dp = _legendre_and_derivative(n, x)
            dx = -p / dp
            x += dx
            if abs(dx) < 1e-15:
                break
        p, dp = _legendre_and_derivative(n, x)
        w = 2.0 / ((1.0 - x * x) * dp * dp)
        hi = 0.5 * (1.0 + x)
        nodes[n - 1 - i] = hi
        nodes[i] = 1.0 - hi  # exact complement (Sterbenz), keeps the set symmetric
        weights[i] = weights[n - 1 - i] = 0.5 * w
    if n % 2 == 1:
        nodes[n // 2] = 0.5
        p, dp = _legendre_and_derivative(n, 0.0)
        weights[n // 2] = 1.0 / (dp * dp)
    return nodes, weights


def gauss_lobatto(n: int) -> np.ndarray:
    """Gauss-Lobatto nodes on [0,1] (endpoints included), n >= 2.

    Interior nodes are the roots of P'_{n-1}, found by Newton on
    (1-x^2) P'_{n-1}(x) from Chebyshev-Lobatto starting guesses.
    """
    if n < 2:
        raise ValueError("Lobatto node set needs n >= 2")
    m = n - 1
    nodes = np.empty(n)
    nodes[0], nodes[-1] = 0.0, 1.0
    for i in range(1, (n + 1) // 2):
        x = np.cos(np.pi * i / m)
        for _ in range(100):
            p, dp = _legendre_and_derivative(m, x)
            # f = (1-x^2) p'; by the Legendre ODE f' = -m(m+1) p
            f = (1.0 - x * x) * dp
            df = -m * (m + 1) * p
            dx = -f / df
            x += dx
            if abs(dx) < 1e-15:
                break
        hi = 0.5 * (1.0 + x)
        nodes[m - i] = hi
        nodes[i] = 1.0 - hi
    return nodes


def _barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / diff.prod(axis=1)


def lagrange_eval_matrix(nodes: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Matrix E with E[p, j] = phi_j(points[p]) for the Lagrange basis on nodes."""
    points = np.atleast_1d(np.asarray(points, dtype=float))
    bw = _barycentric_weights(nodes)
    E = np.zeros((points.size, nodes.size))
    for p, x in enumerate(points):
        # snap to coincident nodes so nodal queries keep the delta property
        near = np.abs(x - nodes) < 1e-13
        if near.any():
            E[p, np.argmax(near)] = 1.0
            continue
        r = bw / (x - nodes)
        E[p] = r / r.sum()
    return E


def differentiation_matrix(nodes: np.ndarray) -> np.ndarray:
    """D with D[i, j] = phi_j'(nodes[i]); exact on the polynomial space."""
    bw = _barycentric_weights(nodes)
    n = nodes.size
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                D[i, j] = (bw[j] / bw[i]) / (nodes[i] - nodes[j])
        D[i, i] = -D[i].sum()
    return D


class NodalBasis:
    """Degree-N Lagrange basis on the N+1 Gauss-Legendre points of [0,1].

    Attributes:
        degree: polynomial degree N.
        n: number of nodes, N+1.
        nodes, weights: quadrature points/weights (weights sum to 1).
        diff: differentiation matrix, diff[i, j] = phi_j'(nodes[i]).
        at0, at1: boundary extrapolation vectors phi_j(0), phi_j(1).
    """

    def __init__(self, degree: int):
        if not 0 <= degree <= MAX_DEGREE:
            raise ValueError(f"polynomial degree must be in [0, {MAX_DEGREE}], got {degree}")
        self.degree = degree
        self.n = degree + 1
        self.nodes, self.weights = gauss_legendre(self.n)
        self.diff = differentiation_matrix(self.nodes)
        self.at0 = lagrange_eval_matrix(self.nodes, np.array([0.0]))[0]
        self.at1 = lagrange_eval_matrix(self.nodes, np.array([1.0]))[0]
        if degree == 0:
            self.lobatto = np.array([0.5])
        else:
            self.lobatto = gauss_lobatto(self.n)
        # evaluate a Lobatto-node interpolant at the Gauss-Legendre nodes
        self.lobatto_to_nodes = lagrange_eval_matrix(self.lobatto, self.nodes)
        # oversampled rule used for error norms against analytic references
        self.over_nodes, self.over_weights = gauss_legendre(self.n + 1)
        self.to_over = lagrange_eval_matrix(self.nodes, self.over_nodes)

    def eval_matrix(self, points: np.ndarray) -> np.ndarray:
        return lagrange_eval_matrix(self.nodes, points)


def build_basis(degree: int) -> NodalBasis:
    """Nodal Gauss-Legendre basis of the given degree (0..9)."""
    return NodalBasis(degree)


@dataclass(frozen=True)
class Mesh:
    """Uniform Cartesian mesh in 1 or 2 dimensions.

    bounds: ((xmin, xmax)[, (ymin, ymax)]); ncells: (Nx[, Ny]);
    periodic: per-axis periodicity flags.
    """

    bounds: tuple
    ncells: tuple
    periodic: tuple = None

    def __post_init__(self):
        if self.periodic is None:
            object.__setattr__(self, "periodic", tuple(False for _ in self.ncells))
        if len(self.bounds) != len(self.ncells) or len(self.ncells) not in (1, 2):
            raise ValueError("mesh must be 1D or 2D with matching bounds/ncells")
        for (lo, hi), n in zip(self.bounds, self.ncells):
            if not (hi > lo and n >= 1):
                raise ValueError("mesh bounds/cell counts invalid")

    @property
    def dim(self) -> int:
        return len(self.ncells)

    def dx(self, axis: int = 0) -> float:
        lo, hi = self.bounds[axis]
        return (hi - lo) / self.ncells[axis]

    def centers(self, axis: int = 0) -> np.ndarray:
        lo, _ = self.bounds[axis]
        return lo + (np.arange(self.ncells[axis]) + 0.5) * self.dx(axis)

    def node_coords(self, basis: NodalBasis, axis: int = 0) -> np.ndarray:
        """Physical coordinates of the basis nodes, shape (ncells, n)."""
        lo, _ = self.bounds[axis]
        idx = np.arange(self.ncells[axis])[:, None]
        return lo + (idx + basis.nodes[None, :]) * self.dx(axis)

    def locate(self, x: float, axis: int = 0) -> tuple[int, float]:
        """Containing cell index and local coordinate of a physical point."""
        lo, hi = self.bounds[axis]
        if not (lo <= x <= hi):
            raise ValueError(f"point {x} outside domain [{lo}, {hi}] on axis {axis}")
        i = min(int((x - lo) / self.dx(axis)), self.ncells[axis] - 1)
        xi = (x - lo) / self.dx(axis) - i
        return i, min(max(xi, 0.0), 1.0)


@dataclass
class ElementSolution:
    """Per-cell tensor of nodal coefficients of the conserved state.

    data shape: (Nx, n, ncomp) in 1D, (Nx, Ny, n, n, ncomp) in 2D, with the
    component axis last and cell-major layout.
    """

    mesh: Mesh
    basis: NodalBasis
    data: np.ndarray

    @property
    def ncomp(self) -> int:
        return self.data.shape[-1]

    def copy(self) -> "ElementSolution":
        return ElementSolution(self.mesh, self.basis, self.data.copy())

    def eval_at(self, x: float, y: float | None = None) -> np.ndarray:
        """Polynomial evaluation of the state at a physical point."""
        i, xi = self.mesh.locate(x, 0)
        ex = self.basis.eval_matrix(np.array([xi]))[0]
        if self.mesh.dim == 1:
            return np.einsum("b,bk->k", ex, self.data[i])
        if y is None:
            raise ValueError("2D solution needs both coordinates")
        j, eta = self.mesh.locate(y, 1)
        ey = self.basis.eval_matrix(np.array([eta]))[0]
        return np.einsum("b,e,bek->k", ex, ey, self.data[i, j])


def l2_project(function, mesh: Mesh, basis: NodalBasis, ncomp: int) -> ElementSolution:
    """Collocation (interpolation) projection onto the nodal DG space.

    `function` maps physical coordinates to a state with the component axis
    last, broadcasting over numpy coordinate arrays (1D: f(x); 2D: f(x, y)).
    """
    if mesh.dim == 1:
        x = mesh.node_coords(basis, 0)
        shape = (mesh.ncells[0], basis.n, ncomp)
    else:
        x = mesh.node_coords(basis, 0)[:, None, :, None]
        y = mesh.node_coords(basis, 1)[None, :, None, :]
        shape = (mesh.ncells[0], mesh.ncells[1], basis.n, basis.n, ncomp)
    vals = np.asarray(function(x) if mesh.dim == 1 else function(x, y), dtype=float)
    data = np.broadcast_to(vals, shape).copy() if vals.shape != shape else vals
    return ElementSolution(mesh, basis, np.ascontiguousarray(data))


def sample_equispaced(solution: ElementSolution, points_per_cell: int = 5):
    """Sample the polynomial solution at equispaced in-cell plot points.

    Returns (coords, values): 1D gives (x, (Nx*m, ncomp)); 2D gives
    ((x, y) meshes, (Nx*m, Ny*m, ncomp)). Points sit at cell-local
    (k + 1/2)/m so interfaces are not duplicated.
    """
    m = points_per_cell
    xi = (np.arange(m) + 0.5) / m
    E = solution.basis.eval_matrix(xi)
    mesh = solution.mesh
    if mesh.dim == 1:
        vals = np.einsum("pb,cbk->cpk", E, solution.data)
        lo, _ = mesh.bounds[0]
        dx = mesh.dx(0)
        x = (lo + (np.arange(mesh.ncells[0])[:, None] + xi[None, :]) * dx).ravel()
        return x, vals.reshape(-1, solution.ncomp)
    vals = np.einsum("pb,qe,cdbek->cpdqk", E, E, solution.data)
    nx, ny = mesh.ncells
    vals = vals.reshape(nx * m, ny * m, solution.ncomp)
    x = (mesh.bounds[0][0] + (np.arange(nx)[:, None] + xi[None, :]) * mesh.dx(0)).ravel()
    y = (mesh.bounds[1][0] + (np.arange(ny)[:, None] + xi[None, :]) * mesh.dx(1)).ravel()
    return (x, y), vals


def l2_error(solution: ElementSolution, reference, transform=None) -> np.ndarray:
    """Per-component L2 norm of (solution - reference).

    `reference` is either a callable analytic state (evaluated on an
    oversampled N+2-point Gauss rule per axis) or an ElementSolution on the
    same mesh/basis (nodal quadrature). `transform`, if given, maps state
    arrays (component axis last) to the quantities whose error is measured.
    """
    mesh, basis = solution.mesh, solution.basis
    tr = transform if transform is not None else (lambda v: v)
    if isinstance(reference, ElementSolution):
        if reference.mesh is not mesh and reference.mesh != mesh:
            raise ValueError("solutions live on different meshes")
        if reference.basis.degree != basis.degree:
            raise ValueError("solutions use different bases")
        diff = tr(solution.data) - tr(reference.data)
        if mesh.dim == 1:
            err2 = np.einsum("b,cbk->k", basis.weights, diff**2) * mesh.dx(0)
        else:
            err2 = (np.einsum("b,e,cdbek->k", basis.weights, basis.weights, diff**2)
                    * mesh.dx(0) * mesh.dx(1))
        return np.sqrt(err2)
    E, wq = basis.to_over, basis.over_weights
    if mesh.dim == 1:
        lo = mesh.bounds[0][0]
        dx = mesh.dx(0)
        xq = lo + (np.arange(mesh.ncells[0])[:, None] + basis.over_nodes[None, :]) * dx
        uh = np.einsum("pb,cbk->cpk", E, solution.data)
        ref = np.broadcast_to(np.asarray(reference(xq), dtype=float), uh.shape)
        diff = tr(uh) - tr(ref)
        err2 = np.einsum("p,cpk->k", wq, diff**2) * dx
        return np.sqrt(err2)
    xq = (mesh.bounds[0][0]
          + (np.arange(mesh.ncells[0])[:, None] + basis.over_nodes[None, :]) * mesh.dx(0))
    yq = (mesh.bounds[1][0]
          + (np.arange(mesh.ncells[1])[:, None] + basis.over_nodes[None, :]) * mesh.dx(1))
    uh = np.einsum("pb,qe,cdbek->cdpqk", E, E, solution.data)
    ref = np.broadcast_to(
        np.asarray(reference(xq[:, None, :, None], yq[None, :, None, :]), dtype=float),
        uh.shape)
    diff = tr(uh) - tr(ref)
    err2 = np.einsum("p,q,cdpqk->k", wq, wq, diff**2) * mesh.dx(0) * mesh.dx(1)
    return np.sqrt(err2)


def convergence_order(errors, mesh_sizes) -> list[float]:
    """Observed orders between consecutive (error, Nx) pairs.

    order_i = ln(e_i / e_{i+1}) / ln(n_{i+1} / n_i). A zero error or a
    repeated mesh size yields NaN (undefined order); negative errors raise.
    """
    errors = list(errors)
    ns = list(mesh_sizes)
    if len(errors) < 2 or len(errors) != len(ns):
        raise ValueError("need at least two matching (error, mesh) entries")
    if any(e < 0 for e in errors):
        raise ValueError("errors must be non-negative")
    orders = []
    for (e0, n0), (e1, n1) in zip(zip(errors, ns), zip(errors[1:], ns[1:])):
        if e0 == 0.0 or e1 == 0.0 or n0 == n1:
            orders.append(float("nan"))
        else:
            orders.append(np.log(e0 / e1) / np.log(n1 / n0))
    return orders
