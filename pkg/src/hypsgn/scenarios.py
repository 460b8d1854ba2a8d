"""Benchmark scenarios, the time loop, gauges and study harnesses.

Four built-in benchmarks:

* ``soliton-flat``     solitary wave on a flat bottom, periodic (convergence).
* ``soliton-step``     solitary wave over a smoothed step, transmissive.
* ``submerged-bar``    periodic waves over a trapezoidal bar with
                       relaxation-zone wavemaker (left) and absorber (right).
* ``gaussian-2d``      2D solitary wave impinging on a Gaussian obstacle.

``run`` drives the two-phase ADER step, applies relaxation blending after
each step and records gauges, energy/mass ledgers and constraint residuals.
"""

from __future__ import annotations

import dataclasses
import functools
import time
from dataclasses import dataclass, field as dfield

import numpy as np

from . import boundary as bdry
from .ader import AderSolver, SchemeConfig
from .bathymetry import (BathymetryField, Flat, GaussianBump, SmoothedStep,
                         TrapezoidalBar, project_to_field)
from .dg import ElementSolution, Mesh, NodalBasis, build_basis, convergence_order, l2_error, sample_equispaced
from .model import PhysParams, StateGradient, make_model
from .soliton import SolitonParams, SolitonProfile, integrate_profile

_I_FULL_TO_MILD = (0, 1, 2, 4)  # (h, hu, hw, hp) slots of the full 1D state


@dataclass(frozen=True)
class RelaxationSpec:
    """Wavemaker/absorber configuration for scenarios with relaxation zones.

    interior: the physical domain (x_L, x_R); zones of the given length sit
    outside it (they are real mesh cells). inflow: 'synthetic' or a CSV path
    with (t, A*) samples driving the left wavemaker.
    """

    interior: tuple
    length: float = 10.0
    inflow: str = "synthetic"


@dataclass(frozen=True)
class Scenario:
    """A fully specified benchmark run."""

    name: str
    dim: int
    bounds: tuple
    ncells: tuple
    periodic: tuple
    degree: int = 3
    variant: str = "full"
    g: float = 9.81
    c: float = 20.0
    cfl: float = 0.45
    still_depth: float = 1.0
    bathymetry: object = dfield(default_factory=Flat)
    ic: str = "rest"              # 'rest' or 'soliton'
    soliton_amplitude: float = 0.2
    soliton_x0: float = 0.0
    t_end: float = 2.0
    gauges: tuple = ()
    relaxation: RelaxationSpec | None = None

    def replace(self, **kw) -> "Scenario":
        return dataclasses.replace(self, **kw)

    @property
    def params(self) -> PhysParams:
        return PhysParams(self.g, self.c)


_BUILTINS = ("soliton-flat", "soliton-step", "submerged-bar", "gaussian-2d")


def builtin_scenario(name: str) -> Scenario:
    """One of the built-in benchmark definitions."""
    if name == "soliton-flat":
        return Scenario(
            name=name, dim=1, bounds=((-50.0, 50.0),), ncells=(100,),
            periodic=(True,), degree=3, c=20.0, still_depth=1.0,
            ic="soliton", soliton_amplitude=0.2, soliton_x0=0.0, t_end=2.0)
    if name == "soliton-step":
        return Scenario(
            name=name, dim=1, bounds=((-16.0, 17.0),), ncells=(4342,),
            periodic=(False,), degree=3, c=9.0, still_depth=0.2,
            bathymetry=SmoothedStep(height=0.1, center=0.0, steepness=8.0),
            ic="soliton", soliton_amplitude=0.0365, soliton_x0=-3.0,
            t_end=10.74, gauges=(-9.0, -6.0, -3.0, 3.0, 6.0, 9.0))
    if name == "submerged-bar":
        return Scenario(
            name=name, dim=1, bounds=((-10.0, 50.0),), ncells=(1800,),
            periodic=(False,), degree=3, c=12.0, still_depth=0.4,
            bathymetry=TrapezoidalBar(6.0, 12.0, 14.0, 17.0, 0.3),
            ic="rest", t_end=40.0,
            gauges=(10.8, 12.8, 13.8, 14.8, 16.0, 17.6),
            relaxation=RelaxationSpec(interior=(0.0, 40.0), length=10.0))
    if name == "gaussian-2d":
        return Scenario(
            name=name, dim=2, bounds=((-5.0, 35.0), (-20.0, 20.0)),
            ncells=(200, 200), periodic=(False, False), degree=3, c=10.0,
            still_depth=0.25, bathymetry=GaussianBump(0.1, 1.0, (0.0, 0.0)),
            ic="soliton", soliton_amplitude=0.1, soliton_x0=-3.0, t_end=12.0)
    raise ValueError(
        f"unknown scenario {name!r}; available: {', '.join(_BUILTINS)}")


def list_scenarios() -> tuple:
    return _BUILTINS


@dataclass
class GaugeSeries:
    """Time series of free surface and amplitude ratio at one probe point."""

    x: float
    times: list = dfield(default_factory=list)
    eta: list = dfield(default_factory=list)
    ratio: list = dfield(default_factory=list)  # A/H = (eta - H)/H

    def arrays(self):
        return np.array(self.times), np.array(self.eta), np.array(self.ratio)


class GaugeRecorder:
    """Samples eta = h + z_b at fixed probes by polynomial evaluation."""

    def __init__(self, positions, mesh: Mesh, basis: NodalBasis,
                 field: BathymetryField, still_depth: float):
        if mesh.dim != 1:
            raise ValueError("gauges are supported on 1D scenarios")
        self.series = [GaugeSeries(float(x)) for x in positions]
        self.H = still_depth
        self._weights = []
        for x in positions:
            i, xi = mesh.locate(float(x), 0)
            w = basis.eval_matrix(np.array([xi]))[0]
            zb = float(field.zb[i] @ w)
            self._weights.append((i, w, zb))

    def record(self, u: np.ndarray, t: float) -> None:
        for series, (i, w, zb) in zip(self.series, self._weights):
            eta = float(u[i, :, 0] @ w) + zb
            series.times.append(t)
            series.eta.append(eta)
            series.ratio.append((eta - self.H) / self.H)


def record_gauges(solution: ElementSolution, recorder: GaugeRecorder, t: float):
    """Append one sample per gauge; returns the recorder's series."""
    recorder.record(solution.data, t)
    return recorder.series


def total_mass(u: np.ndarray, mesh: Mesh, basis: NodalBasis) -> float:
    w = basis.weights
    if mesh.dim == 1:
        return float(np.einsum("b,cb->", w, u[..., 0]) * mesh.dx(0))
    return float(np.einsum("b,e,cdbe->", w, w, u[..., 0]) * mesh.dx(0) * mesh.dx(1))


def energy_monitor(solution: ElementSolution, field: BathymetryField,
                   params: PhysParams, model) -> float:
    """Total energy: quadrature of the energy density over all cells."""
    E = model.energy_density(solution.data, field.zb, params)
    w = solution.basis.weights
    mesh = solution.mesh
    if mesh.dim == 1:
        return float(np.einsum("b,cb->", w, E) * mesh.dx(0))
    return float(np.einsum("b,e,cdbe->", w, w, E) * mesh.dx(0) * mesh.dx(1))


def _constraint_norms(u, field, mesh, basis, model) -> tuple[float, float]:
    du = np.einsum("bB,cBk->cbk", basis.diff, u) / mesh.dx(0)
    grad = StateGradient(du[..., None, :], field.dzb)
    r_sig, r_w = model.constraint_residuals(u, grad)
    w = basis.weights
    dx = mesh.dx(0)
    return (float(np.sqrt(np.einsum("b,cb->", w, r_sig**2) * dx)),
            float(np.sqrt(np.einsum("b,cb->", w, r_w**2) * dx)))


@functools.lru_cache(maxsize=8)
def _cached_profile(params: SolitonParams) -> SolitonProfile:
    return integrate_profile(params)


def soliton_profile_for(scn: Scenario) -> SolitonProfile:
    # x0 is a sampling offset, not a profile property; keep it off the cache key
    return _cached_profile(SolitonParams(
        H0=scn.still_depth, A=scn.soliton_amplitude, g=scn.g, c=scn.c))


def initial_condition(scn: Scenario, mesh: Mesh, basis: NodalBasis,
                      field: BathymetryField, model) -> np.ndarray:
    """Nodal initial data consistent with the discrete bathymetry.

    Rest: h = H - z_b,h (free surface exactly constant in the discrete
    sense). Soliton: the profile's surface rides over the discrete bottom,
    h = h_profile(x - x0) - z_b,h, with the remaining components sampled
    from the profile (and v = 0 in 2D).
    """
    ncomp = model.ncomp
    if scn.ic == "rest":
        u = np.zeros(field.zb.shape + (ncomp,))
        u[..., 0] = scn.still_depth - field.zb
        return u
    if scn.ic != "soliton":
        raise ValueError(f"unknown initial condition {scn.ic!r}")
    prof = soliton_profile_for(scn)

    x = mesh.node_coords(basis, 0)
    offs = x - scn.soliton_x0
    if mesh.periodic[0]:
        lo, hi = mesh.bounds[0]
        L = hi - lo
        offs = (offs + 0.5 * L) % L - 0.5 * L
    states = prof.states(offs.ravel()).reshape(offs.shape + (6,))
    if scn.dim == 1:
        if scn.variant == "mild":
            u = states[..., list(_I_FULL_TO_MILD)].copy()
        else:
            u = states
        u[..., 0] -= field.zb
        return u
    ny, n = mesh.ncells[1], basis.n
    u = np.zeros((mesh.ncells[0], ny, n, n, 7))
    expand = np.broadcast_to(states[:, None, :, None, :],
                             (mesh.ncells[0], ny, n, n, 6))
    for dst, src in ((0, 0), (1, 1), (3, 2), (4, 3), (5, 4), (6, 5)):
        u[..., dst] = expand[..., src]
    u[..., 0] -= field.zb
    return u


def _build_zones(scn: Scenario, model, params: PhysParams):
    if scn.relaxation is None:
        return []
    spec = scn.relaxation
    H = scn.still_depth
    if spec.inflow == "synthetic":
        series = bdry.TargetSeries.synthetic_sine(H, t_max=scn.t_end + 10.0)
    elif spec.inflow == "rest":
        series = bdry.TargetSeries(np.array([0.0, 1.0]), np.zeros(2), H)
    else:
        series = bdry.TargetSeries.from_csv(spec.inflow, H)
    ncomp = model.ncomp
    left = bdry.RelaxationZone(
        "left", spec.interior[0], spec.length,
        lambda t: bdry.wavemaker_target(t, series, params, ncomp))
    right = bdry.RelaxationZone(
        "right", spec.interior[1], spec.length,
        lambda t: bdry.absorbing_target(t, H, params, ncomp))
    return [left, right]


@dataclass
class RunOptions:
    """What to record during a run."""

    record_energy: bool | None = None       # None: on for the full model
    record_constraints: bool | None = None  # None: on for 1D full model
    record_amplitude: bool = True
    snapshot_times: tuple = ()
    progress: object = None                 # callable(step, t, t_end) or None


@dataclass
class RunReport:
    """Everything a run produced, plus conservation ledgers."""

    scenario: Scenario
    steps: int
    wall_time: float
    t_final: float
    times: np.ndarray
    mass: np.ndarray
    energy: np.ndarray | None
    constraint_norms: np.ndarray | None
    amplitude: np.ndarray | None
    gauges: list
    solution: ElementSolution
    field: BathymetryField
    snapshots: list

    @property
    def mass_drift(self) -> float:
        m0 = self.mass[0]
        return float(np.max(np.abs(self.mass - m0)) / abs(m0))

    @property
    def energy_drift(self) -> float:
        if self.energy is None:
            raise ValueError("energy was not recorded")
        e0 = self.energy[0]
        return float((self.energy[-1] - e0) / abs(e0))

    def constraint_spacetime_norms(self) -> tuple[float, float]:
        """Space-time L2 norms of the two constraint residuals."""
        if self.constraint_norms is None:
            raise ValueError("constraint residuals were not recorded")
        dt = np.diff(self.times, prepend=0.0)
        sq = self.constraint_norms**2
        return (float(np.sqrt(np.sum(dt * sq[:, 0]))),
                float(np.sqrt(np.sum(dt * sq[:, 1]))))


def run(scn: Scenario, options: RunOptions | None = None,
        config: SchemeConfig | None = None) -> RunReport:
    """Execute a scenario to t_end and return its report."""
    opts = options if options is not None else RunOptions()
    model = make_model(scn.variant, scn.dim)
    params = scn.params
    mesh = Mesh(scn.bounds, scn.ncells, scn.periodic)
    basis = build_basis(scn.degree)
    field = project_to_field(scn.bathymetry, mesh, basis)
    cfg = config if config is not None else SchemeConfig(cfl=scn.cfl)
    solver = AderSolver(model, mesh, basis, field, params, cfg)
    u = initial_condition(scn, mesh, basis, field, model)
    zones = _build_zones(scn, model, params)
    centers = mesh.centers(0)

    rec_energy = (scn.variant == "full") if opts.record_energy is None else opts.record_energy
    rec_constr = ((scn.dim == 1 and scn.variant == "full")
                  if opts.record_constraints is None else opts.record_constraints)
    recorder = (GaugeRecorder(scn.gauges, mesh, basis, field, scn.still_depth)
                if scn.gauges else None)

    times, mass, energy, constr, amp = [], [], [], [], []
    snapshots = []
    snap_left = sorted(opts.snapshot_times)

    def record(t, u):
        times.append(t)
        sol = ElementSolution(mesh, basis, u)
        mass.append(total_mass(u, mesh, basis))
        if rec_energy:
            energy.append(energy_monitor(sol, field, params, model))
        if rec_constr:
            constr.append(_constraint_norms(u, field, mesh, basis, model))
        if opts.record_amplitude:
            amp.append(float(np.max(u[..., 0] + field.zb - scn.still_depth)))
        if recorder is not None:
            recorder.record(u, t)

    t0 = time.perf_counter()
    t, steps = 0.0, 0
    record(t, u)
    if snap_left and abs(snap_left[0]) <= 1e-12:
        snapshots.append((0.0, ElementSolution(mesh, basis, u.copy())))
        snap_left.pop(0)
    while t < scn.t_end * (1.0 - 1e-14):
        dt = solver.compute_dt(u)
        remaining = scn.t_end - t
        if snap_left and snap_left[0] > t:
            remaining = min(remaining, snap_left[0] - t)
        if dt >= remaining * (1.0 - 1e-12):
            dt = remaining
        u = solver.step(u, dt)
        t += dt
        for zone in zones:
            zone.apply(u, centers, t)
        steps += 1
        record(t, u)
        if snap_left and t >= snap_left[0] * (1.0 - 1e-12):
            snapshots.append((t, ElementSolution(mesh, basis, u.copy())))
            snap_left.pop(0)
        if opts.progress is not None:
            opts.progress(steps, t, scn.t_end)

    return RunReport(
        scenario=scn, steps=steps, wall_time=time.perf_counter() - t0,
        t_final=t, times=np.array(times), mass=np.array(mass),
        energy=np.array(energy) if rec_energy else None,
        constraint_norms=np.array(constr) if rec_constr else None,
        amplitude=np.array(amp) if opts.record_amplitude else None,
        gauges=recorder.series if recorder is not None else [],
        solution=ElementSolution(mesh, basis, u), field=field,
        snapshots=snapshots)


# -- study harnesses -----------------------------------------------------------

@dataclass
class ConvergenceTable:
    """L2 errors and observed orders for (h, u, p) over a mesh sequence."""

    degree: int
    meshes: list
    errors: np.ndarray          # (len(meshes), 3)
    orders: np.ndarray          # (len(meshes)-1, 3)

    def rows(self):
        out = []
        for i, nx in enumerate(self.meshes):
            row = {"N": self.degree, "Nx": nx,
                   "err_h": self.errors[i, 0], "err_u": self.errors[i, 1],
                   "err_p": self.errors[i, 2]}
            for j, name in enumerate(("ord_h", "ord_u", "ord_p")):
                row[name] = self.orders[i - 1, j] if i else float("nan")
            out.append(row)
        return out


def soliton_reference(scn: Scenario, t: float):
    """Quasi-exact reference: the sampled profile translated by V t."""
    prof = soliton_profile_for(scn)
    V = prof.params.V
    lo, hi = scn.bounds[0]
    L = hi - lo
    periodic = scn.periodic[0]

    def ref(x):
        offs = x - scn.soliton_x0 - V * t
        if periodic:
            offs = (offs + 0.5 * L) % L - 0.5 * L
        return prof.states(offs.ravel()).reshape(offs.shape + (6,))

    return ref


def _primitive_transform(v):
    out = v.copy()
    out[..., 1:] = v[..., 1:] / v[..., 0:1]
    return out


def convergence_study(scn: Scenario, degree: int, meshes,
                      t_end: float | None = None,
                      config: SchemeConfig | None = None) -> ConvergenceTable:
    """Run the soliton scenario over a mesh sequence and tabulate errors.

    Errors are oversampled L2 norms of the primitive quantities (h, u, p)
    against the translated profile.
    """
    if scn.ic != "soliton" or scn.dim != 1 or scn.variant != "full":
        raise ValueError("convergence study needs a 1D full-model soliton scenario")
    t_end = scn.t_end if t_end is None else t_end
    ref = soliton_reference(scn, t_end)
    errs = []
    opts = RunOptions(record_energy=False, record_constraints=False,
                      record_amplitude=False)
    for nx in meshes:
        sub = scn.replace(ncells=(int(nx),), degree=degree, t_end=t_end)
        rep = run(sub, opts, config)
        e = l2_error(rep.solution, ref, transform=_primitive_transform)
        errs.append([e[0], e[1], e[4]])
    errs = np.array(errs)
    orders = np.array([convergence_order(errs[:, j], list(meshes))
                       for j in range(3)]).T
    return ConvergenceTable(degree, list(meshes), errs, orders)


@dataclass
class ModelComparison:
    """Total variation of the free surface for full vs mild-bottom models."""

    tv_full: float
    tv_mild: float
    window: tuple
    degenerate: bool = False

    @property
    def ratio(self) -> float:
        if self.degenerate:
            return float("nan")
        return self.tv_mild / self.tv_full


def _eta_tv(report: RunReport, window, points_per_cell: int = 6) -> float:
    x, vals = sample_equispaced(report.solution, points_per_cell)
    _, zb_vals = sample_equispaced(
        ElementSolution(report.solution.mesh, report.solution.basis,
                        report.field.zb[..., None]), points_per_cell)
    eta = vals[:, 0] + zb_vals[:, 0]
    m = (x >= window[0]) & (x <= window[1])
    return float(np.sum(np.abs(np.diff(eta[m]))))


def compare_models(scn: Scenario, window=(-1.0, 1.0), t_end: float = 10.0,
                   config: SchemeConfig | None = None) -> ModelComparison:
    """Run the full and mild-bottom variants on identical mesh/degree and
    compare the free-surface total variation over a window."""
    if scn.dim != 1:
        raise ValueError("model comparison is a 1D instrument")
    opts = RunOptions(record_energy=False, record_constraints=False,
                      record_amplitude=False)
    rep_full = run(scn.replace(variant="full", t_end=t_end), opts, config)
    rep_mild = run(scn.replace(variant="mild", t_end=t_end), opts, config)
    tv_full = _eta_tv(rep_full, window)
    tv_mild = _eta_tv(rep_mild, window)
    tiny = 1e-8 * scn.still_depth  # round-off-level variation on both sides
    return ModelComparison(tv_full, tv_mild, tuple(window),
                           degenerate=(tv_full < tiny and tv_mild < tiny))
