"""Solitary-wave initial data for the hyperbolic model.

Traveling waves U(x - V t) of the full 1D system satisfy the similarity ODE

    U' = (A(U) - V I)^{-1} S(U),

integrated from a rest state seeded with a tiny averaged pressure epsilon.
The orbit leaves the rest point, traces the solitary hump and returns; the
profile is cut at the return-to-rest event and mirrored about the crest
(h, u, p, pb even; w, sigma odd), which suppresses the seed-induced
asymmetry. Note the wave is an exact solution of the *hyperbolic* system,
not of its c -> infinity limit; using the classical SGN soliton instead
would spoil high-order convergence.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import minimize_scalar

from .dg import ElementSolution, Mesh, NodalBasis, l2_project
from .model import HyperbolicSGN, PhysParams

_PARITY = np.array([1.0, 1.0, -1.0, -1.0, 1.0, 1.0])  # under zeta -> -zeta


class SolitonError(RuntimeError):
    """The similarity ODE failed to produce a closed solitary profile."""


@dataclass(frozen=True)
class SolitonParams:
    """Solitary-wave parameters; V defaults to sqrt(g (A + H0))."""

    H0: float = 1.0
    A: float = 0.2
    g: float = 9.81
    c: float = 20.0
    V: float | None = None
    epsilon: float = 1e-8
    zeta_span: float = 100.0
    x0: float = 0.0

    def __post_init__(self):
        if self.V is None:
            object.__setattr__(self, "V", float(np.sqrt(self.g * (self.A + self.H0))))
        if not (self.H0 > 0 and self.A > 0 and self.epsilon > 0):
            raise ValueError("H0, A and epsilon must be positive")
        if self.V**2 <= self.g * self.H0:
            raise ValueError("wave speed must be supercritical: V^2 > g H0")

    @property
    def phys(self) -> PhysParams:
        return PhysParams(self.g, self.c)


_MODEL = HyperbolicSGN(1)


def ode_rhs(U: np.ndarray, params: SolitonParams) -> np.ndarray:
    """Similarity derivative (A(U) - V I)^{-1} S(U), dense LU solve."""
    U = np.asarray(U, dtype=float)
    A = _MODEL.quasilinear_matrix(U, params.phys)
    S = _MODEL.source(U, params.phys)
    M = A - params.V * np.eye(6)
    try:
        return np.linalg.solve(M, S)
    except np.linalg.LinAlgError as exc:
        lam = _MODEL.eigenvalues(U, params.phys)
        gap = float(np.min(np.abs(lam - params.V)))
        raise SolitonError(
            f"similarity matrix singular: V={params.V} within {gap:.3e} "
            f"of an eigenvalue of A(U)") from exc


@dataclass
class SolitonProfile:
    """Dense traveling-wave profile centred at its crest.

    Evaluate with states(offsets); outside the half-width the far field is
    the rest state (H0, 0, 0, 0, 0, 0).
    """

    params: SolitonParams
    amplitude: float
    half_width: float
    _dense: object = field(repr=False, default=None)
    _crest: float = field(repr=False, default=0.0)

    def states(self, offsets) -> np.ndarray:
        """Conserved states at signed offsets from the crest, shape (m, 6)."""
        s = np.atleast_1d(np.asarray(offsets, dtype=float))
        out = np.zeros((s.size, 6))
        out[:, 0] = self.params.H0
        inside = np.abs(s) <= self.half_width
        if np.any(inside):
            vals = self._dense(self._crest + np.abs(s[inside])).T  # (m, 6)
            neg = s[inside] < 0
            vals[neg] *= _PARITY[None, :]
            out[inside] = vals
        return out

    def __call__(self, offsets) -> np.ndarray:
        return self.states(offsets)

    def export_csv(self, path, num: int = 2001):
        """Write (zeta, six conserved components) over the profile span."""
        zeta = np.linspace(-self.half_width, self.half_width, num)
        U = self.states(zeta)
        with open(path, "w", newline="") as f:
            wr = csv.writer(f)
            wr.writerow(["zeta", "h", "hu", "hw", "hsigma", "hp", "hpb"])
            for z, row in zip(zeta, U):
                wr.writerow([format(v, ".16e") for v in (z, *row)])


def integrate_profile(params: SolitonParams, rtol: float = 1e-12,
                      atol: float = 1e-12) -> SolitonProfile:
    """Integrate the similarity ODE into a solitary-wave profile.

    Two-phase integration with event detection: first until the rising flank
    crosses H0 + A/2, then until the return-to-rest event |h - H0| below
    1e-7 H0 on the far side of the crest. Local error control 1e-12.
    """
    U0 = np.array([params.H0, 0.0, 0.0, 0.0, params.epsilon, 0.0])
    rhs = lambda z, U: ode_rhs(U, params)

    rise_level = params.H0 + 0.5 * params.A

    def rise(z, U):
        return U[0] - rise_level
    rise.terminal = True
    rise.direction = 1

    sol1 = solve_ivp(rhs, (0.0, params.zeta_span), U0, method="DOP853",
                     rtol=rtol, atol=atol, events=rise, dense_output=False)
    if not sol1.t_events[0].size:
        raise SolitonError(
            "no solitary wave developed within the integration span "
            "(seed too small or span too short)")
    z1 = sol1.t_events[0][0]
    U1 = sol1.y_events[0][0]

    return_band = 1e-7 * params.H0

    def back_to_rest(z, U):
        return U[0] - (params.H0 + return_band)
    back_to_rest.terminal = True
    back_to_rest.direction = -1

    sol2 = solve_ivp(rhs, (z1, z1 + params.zeta_span), U1, method="DOP853",
                     rtol=rtol, atol=atol, events=back_to_rest, dense_output=True)
    if not sol2.t_events[0].size:
        raise SolitonError("profile did not return to the rest state "
                           "(increase zeta_span or check parameters)")
    z_ret = sol2.t_events[0][0]

    res = minimize_scalar(lambda z: -sol2.sol(z)[0], bounds=(z1, z_ret),
                          method="bounded", options={"xatol": 1e-12})
    z_crest = float(res.x)
    amplitude = float(sol2.sol(z_crest)[0] - params.H0)
    return SolitonProfile(params, amplitude, float(z_ret - z_crest),
                          _dense=sol2.sol, _crest=z_crest)


def sample_initial_condition(profile: SolitonProfile, mesh: Mesh, basis: NodalBasis,
                             x0: float | None = None) -> ElementSolution:
    """Nodal sampling of the profile centred at x0 (flat-bottom data).

    On periodic meshes the offset is wrapped, so a translated crest re-enters
    on the far side; elsewhere points beyond the profile span get the rest
    state.
    """
    x0 = profile.params.x0 if x0 is None else x0

    def ic(x):
        offs = x - x0
        if mesh.periodic[0]:
            lo, hi = mesh.bounds[0]
            L = hi - lo
            offs = (offs + 0.5 * L) % L - 0.5 * L
        return profile.states(offs.ravel()).reshape(offs.shape + (6,))

    return l2_project(ic, mesh, basis, 6)
