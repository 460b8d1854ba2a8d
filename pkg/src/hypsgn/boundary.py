"""Boundary treatment: ghost states, relaxation-zone wavemaker/absorber.

Periodic and transmissive boundaries act on interface traces. Wave
injection and absorption use relaxation zones: bands of real mesh cells
outside the physical domain where, after each full time step, the nodal
solution is blended toward a target state with a weight that falls from 1
at the physical boundary to 0 at the outer edge of the zone.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .model import PhysParams


class BoundaryKind(enum.Enum):
    PERIODIC = "periodic"
    TRANSMISSIVE = "transmissive"


def ghost_state(interior_trace: np.ndarray, kind: BoundaryKind,
                opposite_trace: np.ndarray | None = None) -> np.ndarray:
    """Ghost state for an interface trace.

    Transmissive copies the interior trace (zero-gradient extrapolation);
    periodic returns the matching opposite-side trace.
    """
    if kind is BoundaryKind.TRANSMISSIVE:
        return np.array(interior_trace, copy=True)
    if kind is BoundaryKind.PERIODIC:
        if opposite_trace is None:
            raise ValueError("periodic ghost needs the opposite-side trace")
        return np.array(opposite_trace, copy=True)
    raise ValueError(f"unsupported boundary kind {kind}")


class TargetSeries:
    """Sampled inflow amplitude A*(t) over a still depth H.

    Outside the sampled range the series clamps to its end values; lookup
    uses monotone piecewise-cubic interpolation.
    """

    def __init__(self, times: np.ndarray, amplitudes: np.ndarray, still_depth: float):
        times = np.asarray(times, dtype=float)
        amplitudes = np.asarray(amplitudes, dtype=float)
        if times.size < 2 or np.any(np.diff(times) <= 0):
            raise ValueError("target series needs strictly increasing time stamps")
        self.times = times
        self.amplitudes = amplitudes
        self.still_depth = float(still_depth)
        self._interp = PchipInterpolator(times, amplitudes)

    @classmethod
    def from_csv(cls, path, still_depth: float,
                 align_first_crest: bool = True) -> "TargetSeries":
        """Two-column CSV (t, A*); header row optional.

        With align_first_crest the times are shifted so the first local
        maximum above half the series peak sits at t = 0.
        """
        ts, amps = [], []
        with open(path, newline="") as f:
            for row in csv.reader(f):
                if not row:
                    continue
                try:
                    ts.append(float(row[0]))
                    amps.append(float(row[1]))
                except ValueError:
                    if ts:
                        raise
        t = np.array(ts)
        a = np.array(amps)
        if align_first_crest and a.size >= 3:
            level = 0.5 * a.max()
            interior = np.nonzero((a[1:-1] >= a[:-2]) & (a[1:-1] >= a[2:])
                                  & (a[1:-1] > level))[0]
            if interior.size:
                t = t - t[interior[0] + 1]
        return cls(t, a, still_depth)

    @classmethod
    def synthetic_sine(cls, still_depth: float, amplitude: float = 0.01,
                       period: float = 2.02, t_max: float = 60.0,
                       samples_per_period: int = 64) -> "TargetSeries":
        """Regular-wave fallback A*(t) = a sin(2 pi t / T) when no gauge file
        is supplied (a = 0.01 m, T = 2.02 s by default)."""
        n = max(int(np.ceil(t_max / period * samples_per_period)), 2)
        t = np.linspace(0.0, t_max, n + 1)
        return cls(t, amplitude * np.sin(2.0 * np.pi * t / period), still_depth)

    def amplitude(self, t) -> np.ndarray:
        t = np.clip(np.asarray(t, dtype=float), self.times[0], self.times[-1])
        return self._interp(t)


def relaxation_weight(d, L_rel: float):
    """Blend weight m = sqrt(1 - (d / L_rel)^2) for distance d into the zone."""
    d = np.asarray(d, dtype=float)
    if np.any(d < 0.0) or np.any(d > L_rel):
        raise ValueError(f"distance must lie in [0, {L_rel}]")
    return np.sqrt(1.0 - (d / L_rel) ** 2)


def blend_state(numerical: np.ndarray, target: np.ndarray, m) -> np.ndarray:
    """Convex combination m * numerical + (1 - m) * target, componentwise."""
    m = np.asarray(m, dtype=float)
    if np.any(m < 0.0) or np.any(m > 1.0):
        raise ValueError("blend weight must lie in [0, 1]")
    return m * numerical + (1.0 - m) * target


def wavemaker_target(t, series: TargetSeries, params: PhysParams,
                     ncomp: int = 6) -> np.ndarray:
    """Inflow target state: h* = A*(t) + H, u* = sqrt(gH) A*/h*, rest else.

    Returns the conserved state (h*, h* u*, 0, ...) of length ncomp.
    """
    H = series.still_depth
    a = float(series.amplitude(t))
    hstar = a + H
    state = np.zeros(ncomp)
    state[0] = hstar
    state[1] = np.sqrt(params.g * H) * a  # h* u*
    return state


def absorbing_target(t, still_depth: float, params: PhysParams,
                     ncomp: int = 6) -> np.ndarray:
    """Absorbing target: undisturbed rest state h* = H, everything else zero."""
    state = np.zeros(ncomp)
    state[0] = still_depth
    return state


@dataclass
class RelaxationZone:
    """Relaxation band outside the physical domain on one side.

    side: 'left' or 'right'; boundary_x: the adjoining physical-domain
    boundary; length: L_rel; target: callable t -> conserved state.
    """

    side: str
    boundary_x: float
    length: float
    target: object

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise ValueError("zone side must be 'left' or 'right'")
        if self.length <= 0.0:
            raise ValueError("relaxation length must be positive")

    def cell_weights(self, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Indices of cells inside the zone and their blend weights m_i.

        d_i is the distance from the element barycenter to the adjoining
        physical boundary, so m -> 1 at the boundary and 0 at the outer edge.
        """
        d = (self.boundary_x - centers) if self.side == "left" else (centers - self.boundary_x)
        inside = np.nonzero((d > 0.0) & (d <= self.length))[0]
        return inside, relaxation_weight(d[inside], self.length)

    def apply(self, u: np.ndarray, centers: np.ndarray, t: float) -> None:
        """Blend zone cells of a 1D nodal solution toward the target, in place."""
        idx, m = self.cell_weights(centers)
        if not idx.size:
            return
        target = np.asarray(self.target(t), dtype=float)
        u[idx] = m[:, None, None] * u[idx] + (1.0 - m)[:, None, None] * target
