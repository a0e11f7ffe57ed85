"""Scalar and vector Aharonov-Bohm, Aharonov-Casher and Berry phases.

Line integrals use composite Gauss-Legendre quadrature on each straight
segment of a polyline path.  The Berry phase uses the discrete overlap
product, which is invariant under per-sample phase changes by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate as spi

FieldFunction = Callable[[np.ndarray], np.ndarray]

CLOSURE_TOL = 1e-12
MIN_OVERLAP = 0.5


def wrap_phase(total: float) -> tuple[float, int]:
    """Split a phase into its principal value in ``(-pi, pi]`` and a winding count."""
    principal = math.remainder(total, 2.0 * math.pi)
    if principal <= -math.pi:
        principal += 2.0 * math.pi
    winding = int(round((total - principal) / (2.0 * math.pi)))
    return principal, winding


def circular_distance(a: float, b: float) -> float:
    """Distance between two phases on the circle, in ``[0, pi]``."""
    return abs(math.remainder(a - b, 2.0 * math.pi))


@dataclass(frozen=True)
class PathSpec:
    """Polyline through ``positions`` (shape ``(n, 3)``) visited at ``times``."""

    positions: np.ndarray
    times: np.ndarray
    closed: bool = False

    def __init__(self, positions, times=None, closed: bool = False):
        pos = np.asarray(positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] not in (2, 3):
            raise ValueError("positions must have shape (n, 2) or (n, 3)")
        if pos.shape[1] == 2:
            pos = np.column_stack([pos, np.zeros(len(pos))])
        if len(pos) < 2:
            raise ValueError("a path needs at least two samples")
        t = np.arange(len(pos), dtype=float) if times is None else np.asarray(times, dtype=float)
        if t.shape != (len(pos),) or np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly ascending, one per sample")
        if closed and np.linalg.norm(pos[0] - pos[-1]) > CLOSURE_TOL:
            raise ValueError("closed path must end where it starts")
        if np.any(np.linalg.norm(np.diff(pos, axis=0), axis=1) == 0):
            raise ValueError("degenerate path: repeated consecutive points")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "closed", bool(closed))

    @classmethod
    def circle(cls, radius: float, n: int = 64, center=(0.0, 0.0), reverse: bool = False) -> "PathSpec":
        return cls.ellipse(radius, radius, n, center, reverse)

    @classmethod
    def ellipse(cls, a: float, b: float, n: int = 64, center=(0.0, 0.0), reverse: bool = False) -> "PathSpec":
        theta = np.linspace(0.0, 2.0 * np.pi, n + 1)
        if reverse:
            theta = theta[::-1]
        pts = np.column_stack([center[0] + a * np.cos(theta), center[1] + b * np.sin(theta)])
        pts[-1] = pts[0]
        return cls(pts, closed=True)

    @classmethod
    def polygon(cls, vertices) -> "PathSpec":
        v = np.asarray(vertices, dtype=float)
        return cls(np.vstack([v, v[:1]]), closed=True)

    @classmethod
    def segment(cls, start, stop) -> "PathSpec":
        return cls(np.array([start, stop], dtype=float))


def line_integral(field: FieldFunction, path: PathSpec, nodes: int = 16, subdivisions: int = 4) -> float:
    """``integral F . dx`` along the polyline, Gauss-Legendre on each sub-segment."""
    s, w = np.polynomial.legendre.leggauss(nodes)
    s = 0.5 * (s + 1.0)
    w = 0.5 * w
    pieces = (np.arange(subdivisions)[:, None] + s[None, :]).ravel() / subdivisions
    weights = np.tile(w, subdivisions) / subdivisions
    a = path.positions[:-1]
    d = np.diff(path.positions, axis=0)
    pts = a[:, None, :] + pieces[None, :, None] * d[:, None, :]
    vals = np.asarray(field(pts.reshape(-1, 3)), dtype=float).reshape(pts.shape)
    if not np.all(np.isfinite(vals)):
        raise ValueError("field is not finite on the path")
    return float(np.einsum("sqk,sk,q->", vals, d, weights))


def ab_scalar_phase(V0, t0: float, t1: float) -> float:
    """``integral_{t0}^{t1} V0(t) dt`` by adaptive quadrature (constants exactly)."""
    if t1 < t0:
        raise ValueError("t1 must not precede t0")
    if not callable(V0):
        return float(V0) * (t1 - t0)
    val, _ = spi.quad(V0, t0, t1, epsabs=1e-13, epsrel=1e-13, limit=200)
    return float(val)


def ab_vector_phase(A: FieldFunction, e: float, path: PathSpec, **quad) -> float:
    """``e * integral A . dx`` along ``path``."""
    return e * line_integral(A, path, **quad)


def ac_phase(E: FieldFunction, mu, path: PathSpec, **quad) -> float:
    """``integral (E x mu) . dx``, the phase of a neutral moment ``mu`` moving through ``E``."""
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (3,):
        raise ValueError("mu must be a 3-vector")
    return line_integral(lambda r: np.cross(E(r), mu), path, **quad)


# -- field presets ------------------------------------------------------------


def _planar(r: np.ndarray, center) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    r = np.atleast_2d(np.asarray(r, dtype=float))
    x = r[:, 0] - center[0]
    y = r[:, 1] - center[1]
    return x, y, np.hypot(x, y)


def flux_line(flux: float, core_radius: float = 0.0, center=(0.0, 0.0)) -> FieldFunction:
    """Vector potential of a flux tube along ``z``.

    Outside the core ``A = flux / (2 pi rho)`` in the azimuthal direction;
    inside a core of radius ``r0 > 0`` the field is uniform, ``A = flux rho / (2 pi r0^2)``.
    """

    def A(r):
        x, y, rho = _planar(r, center)
        if core_radius > 0:
            mag_over_rho = np.where(rho >= core_radius, 1.0 / np.maximum(rho, 1e-300) ** 2, 1.0 / core_radius**2)
        else:
            mag_over_rho = 1.0 / rho**2
        scale = flux / (2.0 * np.pi) * mag_over_rho
        return np.column_stack([-y * scale, x * scale, np.zeros_like(x)])

    return A


def line_charge(density: float, core_radius: float = 0.0, center=(0.0, 0.0)) -> FieldFunction:
    """Electric field of a charged line along ``z`` (unit permittivity).

    ``E = density / (2 pi rho)`` radially outside; a uniformly charged core of
    radius ``r0 > 0`` gives ``E = density rho / (2 pi r0^2)`` inside.
    """

    def E(r):
        x, y, rho = _planar(r, center)
        if core_radius > 0:
            k = np.where(rho >= core_radius, 1.0 / np.maximum(rho, 1e-300) ** 2, 1.0 / core_radius**2)
        else:
            k = 1.0 / rho**2
        scale = density / (2.0 * np.pi) * k
        return np.column_stack([x * scale, y * scale, np.zeros_like(x)])

    return E


def uniform_field(vector) -> FieldFunction:
    """A spatially constant vector field."""
    v = np.asarray(vector, dtype=float)

    def F(r):
        r = np.atleast_2d(r)
        return np.broadcast_to(v, r.shape).copy()

    return F


def uniform_magnetic_potential(B) -> FieldFunction:
    """Symmetric-gauge potential ``A = B x r / 2`` of a uniform magnetic field."""
    B = np.asarray(B, dtype=float)
    return lambda r: 0.5 * np.cross(B, np.atleast_2d(r))


PRESETS: dict[str, Callable[..., FieldFunction]] = {
    "flux_line": flux_line,
    "line_charge": line_charge,
    "uniform_field": uniform_field,
    "uniform_magnetic": uniform_magnetic_potential,
}


def preset(name: str, **params) -> FieldFunction:
    try:
        return PRESETS[name](**params)
    except KeyError:
        raise ValueError(f"unknown field preset {name!r}; choose from {sorted(PRESETS)}") from None


# -- Stokes oracle ------------------------------------------------------------


def _curl_z(F: FieldFunction, pts: np.ndarray, h: np.ndarray) -> np.ndarray:
    """``(curl F)_z`` by fourth-order central differences with per-point steps ``h``."""
    ex = np.array([1.0, 0.0, 0.0])
    ey = np.array([0.0, 1.0, 0.0])
    hh = h[:, None]

    def d(direction, comp):
        f = lambda s: F(pts + s * hh * direction)[:, comp]
        return (-f(2) + 8 * f(1) - 8 * f(-1) + f(-2)) / (12.0 * h)

    return d(ex, 1) - d(ey, 0)


def stokes_flux(
    F: FieldFunction,
    radius: float,
    center=(0.0, 0.0),
    split: float | None = None,
    n_radial: int = 48,
    n_angular: int = 64,
    step: float = 1e-3,
) -> float:
    """Flux of ``curl F`` through the disk of ``radius`` in the ``z = 0`` plane.

    Independent of any line integral: the curl is differenced numerically and
    integrated with Gauss-Legendre in ``rho`` (split at ``split`` where the
    field has a kink) and the trapezoid rule in angle.  Difference steps shrink
    near the split so stencils do not straddle it.
    """
    edges = [0.0, radius] if split is None or not 0 < split < radius else [0.0, split, radius]
    x, w = np.polynomial.legendre.leggauss(n_radial)
    theta = 2.0 * np.pi * np.arange(n_angular) / n_angular
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        rho = 0.5 * (hi - lo) * (x + 1.0) + lo
        wr = 0.5 * (hi - lo) * w
        R, T = np.meshgrid(rho, theta, indexing="ij")
        pts = np.column_stack([center[0] + (R * np.cos(T)).ravel(), center[1] + (R * np.sin(T)).ravel(), np.zeros(R.size)])
        h = np.full(R.size, step)
        if split is not None:
            h = np.minimum(h, 0.2 * np.abs(R.ravel() - split))
        h = np.minimum(h, 0.2 * np.maximum(R.ravel(), 1e-12))
        curl = _curl_z(F, pts, h).reshape(R.shape)
        total += float(np.sum(curl * (R * wr[:, None])) * (2.0 * np.pi / n_angular))
    return total


# -- Berry phase ---------------------------------------------------------------


@dataclass(frozen=True)
class ParameterLoop:
    """Closed loop of parameter 3-vectors; the last sample repeats the first."""

    samples: np.ndarray
    closed: bool = True

    def __init__(self, samples, closed: bool = True):
        s = np.asarray(samples, dtype=float)
        if s.ndim != 2 or s.shape[1] != 3 or len(s) < 3:
            raise ValueError("samples must have shape (n >= 3, 3)")
        if closed and np.linalg.norm(s[0] - s[-1]) > CLOSURE_TOL:
            raise ValueError("closed loop must return to its start")
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "closed", bool(closed))

    @classmethod
    def latitude(cls, theta: float, n: int = 256, magnitude: float = 1.0, reverse: bool = False) -> "ParameterLoop":
        """Circle of constant polar angle ``theta`` traversed in increasing azimuth."""
        phi = np.linspace(0.0, 2.0 * np.pi, n + 1)
        if reverse:
            phi = phi[::-1]
        pts = magnitude * np.column_stack(
            [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.full_like(phi, np.cos(theta))]
        )
        pts[-1] = pts[0]
        return cls(pts)

    def reversed(self) -> "ParameterLoop":
        return ParameterLoop(self.samples[::-1], self.closed)


@dataclass(frozen=True)
class BerryPhase:
    """``total`` is the sum of step phases in the supplied gauge; ``principal`` lies in ``(-pi, pi]``."""

    principal: float
    total: float
    winding: int
    min_overlap: float


def berry_phase(eigenstate: Callable[[np.ndarray], np.ndarray], loop: ParameterLoop, states=None) -> BerryPhase:
    """Discrete Berry phase ``-arg prod <psi_j|psi_{j+1}>`` around a closed loop.

    ``states`` may supply precomputed state vectors (one per loop sample, the
    last repeating the first up to phase); otherwise ``eigenstate`` is called
    on every sample.  The principal value depends only on the rays, so any
    per-sample phase change leaves it unchanged.
    """
    if not loop.closed:
        raise ValueError("berry_phase needs a closed loop")
    if states is None:
        states = [eigenstate(b) for b in loop.samples[:-1]]
    else:
        states = list(states)[: len(loop.samples) - 1]
    vecs = [np.asarray(v, dtype=complex) / np.linalg.norm(v) for v in states]
    overlaps = np.array([np.vdot(vecs[i], vecs[(i + 1) % len(vecs)]) for i in range(len(vecs))])
    smallest = float(np.min(np.abs(overlaps)))
    if smallest < MIN_OVERLAP:
        raise ValueError(
            f"adjacent states nearly orthogonal (|overlap| = {smallest:.3f} < {MIN_OVERLAP}); refine the loop"
        )
    # rotate each overlap to unit modulus before multiplying to avoid underflow on long loops
    product = np.prod(overlaps / np.abs(overlaps))
    principal, _ = wrap_phase(-float(np.angle(product)))
    total = -float(np.sum(np.angle(overlaps)))
    _, winding = wrap_phase(total)
    return BerryPhase(principal, total, winding, smallest)


def spin_half_state(B) -> np.ndarray:
    """Spin-1/2 state aligned with ``B`` in the gauge ``(cos(t/2), exp(i f) sin(t/2))``."""
    B = np.asarray(B, dtype=float)
    r = np.linalg.norm(B)
    if r == 0:
        raise ValueError("field direction undefined for B = 0")
    theta = math.acos(max(-1.0, min(1.0, B[2] / r)))
    phi = math.atan2(B[1], B[0])
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])


PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


def spin_half_ground(B) -> np.ndarray:
    """Lowest eigenvector of ``-B . sigma`` from a numerical eigensolver (arbitrary phase)."""
    H = -np.tensordot(np.asarray(B, dtype=float), PAULI, axes=1)
    _, v = np.linalg.eigh(H)
    return v[:, 0]


def solid_angle_berry(theta: float) -> float:
    """Closed form ``-Omega/2 = -pi (1 - cos theta)`` for the aligned spin-1/2 state."""
    return -math.pi * (1.0 - math.cos(theta))
