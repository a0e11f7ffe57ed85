"""Time evolution under ``H = p^2/2m + V(x)`` and closed-form reference states."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .airy import airy_ai
from .grids import Grid1D, WaveField, spectral_derivative, transform

PotentialKind = Literal["free", "linear", "harmonic", "cubic", "tabulated"]

#: Probability allowed in the outer 5% of the domain before a run is flagged.
BOUNDARY_PROBABILITY = 1e-10


@dataclass(frozen=True)
class PotentialSpec:
    """One of the worked-example potentials plus an optional constant ``offset``.

    ``strength`` is ``a`` for ``linear`` (V = a x), ``K`` for ``harmonic``
    (V = K x^2 / 2) and ``A`` for ``cubic`` (V = A x^3).
    """

    kind: PotentialKind = "free"
    strength: float = 0.0
    mass: float = 1.0
    offset: float = 0.0
    values: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("free", "linear", "harmonic", "cubic", "tabulated"):
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if self.kind == "harmonic" and not self.strength > 0:
            raise ValueError("harmonic potential requires K > 0")
        if self.kind == "tabulated":
            if self.values is None:
                raise ValueError("tabulated potential needs values")
            vals = np.asarray(self.values, dtype=float)
            if not np.all(np.isfinite(vals)):
                raise ValueError("tabulated potential values must be finite")
            object.__setattr__(self, "values", vals)

    @classmethod
    def free(cls, mass: float = 1.0) -> "PotentialSpec":
        return cls("free", 0.0, mass)

    @classmethod
    def linear(cls, a: float, mass: float = 1.0) -> "PotentialSpec":
        return cls("linear", a, mass)

    @classmethod
    def harmonic(cls, K: float, mass: float = 1.0) -> "PotentialSpec":
        return cls("harmonic", K, mass)

    @classmethod
    def cubic(cls, A: float, mass: float = 1.0) -> "PotentialSpec":
        return cls("cubic", A, mass)

    @classmethod
    def tabulated(cls, values, mass: float = 1.0) -> "PotentialSpec":
        return cls("tabulated", 0.0, mass, values=np.asarray(values, dtype=float))

    def shifted(self, v0: float) -> "PotentialSpec":
        return PotentialSpec(self.kind, self.strength, self.mass, self.offset + v0, self.values)

    @property
    def omega(self) -> float:
        if self.kind != "harmonic":
            raise ValueError("omega is only defined for the harmonic potential")
        return math.sqrt(self.strength / self.mass)

    def polynomial(self) -> list[tuple[float, int]]:
        """``V(x)`` as ``[(coefficient, power), ...]`` (offset included as power 0)."""
        if self.kind == "tabulated":
            raise ValueError("tabulated potentials have no polynomial form")
        terms = {"free": [], "linear": [(self.strength, 1)], "harmonic": [(0.5 * self.strength, 2)],
                 "cubic": [(self.strength, 3)]}[self.kind]
        if self.offset:
            terms = terms + [(self.offset, 0)]
        return terms

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "tabulated":
            if self.values.shape != x.shape:
                raise ValueError("tabulated values do not match the grid")
            return self.values + self.offset
        out = np.full_like(x, self.offset)
        for c, k in self.polynomial():
            if k:
                out = out + c * x**k
        return out

    def force(self, x) -> np.ndarray:
        """``-dV/dx``."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for c, k in self.polynomial():
            if k:
                out = out - k * c * x ** (k - 1)
        return out


@dataclass
class EvolutionResult:
    field: WaveField
    dt: float
    method_order: int = 2
    max_norm_drift: float = 0.0
    warnings: list[str] = field(default_factory=list)


def _as_field(psi0, grid: Grid1D | None) -> WaveField:
    if isinstance(psi0, WaveField):
        if len(psi0) != 1:
            raise ValueError("initial field must be a single slice")
        return psi0
    if grid is None:
        raise ValueError("a grid is required when psi0 is an array")
    return WaveField(grid, [0.0], np.asarray(psi0, dtype=complex))


def split_step_evolve(
    psi0,
    potential: PotentialSpec,
    dt: float,
    n_steps: int,
    grid: Grid1D | None = None,
    save_every: int = 1,
) -> EvolutionResult:
    """Second-order symmetric split-step evolution on a position grid.

    Each step is a half kick ``exp(-i V dt/2)``, a free drift applied exactly
    in the momentum representation, and another half kick.  Slices are stored
    every ``save_every`` steps starting with the initial one.
    """
    start = _as_field(psi0, grid)
    grid = start.grid
    if grid.kind != "position":
        raise ValueError("split_step_evolve works on a position grid")
    if not dt > 0 or n_steps < 0:
        raise ValueError("dt must be positive and n_steps non-negative")
    norm0 = float(start.norms()[0])
    if abs(norm0 - 1.0) > 1e-8:
        raise ValueError(f"initial state is not normalized (norm {norm0:.6g})")

    x = grid.points
    pgrid = grid.conjugate()
    half_kick = np.exp(-0.5j * dt * potential(x))
    drift = np.exp(-0.5j * dt * pgrid.points**2 / potential.mass)

    psi = start.amplitudes[0].copy()
    t0 = float(start.times[0])
    saved = [psi.copy()]
    times = [t0]
    drift_max = 0.0
    edge = max(1, grid.n_points // 20)
    boundary = _boundary_probability(psi, grid, edge)
    for step in range(1, n_steps + 1):
        psi = half_kick * psi
        psi = transform(drift * transform(psi, grid), pgrid)
        psi = half_kick * psi
        if step % save_every == 0 or step == n_steps:
            saved.append(psi.copy())
            times.append(t0 + step * dt)
            norm = float(grid.integrate(np.abs(psi) ** 2))
            drift_max = max(drift_max, abs(norm - norm0))
            boundary = max(boundary, _boundary_probability(psi, grid, edge))

    warnings = []
    if boundary > BOUNDARY_PROBABILITY:
        warnings.append(
            f"boundary contamination: probability {boundary:.2e} within the outer 5% of the "
            f"{potential.kind} domain"
        )
    field_out = WaveField(grid, np.array(times), np.array(saved), normalized=False)
    return EvolutionResult(field_out, dt, 2, drift_max, warnings)


def _boundary_probability(psi: np.ndarray, grid: Grid1D, edge: int) -> float:
    dens = np.abs(psi) ** 2
    return float((dens[:edge].sum() + dens[-edge:].sum()) * grid.spacing)


def gaussian_width(delta_x: float, m: float, t) -> np.ndarray:
    """``D(t) = dx^2 + t^2 / (4 m^2 dx^2)``, the position variance of the free packet."""
    t = np.asarray(t, dtype=float)
    return delta_x**2 + t**2 / (4.0 * m**2 * delta_x**2)


def analytic_gaussian(
    rep: Literal["position", "momentum"],
    delta_x: float,
    m: float,
    t,
    grid: Grid1D,
    boundary_tol: float = 1e-12,
) -> WaveField:
    """Free Gaussian packet centred at the origin with zero mean momentum.

    ``t`` may be a scalar or a sequence of times; one slice is returned per time.
    """
    if not delta_x > 0 or not m > 0:
        raise ValueError("delta_x and m must be positive")
    if grid.kind != rep:
        raise ValueError(f"grid kind {grid.kind!r} does not match representation {rep!r}")
    times = np.atleast_1d(np.asarray(t, dtype=float))
    q = grid.points
    rows = []
    for ti in times:
        if rep == "momentum":
            amp = (2.0 * delta_x**2 / np.pi) ** 0.25
            row = amp * np.exp(-(q**2) * delta_x**2) * np.exp(-0.5j * q**2 * ti / m)
            width = 1.0 / (2.0 * delta_x)
            peak = amp
        else:
            D = gaussian_width(delta_x, m, ti)
            phase = q**2 * ti / (8.0 * m * delta_x**2 * D) - 0.5 * np.arctan(ti / (2.0 * m * delta_x**2))
            peak = (2.0 * np.pi * D) ** -0.25
            row = peak * np.exp(-(q**2) / (4.0 * D) + 1j * phase)
            width = math.sqrt(D)
        edge = max(abs(q[0]), abs(q[-1]))
        lo = min(abs(q[0]), abs(q[-1]))
        if peak * math.exp(-(lo**2) / (4.0 * width**2)) > boundary_tol:
            need = 2.0 * width * math.sqrt(math.log(peak / boundary_tol))
            raise ValueError(
                f"grid too narrow for the Gaussian at t={ti:g}: boundary amplitude exceeds "
                f"{boundary_tol:g}; need |q| up to {need:.3g} on both sides (have {lo:.3g}..{edge:.3g})"
            )
        rows.append(row)
    return WaveField(grid, times, np.array(rows))


def gaussian_quantum_potential(x, delta_x: float, m: float, t: float) -> np.ndarray:
    """Closed-form x-representation quantum potential of the free packet."""
    D = gaussian_width(delta_x, m, t)
    x = np.asarray(x, dtype=float)
    return 1.0 / (4.0 * m * D) - x**2 / (8.0 * m * D**2)


def gaussian_velocity(x, delta_x: float, m: float, t) -> np.ndarray:
    """Bohm velocity ``j_x / P`` of the free packet."""
    D = gaussian_width(delta_x, m, t)
    return np.asarray(x) * t / (4.0 * m**2 * delta_x**2 * D)


def harmonic_ground(m: float, K: float, grid: Grid1D, t: float = 0.0) -> WaveField:
    """Ground state of ``p^2/2m + K x^2/2`` in the grid's representation.

    The slice carries the stationary phase ``exp(-i w t / 2)``.
    """
    if not (m > 0 and K > 0):
        raise ValueError("m and K must be positive")
    omega = math.sqrt(K / m)
    width = 1.0 / math.sqrt(m * omega) if grid.kind == "position" else math.sqrt(m * omega)
    if width / grid.spacing < 16:
        raise ValueError(
            f"grid spacing {grid.spacing:.3g} does not resolve the ground-state width {width:.3g} "
            "with at least 16 points"
        )
    q = grid.points
    if grid.kind == "position":
        row = (m * omega / np.pi) ** 0.25 * np.exp(-0.5 * m * omega * q**2)
    else:
        row = (1.0 / (np.pi * m * omega)) ** 0.25 * np.exp(-0.5 * q**2 / (m * omega))
    return WaveField(grid, [t], row * np.exp(-0.5j * omega * t))


def coherent_state(m: float, K: float, x0: float, p0: float, grid: Grid1D) -> WaveField:
    """Displaced harmonic ground state with mean position ``x0`` and momentum ``p0``."""
    omega = math.sqrt(K / m)
    x = grid.points
    if grid.kind != "position":
        raise ValueError("coherent_state is built on a position grid")
    row = (m * omega / np.pi) ** 0.25 * np.exp(-0.5 * m * omega * (x - x0) ** 2 + 1j * p0 * (x - 0.5 * x0))
    return WaveField(grid, [0.0], row)


def coherent_center(m: float, K: float, x0: float, p0: float, t) -> tuple[np.ndarray, np.ndarray]:
    """Classical orbit followed by the coherent-state centre."""
    omega = math.sqrt(K / m)
    t = np.asarray(t, dtype=float)
    x = x0 * np.cos(omega * t) + p0 / (m * omega) * np.sin(omega * t)
    p = p0 * np.cos(omega * t) - m * omega * x0 * np.sin(omega * t)
    return x, p


def smooth_window(x: np.ndarray, start: float, stop: float, width: float) -> np.ndarray:
    """Analytic taper equal to 1 on ``[start, stop]`` up to ``erfc`` tails of scale ``width``."""
    from scipy.special import erf

    return 0.5 * (erf((x - start) / width) - erf((x - stop) / width))


def airy_scale(a: float, m: float) -> float:
    """``A = (2 m a)^(1/3)``."""
    return (2.0 * m * a) ** (1.0 / 3.0)


def airy_stationary(a: float, m: float, grid: Grid1D, taper: float = 0.1, taper_width: float | None = None) -> WaveField:
    """Real stationary state ``C Ai(A x)`` of the linear potential ``V = a x``.

    The state is not normalizable, so it is multiplied by a smooth window that
    is 1 on the central ``1 - 2*taper`` fraction of the grid and is then
    normalized on the grid.
    """
    if not a > 0 or not m > 0:
        raise ValueError("a and m must be positive")
    x = grid.points
    lo, hi = interior_bounds(grid, taper)
    width = taper_width if taper_width is not None else (hi - lo) * taper / 12.0
    start = lo - 6.0 * width
    stop = hi + 6.0 * width
    window = smooth_window(x, start, stop, width)
    psi = airy_ai(airy_scale(a, m) * x) * window
    psi = psi / math.sqrt(grid.integrate(np.abs(psi) ** 2))
    return WaveField(grid, [0.0], psi.astype(complex))


def interior_bounds(grid: Grid1D, taper: float = 0.1) -> tuple[float, float]:
    """Bounds of the central ``1 - 2*taper`` fraction of the grid."""
    x = grid.points
    span = x[-1] - x[0]
    return x[0] + taper * span, x[-1] - taper * span


ROTATION = np.exp(2j * np.pi / 3)


def airy_components(a: float, m: float, x: np.ndarray) -> dict[str, np.ndarray]:
    """Split ``Ai(A x)`` into its two rotated-argument components.

    ``Ai(z) + w* Ai(w* z) + w Ai(w z) = 0`` with ``w = exp(2 pi i / 3)``, so
    ``Ai(z) = -(incident + reflected)``.  Returned values and their
    ``x``-derivatives are unnormalized (scale set by ``Ai`` itself).
    """
    A = airy_scale(a, m)
    z = A * np.asarray(x, dtype=float)
    real, real_p = airy_ai(z, derivative=True)
    w = ROTATION
    out = {"real": real.astype(complex), "real_prime": A * real_p.astype(complex)}
    for name, rot in (("incident", np.conj(w)), ("reflected", w)):
        val, der = airy_ai(rot * z, derivative=True)
        out[name] = -rot * val
        out[name + "_prime"] = -rot * rot * A * der
    return out


def airy_identity_residual(a: float, m: float, x: np.ndarray) -> float:
    """Largest relative size of ``Ai + w* Ai(w* z) + w Ai(w z)`` on ``x``.

    Scaled by the sum of the three term magnitudes at each point, so the test
    is insensitive to the exponential growth of the rotated components.
    """
    c = airy_components(a, m, x)
    total = c["real"] - c["incident"] - c["reflected"]
    scale = np.abs(c["real"]) + np.abs(c["incident"]) + np.abs(c["reflected"])
    return float(np.max(np.abs(total) / scale))


def second_derivative_residual(psi: np.ndarray, grid: Grid1D, A: float, region: np.ndarray) -> float:
    """``max |psi'' - A^3 x psi|`` on ``region`` (boolean mask)."""
    d2 = spectral_derivative(psi, grid, 2)
    res = d2 - A**3 * grid.points * psi
    return float(np.max(np.abs(res[region])))


def expectation_energy(psi: np.ndarray, grid: Grid1D, potential: PotentialSpec) -> float:
    """``<H>`` for one slice in either representation."""
    if grid.kind == "position":
        phi = transform(psi, grid)
        p = grid.conjugate().points
        kinetic = grid.conjugate().integrate(np.abs(phi) ** 2 * p**2) / (2.0 * potential.mass)
        pot = grid.integrate(np.abs(psi) ** 2 * potential(grid.points))
    else:
        p = grid.points
        kinetic = grid.integrate(np.abs(psi) ** 2 * p**2) / (2.0 * potential.mass)
        x_psi = transform(psi, grid)
        xgrid = grid.conjugate()
        pot = xgrid.integrate(np.abs(x_psi) ** 2 * potential(xgrid.points))
    return float(kinetic + pot)


def l2_distance(a: np.ndarray, b: np.ndarray, grid: Grid1D) -> float:
    return float(np.sqrt(grid.integrate(np.abs(np.asarray(a) - np.asarray(b)) ** 2)))


def sample_indices(n_total: int, samples: Sequence[int] | int) -> np.ndarray:
    if isinstance(samples, int):
        return np.unique(np.linspace(0, n_total - 1, samples).round().astype(int))
    return np.asarray(samples, dtype=int)
