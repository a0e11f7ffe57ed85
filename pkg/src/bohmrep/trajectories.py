"""Bohm trajectories ``dq/dt = j_q / P(q)`` and shadow phase spaces."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .currents import CurrentField
from .grids import NODE_THRESHOLD, Grid1D


@dataclass
class VelocityField:
    """Velocity ``v = j / P`` on a grid at a sequence of times; masked samples are NaN."""

    grid: Grid1D
    times: np.ndarray
    v: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        self.times = np.atleast_1d(np.asarray(self.times, dtype=float))
        self.v = np.atleast_2d(np.asarray(self.v, dtype=float))
        self.mask = np.atleast_2d(np.asarray(self.mask, dtype=bool))
        if self.v.shape != (self.times.size, self.grid.n_points) or self.mask.shape != self.v.shape:
            raise ValueError("velocity samples do not match (times, grid)")
        self.v = np.where(self.mask, np.nan, self.v)

    @classmethod
    def constant_in_time(cls, grid: Grid1D, v: np.ndarray, t0: float, t1: float, mask=None) -> "VelocityField":
        v = np.asarray(v, dtype=float)
        mask = np.zeros(v.shape, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
        return cls(grid, [t0, t1], np.stack([v, v]), np.stack([mask, mask]))


def velocity_field(current: CurrentField, density, threshold: float = NODE_THRESHOLD) -> VelocityField:
    """``v = j / P`` where ``P >= threshold^2 * max P`` (the node mask on ``R``), masked elsewhere."""
    density = np.atleast_2d(np.asarray(density, dtype=float))
    if density.shape != current.j.shape:
        raise ValueError(f"density shape {density.shape} does not match current {current.j.shape}")
    mask = density < threshold**2 * np.max(density, axis=-1, keepdims=True)
    mask = mask | current.mask | ~np.isfinite(current.j)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.where(mask, np.nan, current.j / np.where(mask, 1.0, density))
    return VelocityField(current.grid, current.times, v, mask)


@dataclass
class TrajectoryBundle:
    """Integrated curves ``paths[seed, time]``.

    ``terminated[i]`` is set when seed ``i`` entered a masked neighbourhood or
    left the grid; its path is NaN from that step on and ``reasons[i]`` says why.
    ``beable_paths`` holds the conjugate beable sampled along each path when a
    beable field was supplied.
    """

    representation: str
    seeds: np.ndarray
    times: np.ndarray
    paths: np.ndarray
    terminated: np.ndarray
    reasons: list[str] = field(default_factory=list)
    beable_paths: np.ndarray | None = None

    def max_step(self) -> float:
        steps = np.abs(np.diff(self.paths, axis=1))
        return float(np.nanmax(steps)) if np.isfinite(steps).any() else 0.0

    def ordered(self) -> bool:
        """True when seeds sorted at t0 stay sorted at every time (alive paths only)."""
        order = np.argsort(self.seeds)
        p = self.paths[order]
        d = np.diff(p, axis=0)
        return bool(np.all(d[np.isfinite(d)] > 0))


def _lagrange_weights(s: np.ndarray) -> np.ndarray:
    """Cubic Lagrange weights on nodes -1, 0, 1, 2 at offset ``s`` in [0, 1)."""
    return np.stack(
        [
            -s * (s - 1.0) * (s - 2.0) / 6.0,
            (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
            -(s + 1.0) * s * (s - 2.0) / 2.0,
            (s + 1.0) * s * (s - 1.0) / 6.0,
        ]
    )


def sample(values: np.ndarray, grid: Grid1D, q: np.ndarray) -> np.ndarray:
    """Four-point cubic interpolation of one slice at ``q``.

    Returns NaN where the stencil leaves the grid or touches a NaN sample.
    """
    q = np.asarray(q, dtype=float)
    finite = np.isfinite(q)
    u = np.where(finite, (q - grid.origin) / grid.spacing, 0.0)
    base = np.floor(u).astype(int)
    s = u - base
    idx = base[None, :] + np.arange(-1, 3)[:, None]
    inside = (idx[0] >= 0) & (idx[-1] < grid.n_points) & finite
    safe = np.clip(idx, 0, grid.n_points - 1)
    out = np.sum(_lagrange_weights(s) * values[safe], axis=0)
    return np.where(inside, out, np.nan)


def _field_at(vfield: VelocityField, q: np.ndarray, t: float) -> np.ndarray:
    times = vfield.times
    if t <= times[0]:
        return sample(vfield.v[0], vfield.grid, q)
    if t >= times[-1]:
        return sample(vfield.v[-1], vfield.grid, q)
    k = int(np.searchsorted(times, t, side="right") - 1)
    w = (t - times[k]) / (times[k + 1] - times[k])
    a = sample(vfield.v[k], vfield.grid, q)
    if w == 0.0:
        return a
    b = sample(vfield.v[k + 1], vfield.grid, q)
    return (1.0 - w) * a + w * b


def integrate(
    vfield: VelocityField,
    seeds,
    dt: float,
    representation: str | None = None,
    t_final: float | None = None,
    beable: np.ndarray | None = None,
) -> TrajectoryBundle:
    """Classic fourth-order Runge-Kutta transport of ``seeds`` through ``vfield``.

    The field is interpolated with four-point Lagrange polynomials in ``q`` and
    linearly in ``t``.  A trajectory whose stencil touches a masked sample, or
    which leaves the grid, is stopped and flagged rather than extrapolated.
    Output times are ``t0 + k*dt`` up to ``t_final`` (default: last field time).
    """
    seeds = np.asarray(seeds, dtype=float).ravel()
    if not dt > 0:
        raise ValueError("dt must be positive")
    t0 = float(vfield.times[0])
    t_end = float(vfield.times[-1] if t_final is None else t_final)
    if t_end > vfield.times[-1] + 1e-12 and vfield.times.size > 1:
        raise ValueError("t_final beyond the velocity field")
    v0 = sample(vfield.v[0], vfield.grid, seeds)
    bad = np.flatnonzero(~np.isfinite(v0))
    if bad.size:
        raise ValueError(
            f"{bad.size} seed(s) lie on masked or out-of-grid samples, first at q={seeds[bad[0]]:.6g}"
        )
    n_steps = int(round((t_end - t0) / dt))
    times = t0 + dt * np.arange(n_steps + 1)
    paths = np.full((seeds.size, n_steps + 1), np.nan)
    paths[:, 0] = seeds
    alive = np.ones(seeds.size, dtype=bool)
    reasons = [""] * seeds.size
    q = seeds.copy()
    for n in range(n_steps):
        t = times[n]
        k1 = _field_at(vfield, q, t)
        k2 = _field_at(vfield, q + 0.5 * dt * k1, t + 0.5 * dt)
        k3 = _field_at(vfield, q + 0.5 * dt * k2, t + 0.5 * dt)
        k4 = _field_at(vfield, q + dt * k3, t + dt)
        q_new = q + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        stopped = alive & ~np.isfinite(q_new)
        for i in np.flatnonzero(stopped):
            reasons[i] = f"entered masked or out-of-grid region at t={t:.6g}"
        alive &= np.isfinite(q_new)
        q = np.where(alive, q_new, np.nan)
        paths[:, n + 1] = q
    bundle = TrajectoryBundle(
        representation or vfield.grid.kind, seeds, times, paths, ~alive, reasons
    )
    if beable is not None:
        bundle.beable_paths = sample_along(beable, vfield, bundle)
    return bundle


def sample_along(values: np.ndarray, vfield: VelocityField, bundle: TrajectoryBundle) -> np.ndarray:
    """Interpolate a ``(T, N)`` field, sampled like ``vfield``, along every path."""
    values = np.atleast_2d(np.asarray(values, dtype=float))
    if values.shape != vfield.v.shape:
        raise ValueError("field samples do not match the velocity field")
    proxy = VelocityField(vfield.grid, vfield.times, values, ~np.isfinite(values))
    out = np.full(bundle.paths.shape, np.nan)
    for n, t in enumerate(bundle.times):
        out[:, n] = _field_at(proxy, bundle.paths[:, n], t)
    return out


@dataclass
class ShadowPhaseSpace:
    """Per-seed ``(x, p)`` series; ``gaps`` marks samples with a masked beable."""

    representation: str
    times: np.ndarray
    x: np.ndarray
    p: np.ndarray
    gaps: np.ndarray


def shadow_phase_space(bundle: TrajectoryBundle, beable_field: np.ndarray, vfield: VelocityField) -> ShadowPhaseSpace:
    """Pair each path with the conjugate beable along it.

    Position construction gives ``(x(t), p_r(x(t), t))``, momentum construction
    ``(x_r(p(t), t), p(t))``.
    """
    beable = sample_along(beable_field, vfield, bundle)
    gaps = ~np.isfinite(beable) & np.isfinite(bundle.paths)
    if bundle.representation == "position":
        return ShadowPhaseSpace("position", bundle.times, bundle.paths, beable, gaps)
    return ShadowPhaseSpace("momentum", bundle.times, beable, bundle.paths, gaps)


def quantile_seeds(density: np.ndarray, grid: Grid1D, n: int) -> np.ndarray:
    """``n`` seeds at the mid-quantiles ``(i + 1/2)/n`` of a sampled density.

    Deterministic stand-in for random sampling: the empirical distribution of
    the seeds matches the density up to ``O(1/n)`` with no sampling noise.
    """
    density = np.asarray(density, dtype=float)
    edges = grid.origin + grid.spacing * (np.arange(grid.n_points + 1) - 0.5)
    cdf = np.concatenate([[0.0], np.cumsum(density) * grid.spacing])
    cdf = cdf / cdf[-1]
    levels = (np.arange(n) + 0.5) / n
    return np.interp(levels, cdf, edges)


def equivariance_error(positions: np.ndarray, density: np.ndarray, grid: Grid1D, n_bins: int = 60, span: tuple[float, float] | None = None) -> float:
    """Relative RMS difference between a seed histogram and the bin-averaged density.

    The density is integrated over each bin so both sides are bin
    probabilities; the result is ``||hist - ref|| / ||ref||``.
    """
    positions = np.asarray(positions, dtype=float)
    positions = positions[np.isfinite(positions)]
    if span is None:
        q = grid.points
        cdf = np.cumsum(density) * grid.spacing
        lo = np.interp(1e-4, cdf, q)
        hi = np.interp(1.0 - 1e-4, cdf, q)
        span = (lo, hi)
    edges = np.linspace(span[0], span[1], n_bins + 1)
    hist, _ = np.histogram(positions, bins=edges)
    hist = hist / positions.size
    fine = np.linspace(span[0], span[1], 32 * n_bins + 1)
    dens_fine = np.interp(fine, grid.points, density)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (dens_fine[1:] + dens_fine[:-1]) * np.diff(fine))])
    ref = np.diff(cum[:: 32])
    return float(np.linalg.norm(hist - ref) / np.linalg.norm(ref))
