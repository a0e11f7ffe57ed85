"""Uniform grids, the position/momentum change of representation, polar form
and local-expectation (beable) fields.

Conventions (hbar = 1):

* position -> momentum uses ``phi(p) = (2 pi)^-1/2 * integral exp(-i p x) psi(x) dx``
  discretised on the grid, so ``X`` acts on momentum amplitudes as ``i d/dp``;
* a momentum grid has a centred layout ``p_k = (k - N/2) dp`` with
  ``dp = 2 pi / (N dx)`` unless an explicit conjugate origin is supplied.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

Kind = Literal["position", "momentum"]

#: Relative amplitude below which a sample is treated as a node of psi.
NODE_THRESHOLD = 1e-6


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid1D:
    """Uniform sample grid ``q_j = origin + j*spacing`` for one representation.

    ``conjugate_origin`` fixes where the conjugate grid starts; ``None`` means
    the conjugate grid is centred on zero.  Keeping it on the grid makes the
    round trip position -> momentum -> position land on the original samples.
    """

    n_points: int
    origin: float
    spacing: float
    kind: Kind = "position"
    conjugate_origin: float | None = None

    def __post_init__(self):
        if self.kind not in ("position", "momentum"):
            raise ValueError(f"kind must be 'position' or 'momentum', got {self.kind!r}")
        if not _is_power_of_two(int(self.n_points)):
            raise ValueError(f"n_points must be a power of two, got {self.n_points}")
        if self.n_points < 64:
            raise ValueError(f"n_points must be at least 64, got {self.n_points}")
        if not self.spacing > 0:
            raise ValueError(f"spacing must be positive, got {self.spacing}")

    @classmethod
    def centered(cls, n_points: int, extent: float, kind: Kind = "position") -> "Grid1D":
        """Grid of ``n_points`` samples covering ``[-extent/2, extent/2)``."""
        spacing = extent / n_points
        return cls(n_points, -0.5 * n_points * spacing, spacing, kind)

    @classmethod
    def spanning(cls, n_points: int, start: float, stop: float, kind: Kind = "position") -> "Grid1D":
        """Grid of ``n_points`` samples covering ``[start, stop)``."""
        spacing = (stop - start) / n_points
        return cls(n_points, start, spacing, kind)

    @property
    def points(self) -> np.ndarray:
        return self.origin + self.spacing * np.arange(self.n_points)

    @property
    def extent(self) -> float:
        return self.n_points * self.spacing

    @property
    def conjugate_spacing(self) -> float:
        return 2.0 * np.pi / (self.n_points * self.spacing)

    def conjugate(self) -> "Grid1D":
        """The grid of the other representation, with the same sample count."""
        dq = self.conjugate_spacing
        origin = self.conjugate_origin
        if origin is None:
            origin = -0.5 * self.n_points * dq
        other = "momentum" if self.kind == "position" else "position"
        return Grid1D(self.n_points, origin, dq, other, conjugate_origin=self.origin)

    def integrate(self, values: np.ndarray, axis: int = -1) -> np.ndarray:
        return np.sum(values, axis=axis) * self.spacing


@dataclass
class WaveField:
    """Complex amplitudes on a grid at a sequence of times, shape ``(T, N)``."""

    grid: Grid1D
    times: np.ndarray
    amplitudes: np.ndarray
    normalized: bool = field(default=True, repr=False)

    def __post_init__(self):
        self.times = np.atleast_1d(np.asarray(self.times, dtype=float))
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim == 1:
            amps = amps[None, :]
        if amps.shape != (self.times.size, self.grid.n_points):
            raise ValueError(
                f"amplitudes shape {amps.shape} does not match (times, points) = "
                f"({self.times.size}, {self.grid.n_points})"
            )
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly ascending")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes contain NaN or Inf")
        self.amplitudes = amps
        if self.normalized:
            norms = self.norms()
            bad = np.abs(norms - 1.0) > 1e-8
            if bad.any():
                raise ValueError(f"slice(s) not normalized: max |norm - 1| = {np.max(np.abs(norms - 1)):.3e}")

    def norms(self) -> np.ndarray:
        return self.grid.integrate(np.abs(self.amplitudes) ** 2)

    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __len__(self) -> int:
        return self.times.size

    def __getitem__(self, index: int) -> np.ndarray:
        return self.amplitudes[index]

    @property
    def psi(self) -> np.ndarray:
        """The amplitudes of a single-time field as a 1-D array."""
        if self.times.size != 1:
            raise ValueError("psi is only defined for single-time fields; index the field instead")
        return self.amplitudes[0]


def _check_grid_values(values: np.ndarray, grid: Grid1D) -> np.ndarray:
    values = np.asarray(values)
    if values.shape[-1] != grid.n_points:
        raise ValueError(f"last axis has {values.shape[-1]} samples, grid has {grid.n_points}")
    return values


def transform(values: np.ndarray, grid: Grid1D) -> np.ndarray:
    """Unitary change of representation of samples on ``grid`` (last axis).

    Returns samples on ``grid.conjugate()``.  Position -> momentum uses the
    kernel ``exp(-i p x)``, momentum -> position ``exp(+i p x)``.
    """
    if not _is_power_of_two(grid.n_points):
        raise ValueError("transform requires a power-of-two grid")
    values = _check_grid_values(values, grid).astype(complex)
    target = grid.conjugate()
    n = grid.n_points
    j = np.arange(n)
    sign = -1.0 if grid.kind == "position" else 1.0
    # exp(sign*i*(t0 + k dt)(q0 + j dq)), with dt*dq = 2 pi / N.  Origins are
    # taken in sample units and the phases reduced mod N before exponentiating,
    # which is exact for centred grids and avoids huge arguments otherwise.
    r = target.origin / target.spacing
    s = grid.origin / grid.spacing
    k = np.arange(n)
    pre = np.exp(sign * 2j * np.pi * np.mod(r * j, n) / n)
    post = np.exp(sign * 2j * np.pi * np.mod((r + k) * s, n) / n)
    if sign < 0:
        core = np.fft.fft(values * pre, axis=-1)
    else:
        core = np.fft.ifft(values * pre, axis=-1) * n
    return core * post * grid.spacing / np.sqrt(2.0 * np.pi)


def to_conjugate(psi: WaveField) -> WaveField:
    """Change representation of every time slice of ``psi``.

    Norm is preserved to rounding and applying the map twice returns the
    original field on the original grid.
    """
    grid = psi.grid
    if not _is_power_of_two(grid.n_points):
        raise ValueError("to_conjugate requires a power-of-two grid")
    return WaveField(grid.conjugate(), psi.times.copy(), transform(psi.amplitudes, grid), normalized=psi.normalized)


def spectral_derivative(values: np.ndarray, grid: Grid1D, order: int = 1) -> np.ndarray:
    """``d^order/dq^order`` of samples on ``grid`` via the conjugate representation.

    On a position grid this multiplies by ``(i p)^order`` in momentum space; on
    a momentum grid by ``(-i x)^order`` in position space.  For odd orders on
    a centred conjugate grid the unpaired Nyquist mode is zeroed.
    """
    values = _check_grid_values(values, grid)
    conj = grid.conjugate()
    sign = 1.0 if grid.kind == "position" else -1.0
    factor = (sign * 1j * conj.points) ** order
    if order % 2 == 1 and np.isclose(conj.origin, -0.5 * grid.n_points * conj.spacing):
        # on a centred conjugate grid the first sample is the unpaired Nyquist mode
        factor = factor.copy()
        factor[0] = 0.0
    return transform(factor * transform(values, grid), conj)


def apply_conjugate_operator(values: np.ndarray, grid: Grid1D, power: int = 1) -> np.ndarray:
    """Apply ``P^power`` on a position grid or ``X^power`` on a momentum grid.

    The operator is diagonal in the conjugate representation, so the samples
    are transformed, multiplied by the conjugate coordinate and transformed back.
    """
    values = _check_grid_values(values, grid)
    conj = grid.conjugate()
    return transform(conj.points**power * transform(values, grid), conj)


@dataclass
class PolarField:
    """Amplitude ``R`` and unwrapped phase ``S`` of ``psi = R exp(iS)``.

    Arrays are 1-D for a single slice or ``(T, N)`` for a time series (then
    ``times`` is set and ``S`` is also continuous along time at every sample).
    ``node_mask`` flags samples whose amplitude is below the node threshold.
    """

    grid: Grid1D
    R: np.ndarray
    S: np.ndarray
    node_mask: np.ndarray
    times: np.ndarray | None = None
    source: np.ndarray | None = field(default=None, repr=False)

    @property
    def psi(self) -> np.ndarray:
        """The decomposed amplitudes.

        The original samples are returned when available: rebuilding from
        ``R`` and ``S`` puts the interpolated phase on node samples, which
        spoils spectral derivatives.
        """
        if self.source is not None:
            return self.source
        return self.R * np.exp(1j * self.S)

    @property
    def density(self) -> np.ndarray:
        return self.R**2

    def __len__(self) -> int:
        return 1 if self.R.ndim == 1 else self.R.shape[0]

    def __getitem__(self, index: int) -> "PolarField":
        if self.R.ndim == 1:
            raise IndexError("single-slice PolarField cannot be indexed")
        src = None if self.source is None else self.source[index]
        return PolarField(self.grid, self.R[index], self.S[index], self.node_mask[index], source=src)


def node_mask(R: np.ndarray, threshold: float = NODE_THRESHOLD) -> np.ndarray:
    R = np.asarray(R)
    peak = np.max(R, axis=-1, keepdims=True)
    return R < threshold * peak


def _unwrap_slice(psi: np.ndarray, mask: np.ndarray) -> np.ndarray:
    angle = np.angle(psi)
    good = np.flatnonzero(~mask)
    anchor = int(np.argmax(np.abs(psi)))
    pos = np.searchsorted(good, anchor)
    right = np.unwrap(angle[good[pos:]])
    left = np.unwrap(angle[good[: pos + 1][::-1]])[::-1]
    phase_good = np.concatenate([left[:-1], right])
    idx = np.arange(psi.size)
    return np.interp(idx, good, phase_good)


def polar_decompose(psi: np.ndarray, grid: Grid1D, threshold: float = NODE_THRESHOLD) -> PolarField:
    """Split a slice into amplitude and continuous phase.

    The phase is unwrapped outward from the sample of largest amplitude, where
    it lies in ``(-pi, pi]``; node samples are skipped and filled by linear
    interpolation of the phase.
    """
    psi = _check_grid_values(psi, grid)
    if psi.ndim != 1:
        raise ValueError("polar_decompose takes one slice; use polar_series for time series")
    R = np.abs(psi)
    if not np.any(R > 0):
        raise ValueError("cannot decompose an all-zero slice")
    mask = node_mask(R, threshold)
    return PolarField(grid, R, _unwrap_slice(psi, mask), mask, source=np.array(psi, dtype=complex))


def polar_series(field: WaveField, threshold: float = NODE_THRESHOLD) -> PolarField:
    """Polar form of every slice, with the phase also made continuous in time."""
    slices = [polar_decompose(row, field.grid, threshold) for row in field.amplitudes]
    R = np.stack([p.R for p in slices])
    S = np.stack([p.S for p in slices])
    if S.shape[0] > 1:
        S = np.unwrap(S, axis=0)
    mask = np.stack([p.node_mask for p in slices])
    return PolarField(field.grid, R, S, mask, times=field.times.copy(), source=field.amplitudes.copy())


def local_beable(
    psi: np.ndarray,
    grid: Grid1D,
    method: Literal["expectation", "phase"] = "expectation",
    threshold: float = NODE_THRESHOLD,
) -> np.ndarray:
    """Local expectation of the conjugate variable.

    On a position grid returns ``p_r(x) = Re[psi* P psi] / |psi|^2``, on a
    momentum grid ``x_r(p) = Re[phi* X phi] / |phi|^2``.  With
    ``method="phase"`` the same quantity is taken from the unwrapped phase
    instead (``dS/dx`` or ``-dS/dp``) using a sixth-order central difference.
    Node samples, and for the phase route samples whose stencil touches a
    node, are returned as NaN.
    """
    psi = _check_grid_values(psi, grid)
    if psi.ndim != 1:
        return np.stack([local_beable(row, grid, method, threshold) for row in psi])
    mask = node_mask(np.abs(psi), threshold)
    if method == "expectation":
        op = apply_conjugate_operator(psi, grid)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.real(np.conj(psi) * op) / np.abs(psi) ** 2
    elif method == "phase":
        polar = polar_decompose(psi, grid, threshold)
        grad, bad = _central_difference_6(polar.S, grid.spacing, mask)
        out = grad if grid.kind == "position" else -grad
        mask = mask | bad
    else:
        raise ValueError(f"unknown method {method!r}")
    out = np.where(mask, np.nan, out)
    return out


_D6 = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0


def _central_difference_6(f: np.ndarray, h: float, mask: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = f.size
    out = np.full(n, np.nan)
    out[3:-3] = sum(c * f[k : n - 6 + k] for k, c in enumerate(_D6)) / h
    bad = np.ones(n, dtype=bool)
    touched = np.convolve(mask.astype(int), np.ones(7, dtype=int), mode="same") > 0
    bad[3:-3] = touched[3:-3]
    return out, bad


def expectation(values: np.ndarray, grid: Grid1D, weights: np.ndarray) -> float:
    """``integral weights * |values|^2`` on the grid (a plain moment)."""
    return float(grid.integrate(weights * np.abs(values) ** 2))


def uncertainty(psi: np.ndarray, grid: Grid1D) -> tuple[float, float]:
    """Standard deviations of the coordinate and its conjugate for one slice."""
    q = grid.points
    mean_q = expectation(psi, grid, q)
    var_q = expectation(psi, grid, (q - mean_q) ** 2)
    phi = transform(psi, grid)
    conj = grid.conjugate()
    k = conj.points
    mean_k = expectation(phi, conj, k)
    var_k = expectation(phi, conj, (k - mean_k) ** 2)
    return float(np.sqrt(var_q)), float(np.sqrt(var_k))


def sample_times(times: Sequence[float] | np.ndarray) -> np.ndarray:
    t = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(np.diff(t) <= 0):
        raise ValueError("times must be strictly ascending")
    return t
