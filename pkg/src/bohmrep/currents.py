"""Probability currents, quantum potentials and residuals of the continuity
and phase equations in the position and momentum representations.

Spatial derivatives are spectral.  Quantities built from ``R`` and ``S`` are
evaluated through logarithmic derivatives of the amplitude, e.g.
``R'/R = Re(psi'/psi)`` and ``S' = Im(psi'/psi)``, which avoids
differentiating the unwrapped phase directly.  Time derivatives are central
differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .grids import (
    NODE_THRESHOLD,
    Grid1D,
    PolarField,
    WaveField,
    apply_conjugate_operator,
    local_beable,
    node_mask,
    spectral_derivative,
)
from .propagator import PotentialSpec

Representation = Literal["position", "momentum"]


@dataclass
class CurrentField:
    """Current ``j`` on a grid, shape ``(T, N)``; ``mask`` flags node samples."""

    grid: Grid1D
    times: np.ndarray
    j: np.ndarray
    representation: Representation
    mask: np.ndarray

    def __len__(self) -> int:
        return self.times.size

    def __getitem__(self, index: int) -> np.ndarray:
        return self.j[index]


@dataclass
class QuantumPotentialField:
    grid: Grid1D
    values: np.ndarray
    representation: Representation
    mask: np.ndarray


def _as_slices(psi, grid: Grid1D | None, times=None) -> tuple[Grid1D, np.ndarray, np.ndarray]:
    if isinstance(psi, WaveField):
        return psi.grid, psi.times, psi.amplitudes
    if isinstance(psi, PolarField):
        amps = np.atleast_2d(psi.psi)
        t = psi.times if psi.times is not None else np.zeros(amps.shape[0])
        return psi.grid, np.atleast_1d(t), amps
    if grid is None:
        raise ValueError("a grid is required when psi is an array")
    amps = np.atleast_2d(np.asarray(psi, dtype=complex))
    t = np.zeros(amps.shape[0]) if times is None else np.atleast_1d(np.asarray(times, dtype=float))
    return grid, t, amps


def _require_kind(grid: Grid1D, kind: Representation) -> None:
    if grid.kind != kind:
        raise ValueError(f"expected a {kind} grid, got {grid.kind}")


# -- currents ---------------------------------------------------------------


def current_x(
    psi,
    m: float,
    grid: Grid1D | None = None,
    method: Literal["operator", "complex", "polar"] = "operator",
) -> CurrentField:
    """Position-representation current.

    ``operator`` evaluates ``<x|(rho P + P rho)|x> / 2m``, ``complex`` the
    textbook ``(psi* psi' - psi*' psi) / 2mi`` and ``polar`` the product
    ``R^2 S' / m`` with ``S'`` from a finite difference of the unwrapped
    phase.  The polar route is NaN on masked samples.
    """
    grid, times, amps = _as_slices(psi, grid)
    _require_kind(grid, "position")
    if not m > 0:
        raise ValueError("mass must be positive")
    mask = node_mask(np.abs(amps))
    if method == "operator":
        p_psi = apply_conjugate_operator(amps, grid, 1)
        j = np.real(np.conj(amps) * p_psi) / m
    elif method == "complex":
        d = spectral_derivative(amps, grid, 1)
        j = np.real((np.conj(amps) * d - np.conj(d) * amps) / (2j * m))
    elif method == "polar":
        grad = local_beable(amps, grid, method="phase")
        j = np.abs(amps) ** 2 * grad / m
    else:
        raise ValueError(f"unknown method {method!r}")
    return CurrentField(grid, times, j, "position", mask)


def _x_powers(phi: np.ndarray, grid: Grid1D, n_max: int) -> list[np.ndarray]:
    """``[phi, X phi, X^2 phi, ...]`` with ``X = i d/dp`` on a momentum grid."""
    return [phi if n == 0 else apply_conjugate_operator(phi, grid, n) for n in range(n_max + 1)]


def current_p(
    phi,
    potential: PotentialSpec,
    grid: Grid1D | None = None,
    method: Literal["operator", "closed"] = "operator",
) -> CurrentField:
    """Momentum-representation current ``j_p = -<p| d(rho V(X))/dX |p>``.

    ``operator`` expands the derivative monomial by monomial,
    ``d(rho X^k)/dX = sum_j X^(k-1-j) rho X^j``, with ``X`` applied to the
    momentum amplitude.  ``closed`` uses the polar expressions: zero for the
    free particle, ``-a |phi|^2`` for the linear potential, ``K R^2 S'`` for
    the oscillator and ``-R^2 V'(x_r) + A (2 R R'' - R'^2)`` for the cubic.
    """
    grid, times, amps = _as_slices(phi, grid)
    _require_kind(grid, "momentum")
    if potential.kind == "tabulated":
        raise ValueError("j_p has no operator expansion for a tabulated potential")
    mask = node_mask(np.abs(amps))
    if method == "operator":
        terms = [(c, k) for c, k in potential.polynomial() if k > 0]
        kmax = max((k for _, k in terms), default=0)
        powers = _x_powers(amps, grid, max(kmax - 1, 0))
        j = np.zeros(amps.shape, dtype=complex)
        for c, k in terms:
            for i in range(k):
                j -= c * powers[k - 1 - i] * np.conj(powers[i])
        j = j.real
    elif method == "closed":
        j = _closed_current_p(amps, grid, potential)
    else:
        raise ValueError(f"unknown method {method!r}")
    return CurrentField(grid, times, j, "momentum", mask)


def _closed_current_p(amps: np.ndarray, grid: Grid1D, potential: PotentialSpec) -> np.ndarray:
    dens = np.abs(amps) ** 2
    if potential.kind == "free":
        return np.zeros_like(dens)
    if potential.kind == "linear":
        return -potential.strength * dens
    if potential.kind == "harmonic":
        # x_r = -S', so R^2 S' = -R^2 x_r
        s1 = -local_beable(amps, grid, method="phase")
        return potential.strength * dens * s1
    if potential.kind == "cubic":
        logs = log_derivatives(amps, grid)
        A = potential.strength
        x_r = -logs.s1
        return -dens * 3.0 * A * x_r**2 + A * dens * (2.0 * logs.r2 - logs.r1**2)
    raise ValueError(f"no closed form for {potential.kind}")


def cubic_current_report(phi, A: float, grid: Grid1D | None = None) -> dict:
    """Compare the printed cubic-potential ``j_p`` expressions with the operator value.

    ``bracket_printed`` is ``(A/2i)[phi phi''* + phi* phi'' - |phi'|^2]`` and
    ``polar_printed`` is ``-R^2 (V'(x_r))^2 + A (2 R R'' - R'^2)``, both as
    printed.  ``bracket_real`` and ``polar_linear_force`` are the variants
    without the ``1/2i`` factor and with ``V'`` to the first power; they are
    algebraically equal to the operator definition.  Differences are ``L2``
    norms over unmasked samples; ``relative`` divides by the operator norm.
    """
    grid, _, amps = _as_slices(phi, grid)
    amps = amps[0]
    pot = PotentialSpec.cubic(A)
    op = current_p(amps, pot, grid).j[0]
    d1 = spectral_derivative(amps, grid, 1)
    d2 = spectral_derivative(amps, grid, 2)
    bracket = amps * np.conj(d2) + np.conj(amps) * d2 - np.abs(d1) ** 2
    logs = log_derivatives(amps, grid)
    dens = np.abs(amps) ** 2
    vprime = 3.0 * A * logs.s1**2
    extra = A * dens * (2.0 * logs.r2 - logs.r1**2)
    candidates = {
        "bracket_printed": A / 2j * bracket,
        "bracket_real": A * bracket,
        "polar_printed": -dens * vprime**2 + extra,
        "polar_linear_force": -dens * vprime + extra,
    }
    mask = logs.mask
    scale = float(np.sqrt(grid.integrate(np.where(mask, 0.0, op**2))))
    report = {"A": A, "operator_norm": scale, "comparisons": {}}
    for name, val in candidates.items():
        diff = np.where(mask, 0.0, np.abs(val - op))
        err = float(np.sqrt(grid.integrate(diff**2)))
        report["comparisons"][name] = {
            "l2_difference": err,
            "relative": err / scale if scale > 0 else float("inf"),
            "max_imag": float(np.max(np.abs(np.where(mask, 0.0, np.imag(val))))),
        }
    return report


# -- quantum potential --------------------------------------------------------


@dataclass
class LogDerivatives:
    """Derivatives of ``R`` and ``S`` from ``psi^(n)/psi``.

    ``r1 = R'/R``, ``r2 = R''/R``, ``s1 = S'``, ``s2 = S''``, ``s3 = S'''``.
    """

    r1: np.ndarray
    r2: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    s3: np.ndarray
    mask: np.ndarray


def log_derivatives(psi: np.ndarray, grid: Grid1D, threshold: float = NODE_THRESHOLD) -> LogDerivatives:
    """Polar derivatives of ``psi`` up to third order; masked samples are zeroed."""
    psi = np.asarray(psi, dtype=complex)
    mask = node_mask(np.abs(psi), threshold)
    safe = np.where(mask, 1.0, psi)
    u1 = np.where(mask, 0.0, spectral_derivative(psi, grid, 1) / safe)
    u2 = np.where(mask, 0.0, spectral_derivative(psi, grid, 2) / safe)
    u3 = np.where(mask, 0.0, spectral_derivative(psi, grid, 3) / safe)
    r1, s1 = u1.real, u1.imag
    r2 = u2.real + s1**2
    s2 = u2.imag - 2.0 * r1 * s1
    s3 = u3.imag - 3.0 * s2 * r1 - 3.0 * s1 * r2 + s1**3
    return LogDerivatives(r1, r2, s1, s2, s3, mask)


def _potential_terms(logs: LogDerivatives, potential: PotentialSpec, kind: Representation) -> np.ndarray:
    if kind == "position":
        return -logs.r2 / (2.0 * potential.mass)
    if potential.kind in ("free", "linear"):
        return np.zeros_like(logs.r2)
    if potential.kind == "harmonic":
        return -0.5 * potential.strength * logs.r2
    if potential.kind == "cubic":
        A = potential.strength
        return 3.0 * A * logs.s1 * logs.r2 + 3.0 * A * logs.s2 * logs.r1 + A * logs.s3
    raise ValueError(f"no momentum-representation quantum potential for {potential.kind} potentials")


def _representation(polar, representation) -> Representation:
    kind = polar.grid.kind
    if representation is not None and representation != kind:
        raise ValueError(f"representation {representation!r} does not match the {kind} grid")
    return kind


def quantum_potential(polar: PolarField, potential: PotentialSpec, representation: Representation | None = None) -> QuantumPotentialField:
    """Quantum potential of a polar slice (or series).

    Position grid: ``-R''/(2 m R)`` for any potential.  Momentum grid: zero for
    free and linear potentials, ``-(K/2) R''/R`` for the oscillator and
    ``3A S' R''/R + 3A S'' R'/R + A S'''`` for the cubic.
    """
    kind = _representation(polar, representation)
    if kind == "momentum" and potential.kind == "tabulated":
        raise ValueError("momentum-representation quantum potential requires a polynomial potential")
    amps = np.atleast_2d(polar.psi)
    vals, masks = [], []
    for row in amps:
        logs = log_derivatives(row, polar.grid)
        vals.append(np.where(logs.mask, np.nan, _potential_terms(logs, potential, kind)))
        masks.append(logs.mask)
    vals, masks = np.array(vals), np.array(masks)
    if np.ndim(polar.R) == 1:
        vals, masks = vals[0], masks[0]
    return QuantumPotentialField(polar.grid, vals, kind, masks)


# -- residuals ----------------------------------------------------------------


def _central_time_derivative(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    return (values[2:] - values[:-2]) / (times[2:] - times[:-2])[:, None]


def phase_time_derivative(psi: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Central difference of the time-continuous phase at interior times.

    ``S(t+h) - S(t-h)`` is taken as ``arg[psi(t+h) conj(psi(t-h))]``, which is
    the difference of the phase made continuous in time at each sample and
    does not depend on how each slice was unwrapped in ``q``.
    """
    dS = np.angle(psi[2:] * np.conj(psi[:-2]))
    return dS / (times[2:] - times[:-2])[:, None]


def continuity_residual(density, current: CurrentField) -> np.ndarray:
    """``L2`` norm of ``dP/dt + dj/dq`` at every interior time sample."""
    density = np.asarray(density, dtype=float)
    if density.shape != current.j.shape:
        raise ValueError(f"density shape {density.shape} does not match current {current.j.shape}")
    if len(current) < 3:
        raise ValueError("need at least three time samples")
    dP = _central_time_derivative(density, current.times)
    div = spectral_derivative(current.j[1:-1], current.grid, 1).real
    return np.sqrt(current.grid.integrate((dP + div) ** 2))


def phase_equation_lhs(polar_t: PolarField, potential: PotentialSpec, representation: Representation | None = None) -> np.ndarray:
    """Left-hand side of the phase equation at interior times, shape ``(T-2, N)``.

    Position: ``S_t + S'^2/2m + V(x) + Q_x``.  Momentum:
    ``S_t + p^2/2m + V(x_r) + Q_p`` with ``x_r = -S'``.  Masked samples are NaN.
    """
    kind = _representation(polar_t, representation)
    if polar_t.times is None or np.ndim(polar_t.S) != 2 or polar_t.S.shape[0] < 3:
        raise ValueError("phase_equation_residual needs a time series with at least three samples")
    if kind == "momentum" and potential.kind == "tabulated":
        raise ValueError("momentum-representation phase equation requires a polynomial potential")
    times = polar_t.times
    psi = polar_t.psi
    s_t = phase_time_derivative(psi, times)
    q = polar_t.grid.points
    out = np.empty_like(s_t)
    for i in range(1, len(times) - 1):
        logs = log_derivatives(psi[i], polar_t.grid)
        Q = _potential_terms(logs, potential, kind)
        if kind == "position":
            rest = logs.s1**2 / (2.0 * potential.mass) + potential(q)
        else:
            rest = q**2 / (2.0 * potential.mass) + potential(-logs.s1)
        out[i - 1] = np.where(logs.mask, np.nan, s_t[i - 1] + rest + Q)
    return out


def phase_equation_residual(polar_t: PolarField, potential: PotentialSpec, representation: Representation | None = None) -> np.ndarray:
    """Density-weighted ``L2`` norm of the phase-equation left-hand side per interior time.

    The weight ``R^2`` is the natural one: multiplying the phase equation by
    ``R^2`` gives the diagonal form of the operator equation, and it keeps the
    far tails, where the phase is ill-conditioned, out of the norm.
    """
    lhs = phase_equation_lhs(polar_t, potential, representation)
    weight = polar_t.R[1:-1] ** 2
    sq = np.where(np.isnan(lhs), 0.0, weight * lhs**2)
    return np.sqrt(polar_t.grid.integrate(sq))


@dataclass
class PhaseEnergy:
    """``E = -dS/dt`` per grid sample plus its density-weighted mean and spread."""

    values: np.ndarray
    mean: float
    std: float
    stationarity: float


def energy_from_phase(polar_t: PolarField, stationarity_tol: float = 1e-8) -> PhaseEnergy:
    """Energy ``-dS/dt`` of a stationary state from its phase time series.

    ``S`` must already be continuous in time (see ``polar_series``).  The rate
    is the mean of the central differences, i.e. the end-to-end slope.
    """
    if polar_t.times is None or np.ndim(polar_t.S) != 2 or polar_t.S.shape[0] < 2:
        raise ValueError("energy_from_phase needs a time series with at least two samples")
    drift = float(np.max(np.abs(polar_t.R - polar_t.R[0])))
    if drift > stationarity_tol:
        raise ValueError(
            f"state is not stationary: max |R(t) - R(0)| = {drift:.3e} exceeds {stationarity_tol:.1e}"
        )
    times = polar_t.times
    E = -(polar_t.S[-1] - polar_t.S[0]) / (times[-1] - times[0])
    mask = polar_t.node_mask.any(axis=0)
    E = np.where(mask, np.nan, E)
    w = np.where(mask, 0.0, polar_t.R[0] ** 2)
    w = w / w.sum()
    Ez = np.where(mask, 0.0, E)
    mean = float(np.sum(w * Ez))
    std = float(np.sqrt(np.sum(w * (Ez - mean) ** 2)))
    return PhaseEnergy(E, mean, std, drift)


def beable_force_mismatch(phi, potential: PotentialSpec, grid: Grid1D | None = None) -> float:
    """``max |j_p/P + V'(x_r)|`` over unmasked samples.

    For the linear and harmonic potentials the momentum velocity equals the
    classical force at the beable position.
    """
    grid, _, amps = _as_slices(phi, grid)
    jp = current_p(amps, potential, grid)
    x_r = local_beable(amps, grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = jp.j / np.abs(amps) ** 2
    diff = np.abs(v - potential.force(np.nan_to_num(x_r)))
    diff = np.where(jp.mask | np.isnan(x_r), 0.0, diff)
    return float(np.max(diff))
