"""Finite-matrix realisation of the density-operator algebra.

Operators are plain complex ``numpy`` arrays.  ``X`` and ``P`` come from a
truncated harmonic ladder, so ``[X, P] = i`` holds exactly except in the last
row and column; identity checks therefore look at the interior block.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
IDEMPOTENT_TOL = 1e-10

#: Rows/columns dropped from the bottom-right corner by :func:`interior`.
TRIM = 2


def as_operator(a, name: str = "operator") -> np.ndarray:
    """Validate and return ``a`` as a square complex matrix of dimension >= 2."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {m.shape}")
    if m.shape[0] < 2:
        raise ValueError(f"{name} must have dimension >= 2")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = as_operator(a, "A")
    b = as_operator(b, "B")
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a, b


def commutator(a, b) -> np.ndarray:
    a, b = _pair(a, b)
    return a @ b - b @ a


def anticommutator(a, b) -> np.ndarray:
    a, b = _pair(a, b)
    return a @ b + b @ a


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    a = as_operator(a)
    scale = max(np.linalg.norm(a), 1.0)
    return bool(np.linalg.norm(a - a.conj().T) <= tol * scale)


def _require_hermitian(h: np.ndarray, name: str = "H") -> None:
    if not is_hermitian(h):
        raise ValueError(f"{name} is not Hermitian")


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, unit-trace, positive matrix; ``pure`` additionally asserts rho^2 = rho."""

    matrix: np.ndarray
    pure: bool = False

    def __post_init__(self):
        m = as_operator(self.matrix, "rho")
        object.__setattr__(self, "matrix", m)
        scale = np.linalg.norm(m)
        if np.linalg.norm(m - m.conj().T) > HERMITIAN_TOL * scale:
            raise ValueError("density operator is not Hermitian")
        if abs(np.trace(m) - 1.0) > TRACE_TOL:
            raise ValueError(f"density operator trace is {np.trace(m):.3e}, expected 1")
        if np.min(np.linalg.eigvalsh(0.5 * (m + m.conj().T))) < -1e-12:
            raise ValueError("density operator has negative eigenvalues")
        if self.pure and np.linalg.norm(m @ m - m) > IDEMPOTENT_TOL:
            raise ValueError("pure density operator is not idempotent")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def density_from_state(v) -> DensityOperator:
    """Projector ``|v><v| / <v|v>`` as a pure :class:`DensityOperator`."""
    v = np.asarray(v, dtype=complex).ravel()
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("cannot build a density operator from the zero vector")
    v = v / norm
    rho = np.outer(v, v.conj())
    # enforce exact Hermiticity and unit trace after rounding
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    return DensityOperator(rho, pure=True)


@dataclass(frozen=True)
class LadderBasis:
    """Truncated harmonic-oscillator basis with tridiagonal ``X`` and ``P``.

    ``X = (a + a^dag) / sqrt(2 m w)`` and ``P = i sqrt(m w / 2) (a^dag - a)``.
    """

    dim: int
    mass: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("dim must be >= 2")
        if not (self.mass > 0 and self.omega > 0):
            raise ValueError("mass and omega must be positive")

    @property
    def lowering(self) -> np.ndarray:
        return np.diag(np.sqrt(np.arange(1, self.dim)), k=1).astype(complex)

    @property
    def X(self) -> np.ndarray:
        a = self.lowering
        return (a + a.conj().T) / np.sqrt(2.0 * self.mass * self.omega)

    @property
    def P(self) -> np.ndarray:
        a = self.lowering
        return 1j * np.sqrt(self.mass * self.omega / 2.0) * (a.conj().T - a)

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def coherent_state(self, alpha: complex) -> np.ndarray:
        """Truncated coherent-state vector ``exp(-|a|^2/2) a^n / sqrt(n!)``, renormalised."""
        n = np.arange(self.dim)
        log_fact = np.cumsum(np.log(np.maximum(n, 1)))
        amp = np.exp(-0.5 * abs(alpha) ** 2 + n * np.log(abs(alpha) + 1e-300) - 0.5 * log_fact)
        v = amp * np.exp(1j * n * np.angle(alpha))
        if alpha == 0:
            v = np.zeros(self.dim, dtype=complex)
            v[0] = 1.0
        return v / np.linalg.norm(v)


def interior(a: np.ndarray, trim: int = TRIM) -> np.ndarray:
    """Drop the last ``trim`` rows and columns where truncation spoils ``[X, P] = i``."""
    return a[: a.shape[0] - trim, : a.shape[1] - trim]


@dataclass(frozen=True)
class PolynomialHamiltonian:
    """``H = sum c * X^k P^n`` with every monomial written X-then-P."""

    terms: tuple[tuple[float, int, int], ...]

    def __init__(self, terms: Iterable[Sequence]):
        clean = []
        for term in terms:
            if len(term) != 3:
                raise ValueError(f"term {term!r} must be (coefficient, k, n)")
            c, k, n = term
            if int(k) != k or int(n) != n or k < 0 or n < 0:
                raise ValueError(f"exponents must be non-negative integers, got k={k}, n={n}")
            clean.append((float(c), int(k), int(n)))
        object.__setattr__(self, "terms", tuple(clean))

    @classmethod
    def free(cls, mass: float = 1.0) -> "PolynomialHamiltonian":
        return cls([(0.5 / mass, 0, 2)])

    @classmethod
    def harmonic(cls, mass: float = 1.0, stiffness: float = 1.0) -> "PolynomialHamiltonian":
        return cls([(0.5 / mass, 0, 2), (0.5 * stiffness, 2, 0)])

    @classmethod
    def linear(cls, force: float, mass: float | None = None) -> "PolynomialHamiltonian":
        terms = [(force, 1, 0)]
        if mass is not None:
            terms.append((0.5 / mass, 0, 2))
        return cls(terms)

    def matrix(self, basis: LadderBasis) -> np.ndarray:
        X, P = basis.X, basis.P
        out = np.zeros((basis.dim, basis.dim), dtype=complex)
        for c, k, n in self.terms:
            out += c * np.linalg.matrix_power(X, k) @ np.linalg.matrix_power(P, n)
        return out


def heisenberg_evolve(a, h, t: float) -> np.ndarray:
    """``exp(iHt) A exp(-iHt)``, the inner automorphism generated by ``H``."""
    a, h = _pair(a, h)
    _require_hermitian(h)
    u = propagator_matrix(h, t)
    return u.conj().T @ a @ u


def propagator_matrix(h, t: float) -> np.ndarray:
    """``exp(-iHt)`` for Hermitian ``H`` via its eigendecomposition."""
    h = as_operator(h, "H")
    _require_hermitian(h)
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def liouville_rhs(h, rho: DensityOperator) -> np.ndarray:
    """``d rho / dt = (1/i) [H, rho]``."""
    m = rho.matrix if isinstance(rho, DensityOperator) else as_operator(rho, "rho")
    h, m = _pair(h, m)
    _require_hermitian(h)
    return -1j * commutator(h, m)


def _rho_matrix(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityOperator) else as_operator(rho, "rho")


def operator_derivatives(rho, hamiltonian: PolynomialHamiltonian, basis: LadderBasis) -> tuple[np.ndarray, np.ndarray]:
    """Operator currents ``J_X = d(rho H)/dP`` and ``J_P = -d(rho H)/dX``.

    For a monomial ``rho X^k P^n`` the derivatives are

        d/dX = sum_{j<k} X^(k-1-j) P^n rho X^j
        d/dP = sum_{j<n} P^(n-1-j) rho X^k P^j

    and vanish when ``k == 0`` (resp. ``n == 0``).
    """
    r = _rho_matrix(rho)
    if r.shape != (basis.dim, basis.dim):
        raise ValueError("rho and basis dimensions differ")
    X, P = basis.X, basis.P
    xp = [np.linalg.matrix_power(X, i) for i in range(_max_power(hamiltonian, 1) + 1)]
    pp = [np.linalg.matrix_power(P, i) for i in range(_max_power(hamiltonian, 2) + 1)]
    dx = np.zeros_like(r)
    dp = np.zeros_like(r)
    for c, k, n in hamiltonian.terms:
        for j in range(k):
            dx += c * xp[k - 1 - j] @ pp[n] @ r @ xp[j]
        for j in range(n):
            dp += c * pp[n - 1 - j] @ r @ xp[k] @ pp[j]
    return dp, -dx


def _max_power(h: PolynomialHamiltonian, slot: int) -> int:
    return max((t[slot] for t in h.terms), default=0)


def operator_liouville_residual(
    rho_t: Sequence,
    times: Sequence[float],
    hamiltonian: PolynomialHamiltonian,
    basis: LadderBasis,
    trim: int = TRIM,
) -> float:
    """Largest interior norm of ``i d rho/dt + [J_X, P] - [J_P, X]``.

    ``d rho/dt`` is a central difference of the supplied series, so the result
    is evaluated at every interior sample and the maximum Frobenius norm over
    them is returned.
    """
    if len(rho_t) < 3:
        raise ValueError("need at least three density samples for a central difference")
    times = np.asarray(times, dtype=float)
    if times.size != len(rho_t):
        raise ValueError("times and rho_t lengths differ")
    mats = [_rho_matrix(r) for r in rho_t]
    X, P = basis.X, basis.P
    worst = 0.0
    for i in range(1, len(mats) - 1):
        drho = (mats[i + 1] - mats[i - 1]) / (times[i + 1] - times[i - 1])
        jx, jp = operator_derivatives(mats[i], hamiltonian, basis)
        res = 1j * drho + commutator(jx, P) - commutator(jp, X)
        worst = max(worst, float(np.linalg.norm(interior(res, trim))))
    return worst


def evolve_density_series(
    psi0,
    hamiltonian: PolynomialHamiltonian,
    basis: LadderBasis,
    times: Sequence[float],
) -> list[DensityOperator]:
    """Pure-state densities ``|psi(t)><psi(t)|`` in ``basis``.

    ``psi0`` may be longer than ``basis.dim``: it is then evolved under the
    matrix realisation of ``H`` in that larger reference basis and only the
    working-basis components are kept (renormalised), which exposes the
    truncation error of the working basis.
    """
    psi0 = np.asarray(psi0, dtype=complex).ravel()
    if psi0.size < basis.dim:
        raise ValueError("initial state is shorter than the working basis")
    ref = basis if psi0.size == basis.dim else LadderBasis(psi0.size, basis.mass, basis.omega)
    h = hamiltonian.matrix(ref)
    return [density_from_state((propagator_matrix(h, t) @ psi0)[: basis.dim]) for t in times]
