import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bohmrep import algebra as alg


def random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_hermitian(rng, dim):
    """Random Hermitian matrix scaled to unit spectral norm."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = a + a.conj().T
    return h / np.linalg.norm(h, 2)


def test_commutator_of_self_is_zero(rng):
    a = rng.normal(size=(6, 6))
    assert np.all(alg.commutator(a, a) == 0)


def test_commutator_dimension_mismatch():
    with pytest.raises(ValueError):
        alg.commutator(np.eye(3), np.eye(4))
    with pytest.raises(ValueError):
        alg.anticommutator(np.eye(3), np.eye(4))


def test_ladder_ccr_dim16():
    b = alg.LadderBasis(16)
    c = alg.commutator(b.X, b.P)
    assert np.linalg.norm(c[:15, :15] - 1j * np.eye(15)) <= 1e-10
    # truncation shows up only in the last diagonal entry
    assert abs(c[15, 15] - 1j) > 1.0
    assert alg.is_hermitian(b.X) and alg.is_hermitian(b.P)


def test_ladder_matrices_match_hand_entries():
    b = alg.LadderBasis(4, mass=2.0, omega=0.5)
    s = 1.0 / np.sqrt(2 * 2.0 * 0.5)
    assert np.isclose(b.X[0, 1], s) and np.isclose(b.X[2, 1], s * np.sqrt(2))
    assert np.isclose(b.P[0, 1], -1j * np.sqrt(2.0 * 0.5 / 2))


def test_anticommutator_constant_and_zero(rng):
    rho = alg.density_from_state(random_state(rng, 5)).matrix
    assert np.allclose(alg.anticommutator(0.7 * np.eye(5), rho), 1.4 * rho, atol=1e-15)
    assert np.all(alg.anticommutator(rho, np.zeros((5, 5))) == 0)


def test_eigenprojector_commutes_and_anticommutes(rng):
    H = random_hermitian(rng, 6)
    w, v = np.linalg.eigh(H)
    rho = alg.density_from_state(v[:, 2])
    assert np.max(np.abs(alg.commutator(H, rho.matrix))) < 1e-12
    assert np.max(np.abs(alg.anticommutator(H, rho.matrix) - 2 * w[2] * rho.matrix)) < 1e-12
    assert np.max(np.abs(alg.liouville_rhs(H, rho))) < 1e-12


def test_density_from_basis_vectors():
    e0 = np.zeros(4)
    e0[0] = 1
    assert np.allclose(alg.density_from_state(e0).matrix, np.diag([1, 0, 0, 0]))
    v = np.zeros(4)
    v[:2] = 1 / np.sqrt(2)
    m = alg.density_from_state(v).matrix
    assert np.allclose(m[:2, :2], 0.5) and np.allclose(m[2:, :], 0)


def test_density_from_zero_vector_rejected():
    with pytest.raises(ValueError):
        alg.density_from_state(np.zeros(3))


def test_density_invariants_random_seeds():
    for seed in range(100):
        rng = np.random.default_rng(seed)
        m = alg.density_from_state(rng.normal(size=8) + 1j * rng.normal(size=8)).matrix
        assert abs(np.trace(m) - 1) <= 1e-12
        assert np.linalg.norm(m @ m - m) <= 1e-10


def test_density_operator_rejects_bad_matrices():
    with pytest.raises(ValueError):
        alg.DensityOperator(np.array([[1.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        alg.DensityOperator(np.diag([0.7, 0.7]))
    with pytest.raises(ValueError):
        alg.DensityOperator(np.diag([1.5, -0.5]))
    with pytest.raises(ValueError):
        alg.DensityOperator(np.diag([0.5, 0.5]), pure=True)


def test_heisenberg_trivial_cases(rng):
    H = random_hermitian(rng, 5)
    A = random_hermitian(rng, 5)
    assert np.allclose(alg.heisenberg_evolve(A, H, 0.0), A, atol=1e-14)
    assert np.allclose(alg.heisenberg_evolve(H, H, 1.3), H, atol=1e-12)


def test_heisenberg_derivative_matches_commutator(rng):
    H = random_hermitian(rng, 5)
    A = random_hermitian(rng, 5)
    h = 1e-4
    fd = (alg.heisenberg_evolve(A, H, h) - alg.heisenberg_evolve(A, H, -h)) / (2 * h)
    assert np.max(np.abs(fd - alg.commutator(A, H) / 1j)) <= 1e-6


def test_heisenberg_rejects_non_hermitian():
    with pytest.raises(ValueError):
        alg.heisenberg_evolve(np.eye(2), np.array([[0, 1], [0, 0]]), 1.0)


def test_liouville_matches_finite_difference(rng):
    H = random_hermitian(rng, 6)
    psi = random_state(rng, 6)
    h = 1e-4

    def rho(t):
        w = alg.propagator_matrix(H, t) @ psi
        return np.outer(w, w.conj())

    fd = (rho(h) - rho(-h)) / (2 * h)
    assert np.max(np.abs(fd - alg.liouville_rhs(H, alg.density_from_state(psi)))) <= 1e-6


def test_liouville_zero_hamiltonian(rng):
    rho = alg.density_from_state(random_state(rng, 4))
    assert np.all(alg.liouville_rhs(np.zeros((4, 4)), rho) == 0)


def test_harmonic_spectrum_low_levels():
    b = alg.LadderBasis(64, 1.0, 1.0)
    H = alg.PolynomialHamiltonian.harmonic(1.0, 1.0).matrix(b)
    w = np.linalg.eigvalsh(H)
    assert np.allclose(w[:10], np.arange(10) + 0.5, atol=1e-10)


def test_operator_derivative_forms(rng):
    b = alg.LadderBasis(12, 1.3, 0.8)
    rho = alg.density_from_state(random_state(rng, 12)).matrix
    X, P = b.X, b.P
    jx, jp = alg.operator_derivatives(rho, alg.PolynomialHamiltonian.free(1.3), b)
    assert np.allclose(jx, (rho @ P + P @ rho) / 2.6) and np.all(jp == 0)
    jx, jp = alg.operator_derivatives(rho, alg.PolynomialHamiltonian.linear(0.4), b)
    assert np.allclose(jp, -0.4 * rho) and np.all(jx == 0)
    jx, jp = alg.operator_derivatives(rho, alg.PolynomialHamiltonian.harmonic(1.3, 2.0), b)
    assert np.allclose(jp, -(X @ rho + rho @ X))


def test_operator_derivative_cubic_rule(rng):
    b = alg.LadderBasis(10)
    rho = alg.density_from_state(random_state(rng, 10)).matrix
    X = b.X
    _, jp = alg.operator_derivatives(rho, alg.PolynomialHamiltonian([(0.3, 3, 0)]), b)
    expected = -0.3 * (X @ X @ rho + X @ rho @ X + rho @ X @ X)
    assert np.allclose(jp, expected)


@pytest.mark.parametrize("terms", [[(1.0, -1, 0)], [(1.0, 1.5, 0)], [(1.0, 2)]])
def test_polynomial_rejects_bad_terms(terms):
    with pytest.raises(ValueError):
        alg.PolynomialHamiltonian(terms)


def test_operator_residual_zero_hamiltonian():
    b = alg.LadderBasis(16)
    H = alg.PolynomialHamiltonian([(0.0, 0, 2)])
    times = [0.0, 0.1, 0.2]
    series = alg.evolve_density_series(b.coherent_state(1.2), H, b, times)
    assert alg.operator_liouville_residual(series, times, H, b) == 0.0


def test_operator_residual_needs_three_samples():
    b = alg.LadderBasis(8)
    H = alg.PolynomialHamiltonian.free()
    series = alg.evolve_density_series(b.coherent_state(0.5), H, b, [0.0, 0.1])
    with pytest.raises(ValueError):
        alg.operator_liouville_residual(series, [0.0, 0.1], H, b)


def test_harmonic_residual_decreases_16_to_32():
    ref = alg.LadderBasis(256)
    H = alg.PolynomialHamiltonian.harmonic(1.0, 2.0)
    h = 1e-4
    times = [1.0 - h, 1.0, 1.0 + h]
    out = []
    for d in (16, 32):
        b = alg.LadderBasis(d)
        out.append(alg.operator_liouville_residual(alg.evolve_density_series(ref.coherent_state(1.8), H, b, times), times, H, b))
    assert out[1] < out[0]


def test_coherent_state_mean_position():
    b = alg.LadderBasis(80, 1.0, 1.0)
    alpha = 1.5 + 0.5j
    v = b.coherent_state(alpha)
    assert np.isclose(np.vdot(v, b.X @ v).real, np.sqrt(2) * alpha.real, atol=1e-10)
    assert np.isclose(np.vdot(v, b.P @ v).real, np.sqrt(2) * alpha.imag, atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2**31 - 1))
def test_liouville_rhs_traceless_and_antihermitian_property(dim, seed):
    rng = np.random.default_rng(seed)
    H = random_hermitian(rng, dim)
    rho = alg.density_from_state(random_state(rng, dim))
    r = alg.liouville_rhs(H, rho)
    assert abs(np.trace(r)) < 1e-10
    assert np.allclose(r, r.conj().T, atol=1e-10)
