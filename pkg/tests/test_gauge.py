import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bohmrep import gauge


@settings(max_examples=200)
@given(st.floats(-1e4, 1e4))
def test_wrap_phase_decomposition(total):
    principal, winding = gauge.wrap_phase(total)
    assert -math.pi < principal <= math.pi
    assert abs(principal + 2 * math.pi * winding - total) < 1e-9 * max(1.0, abs(total))


def test_wrap_phase_branch_point():
    assert gauge.wrap_phase(-math.pi) == (math.pi, -1)
    assert gauge.wrap_phase(math.pi) == (math.pi, 0)


@given(st.floats(-50, 50), st.floats(-50, 50))
def test_circular_distance_symmetric_bounded(a, b):
    d = gauge.circular_distance(a, b)
    assert 0 <= d <= math.pi
    assert d == pytest.approx(gauge.circular_distance(b, a), abs=1e-12)


def test_scalar_phase_examples():
    assert gauge.ab_scalar_phase(0.0, 0.0, 3.0) == 0.0
    assert gauge.ab_scalar_phase(0.7, 0.0, 2.0) == pytest.approx(1.4, abs=1e-15)
    assert gauge.ab_scalar_phase(np.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-10)
    with pytest.raises(ValueError):
        gauge.ab_scalar_phase(1.0, 1.0, 0.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 3), st.floats(0, 1), st.floats(0, 3))
def test_scalar_phase_additive(t0, frac, span):
    t1 = t0 + span
    tm = t0 + frac * span
    V = lambda t: 0.7 + 0.3 * math.cos(2 * t)
    whole = gauge.ab_scalar_phase(V, t0, t1)
    assert abs(whole - gauge.ab_scalar_phase(V, t0, tm) - gauge.ab_scalar_phase(V, tm, t1)) <= 1e-12


def test_vector_phase_trivial_cases():
    seg = gauge.PathSpec.segment([0, 0, 0], [0, 2.5, 0])
    assert gauge.ab_vector_phase(gauge.uniform_field([0, 0, 0]), 1.0, seg) == 0.0
    assert gauge.ab_vector_phase(gauge.uniform_field([0, 1.2, 0]), -2.0, seg) == pytest.approx(-6.0, abs=1e-13)


def test_path_rejects_degenerate_points():
    with pytest.raises(ValueError):
        gauge.PathSpec([[0, 0, 0], [0, 0, 0], [1, 0, 0]])
    with pytest.raises(ValueError):
        gauge.PathSpec.segment([1, 1, 1], [1, 1, 1])


@pytest.mark.parametrize("flux", [0.3, 0.8, -2.0])
def test_flux_line_loop_shapes(flux):
    A = gauge.flux_line(flux, center=(0.2, -0.1))
    loops = [
        gauge.PathSpec.circle(1.0, 64, center=(0.2, -0.1)),
        gauge.PathSpec.ellipse(3.0, 0.5, 97, center=(0.5, 0.0)),
        gauge.PathSpec.polygon([[-1, -1], [2, -1], [2, 1.5], [-1, 1.5]]),
    ]
    for loop in loops:
        assert gauge.ab_vector_phase(A, 1.5, loop) == pytest.approx(1.5 * flux, abs=1e-8)
    rev = gauge.PathSpec.circle(1.0, 64, center=(0.2, -0.1), reverse=True)
    assert gauge.ab_vector_phase(A, 1.5, rev) == pytest.approx(-1.5 * flux, abs=1e-8)


def test_cored_flux_line_matches_stokes():
    A = gauge.flux_line(0.8, core_radius=0.5)
    # outside the core the enclosed flux does not depend on the loop
    loop = gauge.ab_vector_phase(A, 1.0, gauge.PathSpec.circle(1.5, 128))
    assert loop == pytest.approx(gauge.stokes_flux(A, 1.5, split=0.5), abs=1e-8)
    # inside the core the field is uniform, so the inscribed polygon sees B times its area
    n, r = 128, 0.3
    polygon_area = 0.5 * n * r**2 * math.sin(2 * math.pi / n)
    inside = gauge.ab_vector_phase(A, 1.0, gauge.PathSpec.circle(r, n))
    assert inside == pytest.approx(0.8 / (math.pi * 0.25) * polygon_area, abs=1e-10)


def test_stokes_uniform_field_oracle():
    B = 0.9
    A = gauge.uniform_magnetic_potential([0, 0, B])
    assert gauge.stokes_flux(A, 2.0) == pytest.approx(B * math.pi * 4.0, rel=1e-10)
    square = gauge.PathSpec.polygon([[-1, -1], [1, -1], [1, 1], [-1, 1]])
    assert gauge.ab_vector_phase(A, 1.0, square) == pytest.approx(4.0 * B, rel=1e-12)


def test_aharonov_casher_cases():
    lam, mu = 2.0, np.array([0, 0, 0.7])
    E = gauge.line_charge(lam, core_radius=0.4)
    loop = gauge.PathSpec.circle(1.2, 128)
    phase = gauge.ac_phase(E, mu, loop)
    oracle = gauge.stokes_flux(lambda r: np.cross(E(r), mu), 1.2, split=0.4)
    assert phase == pytest.approx(oracle, abs=1e-8)
    assert phase == pytest.approx(-lam * 0.7, abs=1e-8)
    Eu = gauge.uniform_field([0.0, 1.0, 0.0])
    assert gauge.ac_phase(Eu, [0.0, 2.0, 0.0], loop) == 0.0
    assert gauge.ac_phase(gauge.uniform_field([0, 0, 0]), mu, loop) == 0.0
    with pytest.raises(ValueError):
        gauge.ac_phase(E, [1.0, 0.0], loop)


def test_presets_lookup():
    assert set(gauge.PRESETS) >= {"flux_line", "line_charge"}
    with pytest.raises(ValueError, match="unknown field preset"):
        gauge.preset("monopole")


def test_berry_constant_state_zero():
    loop = gauge.ParameterLoop.latitude(1.0, 64)
    assert gauge.berry_phase(lambda b: np.array([0.0, 1.0]), loop).principal == 0.0


def test_berry_half_sphere():
    loop = gauge.ParameterLoop.latitude(math.pi / 2, 256)
    bp = gauge.berry_phase(gauge.spin_half_state, loop)
    assert gauge.circular_distance(bp.principal, -math.pi) <= 1e-6
    rev = gauge.berry_phase(gauge.spin_half_state, loop.reversed())
    assert gauge.circular_distance(rev.principal, -bp.principal) <= 1e-12


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 3.0), st.integers(0, 2**31 - 1))
def test_berry_gauge_invariance_property(theta, seed):
    rng = np.random.default_rng(seed)
    loop = gauge.ParameterLoop.latitude(theta, 256)
    base = gauge.berry_phase(gauge.spin_half_state, loop)
    states = [gauge.spin_half_state(b) * np.exp(2j * np.pi * rng.random()) for b in loop.samples[:-1]]
    assert gauge.circular_distance(gauge.berry_phase(None, loop, states=states).principal, base.principal) <= 1e-12


def test_berry_dense_oracle_converges():
    theta = 1.0
    exact = gauge.solid_angle_berry(theta)
    errs = [abs(gauge.berry_phase(gauge.spin_half_state, gauge.ParameterLoop.latitude(theta, n)).total - exact) for n in (512, 1024)]
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)


def test_berry_loop_validation():
    with pytest.raises(ValueError):
        gauge.ParameterLoop([[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    coarse = gauge.ParameterLoop.latitude(math.pi / 2, 3)
    with pytest.raises(ValueError, match="refine"):
        gauge.berry_phase(gauge.spin_half_state, coarse)
    open_loop = gauge.ParameterLoop([[0, 0, 1], [1, 0, 0], [0, 1, 0]], closed=False)
    with pytest.raises(ValueError):
        gauge.berry_phase(gauge.spin_half_state, open_loop)
