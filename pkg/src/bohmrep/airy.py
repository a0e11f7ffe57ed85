"""Airy function Ai and its derivative for complex arguments.

Maclaurin series inside a disc around the origin, Poincare-type asymptotic
expansions outside it.  Written here rather than imported so the stationary
linear-potential state and its rotated-argument components can be evaluated
and tested without relying on a special-function library.
"""

from __future__ import annotations

import math

import numpy as np

# Ai(0) and -Ai'(0)
AI0 = 0.355028053887817239260
AIP0 = 0.258819403792806798405

#: Maclaurin series radius in the sector |arg z| < pi/3 where Ai decays and
#: the series suffers cancellation.
SERIES_RADIUS = 6.0
#: Series radius elsewhere; the asymptotic sums only reach ~1e-9 at |z| = 6.
SERIES_RADIUS_OUTER = 7.0

_MAX_TERMS = 200
_EPS = 1e-17


def _asymptotic_coefficients(n: int) -> tuple[np.ndarray, np.ndarray]:
    u = np.ones(n)
    for k in range(1, n):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k)
    k = np.arange(n)
    v = -(6 * k + 1) / (6 * k - 1) * u
    v[0] = 1.0
    return u, v


_U, _V = _asymptotic_coefficients(40)


def _series(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    z3 = z**3
    f = np.ones_like(z)
    g = z.copy()
    fp = 0.5 * z**2
    gp = np.ones_like(z)
    tf, tg, tfp, tgp = f.copy(), g.copy(), fp.copy(), gp.copy()
    fp_sum = fp.copy()
    for k in range(_MAX_TERMS):
        tf = tf * z3 / ((3 * k + 2) * (3 * k + 3))
        tg = tg * z3 / ((3 * k + 3) * (3 * k + 4))
        tgp = tgp * z3 / ((3 * k + 3) * (3 * k + 1))
        f = f + tf
        g = g + tg
        gp = gp + tgp
        if k >= 1:
            tfp = tfp * z3 / ((3 * k + 2) * 3 * k)
            fp_sum = fp_sum + tfp
        scale = np.maximum(np.abs(f), np.abs(g))
        if k > 2 and np.all(
            np.maximum.reduce([np.abs(tf), np.abs(tg), np.abs(tgp), np.abs(tfp)]) <= _EPS * np.maximum(scale, 1.0)
        ):
            break
    ai = AI0 * f - AIP0 * g
    aip = AI0 * fp_sum - AIP0 * gp
    return ai, aip


def _truncated(coeffs: np.ndarray, x: np.ndarray, sign_pattern, start: int, step: int) -> np.ndarray:
    """Sum ``sign(k) * coeffs[start + step*k] * x**(start + step*k)`` up to the smallest term."""
    total = np.zeros_like(x)
    active = np.ones(x.shape, dtype=bool)
    prev = np.full(x.shape, np.inf)
    for k in range((len(coeffs) - start) // step):
        idx = start + step * k
        term = sign_pattern(k) * coeffs[idx] * x**idx
        mag = np.abs(term)
        active &= mag < prev
        total = np.where(active, total + term, total)
        prev = np.where(active, mag, prev)
        if not active.any():
            break
    return total


def _decaying(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    zeta = (2.0 / 3.0) * z**1.5
    inv = 1.0 / zeta
    alt = lambda k: (-1.0) ** k  # noqa: E731
    su = _truncated(_U, inv, alt, 0, 1)
    sv = _truncated(_V, inv, alt, 0, 1)
    pref = np.exp(-zeta) / (2.0 * math.sqrt(math.pi))
    quarter = z**0.25
    return pref / quarter * su, -pref * quarter * sv


def _oscillatory(w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Ai(-w), Ai'(-w) for |arg w| < pi/3
    zeta = (2.0 / 3.0) * w**1.5
    inv = 1.0 / zeta
    alt = lambda k: (-1.0) ** k  # noqa: E731
    u_even = _truncated(_U, inv, alt, 0, 2)
    u_odd = _truncated(_U, inv, alt, 1, 2)
    v_even = _truncated(_V, inv, alt, 0, 2)
    v_odd = _truncated(_V, inv, alt, 1, 2)
    c = np.cos(zeta - math.pi / 4)
    s = np.sin(zeta - math.pi / 4)
    quarter = w**0.25
    ai = (c * u_even + s * u_odd) / (math.sqrt(math.pi) * quarter)
    # dAi(-w)/dz at z = -w
    aip = quarter / math.sqrt(math.pi) * (s * v_even - c * v_odd)
    return ai, aip


def airy_ai(z, derivative: bool = False):
    """Evaluate ``Ai(z)`` (or ``(Ai(z), Ai'(z))`` with ``derivative=True``).

    Real input gives real output.  Accuracy is about 1e-10 absolute (relative
    where ``|Ai|`` is large) across the complex plane.
    """
    arr = np.asarray(z)
    real_input = not np.iscomplexobj(arr)
    zc = np.atleast_1d(arr).astype(complex).ravel()
    ai = np.empty_like(zc)
    aip = np.empty_like(zc)

    angle = np.abs(np.angle(zc))
    radius = np.where(angle < math.pi / 3, SERIES_RADIUS, SERIES_RADIUS_OUTER)
    inner = np.abs(zc) <= radius
    if inner.any():
        ai[inner], aip[inner] = _series(zc[inner])
    right = ~inner & (angle <= 2 * math.pi / 3)
    if right.any():
        ai[right], aip[right] = _decaying(zc[right])
    left = ~inner & ~right
    if left.any():
        ai[left], aip[left] = _oscillatory(-zc[left])

    shape = arr.shape
    ai = ai.reshape(shape)
    aip = aip.reshape(shape)
    if real_input:
        ai, aip = ai.real, aip.real
    if derivative:
        return ai, aip
    return ai
