"""Double-precision tanh-sinh quadrature: finite panels and the half line."""
from __future__ import annotations

import math

import numpy as np

from .errors import NonIntegrable, QuadratureError

__all__ = ["tanh_sinh", "integrate_half_line", "find_peak"]

T_MAX = 4.0
LEVELS = 9


def _nodes(a, b, h, odd_only=False):
    k = np.arange(-int(T_MAX / h), int(T_MAX / h) + 1)
    if odd_only:
        k = k[k % 2 != 0]
    t = k * h
    u = 0.5 * math.pi * np.sinh(t)
    # distance to the nearer endpoint, computed without cancellation
    frac = 1.0 / (1.0 + np.exp(2.0 * np.abs(u)))
    x = np.where(u <= 0, a + (b - a) * frac, b - (b - a) * frac)
    w = h * (b - a) * 0.25 * math.pi * np.cosh(t) / np.cosh(u) ** 2
    keep = (x > a) & (x < b) & (w > 0)
    return x[keep], w[keep]


def tanh_sinh(f, a: float, b: float, rtol: float = 1e-12, atol: float = 0.0):
    """Integrate vectorised ``f`` over ``[a, b]``; returns ``(value, error_estimate)``.

    Endpoint singularities are tolerated.  Halves the step until successive
    estimates agree.
    """
    if b <= a:
        return 0.0, 0.0
    h = 0.5
    x, w = _nodes(a, b, h)
    total = float(np.dot(w, f(x)))
    err = math.inf
    for _ in range(LEVELS):
        h /= 2
        x, w = _nodes(a, b, h, odd_only=True)
        new = 0.5 * total + float(np.dot(w, f(x)))
        err = abs(new - total)
        total = new
        if not math.isfinite(total):
            raise QuadratureError(f"non-finite integrand on [{a:g}, {b:g}]")
        if err <= max(rtol * abs(total), atol):
            # convergence is double-exponential, so the last gap overstates the error
            return total, err
    return total, err


def find_peak(f, lo: float = 1e-12, hi: float = 1e12, n: int = 241) -> float:
    """Argmax of ``t f(t)`` (mass per log unit) on a log grid."""
    t = np.geomspace(lo, hi, n)
    with np.errstate(all="ignore"):
        v = t * np.abs(f(t))
    v[~np.isfinite(v)] = 0.0
    if not np.any(v > 0):
        return 1.0
    return float(t[int(np.argmax(v))])


def integrate_half_line(f, peak: float | None = None, rtol: float = 1e-11,
                        max_panels: int = 400, cut: float = 1e-30):
    """``int_0^inf f(t) dt`` on dyadic panels around the peak of ``t f(t)``.

    Panels stop once their contribution falls below ``cut`` times the
    running total (twice in a row); running out of panels raises
    :class:`NonIntegrable`.
    """
    t0 = peak if peak is not None else find_peak(f)
    total, err = tanh_sinh(f, t0 / 2, 2 * t0, rtol)
    if total == 0:
        return 0.0, 0.0

    def sweep(edges):
        nonlocal total, err
        quiet = 0
        for _ in range(max_panels):
            a, b = next(edges)
            part, e = tanh_sinh(f, a, b, rtol, atol=cut * abs(total))
            total += part
            err += e
            quiet = quiet + 1 if abs(part) <= max(cut, 1e-17) * abs(total) else 0
            if quiet >= 2:
                return a
        return None

    def left():
        b = t0 / 2
        while True:
            yield b / 2, b
            b /= 2

    def right():
        a = 2 * t0
        while True:
            yield a, 2 * a
            a *= 2

    edge = sweep(left())
    if edge is None:
        raise NonIntegrable("integrand not summable near 0")
    part, e = tanh_sinh(f, 0.0, edge, rtol, atol=cut * abs(total))
    total += part
    err += e
    if sweep(right()) is None:
        raise NonIntegrable("integrand not summable at infinity")
    if not math.isfinite(total):
        raise NonIntegrable("integral diverges")
    return total, err

