"""Subordinated heat kernels: the fundamental solution K, the jump kernel J,
their envelopes, the convolution solution and the two-parameter integral F(r)."""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, NonIntegrable, PreconditionError
from .quadrature import find_peak, integrate_half_line, tanh_sinh
from .series import DEFAULT_PRECISION, PrecisionConfig, as_function, context, to_float
from .spectral import Extension, extend

__all__ = [
    "heat_kernel", "SubordinationSpec", "kernel_value", "kappa_of", "k_envelope",
    "j_envelope", "check_jump_hypotheses", "solve_convolution", "AppendixIntegral",
    "appendix_F", "appendix_envelope", "check_decay_certificate", "fourier_symbol",
    "KernelRow", "kernel_table",
]


def heat_kernel(d: int, t, r):
    """Gaussian heat kernel ``(4 pi t)^(-d/2) exp(-r^2 / 4t)``; vectorised in ``t``."""
    t = np.asarray(t, dtype=float)
    with np.errstate(over="ignore", under="ignore"):
        return (4 * math.pi * t) ** (-d / 2) * np.exp(-np.square(r) / (4 * t))


def _vectorise(w):
    def wrapped(t):
        t = np.asarray(t, dtype=float)
        try:
            out = np.asarray(w(t), dtype=float)
            if out.shape == t.shape:
                return out
        except (TypeError, ValueError):
            pass
        return np.array([float(w(float(s))) for s in np.ravel(t)]).reshape(t.shape)
    return wrapped


@dataclass(frozen=True)
class SubordinationSpec:
    """Kernel ``int p(t, r) w(t) dt`` with ``w`` the potential (``fundamental``)
    or Levy (``jump``) density."""

    kind: str
    weight: Callable
    d: int
    kappa: float = 0.0
    beta: float = 0.0
    _w: Callable = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("fundamental", "jump"):
            raise ValueError("kind must be 'fundamental' or 'jump'")
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        object.__setattr__(self, "_w", _vectorise(self.weight))


def kernel_value(spec: SubordinationSpec, r: float, rtol: float = 1e-11) -> float:
    """Quadrature of ``int_0^inf p(t, r) w(t) dt`` for ``r > 0``."""
    if not r > 0:
        raise ValueError("r must be positive")
    w, d = spec._w, spec.d

    def integrand(t):
        heat = heat_kernel(d, t, r)
        out = np.zeros_like(heat)
        live = heat > 0
        out[live] = heat[live] * w(t[live])
        return out

    peak = find_peak(integrand, 1e-12 * (1 + r * r), 1e12 * (1 + r * r))
    value, _ = integrate_half_line(integrand, peak, rtol=rtol)
    return value


def kappa_of(Phi, prec: PrecisionConfig = DEFAULT_PRECISION) -> float:
    """``sqrt(-omega0)`` of a completely monotone ``Phi``."""
    ext = Phi if isinstance(Phi, Extension) else extend(Phi, prec)
    if not math.isfinite(ext.omega0):
        raise DomainError("omega0 is -inf; kappa is unbounded")
    return math.sqrt(-ext.omega0)


def _d1(ext, lam):
    return abs(to_float(ext.jet(lam, 1).coeffs[1]))


def _d2(ext, lam):
    return abs(to_float(2 * ext.jet(lam, 2).coeffs[2]))


def k_envelope(Phi_ext: Extension, d: int, r: float):
    """Envelope of K at radius ``r`` and its regime tag (``"exp"`` or ``"power"``)."""
    if not r > 0:
        raise ValueError("r must be positive")
    kappa = math.sqrt(-Phi_ext.omega0) if Phi_ext.omega0 < 0 else 0.0
    if kappa > 0:
        arg = 2 * kappa / r - kappa ** 2
        if not arg > Phi_ext.omega0:
            raise DomainError(f"argument {arg:g} is not right of omega0")
        return _d1(Phi_ext, arg) * r ** (-(d + 3) / 2) * math.exp(-kappa * r), "exp"
    return _d1(Phi_ext, r ** -2) * r ** (-d - 2), "power"


@functools.lru_cache(maxsize=64)
def check_jump_hypotheses(phi_ext: Extension, beta: float, d: int):
    """Monotonicity of ``-lam phi_e''(lam - beta)`` on a grid and, for ``beta = 0``
    and ``d <= 2``, a decay slope of ``|phi''|`` below ``2 + d/2``.

    Returns ``None`` or raises :class:`PreconditionError` with the witness.
    """
    lams = np.geomspace(1e-3, 1e3, 41)
    vals = [lam * _d2(phi_ext, lam - beta) for lam in lams]
    for (l0, v0), (l1, v1) in zip(zip(lams, vals), zip(lams[1:], vals[1:])):
        if v1 > v0 * (1 + 1e-9):
            raise PreconditionError(
                f"-lam phi_e''(lam - beta) increases between {l0:.4g} and {l1:.4g}")
    if beta == 0 and d <= 2:
        big = np.geomspace(1.0, 1e6, 25)
        d2 = [_d2(phi_ext, lam) for lam in big]
        slope = -np.polyfit(np.log(big), np.log(d2), 1)[0]
        if not slope < 2 + d / 2:
            raise PreconditionError(f"|phi''| decays with slope {slope:.3g} >= {2 + d / 2}")
    return None


def j_envelope(phi_ext: Extension, beta: float, d: int, r: float):
    """Envelope of J at radius ``r`` with regime tag ``"i"``, ``"ii"`` or ``"iii"``."""
    if not r > 0:
        raise ValueError("r must be positive")
    check_jump_hypotheses(phi_ext, float(beta), d)
    if r <= 1:
        return _d2(phi_ext, r ** -2) * r ** (-d - 4), "i"
    if beta > 0:
        return _d2(phi_ext, 1 / r - beta) * r ** (-(d + 5) / 2) * math.exp(-math.sqrt(beta) * r), "ii"
    return _d2(phi_ext, r ** -2) * r ** (-d - 4), "iii"


@dataclass(frozen=True)
class KernelRow:
    r: float
    value: float
    envelope: float
    ratio: float
    regime: str


def kernel_table(spec: SubordinationSpec, radii, envelope_fn) -> list[KernelRow]:
    """Rows ``(r, kernel, envelope, ratio, regime)`` in input order."""
    rows = []
    for r in radii:
        v = kernel_value(spec, float(r))
        env, tag = envelope_fn(float(r))
        rows.append(KernelRow(float(r), v, env, v / env if env else math.inf, tag))
    return rows


class _RadialTable:
    """log-log spline of a radial kernel, power-law continued outside its range."""

    def __init__(self, spec, r_lo, r_hi, points=160):
        from scipy.interpolate import CubicSpline

        rs = np.geomspace(r_lo, r_hi, points)
        vals = np.array([kernel_value(spec, r) for r in rs])
        pos = vals > 0
        self.lo, self.hi = rs[pos][0], rs[pos][-1]
        self.spline = CubicSpline(np.log(rs[pos]), np.log(vals[pos]))

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        u = np.log(np.clip(r, 1e-300, None))
        lo, hi = math.log(self.lo), math.log(self.hi)
        inside = np.clip(u, lo, hi)
        v = self.spline(inside)
        v = np.where(u < lo, self.spline(lo) + self.spline(lo, 1) * (u - lo), v)
        return np.where(u > hi, 0.0, np.exp(v))


def solve_convolution(K_spec: SubordinationSpec, f, x, support_radius: float,
                      rtol: float = 1e-9) -> float:
    """``u(x) = int K(|x - y|) f(y) dy`` for ``f`` supported in the ball of radius
    ``support_radius`` (``d <= 3``; ``f`` takes an array of points of shape ``(m, d)``).
    """
    d = K_spec.d
    if d > 3:
        raise ValueError("convolution is implemented for d <= 3")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    dist = float(np.linalg.norm(x))
    rho_max = dist + support_radius
    if rho_max <= 0:
        return 0.0
    K = _RadialTable(K_spec, 1e-6 * rho_max, rho_max * 1.01, 120)
    # breakpoints where the sphere around x meets the support boundary
    edges = sorted({0.0, max(dist - support_radius, 0.0), rho_max})
    if d == 1:
        def g(rho):
            out = np.zeros_like(rho)
            for s in (-1.0, 1.0):
                out += np.asarray(f((x[0] + s * rho)[:, None]), dtype=float)
            return K(rho) * out
    else:
        if d == 2:
            ang = np.linspace(0, 2 * math.pi, 129)[:-1]
            dirs = np.stack([np.cos(ang), np.sin(ang)], axis=1)
            wts = np.full(len(ang), 2 * math.pi / len(ang))
        else:
            gl, gw = np.polynomial.legendre.leggauss(24)
            az = np.linspace(0, 2 * math.pi, 49)[:-1]
            ct, phi = np.meshgrid(gl, az, indexing="ij")
            st = np.sqrt(1 - ct ** 2)
            dirs = np.stack([st * np.cos(phi), st * np.sin(phi), ct], axis=-1).reshape(-1, 3)
            wts = (gw[:, None] * np.full(len(az), 2 * math.pi / len(az))[None, :]).ravel()

        def g(rho):
            out = np.empty_like(rho)
            for i, p in enumerate(rho):
                pts = x[None, :] - p * dirs
                out[i] = np.dot(wts, np.asarray(f(pts), dtype=float)) * p ** (d - 1)
            return K(rho) * out

    total = 0.0
    for a, b in zip(edges, edges[1:]):
        if b > a:
            total += tanh_sinh(g, a, b, rtol)[0]
    return total


def fourier_symbol(spec: SubordinationSpec, xis, X: float = 40.0):
    """``int K(x) e^(i xi x) dx`` in ``d = 1`` by truncation at ``|x| = X``.

    Returns ``(values, tail)`` where ``tail = 2 X K(X)`` bounds the neglected
    mass for kernels decaying at least like ``1/x^2``.
    """
    if spec.d != 1:
        raise ValueError("the symbol check is one-dimensional")
    xs, ws = [], []
    from .quadrature import _nodes

    x0, w0 = _nodes(0.0, 1.0, 1 / 64)
    xs.append(x0)
    ws.append(w0)
    gl, gw = np.polynomial.legendre.leggauss(24)
    for a in np.arange(1.0, X, 1.0):
        xs.append(a + 0.5 * (gl + 1))
        ws.append(0.5 * gw)
    xs = np.concatenate(xs)
    ws = np.concatenate(ws)
    K = np.array([kernel_value(spec, float(v)) for v in xs])
    vals = [2 * float(np.dot(ws, K * np.cos(xi * xs))) for xi in np.atleast_1d(xis)]
    return vals, 2 * X * kernel_value(spec, X)


def _is_monotone(vals, increasing):
    vals = np.asarray(vals)
    diffs = np.diff(vals)
    scale = np.maximum(np.abs(vals[1:]), np.abs(vals[:-1]))
    return bool(np.all(diffs >= -1e-12 * scale)) if increasing else bool(np.all(diffs <= 1e-12 * scale))


@dataclass(frozen=True)
class AppendixIntegral:
    """``F(r) = int t^-a exp(-b^2 t) exp(-r^2 / (c^2 t)) f(t) dt``."""

    f: Callable
    a: float = 0.0
    b: float = 0.0
    c: float = 1.0
    _f: Callable = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.a < 0 or self.b < 0 or not self.c > 0:
            raise ValueError("need a >= 0, b >= 0, c > 0")
        fv = _vectorise(self.f)
        object.__setattr__(self, "_f", fv)
        grid = np.geomspace(1e-4, 1e4, 81)
        vals = fv(grid)
        if not _is_monotone(vals, increasing=False):
            raise PreconditionError("f must be non-increasing")
        if not _is_monotone(grid ** 2 * vals, increasing=True):
            raise PreconditionError("t^2 f(t) must be non-decreasing")


def appendix_F(ai: AppendixIntegral, r: float, rtol: float = 1e-11) -> float:
    """Quadrature of ``F(r)``; divergent combinations raise :class:`NonIntegrable`."""
    if not r > 0:
        raise ValueError("r must be positive")
    a, b, c = ai.a, ai.b, ai.c

    def integrand(t):
        with np.errstate(over="ignore", under="ignore", divide="ignore"):
            damp = np.exp(-b * b * t - r * r / (c * c * t))
            out = np.zeros_like(t)
            live = damp > 0
            out[live] = t[live] ** -a * damp[live] * ai._f(t[live])
        return out

    peak = r / (b * c) if b > 0 else r * r
    try:
        return integrate_half_line(integrand, peak, rtol=rtol)[0]
    except NonIntegrable as exc:
        raise NonIntegrable(f"F({r:g}) diverges for a={a}, b={b}, c={c}: {exc}") from exc


def check_decay_certificate(f, cert, x_max: float = 1e4) -> dict:
    """Test ``f(t x) / f(t) <= c' x^-gamma'`` for ``t > R``, ``x >= 1`` on a grid.

    Returns the worst observed ``ratio * x^gamma' / c'`` and where it occurs.
    """
    c_prime, gamma_prime, R = cert
    fv = _vectorise(f)
    ts = np.geomspace(max(R, 1e-3) * (1 + 1e-9) if R > 0 else 1e-3, 1e4, 41)
    xs = np.geomspace(1.0, x_max, 41)
    T, Xg = np.meshgrid(ts, xs, indexing="ij")
    ratio = fv(T * Xg) / fv(T)
    score = ratio * Xg ** gamma_prime / c_prime
    i, j = np.unravel_index(np.argmax(score), score.shape)
    return {"ok": bool(score[i, j] <= 1 + 1e-12), "worst": float(score[i, j]),
            "t": float(ts[i]), "x": float(xs[j])}


def appendix_envelope(ai: AppendixIntegral, r: float, certificate=None) -> float:
    """Envelope of ``F(r)``.

    ``b > 0``: ``r^(1/2 - a) f(r / (b c)) exp(-2 b r / c)`` for ``r >= 1``.
    ``b = 0``: ``r^(2 - 2a) f(r^2)``; when ``a <= 1`` a decay certificate
    ``(c', gamma', R)`` with ``gamma' > 1 - a`` is required and ``r > sqrt(R)``.
    """
    a, b, c = ai.a, ai.b, ai.c
    if b > 0:
        if r < 1:
            raise ValueError("the exponential envelope needs r >= 1")
        return r ** (0.5 - a) * float(ai._f(np.array([r / (b * c)]))[0]) * math.exp(-2 * b * r / c)
    if a <= 1:
        if certificate is None:
            raise PreconditionError("b = 0 and a <= 1 need a decay certificate (c', gamma', R)")
        _, gamma_prime, R = certificate
        if not gamma_prime > 1 - a:
            raise PreconditionError(f"gamma'={gamma_prime} must exceed 1 - a = {1 - a}")
        if not r > math.sqrt(R):
            raise ValueError(f"r must exceed sqrt(R) = {math.sqrt(R):g}")
    return r ** (2 - 2 * a) * float(ai._f(np.array([r * r]))[0])
