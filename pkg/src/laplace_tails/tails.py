"""Two-sided exponential tail envelopes for representing densities.

Workflow: fit a ratio certificate on the derivative of the extension
(:func:`fit_a3`), turn it into explicit constants (:func:`envelope`), then
evaluate lower/upper bounds at any ``t`` (:func:`eval_envelope`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import A3FitError, IndeterminateLimit, LaplaceTailsError
from .series import DEFAULT_PRECISION, PrecisionConfig, as_function, context, to_float
from .spectral import Extension, TaylorAtZero, estimate_omega0, taylor_at_zero

__all__ = [
    "A3Certificate", "EnvelopeCertificate", "ConverseReport", "check_a2", "fit_a3",
    "envelope", "eval_envelope", "no_exponential_decay_probe", "rv_index",
    "converse_diagnostics", "C1", "GAMMA_CAP",
]

C1 = 3 * math.e
GAMMA_CAP = 8.0


def check_a2(density, omega0: float, grid, slack: float = 1e-8) -> bool:
    """Is ``t -> exp(-omega0 t) nu(t) / t`` non-increasing on ``grid``?"""
    grid = np.asarray(grid, dtype=float)
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be positive and strictly increasing")
    vals = []
    for t in grid:
        try:
            v = float(density(t))
        except (ArithmeticError, ValueError, LaplaceTailsError) as exc:
            raise LaplaceTailsError(f"density oracle failed at t={t:g}: {exc}") from exc
        if not math.isfinite(v):
            raise LaplaceTailsError(f"density oracle returned {v} at t={t:g}")
        # log form keeps exp(-omega0 t) from overflowing
        vals.append(-omega0 * t + math.log(v) - math.log(t) if v > 0 else -math.inf)
    return all(b <= a + slack for a, b in zip(vals, vals[1:]))


@dataclass(frozen=True)
class A3Certificate:
    """Witnessed bound ``f_e'(lam x + w0) / f_e'(lam + w0) <= theta x^-gamma``."""

    theta: float
    gamma: float
    lambda1: float
    lambda2: float
    witness_grid: tuple = field(repr=False)
    witnessed_lambda: tuple = (0.0, math.inf)
    flags: tuple = ()


@dataclass(frozen=True)
class EnvelopeCertificate:
    omega0: float
    theta: float
    gamma: float
    c1: float
    delta: float
    c2: float
    valid_t_range: tuple
    witnessed_t_range: tuple

    def as_dict(self) -> dict:
        return {
            "omega0": self.omega0, "theta": self.theta, "gamma": self.gamma,
            "c1": self.c1, "delta": self.delta, "c2": self.c2,
            "valid_t_range": list(self.valid_t_range),
            "witnessed_t_range": list(self.witnessed_t_range),
        }


def _deriv_at(ext: Extension, args):
    out = {}
    for a in sorted(set(args)):
        out[a] = ext.jet(a, 1).coeffs[1]
    return out


def fit_a3(ext: Extension, lambda1: float = 0.0, lambda2: float = math.inf,
           xmax: float = 1e4, n: int = 32) -> A3Certificate:
    """Fit ``(theta, gamma)`` on a ``n x n`` log grid of ``(lam, x)``.

    ``gamma`` is the smallest observed decay slope ``-log(ratio)/log(x)``
    (capped at 8), and ``theta = max(1, sup ratio x^gamma)``.
    """
    if not lambda1 < lambda2:
        raise ValueError("lambda1 must be below lambda2")
    lo = max(lambda1, 1e-4)
    hi = min(lambda2, 1e4)
    if not math.isfinite(ext.omega0):
        # no abscissa to shift by; report what an unshifted fit would give
        try:
            capped, worst = _fit(ext, 0.0, lo, hi, xmax, n, lambda1, lambda2), None
        except A3FitError as exc:
            capped, worst = None, exc.worst_sample
        err = A3FitError("omega0 is -inf (non-polynomial decay); no shifted ratio bound", worst)
        err.capped = capped
        raise err
    return _fit(ext, ext.omega0, lo, hi, xmax, n, lambda1, lambda2)


def _fit(ext, w0, lo, hi, xmax, n, lambda1, lambda2):
    ctx = context(ext.prec.significand_bits)
    lams = np.geomspace(lo, hi, n)
    xs = np.geomspace(1.0, xmax, n)
    w = ctx.mpf(w0)
    args = [ctx.mpf(float(l)) * ctx.mpf(float(x)) + w for l in lams for x in xs]
    d = _deriv_at(ext, args)
    samples = []
    for l in lams:
        base = d[ctx.mpf(float(l)) + w]
        for x in xs:
            r = d[ctx.mpf(float(l)) * ctx.mpf(float(x)) + w] / base
            samples.append((float(x), float(l), to_float(r)))
    slopes = [(-math.log(r) / math.log(x) if r > 0 else math.inf, (x, l, r))
              for x, l, r in samples if x > 1]
    gamma, worst = min(slopes, key=lambda s: s[0])
    flags = []
    if gamma >= GAMMA_CAP:
        gamma = GAMMA_CAP
        flags.append("non-polynomial decay")
    if gamma < 1e-3:
        raise A3FitError(f"ratio does not decay: slope {gamma:.3g} at x={worst[0]:g}, "
                         f"lambda={worst[1]:g}", worst)
    theta = max([1.0] + [r * x ** gamma for x, _, r in samples])
    return A3Certificate(theta, gamma, lambda1, lambda2, tuple(samples), (lo, hi), tuple(flags))


def _div(a, b):
    if b == 0:
        return math.inf
    if math.isinf(b):
        return 0.0
    return a / b


def envelope(ext: Extension, cert: A3Certificate) -> EnvelopeCertificate:
    """Explicit constants: ``c1 = 3e``, ``delta``, ``c2 = delta^(gamma+3) / (10 theta)``."""
    th, g = cert.theta, cert.gamma
    delta = min(0.99, (g / (6 * math.e * th)) ** (1 / g))
    c2 = delta ** (g + 3) / (10 * th)
    valid = (_div(delta, cert.lambda2), _div(delta, cert.lambda1))
    lo, hi = cert.witnessed_lambda
    witnessed = (max(valid[0], _div(delta, hi)), min(valid[1], _div(delta, lo)))
    return EnvelopeCertificate(ext.omega0, th, g, C1, delta, c2, valid, witnessed)


def envelope_base(ext: Extension, t: float) -> float:
    """``t^-2 |f_e'(1/t + omega0)| exp(omega0 t)``."""
    ctx = context(ext.prec.significand_bits)
    t_mp = ctx.mpf(t)
    w = ctx.mpf(ext.omega0)
    d = ext.jet(1 / t_mp + w, 1).coeffs[1]
    return to_float(abs(d) / t_mp ** 2 * ctx.exp(w * t_mp))


def eval_envelope(env: EnvelopeCertificate, ext: Extension, t: float):
    """``(lower, upper)``; ``lower`` is ``None`` outside the valid range."""
    if not t > 0:
        raise ValueError("t must be positive")
    base = envelope_base(ext, t)
    lo, hi = env.valid_t_range
    lower = env.c2 * base if lo < t < hi else None
    return lower, env.c1 * base


def no_exponential_decay_probe(density, sigma: float, tmax: float, npts: int = 64) -> float:
    """``max nu(t) exp(sigma t)`` over a log grid on ``[1, tmax]``; ``inf`` on overflow."""
    best = 0.0
    for t in np.geomspace(1.0, tmax, npts):
        v = float(density(t))
        try:
            val = v * math.exp(sigma * t)
        except OverflowError:
            return math.inf
        if not math.isfinite(val):
            return math.inf
        best = max(best, val)
    return best


def _slope(fp, lam, x, ctx, prec):
    a = fp.jet(ctx.mpf(lam) * x, 1, prec).coeffs[1]
    b = fp.jet(ctx.mpf(lam), 1, prec).coeffs[1]
    return to_float(ctx.log(abs(a / b)) / ctx.log(x))


def rv_index(f, at: str = "infinity", prec: PrecisionConfig = DEFAULT_PRECISION,
             x: float = 2.0, tol: float = 0.1) -> float:
    """Regular-variation index of ``f'`` toward ``at`` (``"origin"`` or ``"infinity"``)."""
    if at not in ("origin", "infinity"):
        raise ValueError("at must be 'origin' or 'infinity'")
    f = as_function(f)
    ctx = context(prec.significand_bits)
    sgn = 1 if at == "infinity" else -1
    far = [ctx.mpf(10) ** (sgn * (100 + k / 4)) for k in range(5)]
    near = [ctx.mpf(10) ** (sgn * (50 + k / 4)) for k in range(5)]
    s_far = float(np.mean([_slope(f, l, x, ctx, prec) for l in far]))
    s_near = float(np.mean([_slope(f, l, x, ctx, prec) for l in near]))
    if not math.isfinite(s_far) or abs(s_far - s_near) > tol:
        raise IndeterminateLimit(1, [s_near, s_far])
    return s_far


@dataclass(frozen=True)
class ConverseReport:
    ok: bool
    tail: tuple
    omega0: float
    finite_flags: tuple
    first_failing_n: int | None
    f0: float | None
    detail: str


def converse_diagnostics(f, tail, prec: PrecisionConfig = DEFAULT_PRECISION,
                         check: str | None = "cm", taylor: TaylorAtZero | None = None,
                         n_check: int = 16) -> ConverseReport:
    """Check derivative finiteness at 0+ against a tail hypothesis.

    ``tail`` is ``("exp", beta, alpha)`` or ``("poly", m)``.
    """
    t = taylor if taylor is not None else taylor_at_zero(f, max(n_check, prec.jet_order), prec, check)
    flags = t.finite_flags
    w0 = estimate_omega0(t)
    f0 = to_float(t.coeffs[0]) if flags[0] else None
    kind = tail[0]
    if kind == "exp":
        beta, alpha = float(tail[1]), float(tail[2])
        bad = next((n for n in range(min(n_check, t.N) + 1) if not flags[n]), None)
        if bad is not None:
            return ConverseReport(False, tuple(tail), w0, flags, bad, f0,
                                  f"derivative {bad} at 0+ is infinite")
        if alpha >= 1 and not w0 <= -beta + 1e-3:
            return ConverseReport(False, tuple(tail), w0, flags, None, f0,
                                  f"omega0={w0:.6g} exceeds -beta={-beta:.6g}")
        return ConverseReport(True, tuple(tail), w0, flags, None, f0,
                              "all derivatives at 0+ finite")
    if kind == "poly":
        m = int(tail[1])
        bad = next((n for n in range(max(m - 1, 0), t.N + 1) if flags[n]), None)
        if bad is not None:
            return ConverseReport(False, tuple(tail), w0, flags, bad, f0,
                                  f"derivative {bad} at 0+ is finite")
        return ConverseReport(True, tuple(tail), w0, flags, None, f0,
                              f"derivatives of order >= {max(m - 1, 0)} infinite at 0+")
    raise ValueError(f"unknown tail kind {kind!r}")
