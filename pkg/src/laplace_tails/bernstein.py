"""Bernstein functions: Levy triples, the abscissa of the derivative,
Levy-density envelopes, the star transform and iterated logarithms."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, PreconditionError
from .inversion import TabulatedDensity, invert_density
from .quadrature import integrate_half_line
from .series import (
    DEFAULT_PRECISION, Derivative, Expression, JetFunction, Num, Offset, PrecisionConfig,
    Shifted, Var, as_function, compose, context, div, parse_expression, to_float,
)
from .spectral import assert_sign_pattern, extend, sign_violations, taylor_at_zero
from .tails import A3Certificate, EnvelopeCertificate, check_a2, envelope, eval_envelope, fit_a3

__all__ = [
    "BernsteinTriple", "LevyEnvelope", "triple_of", "beta_of", "star", "shift_test",
    "levy_envelope", "iterated_log", "iterated_log_abscissae", "iterated_log_profile",
]


@dataclass(frozen=True)
class BernsteinTriple:
    """Killing ``a``, drift ``b`` and Levy density ``levy(t)`` of ``expr``."""

    a: float
    b: float
    levy: Callable[[float], float]
    expr: JetFunction
    closed_form: bool = False

    def _levy_vec(self, t):
        return np.array([self.levy(float(s)) for s in np.atleast_1d(t)])

    def levy_integrability(self) -> float:
        """``int min(1, t) mu(t) dt`` (raises if infinite)."""
        g = lambda t: np.minimum(1.0, t) * self._levy_vec(t)
        return integrate_half_line(g, rtol=1e-9)[0]

    def reconstruct(self, lam: float) -> float:
        """``a + b lam + int (1 - exp(-lam t)) mu(t) dt``."""
        g = lambda t: -np.expm1(-lam * t) * self._levy_vec(t)
        return self.a + self.b * lam + integrate_half_line(g, rtol=1e-10)[0]

    def derivative_transform(self, lam: float) -> float:
        """``b + int exp(-lam t) t mu(t) dt``, which should equal ``phi'(lam)``."""
        g = lambda t: np.exp(-lam * t) * t * self._levy_vec(t)
        return self.b + integrate_half_line(g, rtol=1e-10)[0]


def _limit_at_infinity_over_lambda(phi: JetFunction, prec) -> float:
    ctx = context(prec.significand_bits)
    prev = None
    for k in range(1, 13):
        lam = ctx.ldexp(1, 2 ** k)
        v = phi.value(lam, prec) / lam
        if abs(v) < 1e-12:
            return 0.0
        if prev is not None and abs(v - prev) <= 1e-10 * abs(v):
            return to_float(v)
        prev = v
    return to_float(prev)


def triple_of(phi, prec: PrecisionConfig = DEFAULT_PRECISION,
              levy: Callable[[float], float] | None = None, pw_order: int = 64) -> BernsteinTriple:
    """Levy triple of a Bernstein function.

    Without a closed-form ``levy`` the density is recovered as the
    Post-Widder density of ``phi'`` (tilted by its abscissa) divided by ``t``.
    """
    phi = as_function(phi)
    assert_sign_pattern(phi, "bf", 12, prec)
    a = to_float(taylor_at_zero(phi, 0, prec, check=None).coeffs[0])
    a = 0.0 if abs(a) < 1e-12 else a
    b = _limit_at_infinity_over_lambda(phi, prec)
    if levy is not None:
        return BernsteinTriple(a, b, levy, phi, True)
    residual = [abs(to_float(phi.value(lam, prec)) - a - b * lam) for lam in (0.5, 2.0, 8.0)]
    if max(residual) <= 1e-12 * (1 + abs(a) + 8 * b):
        # affine phi: no jumps
        return BernsteinTriple(a, b, lambda t: 0.0, phi, True)
    ext = extend(Derivative(phi), prec, kind="cm")
    shift = ext.omega0 if math.isfinite(ext.omega0) else 0.0
    table = TabulatedDensity(ext, shift, pw_order, prec=prec)
    return BernsteinTriple(a, b, lambda t: table(t) / t, phi, False)


def beta_of(phi, prec: PrecisionConfig = DEFAULT_PRECISION) -> float:
    """Minus the abscissa of ``phi'``."""
    phi = as_function(phi)
    ext = extend(Derivative(phi), prec, kind="cm")
    return 0.0 if ext.omega0 == 0 else -ext.omega0


def star(phi) -> Expression:
    """``lam / phi(lam)``."""
    phi = as_function(phi)
    if not isinstance(phi, Expression):
        raise TypeError("star needs a parsed expression")
    if phi.ast == Var():
        return Expression(Num("1"))
    if phi.ast == Num("0"):
        raise DomainError("phi is identically zero")
    return Expression(div(Var(), phi.ast))


def shift_test(phi, a_values, prec: PrecisionConfig = DEFAULT_PRECISION, order: int = 12,
               lams=None) -> bool:
    """BF sign pattern of ``h_a(lam) = phi_e(lam + a) - phi_e(a)`` for every ``a``."""
    phi = as_function(phi)
    try:
        assert_sign_pattern(phi, "bf", order, prec)
    except PreconditionError as exc:
        raise PreconditionError(f"shift test needs a Bernstein function: {exc}") from exc
    beta = beta_of(phi, prec)
    ext = extend(phi, prec, kind=None)
    lams = lams or [2.0 ** k for k in range(-6, 7, 2)]
    ok = True
    for a in a_values:
        if not (a > -beta and a > ext.omega0):
            raise ValueError(f"shift a={a} must exceed -beta={-beta:g}")
        h = Offset(Shifted(ext, a), ext.value(a))
        if sign_violations(h, lams, order, "bf", prec):
            ok = False
    return ok


@dataclass(frozen=True)
class LevyEnvelope:
    beta: float
    certificate: EnvelopeCertificate
    a3: A3Certificate
    derivative_ext: object

    def bounds(self, t: float):
        """``(lower, upper)`` for the Levy density at ``t``; ``lower`` may be ``None``."""
        lower, upper = eval_envelope(self.certificate, self.derivative_ext, t)
        return (None if lower is None else lower / t), upper / t

    def base(self, t: float) -> float:
        """``t^-3 |phi_e''(1/t - beta)| exp(-beta t)``."""
        return self.bounds(t)[1] / self.certificate.c1


def levy_envelope(phi, prec: PrecisionConfig = DEFAULT_PRECISION, density=None,
                  a2_grid=None) -> LevyEnvelope:
    """Envelope constants for the Levy density of ``phi``.

    Applies the tail machinery to ``phi'``, whose representing density is
    ``t mu(t)``.  ``density`` (the Levy density) is used for the
    monotonicity precondition; without it an untilted Post-Widder oracle is used.
    """
    phi = as_function(phi)
    ext = extend(Derivative(phi), prec, kind="cm")
    beta = 0.0 if ext.omega0 == 0 else -ext.omega0
    grid = a2_grid if a2_grid is not None else np.geomspace(1e-2, 20, 16)
    if density is None:
        shift = ext.omega0 if math.isfinite(ext.omega0) else 0.0
        rep = lambda t: invert_density(ext, t, 64, prec.with_order(max(64, prec.jet_order)), shift=shift)
    else:
        rep = lambda t: t * density(t)
    if not check_a2(rep, ext.omega0 if math.isfinite(ext.omega0) else 0.0, grid):
        raise PreconditionError("exp(beta t) mu(t) is not non-increasing on the check grid")
    a3 = fit_a3(ext)
    return LevyEnvelope(beta, envelope(ext, a3), a3, ext)


def iterated_log(n: int) -> Expression:
    """``phi_1 = log(1+x)``, ``phi_(k+1) = phi_k o phi_1``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    first = parse_expression("log(1 + x)")
    out = first
    for _ in range(n - 1):
        out = compose(out, first)
    return Expression(out.ast)


def _inverse_at_minus_one(n: int) -> float:
    # phi_1^{-1}(z) = exp(z) - 1, applied n times to -1
    z = -1.0
    for _ in range(n):
        z = math.expm1(z)
    return z


def iterated_log_abscissae(n: int, prec: PrecisionConfig = DEFAULT_PRECISION) -> dict:
    """``beta_n`` next to ``phi_n^{-1}(-1)`` and ``phi_(n-1)^{-1}(-1)``."""
    beta = beta_of(iterated_log(n), prec)
    return {
        "n": n,
        "beta": beta,
        "inverse_at_minus_one": _inverse_at_minus_one(n),
        "previous_inverse_at_minus_one": _inverse_at_minus_one(n - 1),
        "gap_to_inverse": beta + _inverse_at_minus_one(n),
        "gap_to_previous": beta + _inverse_at_minus_one(n - 1),
    }


def iterated_log_profile(n: int, t: float) -> float:
    """Small-``t`` profile ``t^-1 prod_(k<n) 1/phi_k(1/t)``."""
    s = 1.0 / t
    out = 1.0 / t
    v = s
    for _ in range(1, n):
        v = math.log1p(v)
        out /= v
    return out
