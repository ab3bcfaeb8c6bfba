"""Named functions with known densities.

Names are ``family`` or ``family:param[:param]``, e.g. ``stable:1``,
``relativistic:1:1``, ``iterlog:3``, ``resolvent:log1p``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import erfcx, gamma as gamma_fn

from .bernstein import iterated_log
from .errors import LaplaceTailsError
from .series import Expression, parse_expression
from .spectral import TaylorAtZero

__all__ = ["Entry", "lookup", "resolve", "FAMILIES", "subexponential_taylor",
           "mittag_leffler_half_density", "quadratic_tail_density"]


@dataclass(frozen=True)
class Entry:
    name: str
    expr: Expression
    kind: str  # "cm" or "bf"
    density: Callable | None  # nu for "cm", Levy density for "bf"
    note: str = ""


def mittag_leffler_half_density(t):
    """Density of ``1/(1+sqrt(lam))``: ``1/sqrt(pi t) - erfcx(sqrt t)``."""
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    small = t <= 100
    ts = t[small]
    out[small] = 1 / np.sqrt(math.pi * ts) - erfcx(np.sqrt(ts))
    tl = t[~small]
    if tl.size:
        # asymptotic series: (pi t)^-1/2 sum_k (-1)^(k+1) (2k-1)!! / (2t)^k
        acc = np.zeros_like(tl)
        term = np.ones_like(tl)
        for k in range(1, 16):
            term = term * (2 * k - 1) / (2 * tl)
            acc += (-1) ** (k + 1) * term
        out[~small] = acc / np.sqrt(math.pi * tl)
    return out


def quadratic_tail_density(t):
    """``(2 - exp(-t)(t^2 + 2t + 2)) / t^2``, series near 0."""
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    small = t < 0.5
    ts = t[small]
    acc = np.zeros_like(ts)
    for k in range(3, 26):
        acc += (-1) ** (k + 1) * (k - 1) * (k - 2) * ts ** (k - 2) / math.factorial(k)
    out[small] = acc
    tl = t[~small]
    out[~small] = (2 - np.exp(-tl) * (tl * tl + 2 * tl + 2)) / (tl * tl)
    return out


def _stable_levy(alpha, mass=0.0):
    s = alpha / 2
    c = s / gamma_fn(1 - s)
    lam0 = mass ** (2 / alpha) if mass else 0.0
    return lambda t: c * np.exp(-lam0 * np.asarray(t, dtype=float)) * np.asarray(t, dtype=float) ** (-1 - s)


def _num(text):
    try:
        return float(text)
    except ValueError:
        raise LaplaceTailsError(f"bad catalog parameter {text!r}") from None


def _check_alpha(alpha, hi=2.0):
    if not 0 < alpha < hi:
        raise LaplaceTailsError(f"alpha={alpha} must lie in (0, {hi:g})")


def _fmt(v: float) -> str:
    return repr(float(v)) if v != int(v) else str(int(v))


def _build(name: str) -> Entry:
    family, *params = name.split(":")
    if family == "log1p" and not params:
        return Entry(name, parse_expression("log(1 + x)"), "bf",
                     lambda t: np.exp(-np.asarray(t, dtype=float)) / np.asarray(t, dtype=float),
                     "Levy density exp(-t)/t")
    if family == "iterlog" and len(params) == 1:
        n = int(_num(params[0]))
        return Entry(name, iterated_log(n), "bf", None, f"{n}-fold iterated log(1+x)")
    if family == "stable" and len(params) == 1:
        a = _num(params[0])
        _check_alpha(a)
        return Entry(name, parse_expression(f"x^({_fmt(a / 2)})"), "bf", _stable_levy(a),
                     "phi = x^(alpha/2)")
    if family == "relativistic" and len(params) == 2:
        a, m = _num(params[0]), _num(params[1])
        _check_alpha(a)
        shift = m ** (2 / a)
        expr = parse_expression(f"(x + {_fmt(shift)})^({_fmt(a / 2)}) - {_fmt(m)}")
        return Entry(name, expr, "bf", _stable_levy(a, m),
                     "phi = (x + m^(2/alpha))^(alpha/2) - m")
    if family == "stablelog" and len(params) == 1:
        a = _num(params[0])
        _check_alpha(a)
        expr = parse_expression(f"x^({_fmt(a / 2)}) * log(1 + x^({_fmt(1 - a / 2)}))")
        return Entry(name, expr, "bf", None, "phi = x^(alpha/2) log(1 + x^(1-alpha/2))")
    if family == "powres" and len(params) == 1:
        a = _num(params[0])
        _check_alpha(a, 1.0)
        dens = mittag_leffler_half_density if a == 0.5 else None
        return Entry(name, parse_expression(f"1/(1 + x^({_fmt(a)}))"), "cm", dens,
                     "f = 1/(1+x^alpha)")
    if family == "logres" and not params:
        return Entry(name, parse_expression("1/(1 + log(1 + x))"), "cm", None,
                     "f = 1/(1+log(1+x))")
    if family == "logpowres" and len(params) == 1:
        a = _num(params[0])
        _check_alpha(a, 1.0)
        return Entry(name, parse_expression(f"1/(1 + log(1 + x^({_fmt(a)})))"), "cm", None,
                     "f = 1/(1+log(1+x^alpha))")
    if family == "quadtail" and not params:
        return Entry(name, parse_expression("1 + x/(1 + x) - 2*x*log(1 + 1/x)"), "cm",
                     quadratic_tail_density, "density (2 - exp(-t)(t^2+2t+2))/t^2")
    if family == "geometric" and not params:
        return Entry(name, parse_expression("1/(1 + x)"), "cm",
                     lambda t: np.exp(-np.asarray(t, dtype=float)), "density exp(-t)")
    if family == "lebesgue" and not params:
        return Entry(name, parse_expression("1/x"), "cm",
                     lambda t: np.ones_like(np.asarray(t, dtype=float)), "density 1")
    if family == "pointmass" and not params:
        return Entry(name, parse_expression("exp(-x)"), "cm", None, "unit mass at t = 1")
    if family == "resolvent" and params:
        inner = lookup(":".join(params))
        if inner.kind != "bf":
            raise LaplaceTailsError("resolvent needs a Bernstein catalog entry")
        expr = parse_expression(f"1/(1 + {inner.expr.text()})")
        dens = mittag_leffler_half_density if inner.name == "stable:1" else None
        return Entry(name, expr, "cm", dens, f"1/(1 + phi) for phi = {inner.name}")
    raise LaplaceTailsError(f"unknown catalog name {name!r}")


FAMILIES = {
    "log1p": "phi = log(1+x); Levy density exp(-t)/t",
    "iterlog:n": "n-fold iterated log(1+x)",
    "stable:alpha": "phi = x^(alpha/2), 0 < alpha < 2",
    "relativistic:alpha:m": "phi = (x + m^(2/alpha))^(alpha/2) - m",
    "stablelog:alpha": "phi = x^(alpha/2) log(1 + x^(1 - alpha/2))",
    "powres:alpha": "f = 1/(1 + x^alpha), 0 < alpha < 1 (closed-form density at alpha = 0.5)",
    "logres": "f = 1/(1 + log(1 + x))",
    "logpowres:alpha": "f = 1/(1 + log(1 + x^alpha)), 0 < alpha < 1",
    "quadtail": "f with density (2 - exp(-t)(t^2+2t+2))/t^2",
    "geometric": "f = 1/(1+x); density exp(-t)",
    "lebesgue": "f = 1/x; density 1",
    "pointmass": "f = exp(-x); unit mass at 1 (no density)",
    "resolvent:<bf name>": "Phi = 1/(1 + phi) for a Bernstein entry",
}


def lookup(name: str) -> Entry:
    return _build(name.strip())


def resolve(text: str) -> Entry:
    """Catalog entry by name, else an ad-hoc entry for a formula."""
    family = text.strip().split(":")[0]
    if family in {key.split(":")[0] for key in FAMILIES}:
        return lookup(text)
    return Entry(text, parse_expression(text), "cm", None, "user formula")


def subexponential_taylor(N: int = 64, bits: int = 256) -> TaylorAtZero:
    """Taylor data at 0+ of the transform of ``exp(-sqrt t)``: moments ``2 (2n+1)!``."""
    return TaylorAtZero.from_moments([2 * math.factorial(2 * n + 1) for n in range(N + 1)], bits)


def subexponential_density(t):
    return np.exp(-np.sqrt(np.asarray(t, dtype=float)))
