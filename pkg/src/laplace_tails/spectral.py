"""Taylor data at 0+, abscissa of convergence, and the real-line extension."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, IndeterminateLimit, NotCompletelyMonotone
from .series import (
    DEFAULT_PRECISION, Jet, JetFunction, PrecisionConfig, as_function, context, to_float,
)

__all__ = [
    "TaylorAtZero", "Extension", "taylor_at_zero", "estimate_omega0",
    "radius_diagnostics", "extend", "extension_derivative", "sign_violations",
    "assert_sign_pattern",
]

LIMIT_EXPONENTS = range(10, 41)
CHECK_GRID = [2.0 ** k for k in range(-8, 9, 2)]


def sign_violations(f: JetFunction, lams, order: int, kind: str = "cm",
                    prec: PrecisionConfig = DEFAULT_PRECISION, slack: float = 1e-20):
    """List ``(n, lam)`` where the CM (or BF) sign pattern fails.

    CM: ``(-1)^n f^(n) >= 0``.  BF: ``f >= 0`` and ``(-1)^(n-1) f^(n) >= 0`` for n >= 1.
    The slack is relative to the natural size ``n! lam^-n max_k |c_k| lam^k``.
    """
    bad = []
    for lam in lams:
        jet = f.jet(lam, order, prec)
        ctx = context(jet.bits)
        lam_mp = ctx.mpf(lam)
        size = max(abs(c) * lam_mp ** k for k, c in enumerate(jet.coeffs))
        for n, c in enumerate(jet.coeffs):
            sign = (-1) ** n if kind == "cm" else (1 if n == 0 else (-1) ** (n - 1))
            if sign * c < -slack * size / lam_mp ** n:
                bad.append((n, float(lam)))
    return bad


def assert_sign_pattern(f, kind="cm", order=12, prec=DEFAULT_PRECISION, lams=None):
    bad = sign_violations(f, lams or CHECK_GRID, order, kind, prec)
    if bad:
        n, lam = bad[0]
        name = "completely monotone" if kind == "cm" else "a Bernstein function"
        raise NotCompletelyMonotone(f"{f.label} is not {name}: sign fails at n={n}, lambda={lam:g}")


@dataclass(frozen=True)
class TaylorAtZero:
    """``coeffs[n] = f^(n)(0+)/n!`` with per-order finiteness flags."""

    coeffs: tuple
    finite_flags: tuple
    exact: bool = False
    bits: int = 256

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def from_moments(cls, moments, bits: int = 256) -> "TaylorAtZero":
        """Build from moments ``m_n = int t^n nu(dt)``, so ``a_n = (-1)^n m_n / n!``."""
        ctx = context(bits)
        coeffs = tuple((-1) ** n * ctx.mpf(m) / ctx.factorial(n) for n, m in enumerate(moments))
        return cls(coeffs, (True,) * len(coeffs), False, bits)

    def all_finite(self) -> bool:
        return all(self.finite_flags)


def _classify(values, ctx):
    """Return ``(finite, limit)`` for the sequence f^(n)(2^-j), j increasing."""
    v = list(values)
    scale = max(abs(v[-1]), ctx.mpf(10) ** -300)
    d = [v[i + 1] - v[i] for i in range(len(v) - 1)]
    if abs(d[-1]) <= 1e-10 * scale and abs(d[-2]) <= 1e-10 * scale:
        return True, v[-1]
    tail = [abs(x) for x in v[-6:]]
    growing = all(b > a for a, b in zip(tail, tail[1:])) and (
        all(x > 0 for x in v[-6:]) or all(x < 0 for x in v[-6:]))
    ratios = [abs(d[i + 1] / d[i]) if d[i] != 0 else ctx.inf for i in range(len(d) - 6, len(d) - 1)]
    if growing and (tail[-1] >= 2 * tail[0] or min(ratios) >= 0.97):
        return False, ctx.inf if v[-1] > 0 else -ctx.inf
    if all(r <= 0.9 for r in ratios) and all(d[i] * d[i + 1] > 0 for i in range(len(d) - 5, len(d) - 1)):
        r = ratios[-1]
        return True, v[-1] + d[-1] * r / (1 - r)
    if all(x == 0 for x in d[-5:]):
        return True, v[-1]
    return None, None


def taylor_at_zero(f, N: int | None = None, prec: PrecisionConfig = DEFAULT_PRECISION,
                   check: str | None = "cm") -> TaylorAtZero:
    """Coefficients ``f^(n)(0+)/n!`` for ``n <= N``.

    Analytic-at-zero inputs give exact jets; otherwise limits along ``2^-j``
    (j = 10..40) are classified as converged or divergent.
    ``check`` is ``"cm"``, ``"bf"`` or ``None`` (skip the sign-pattern test).
    """
    f = as_function(f)
    N = prec.jet_order if N is None else N
    ctx = context(prec.significand_bits)
    if check:
        assert_sign_pattern(f, check, min(N, 12), prec)
    try:
        jet = f.jet(0, N, prec)
        if all(ctx.isfinite(c) for c in jet.coeffs):
            return TaylorAtZero(jet.coeffs, (True,) * (N + 1), True, prec.significand_bits)
    except (DomainError, ZeroDivisionError, ValueError):
        pass

    def limits(order):
        jets = [f.jet(ctx.ldexp(1, -j), order, prec) for j in LIMIT_EXPONENTS]
        coeffs, flags = [], []
        for n in range(order + 1):
            seq = [jt.coeffs[n] * ctx.factorial(n) for jt in jets]
            finite, lim = _classify(seq, ctx)
            if finite is None:
                raise IndeterminateLimit(n, [float(x) for x in seq])
            flags.append(finite)
            coeffs.append(lim / ctx.factorial(n) if finite else lim)
            if not finite:
                break
        return coeffs, flags

    coeffs, flags = limits(min(N, 4))
    if all(flags) and N > 4:
        coeffs, flags = limits(N)
    if not all(flags):
        first = flags.index(False)
        flags = flags[: first + 1] + [False] * (N - first)
        coeffs = coeffs[: first + 1] + [ctx.nan] * (N - first)
    return TaylorAtZero(tuple(coeffs), tuple(flags), False, prec.significand_bits)


def radius_diagnostics(t: TaylorAtZero) -> dict:
    """Radius estimates from the coefficient window ``n in [N/2, N]``.

    ``ratio`` fits ``|a_n/a_(n-1)| = A + B/n`` (Domb-Sykes); ``root`` is the
    windowed ``max |a_n|^(1/n)``.  Both are reported as inverse radii.
    """
    N = t.N
    lo = max(1, N // 2)
    window = list(range(lo, N + 1))
    out = {"window": [lo, N], "root": None, "ratio": None, "ratio_slope": None,
           "kind": "finite", "coeff_window": []}
    if not t.all_finite():
        out["kind"] = "infinite-derivative"
        return out
    a = [abs(c) for c in t.coeffs]
    out["coeff_window"] = [to_float(a[n]) for n in window]
    if all(c == 0 for c in a[1:]):
        out["kind"] = "entire"
        out["root"] = out["ratio"] = 0.0
        return out
    roots = [float(a[n] ** (1.0 / n)) if a[n] != 0 else 0.0 for n in window if n >= 1]
    out["root"] = max(roots)
    pts = [(n, float(a[n] / a[n - 1])) for n in window if a[n] != 0 and a[n - 1] != 0]
    if len(pts) < 4:
        out["kind"] = "entire"
        out["ratio"] = 0.0
        return out
    ns = np.array([p[0] for p in pts], dtype=float)
    rs = np.array([p[1] for p in pts])
    B, A = np.polyfit(1.0 / ns, rs, 1)
    out["ratio"] = float(A)
    out["ratio_slope"] = float(B)
    half = [r for n, r in pts if n <= lo + 1]
    r_end, r_half = rs[-1], (half[0] if half else rs[0])
    if r_end >= 1.5 * r_half:
        out["kind"] = "zero-radius"
    elif r_end <= 0.6 * r_half and A <= 0.1 * r_end:
        out["kind"] = "entire"
    return out


def estimate_omega0(t: TaylorAtZero) -> float:
    """Abscissa estimate: ``0`` for an infinite derivative or zero radius,
    ``-inf`` for an entire series, otherwise minus the fitted radius."""
    diag = radius_diagnostics(t)
    kind = diag["kind"]
    if kind in ("infinite-derivative", "zero-radius"):
        return 0.0
    if kind == "entire" or diag["ratio"] <= 0:
        return -math.inf
    return -1.0 / diag["ratio"]


def _segment_ok(base: JetFunction, lam, prec) -> bool:
    """True when ``base`` evaluates finitely along ``[lam, 0]`` (real continuation)."""
    ctx = context(prec.significand_bits)
    for s in np.linspace(0.0, 1.0, 65)[1:]:
        try:
            v = base.jet(ctx.mpf(lam) * ctx.mpf(s), 0, prec).coeffs[0]
        except (DomainError, ZeroDivisionError, ValueError):
            return False
        if not ctx.isfinite(v):
            return False
    return True


class Extension(JetFunction):
    """``f`` on ``(0, inf)`` continued to ``(omega0, inf)`` by its series at 0."""

    def __init__(self, base: JetFunction, taylor: TaylorAtZero, omega0: float,
                 prec: PrecisionConfig = DEFAULT_PRECISION):
        self.base = base
        self.taylor = taylor
        self.omega0 = omega0
        self.prec = prec
        self.label = f"ext[{base.label}]"
        self.truncation_bound = 0.0
        self._long = {}
        self._segment = {}

    @property
    def radius(self) -> float:
        return -self.omega0

    def _coefficients(self, order: int, center):
        """Series coefficients long enough for an ``order`` jet at ``center``."""
        a = self.taylor.coeffs
        q = abs(float(center)) / self.radius if math.isfinite(self.radius) else 0.0
        extra = 64 if q <= 0 else min(512, int(math.ceil(-46 / math.log10(q))) if q < 1 else 512)
        need = order + extra
        if self.taylor.exact and len(a) <= need:
            if need not in self._long:
                self._long[need] = self.base.jet(0, need, self.prec).coeffs
            a = self._long[need]
        return a

    def series_jet(self, center, order: int) -> tuple[Jet, float]:
        """Re-expand the series at ``center``; returns the jet and a tail bound."""
        ctx = context(self.taylor.bits)
        c = ctx.mpf(center)
        a = self._coefficients(order, c)
        N = len(a) - 1
        coeffs = []
        for k in range(order + 1):
            terms = [ctx.binomial(n, k) * c ** (n - k) for n in range(k, N + 1)]
            coeffs.append(ctx.fdot(a[k:], terms) if terms else ctx.zero)
        last = abs(a[N] * c ** max(N - order, 0)) * ctx.binomial(N, order)
        q = abs(c) / self.radius if math.isfinite(self.radius) else 0.0
        bound = to_float(last) * (q / (1 - q)) if q < 1 else math.inf
        return Jet(c, tuple(coeffs), self.taylor.bits), bound

    def jet(self, center, order, prec=None):
        prec = prec or self.prec
        ctx = context(prec.significand_bits)
        center = ctx.mpf(center)
        if center > 0:
            return self.base.jet(center, order, prec)
        if not center > self.omega0:
            raise DomainError(f"{float(center):g} is not right of omega0={self.omega0:g}")
        ok = self._segment.get(center)
        if ok is None:
            ok = self._segment[center] = _segment_ok(self.base, center, prec)
        if ok:
            # the formula itself is the real-analytic continuation along [center, 0]
            return self.base.jet(center, order, prec)
        jet, bound = self.series_jet(center, order)
        self.truncation_bound = max(self.truncation_bound, bound)
        return jet

    def series_value(self, lam):
        ctx = context(self.taylor.bits)
        lam = ctx.mpf(lam)
        return ctx.fdot(self.taylor.coeffs, [lam ** n for n in range(len(self.taylor.coeffs))])

    def branch_check(self, lam: float = 1e-6) -> float | None:
        """Relative gap between the series and ``base`` at a small positive point."""
        if not self.taylor.all_finite() or self.omega0 == 0:
            return None
        series = self.series_value(lam)
        direct = self.base.value(lam, self.prec)
        return to_float(abs(series - direct) / max(abs(direct), 1e-300))


def extend(f, prec: PrecisionConfig = DEFAULT_PRECISION, kind: str | None = "cm",
           N: int | None = None, taylor: TaylorAtZero | None = None) -> Extension:
    """Extension of ``f`` to ``(omega0, inf)``."""
    f = as_function(f)
    t = taylor if taylor is not None else taylor_at_zero(f, N, prec, kind)
    return Extension(f, t, estimate_omega0(t), prec)


def extension_derivative(ext: Extension, m: int, lam) -> float:
    """``m``-th derivative of the extension at ``lam > omega0``."""
    if not lam > ext.omega0:
        raise DomainError(f"lambda={lam} must exceed omega0={ext.omega0}")
    return to_float(ext.jet(lam, m).derivative(m))
