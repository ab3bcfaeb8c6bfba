"""The twelve acceptance checks, each returning a :class:`CriterionResult`.

Every check computes its numbers from scratch; nothing here is cached
between criteria.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import catalog
from .bernstein import beta_of, levy_envelope
from .inversion import check_monotone_density, density_oracle, invert_density
from .series import parse_expression
from .spectral import extend
from .subordination import (
    AppendixIntegral, SubordinationSpec, appendix_F, appendix_envelope,
    check_decay_certificate, fourier_symbol, j_envelope, kernel_value,
)
from .tails import converse_diagnostics, envelope, envelope_base, fit_a3, no_exponential_decay_probe

__all__ = ["CriterionResult", "CRITERIA", "run_all", "format_line", "drift_windows"]


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    measured: dict = field(default_factory=dict)
    seconds: float = 0.0


def format_line(res: CriterionResult) -> str:
    status = "PASS" if res.passed else "FAIL"
    bits = ", ".join(f"{k}={_short(v)}" for k, v in res.measured.items())
    return f"criterion {res.number:2d} [{status}] {res.title} ({bits}) {res.seconds:.1f}s"


def _short(v):
    if isinstance(v, float):
        return f"{v:.4g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_short(x) for x in v) + "]"
    return str(v)


def c01_inversion_oracle() -> CriterionResult:
    f = parse_expression("1/(1+x)")
    xs = np.geomspace(0.1, 10, 32)
    errs = [abs(invert_density(f, x, 64, richardson=1) / math.exp(-x) - 1) for x in xs]
    worst = int(np.argmax(errs))
    return CriterionResult(1, "Post-Widder n=64 + one Richardson step vs exp(-x) on [0.1, 10]",
                           max(errs) <= 1e-4,
                           {"max_rel_err": max(errs), "at_x": float(xs[worst]), "tol": 1e-4})


def c02_quadratic_tail() -> CriterionResult:
    literal = parse_expression("x/(1+x) - 2*x*log(1+1/x)")
    ts = np.geomspace(0.5, 20, 24)
    exact = catalog.quadratic_tail_density(ts)
    errs = [abs(invert_density(literal, t, 64, richardson=1) / e - 1) for t, e in zip(ts, exact)]
    rep = converse_diagnostics(literal, ("poly", 2), check=None)
    f0_ok = rep.finite_flags[0] and abs(rep.f0) < 1e-6
    d1_inf = not rep.finite_flags[1]
    return CriterionResult(2, "explicit quadratic-tail density; f(0+)=0, f'(0+)=-inf",
                           max(errs) <= 1e-2 and f0_ok and d1_inf,
                           {"max_rel_err": max(errs), "f0": rep.f0, "f1_infinite": d1_inf})


def c03_abscissa() -> CriterionResult:
    w_phi = extend("1/(1+log(1+x))").omega0
    w_geo = extend("1/(1+x)").omega0
    w_half = extend("1/(1+x^(1/2))").omega0
    e1 = abs(w_phi - (math.exp(-1) - 1))
    e2 = abs(w_geo + 1)
    return CriterionResult(3, "abscissa detection",
                           e1 <= 1e-3 and e2 <= 1e-6 and w_half == 0.0,
                           {"resolvent_log_err": e1, "geometric_err": e2, "sqrt_branch": w_half})


def c04_sandwich() -> CriterionResult:
    measured, ok = {}, True
    for name in ("powres:0.5", "logres", "logpowres:0.5"):
        ext = extend(catalog.lookup(name).expr)
        env = envelope(ext, fit_a3(ext))
        nu = density_oracle(ext, 64, richardson=1)
        lo, hi = env.valid_t_range
        ratios, lower_ok = [], True
        for t in np.geomspace(1e-2, 30, 32):
            r = nu(t) / envelope_base(ext, t)
            ratios.append(r)
            if lo < t < hi and r < env.c2:
                lower_ok = False
        upper_ok = max(ratios) <= env.c1
        ok &= upper_ok and lower_ok
        measured[name] = [min(ratios), max(ratios), env.c2]
    return CriterionResult(4, "envelope sandwich [c2, 3e] for three examples", ok, measured)


def c05_beta() -> CriterionResult:
    b1 = beta_of(catalog.lookup("iterlog:2").expr)
    b2 = beta_of(catalog.lookup("relativistic:1:1").expr)
    e1, e2 = abs(b1 - (1 - math.exp(-1))), abs(b2 - 1)
    return CriterionResult(5, "beta extraction", e1 <= 1e-3 and e2 <= 1e-3,
                           {"iterlog2_err": e1, "relativistic_err": e2})


def c06_levy_envelope() -> CriterionResult:
    entry = catalog.lookup("log1p")
    mu = lambda t: float(entry.density(t))
    env = levy_envelope(entry.expr, density=mu)
    c1, c2 = env.certificate.c1, env.certificate.c2
    ratios = [mu(t) / env.base(t) for t in np.geomspace(1e-2, 50, 32)]
    return CriterionResult(6, "Levy envelope for log(1+x)",
                           min(ratios) >= c2 and max(ratios) <= c1,
                           {"ratio_min": min(ratios), "ratio_max": max(ratios), "c2": c2, "c1": c1})


def c07_cauchy_kernel() -> CriterionResult:
    spec = SubordinationSpec("jump", catalog.lookup("stable:1").density, 1)
    errs = [abs(kernel_value(spec, y) * math.pi * y * y - 1) for y in (0.5, 1.0, 2.0)]
    return CriterionResult(7, "jump kernel of sqrt(x) in d=1 equals 1/(pi y^2)",
                           max(errs) <= 1e-8, {"max_rel_err": max(errs)})


def c08_fourier_symbol() -> CriterionResult:
    spec = SubordinationSpec("fundamental", catalog.lookup("geometric").density, 1, kappa=1.0)
    xis = [0.0, 0.5, 1.0, 2.0]
    vals, tail = fourier_symbol(spec, xis)
    errs = [abs(v - 1 / (1 + xi * xi)) for v, xi in zip(vals, xis)]
    mass_err = abs(vals[0] - 1)
    return CriterionResult(8, "Fourier symbol of K equals Phi(xi^2); unit mass",
                           max(errs) <= 1e-4 and mass_err <= 1e-6,
                           {"max_abs_err": max(errs), "mass_err": mass_err, "tail": tail})


def drift_windows(ys, ratios):
    """Worst monotone change over windows spanning one decade.

    Each window runs from a grid point to the first point at least ten
    times larger; it counts only when the ratios inside are monotone.
    Returns ``(worst_factor, window)``.
    """
    ys, ratios = np.asarray(ys, dtype=float), np.asarray(ratios, dtype=float)
    worst, where = 1.0, None
    for i in range(len(ys)):
        j = int(np.searchsorted(ys, ys[i] * 10 * (1 - 1e-12), side="left"))
        if j >= len(ys):
            break
        seg = ratios[i:j + 1]
        d = np.diff(seg)
        if np.all(d >= 0) or np.all(d <= 0):
            f = float(seg.max() / seg.min())
            if f > worst:
                worst, where = f, (float(ys[i]), float(ys[j]))
    return worst, where


def c09_jump_sandwich() -> CriterionResult:
    entry = catalog.lookup("relativistic:1:1")
    spec = SubordinationSpec("jump", entry.density, 3, beta=1.0)
    phi_ext = extend(entry.expr, kind="bf")
    beta = beta_of(entry.expr)
    measured, all_ratios, drift_ok = {}, [], True
    for tag, ys in (("i", np.geomspace(0.05, 1, 16)), ("ii", np.geomspace(1, 25, 24))):
        ratios = []
        for y in ys:
            env, _ = j_envelope(phi_ext, beta, 3, float(y))
            ratios.append(kernel_value(spec, float(y)) / env)
        worst, _ = drift_windows(ys, ratios)
        drift_ok &= worst <= 2.0
        all_ratios += ratios
        measured[f"regime_{tag}"] = [min(ratios), max(ratios)]
        measured[f"drift_{tag}"] = worst
    C = max(max(all_ratios), 1 / min(all_ratios))
    measured["C"] = C
    return CriterionResult(9, "jump-kernel sandwich, relativistic d=3",
                           C <= 10 and drift_ok, measured)


def c10_appendix() -> CriterionResult:
    ai = AppendixIntegral(lambda t: np.ones_like(np.asarray(t, dtype=float)), 0.0, 1.0, 1.0)
    lim = appendix_F(ai, 50.0) / appendix_envelope(ai, 50.0) / math.sqrt(math.pi) - 1
    f = lambda t: (1 + np.asarray(t, dtype=float)) ** -2.0
    ai2 = AppendixIntegral(f, 0.5, 0.0, 1.0)
    cert = (1.0, 2.0, 0.0)
    rs = np.geomspace(2, 50, 16)
    ratios = [appendix_F(ai2, r) / appendix_envelope(ai2, r, cert) for r in rs]
    spread = max(ratios) / min(ratios)
    diag = check_decay_certificate(f, cert)
    return CriterionResult(10, "integral F(r): exponential limit sqrt(pi); power case stable",
                           abs(lim) <= 0.02 and spread <= 3.0,
                           {"limit_rel_err": lim, "power_spread": spread,
                            "certificate_holds": diag["ok"]})


def c11_monotone_checker() -> CriterionResult:
    grid = [2.0 ** k for k in range(-3, 7)]
    r1 = check_monotone_density("1/(1+x)", 24, grid)
    r2 = check_monotone_density("1/(1+log(1+x))", 24, grid)
    r3 = check_monotone_density("exp(-x)", 24, grid)
    ok = r1.passed and r2.passed and not r3.condition_i_ok and r3.first_violation == (0, 2.0)
    return CriterionResult(11, "monotone-density checker",
                           ok, {"geometric": r1.passed, "resolvent_log": r2.passed,
                                "exp_witness": r3.first_violation})


def c12_no_exponential_decay() -> CriterionResult:
    entry = catalog.lookup("resolvent:stable:1")
    spec = SubordinationSpec("fundamental", entry.density, 1)
    K = lambda r: kernel_value(spec, r)
    probes = [no_exponential_decay_probe(K, 0.1, tmax) for tmax in (50.0, 100.0, 200.0)]
    ok = probes[1] >= 2 * probes[0] and probes[2] >= 2 * probes[1]
    return CriterionResult(12, "K(r) exp(0.1 r) at least doubles per doubling of r_max",
                           ok, {"maxima": probes})


CRITERIA = [
    c01_inversion_oracle, c02_quadratic_tail, c03_abscissa, c04_sandwich, c05_beta,
    c06_levy_envelope, c07_cauchy_kernel, c08_fourier_symbol, c09_jump_sandwich,
    c10_appendix, c11_monotone_checker, c12_no_exponential_decay,
]


def timed(fn) -> CriterionResult:
    start = time.perf_counter()
    res = fn()
    res.seconds = time.perf_counter() - start
    return res


def run_all(echo=print) -> list[CriterionResult]:
    results = []
    for fn in CRITERIA:
        res = timed(fn)
        if echo:
            echo(format_line(res))
        results.append(res)
    return results
