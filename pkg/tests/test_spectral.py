import math

import numpy as np

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from laplace_tails.catalog import subexponential_taylor
from laplace_tails.errors import DomainError, NotCompletelyMonotone
from laplace_tails.series import PrecisionConfig, parse_expression, to_float
from laplace_tails.spectral import (
    TaylorAtZero, assert_sign_pattern, estimate_omega0, extend, extension_derivative,
    radius_diagnostics, sign_violations, taylor_at_zero,
)

RESOLVENT_LOG = "1/(1+log(1+x))"


def test_omega0_values():
    assert extend("1/(1+x)").omega0 == pytest.approx(-1, abs=1e-12)
    assert extend(RESOLVENT_LOG).omega0 == pytest.approx(math.exp(-1) - 1, abs=1e-8)
    assert extend("1/(1+x^(1/2))").omega0 == 0.0
    assert extend("1/(1+log(1+x^(1/2)))").omega0 == 0.0
    assert extend("exp(-x)").omega0 == -math.inf


def test_extension_matches_closed_form_left_of_zero():
    ext = extend(RESOLVENT_LOG)
    lam = -0.5
    exact = 1 / (1 + math.log1p(lam))
    assert to_float(ext.value(lam)) == pytest.approx(exact, rel=1e-14)
    with mpmath.workdps(40):
        ref = mpmath.diff(lambda s: 1 / (1 + mpmath.log(1 + s)), mpmath.mpf(-1) / 2, 2)
    assert extension_derivative(ext, 2, lam) == pytest.approx(float(ref), rel=1e-12)
    assert ext.branch_check() < 1e-60


def test_series_reexpansion_agrees_with_formula():
    ext = extend("1/(1+x)")
    jet, bound = ext.series_jet(-0.5, 6)
    direct = ext.base.jet(-0.5, 6)
    for a, b in zip(jet.coeffs, direct.coeffs):
        assert to_float(a) == pytest.approx(to_float(b), rel=1e-40)
    assert bound < 1e-15


def test_extension_rejects_points_left_of_abscissa():
    with pytest.raises(DomainError):
        extend("1/(1+x)").value(-1.5)


def test_taylor_limits_for_branch_point():
    t = taylor_at_zero("1/(1+x^(1/2))", 6)
    assert not t.exact
    assert t.finite_flags[0] and not any(t.finite_flags[1:])
    assert to_float(t.coeffs[0]) == pytest.approx(1.0, abs=1e-4)


def test_literal_quadratic_tail_formula_at_zero():
    t = taylor_at_zero("x/(1+x) - 2*x*log(1+1/x)", 8, check=None)
    assert t.finite_flags[0] and abs(to_float(t.coeffs[0])) < 1e-6
    assert not t.finite_flags[1]


def test_taylor_from_moments_gives_zero_abscissa():
    t = subexponential_taylor(64)
    assert radius_diagnostics(t)["kind"] == "zero-radius"
    assert estimate_omega0(t) == 0.0


def test_moments_of_exponential_give_radius():
    # nu = exp(-2t): m_n = n! / 2^(n+1)
    t = TaylorAtZero.from_moments([math.factorial(n) / 2 ** (n + 1) for n in range(40)])
    assert estimate_omega0(t) == pytest.approx(-2, rel=1e-6)


def test_sign_pattern_rejects_non_cm():
    with pytest.raises(NotCompletelyMonotone):
        assert_sign_pattern(parse_expression("x^2"))
    with pytest.raises(NotCompletelyMonotone):
        assert_sign_pattern(parse_expression("1/(1+x^2)"))


def test_bernstein_pattern():
    assert sign_violations(parse_expression("log(1+x)"), [0.5, 2.0], 10, "bf") == []
    assert sign_violations(parse_expression("x^2"), [0.5], 4, "bf")


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 10), st.floats(0.1, 4))
def test_cm_sign_alternation(a, p):
    f = parse_expression(f"({a!r}+x)^(-({p!r}))")
    assert sign_violations(f, [0.01, 1.0, 50.0], 14, "cm", PrecisionConfig(128, 16)) == []


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.1, 5))
def test_bf_sign_pattern(s, a):
    f = parse_expression(f"(x+{a!r})^({s!r}) - ({a!r})^({s!r})")
    assert sign_violations(f, [0.01, 1.0, 50.0], 12, "bf", PrecisionConfig(128, 14)) == []


def test_geometric_extension_examples():
    ext = extend("1/(1+x)", N=8)
    assert ext.taylor.exact
    assert [to_float(c) for c in ext.taylor.coeffs] == [(-1) ** n for n in range(9)]
    full = extend("1/(1+x)")
    assert to_float(full.value(-0.5)) == pytest.approx(2.0, rel=1e-15)
    assert extension_derivative(full, 1, -0.5) == pytest.approx(-4.0, rel=1e-15)
    assert extension_derivative(full, 0, 1.0) == pytest.approx(0.5, rel=1e-15)


def test_extension_derivatives_alternate_in_sign():
    ext = extend(RESOLVENT_LOG)
    lo = ext.omega0
    grid = lo + np.geomspace(1e-3, 1e3, 64)
    for lam in grid:
        jet = ext.jet(float(lam), 8)
        for m in range(9):
            assert (-1) ** m * to_float(jet.derivative(m)) >= -1e-30


def test_extension_is_the_laplace_integral_left_of_zero():
    from laplace_tails.quadrature import integrate_half_line
    ext = extend("1/(1+x)")
    for lam in (-0.9, -0.5, -0.1):
        integral = integrate_half_line(lambda t: np.exp(-(1 + lam) * t))[0]
        assert integral == pytest.approx(to_float(ext.value(lam)), rel=1e-8)
