import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from laplace_tails.errors import DomainError, ExpressionSyntaxError, UnknownIdentifierError
from laplace_tails.series import (
    Derivative, PrecisionConfig, Shifted, compose, eval_jet, nth_derivative, parse_expression,
    to_float,
)

P = PrecisionConfig(128, 16)


def test_parse_and_print():
    e = parse_expression("1/(1+x^(1/2))")
    assert e.text() == "1 / (1 + x^(1 / 2))"
    assert parse_expression(e.text()) == e


@pytest.mark.parametrize("text, offset", [("1/(1+", 6), ("2*y", 3), ("x^x", 2), ("(1", 3)])
def test_syntax_error_offsets(text, offset):
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_expression(text)
    assert info.value.offset == offset


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifierError):
        parse_expression("sin(x)")


def test_constants_and_functions():
    e = parse_expression("exp(-pi*x) + log(e)")
    assert math.isclose(e(1.0), math.exp(-math.pi) + 1, rel_tol=1e-15)


def test_third_derivative_of_resolvent_of_sqrt():
    # exact value from the closed form 1/(1+sqrt x) at x = 1
    assert to_float(nth_derivative(parse_expression("1/(1+x^(1/2))"), 3, 1)) == pytest.approx(-0.234375, rel=1e-30)


def test_log1p_coefficients_at_zero():
    jet = eval_jet(parse_expression("log(1+x)"), 0, 10, P)
    assert [to_float(c) for c in jet.coeffs[1:]] == pytest.approx([(-1) ** (k + 1) / k for k in range(1, 11)])


REFERENCE = {
    "exp(-x)*x^(3/2)": lambda x: mpmath.exp(-x) * x ** 1.5,
    "log(1+log(1+x))": lambda x: mpmath.log(1 + mpmath.log(1 + x)),
    "(x+1)^(1/2) - 1": lambda x: mpmath.sqrt(x + 1) - 1,
    "1/(1+x)^3": lambda x: 1 / (1 + x) ** 3,
}


@pytest.mark.parametrize("text", sorted(REFERENCE))
def test_derivatives_against_mpmath(text):
    e = parse_expression(text)
    with mpmath.workdps(40):
        for n in range(5):
            ref = mpmath.diff(REFERENCE[text], mpmath.mpf(3) / 4, n)
            got = mpmath.mpf(e.derivative(n, 0.75, P))
            assert abs(got - ref) <= mpmath.mpf(10) ** -30 * max(1, abs(ref))


def test_domain_error_for_log_of_zero():
    with pytest.raises(DomainError):
        parse_expression("log(x)").jet(0, 3, P)


def test_compose_and_wrappers():
    inner = parse_expression("log(1+x)")
    outer = compose(inner, inner)
    assert outer(2.0) == pytest.approx(math.log1p(math.log1p(2.0)))
    assert Derivative(inner)(1.0) == pytest.approx(0.5)
    assert Shifted(inner, 1.0)(1.0) == pytest.approx(math.log(3))
    assert inner.minus(1.0)(0.0) == pytest.approx(-1.0)


def test_precision_validation():
    with pytest.raises(ValueError):
        PrecisionConfig(32)
    assert PrecisionConfig().with_order(128).jet_order == 128


def test_overflow_maps_to_inf():
    assert to_float(parse_expression("exp(x)").value(1e6)) == math.inf


# properties -----------------------------------------------------------------

atoms = st.sampled_from(["x", "2", "1/3", "pi", "e", "(1+x)"])


@st.composite
def expressions(draw, depth=3):
    if depth == 0:
        return draw(atoms)
    kind = draw(st.sampled_from(["atom", "bin", "call", "pow", "neg"]))
    if kind == "atom":
        return draw(atoms)
    if kind == "bin":
        op = draw(st.sampled_from(["+", "-", "*", "/"]))
        return f"({draw(expressions(depth - 1))}){op}({draw(expressions(depth - 1))})"
    if kind == "call":
        return f"{draw(st.sampled_from(['exp', 'log']))}(1+({draw(expressions(depth - 1))})^2)"
    if kind == "pow":
        return f"({draw(expressions(depth - 1))})^{draw(st.sampled_from(['2', '(-1)', '(1/2)']))}"
    return f"-({draw(expressions(depth - 1))})"


@settings(max_examples=150, deadline=None)
@given(expressions())
def test_print_parse_round_trip(text):
    e = parse_expression(text)
    again = parse_expression(e.text())
    assert again == e
    assert again.text() == e.text()


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 5), st.floats(-3, 3), st.floats(-3, 3))
def test_jet_linearity(center, a, b):
    f = parse_expression("1/(1+x)")
    g = parse_expression("log(1+x)")
    h = parse_expression(f"({a!r})*(1/(1+x)) + ({b!r})*log(1+x)")
    jf, jg, jh = f.jet(center, 8, P), g.jet(center, 8, P), h.jet(center, 8, P)
    for cf, cg, ch in zip(jf.coeffs, jg.coeffs, jh.coeffs):
        # a and b enter as decimal text, so agreement is to double precision
        assert to_float(ch) == pytest.approx(to_float(a * cf + b * cg), rel=1e-13, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 20))
def test_product_rule(center):
    f, g = parse_expression("exp(-x)"), parse_expression("1/(1+x^(1/2))")
    prod = parse_expression("exp(-x)/(1+x^(1/2))")
    jp = f.jet(center, 10, P) * g.jet(center, 10, P)
    for a, b in zip(jp.coeffs, prod.jet(center, 10, P).coeffs):
        assert to_float(a) == pytest.approx(to_float(b), rel=1e-25, abs=1e-30)


def test_small_closed_form_jets():
    e = parse_expression("exp(-x)")
    assert [to_float(c) for c in e.jet(1, 2, P).coeffs] == pytest.approx(
        [math.exp(-1), -math.exp(-1), math.exp(-1) / 2], rel=1e-15)
    assert to_float(nth_derivative(parse_expression("1/x"), 3, 2, P)) == pytest.approx(-0.375, rel=1e-30)
    assert to_float(nth_derivative(parse_expression("1/(1+x)"), 1, 1, P)) == pytest.approx(-0.25, rel=1e-30)
    assert to_float(nth_derivative(parse_expression("log(1+x)"), 2, 0.5, P)) == pytest.approx(-1 / 2.25, rel=1e-15)
    near_zero = parse_expression("1/(1+x)").jet(mpmath.mpf(10) ** -30, 6, P)
    assert [to_float(c) for c in near_zero.coeffs] == pytest.approx([(-1) ** k for k in range(7)], rel=1e-25)


def test_fifth_derivative_against_high_precision_differences():
    e = parse_expression("1/(1+x^0.5)")
    raw = e.derivative(5, 2, PrecisionConfig(512, 8))
    with mpmath.workdps(160):
        got = mpmath.mpf(raw)
        ref = mpmath.diff(lambda s: 1 / (1 + mpmath.sqrt(s)), 2, 5)
        assert abs(got / ref - 1) < mpmath.mpf(10) ** -20
