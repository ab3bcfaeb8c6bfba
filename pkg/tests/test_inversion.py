import math

import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import poisson

from laplace_tails.errors import JetOrderExceeded
from laplace_tails.inversion import (
    TabulatedDensity, check_monotone_density, density_oracle, invert_cdf, invert_density,
)
from laplace_tails.series import PrecisionConfig
from laplace_tails.spectral import extend

P128 = PrecisionConfig(256, 128)


def pw_geometric(x, n):
    # n-th Post-Widder density of 1/(1+lam), in closed form
    return (n / (n + x)) ** (n + 1)


def test_cdf_of_lebesgue_measure():
    r = invert_cdf("1/x", 1.0, 100, P128)
    assert r.partial_sum == pytest.approx(1.01, rel=1e-15)
    assert r.lambda_used == 100


def test_cdf_geometric_partial_sum_closed_form():
    lam = 64.0
    r = invert_cdf("1/(1+x)", 1.0, lam)
    assert r.partial_sum == pytest.approx(1 - (lam / (1 + lam)) ** 65, rel=1e-14)


@pytest.mark.parametrize("x", [0.5, 1.5])
def test_cdf_of_point_mass_is_a_poisson_cdf(x):
    r = invert_cdf("exp(-x)", x, 64, P128)
    assert r.partial_sum == pytest.approx(poisson.cdf(math.floor(64 * x), 64), rel=1e-12)


def test_cdf_rejects_orders_beyond_jet():
    with pytest.raises(JetOrderExceeded):
        invert_cdf("exp(-x)", 1.5, 64)


def test_default_lambda_uses_half_the_jet():
    assert invert_cdf("1/(1+x)", 2.0).lambda_used == pytest.approx(16.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 20), st.sampled_from([8, 16, 32, 64]))
def test_post_widder_matches_closed_form(x, n):
    assert invert_density("1/(1+x)", x, n) == pytest.approx(pw_geometric(x, n), rel=1e-12)


def test_richardson_levels():
    x = 1.0
    one = invert_density("1/(1+x)", x, 64, richardson=1)
    assert one == pytest.approx(2 * pw_geometric(x, 64) - pw_geometric(x, 32), rel=1e-12)
    two = invert_density("1/(1+x)", x, 64, richardson=2)
    exact = math.exp(-x)
    assert abs(two / exact - 1) < abs(one / exact - 1) < abs(pw_geometric(x, 64) / exact - 1)


def test_tilt_makes_geometric_density_exact():
    # after shifting by the abscissa the transform is 1/x, whose density is 1
    assert invert_density("1/(1+x)", 10.0, 64, shift=-1.0) == pytest.approx(math.exp(-10), rel=1e-13)
    oracle = density_oracle(extend("1/(1+x)"))
    assert oracle(25.0) == pytest.approx(math.exp(-25), rel=1e-13)


def test_lebesgue_density_is_exact():
    assert invert_density("1/x", 3.0, 16) == pytest.approx(1.0, rel=1e-30)


def test_tabulated_density_interpolates():
    table = TabulatedDensity("1/(1+x^(1/2))", n=32, points=81, t_lo=1e-3, t_hi=1e2)
    for t in (0.01, 0.3, 7.0):
        assert table(t) == pytest.approx(table.direct(t), rel=1e-5)
    # power-law continuation outside the table stays positive and decreasing
    assert 0 < table(1e4) < table(1e3)


def test_monotone_density_checker():
    grid = [2.0 ** k for k in range(-3, 7)]
    good = check_monotone_density("1/(1+x)", 24, grid)
    assert good.passed and good.cbf_route_ok
    assert 0 <= good.recorded["reciprocal_bound_fraction"] <= 1
    bad = check_monotone_density("exp(-x)", 24, grid)
    assert not bad.passed
    assert bad.first_violation == (0, 2.0)


def test_monotone_density_requires_decay_at_infinity():
    rep = check_monotone_density("1/x + 1", 8, [1.0, 2.0])
    assert rep.condition_i_ok and not rep.condition_ii_ok


def test_quadratic_tail_density_at_two():
    exact = (2 - math.exp(-2) * 10) / 4
    v = invert_density("x/(1+x) - 2*x*log(1+1/x)", 2.0, 64, richardson=1)
    assert v == pytest.approx(exact, rel=1e-2)


def test_checker_on_longer_orders_and_short_grid():
    assert check_monotone_density("1/(1+x)", 40, [0.25, 1.0, 4.0, 16.0]).condition_i_ok
    assert check_monotone_density("exp(-x)", 4, [2.0]).first_violation == (0, 2.0)
