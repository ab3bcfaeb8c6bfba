import math

import numpy as np
import pytest

from laplace_tails.bernstein import (
    beta_of, iterated_log, iterated_log_abscissae, iterated_log_profile, levy_envelope,
    shift_test, star, triple_of,
)
from laplace_tails.catalog import lookup
from laplace_tails.errors import DomainError, PreconditionError
from laplace_tails.series import parse_expression


@pytest.mark.parametrize("name, beta", [
    ("iterlog:2", 1 - math.exp(-1)),
    ("relativistic:1:1", 1.0),
    ("stable:1", 0.0),
    ("log1p", 1.0),
])
def test_beta(name, beta):
    assert beta_of(lookup(name).expr) == pytest.approx(beta, abs=1e-6)


def test_iterated_log_abscissae():
    # beta_n sits at minus the inverse of the previous iterate at -1
    for n in (2, 3):
        rep = iterated_log_abscissae(n)
        assert abs(rep["gap_to_previous"]) < 1e-4
        assert abs(rep["gap_to_inverse"]) > 0.05


def test_iterated_log_structure():
    phi3 = iterated_log(3)
    assert phi3(1.0) == pytest.approx(math.log1p(math.log1p(math.log1p(1.0))))
    assert iterated_log_profile(1, 0.5) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        iterated_log(0)


def test_triple_log1p_closed_form():
    entry = lookup("log1p")
    tri = triple_of(entry.expr, levy=entry.density)
    assert (tri.a, tri.b) == (0.0, 0.0)
    for lam in (0.3, 2.0, 30.0):
        assert tri.reconstruct(lam) == pytest.approx(math.log1p(lam), rel=1e-9)
        assert tri.derivative_transform(lam) == pytest.approx(1 / (1 + lam), rel=1e-9)


def test_triple_relativistic_killing_and_drift():
    tri = triple_of(lookup("relativistic:1:1").expr, levy=lookup("relativistic:1:1").density)
    assert tri.a == 0.0 and tri.b == 0.0
    assert tri.reconstruct(3.0) == pytest.approx(1.0, rel=1e-9)
    tri = triple_of(parse_expression("2 + 3*x + log(1+x)"))
    assert tri.a == pytest.approx(2.0) and tri.b == pytest.approx(3.0, rel=1e-8)


@pytest.mark.slow
def test_triple_recovers_stable_levy_density():
    entry = lookup("stable:1")
    tri = triple_of(entry.expr)
    for t in (0.1, 1.0, 10.0):
        assert tri.levy(t) == pytest.approx(float(entry.density(t)), rel=1e-5)
    assert tri.reconstruct(4.0) == pytest.approx(2.0, rel=1e-5)


def test_star():
    assert star(parse_expression("x")).text() == "1"
    s = star(parse_expression("log(1+x)"))
    assert s(2.0) == pytest.approx(2 / math.log(3))
    with pytest.raises(DomainError):
        star(parse_expression("0"))


def test_shift_test():
    assert shift_test(parse_expression("log(1+x)"), [-0.5, 0.0, 1.0])
    assert shift_test(lookup("relativistic:1:1").expr, [-0.9, 0.5])
    with pytest.raises(PreconditionError):
        shift_test(parse_expression("x^2"), [0.0])
    with pytest.raises(ValueError):
        shift_test(parse_expression("log(1+x)"), [-2.0])


def test_levy_envelope_log1p():
    entry = lookup("log1p")
    env = levy_envelope(entry.expr, density=lambda t: float(entry.density(t)))
    assert env.beta == pytest.approx(1.0)
    for t in np.geomspace(0.01, 50, 7):
        lower, upper = env.bounds(t)
        exact = float(entry.density(t))
        assert lower <= exact <= upper
        assert exact / env.base(t) == pytest.approx(1.0, rel=1e-9)


def test_pure_drift_triple():
    tri = triple_of(parse_expression("x"))
    assert (tri.a, tri.b) == (0.0, 1.0)
    assert tri.levy(1.0) == 0.0


def test_star_examples():
    from laplace_tails.spectral import sign_violations
    half = parse_expression("x^(1/2)")
    assert star(half)(3.0) == pytest.approx(half(3.0), rel=1e-15)
    s = star(parse_expression("log(1+x)"))
    assert sign_violations(s, [0.1, 1.0, 10.0], 12, "bf") == []
    phi = parse_expression("log(1+x)")
    assert star(star(phi))(2.5) == pytest.approx(phi(2.5), rel=1e-12)


def test_shift_test_examples():
    assert shift_test(lookup("iterlog:2").expr, [-0.5, 0.0, 1.0])
    assert shift_test(lookup("relativistic:1:1").expr, [-0.9, 0.0, 2.0])
