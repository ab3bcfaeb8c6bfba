import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import k1

from laplace_tails.errors import NonIntegrable
from laplace_tails.quadrature import find_peak, integrate_half_line, tanh_sinh


def test_tanh_sinh_endpoint_singularity():
    val, err = tanh_sinh(lambda t: 1 / np.sqrt(t), 0.0, 1.0)
    assert val == pytest.approx(2.0, rel=1e-12)
    assert err < 1e-8


def test_tanh_sinh_smooth():
    val, _ = tanh_sinh(np.cos, 0.0, math.pi / 2)
    assert val == pytest.approx(1.0, rel=1e-14)


def test_cauchy_kernel_integral():
    # int_0^inf (4 pi t)^-1/2 exp(-1/(4t)) * t^-3/2 / (2 sqrt(pi)) dt = 1/pi
    f = lambda t: np.exp(-1 / (4 * t)) / np.sqrt(4 * math.pi * t) * t ** -1.5 / (2 * math.sqrt(math.pi))
    assert integrate_half_line(f)[0] == pytest.approx(1 / math.pi, rel=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 30))
def test_bessel_identity(r):
    # int_0^inf exp(-t - r^2/t) dt = 2 r K_1(2 r)
    f = lambda t: np.exp(-t - r * r / t)
    assert integrate_half_line(f)[0] == pytest.approx(2 * r * k1(2 * r), rel=1e-10)


def test_divergent_integral_is_reported():
    with pytest.raises(NonIntegrable):
        integrate_half_line(lambda t: np.exp(-1 / (4 * t)))


def test_find_peak_maximises_log_mass():
    # t * (t exp(-t/3)) peaks at t = 6; the search grid spacing is a factor 10^(1/10)
    assert find_peak(lambda t: t * np.exp(-t / 3)) == pytest.approx(6.0, rel=0.13)
