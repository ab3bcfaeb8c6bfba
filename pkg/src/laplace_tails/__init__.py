"""Tail asymptotics of Laplace transforms: high-precision jets, spectral
extension, Post-Widder inversion, envelope certificates and subordination
kernels."""
from .errors import *  # noqa: F401,F403
from .series import (
    PrecisionConfig, DEFAULT_PRECISION, Expression, Jet, JetFunction, parse_expression,
    eval_jet, nth_derivative, compose,
)
from .spectral import TaylorAtZero, Extension, taylor_at_zero, extend, estimate_omega0
from .inversion import invert_cdf, invert_density, density_oracle, check_monotone_density
from .tails import (
    A3Certificate, EnvelopeCertificate, fit_a3, envelope, eval_envelope, rv_index,
    converse_diagnostics,
)
from .bernstein import BernsteinTriple, triple_of, beta_of, star, levy_envelope, iterated_log
from .subordination import (
    SubordinationSpec, kernel_value, k_envelope, j_envelope, fourier_symbol,
    solve_convolution, AppendixIntegral, appendix_F, appendix_envelope,
)

__version__ = "0.1.0"
