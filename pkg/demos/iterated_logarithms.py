"""Abscissae of derivatives of iterated logarithms.

Run: python3 demos/iterated_logarithms.py
"""
from laplace_tails.bernstein import iterated_log, iterated_log_abscissae

for n in (1, 2, 3, 4):
    rep = iterated_log_abscissae(n)
    print(f"n={n}: {iterated_log(n).text()}")
    print(f"   beta_n = {rep['beta']:.10f}")
    print(f"   -phi_n^(-1)(-1)     = {-rep['inverse_at_minus_one']:.10f}")
    print(f"   -phi_(n-1)^(-1)(-1) = {-rep['previous_inverse_at_minus_one']:.10f}")
