"""Heat kernels subordinated by potential and Levy densities.

Run: python3 demos/subordinated_kernels.py
"""
import math

import numpy as np

from laplace_tails import SubordinationSpec, beta_of, extend, j_envelope, k_envelope, kernel_value
from laplace_tails.catalog import lookup
from laplace_tails.tails import no_exponential_decay_probe

geo = lookup("geometric")
ext = extend(geo.expr)
spec = SubordinationSpec("fundamental", geo.density, 3, kappa=1.0)
print("Phi = 1/(1+x) in d=3: K(r) = exp(-r)/(4 pi r)")
for r in (0.5, 2.0, 8.0):
    env, tag = k_envelope(ext, 3, r)
    k = kernel_value(spec, r)
    print(f"  r={r}: K={k:.6e} exact={math.exp(-r) / (4 * math.pi * r):.6e} K/env={k / env:.4f} ({tag})")

rel = lookup("relativistic:1:1")
phi_ext = extend(rel.expr, kind="bf")
beta = beta_of(rel.expr)
jspec = SubordinationSpec("jump", rel.density, 3, beta=beta)
print(f"\nRelativistic phi, beta={beta:.6f}, d=3: J/envelope drifts toward sqrt(2 pi)/pi^2")
for y in (0.05, 0.3, 1.0, 3.0, 10.0, 25.0):
    env, tag = j_envelope(phi_ext, beta, 3, y)
    print(f"  y={y:5}: ratio {kernel_value(jspec, y) / env:.4f} (regime {tag})")
print(f"  limit {math.sqrt(2 * math.pi) / math.pi ** 2:.4f}")

ml = lookup("resolvent:stable:1")
kspec = SubordinationSpec("fundamental", ml.density, 1)
print("\nPhi = 1/(1+sqrt x): max K(r) e^(r/10) keeps growing (no exponential decay)")
for tmax in (50.0, 100.0, 200.0):
    print(f"  r <= {tmax:5}: {no_exponential_decay_probe(lambda r: kernel_value(kspec, r), 0.1, tmax):.4g}")
