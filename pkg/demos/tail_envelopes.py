"""Explicit two-sided envelopes for densities and Levy densities.

Run: python3 demos/tail_envelopes.py
"""
import numpy as np

from laplace_tails import density_oracle, envelope, extend, fit_a3, levy_envelope
from laplace_tails.catalog import lookup
from laplace_tails.tails import envelope_base

for name in ("powres:0.5", "logres", "logpowres:0.5"):
    entry = lookup(name)
    ext = extend(entry.expr)
    cert = fit_a3(ext)
    env = envelope(ext, cert)
    nu = density_oracle(ext)
    ratios = [nu(t) / envelope_base(ext, t) for t in np.geomspace(1e-2, 30, 24)]
    print(f"{name:10s} {entry.note}")
    print(f"  omega0={env.omega0:.4f} theta={env.theta:.3f} gamma={env.gamma:.3f} "
          f"delta={env.delta:.3g} c2={env.c2:.3g} c1={env.c1:.3f}")
    print(f"  density / base on [0.01, 30]: [{min(ratios):.3f}, {max(ratios):.3f}]")

entry = lookup("log1p")
lev = levy_envelope(entry.expr, density=lambda t: float(entry.density(t)))
print("\nLevy density of log(1+x) is exp(-t)/t; envelope base equals it exactly:")
for t in (0.01, 1.0, 50.0):
    lo, hi = lev.bounds(t)
    print(f"  t={t:5}: {lo:.3e} <= {float(entry.density(t)):.3e} <= {hi:.3e}")
