"""Continue a transform past zero, then invert it.

Run: python3 demos/abscissa_and_inversion.py
"""
import math

from laplace_tails import extend, invert_cdf, invert_density, density_oracle
from laplace_tails.series import PrecisionConfig

f = "1/(1+log(1+x))"
ext = extend(f)
print(f"f = {f}")
print(f"  abscissa omega0          = {ext.omega0:.10f}   (e^-1 - 1 = {math.exp(-1) - 1:.10f})")
print(f"  f_e(-0.5) from extension = {float(ext.value(-0.5)):.12f}")
print(f"  closed form              = {1 / (1 + math.log(0.5)):.12f}")

print("\nPost-Widder density of 1/(1+x) against exp(-t):")
for x in (0.1, 1.0, 5.0, 10.0):
    plain = invert_density("1/(1+x)", x, 64, richardson=1)
    tilted = invert_density("1/(1+x)", x, 64, shift=-1.0)
    print(f"  t={x:5.1f}  n=64+Richardson rel.err {abs(plain / math.exp(-x) - 1):.2e}"
          f"   tilted by omega0 rel.err {abs(tilted / math.exp(-x) - 1):.1e}")

print("\nDistribution function of the unit point mass at 1 (exp(-x)):")
p = PrecisionConfig(256, 128)
for x in (0.5, 0.9, 1.1, 1.5):
    print(f"  x={x}: {invert_cdf('exp(-x)', x, 64, p).partial_sum:.6f}")

nu = density_oracle(ext)
print("\nDensity of 1/(1+log(1+x)) via the tilted oracle:")
for t in (0.1, 1.0, 10.0, 30.0):
    print(f"  nu({t:4}) = {nu(t):.6e}")
