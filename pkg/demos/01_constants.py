"""Where the threshold a* ~ 2.6616 comes from.

The per-vertex exponent at t = 2s is ln(lam^3 f''/f'^2).  It falls through
zero at lambda**, and the average degree that corresponds to lambda** is
c** = 2 a*.  Restricting the degrees to {3, 4} moves the threshold to
about 17/9.
"""
import numpy as np

from posa import critical_constants, exponent_functions, model_params, thresholds
from posa.numeric.constants import log_end_ratio

cc = critical_constants()
print(f"lambda** = {cc.lambda_star_star:.7f}")
print(f"c**      = {cc.c_star_star:.7f}   (a* = {cc.a_star:.5f})")
print(f"lambda*  = {cc.lambda_star:.7f}   (the H1 peak exponent vanishes here)")

print("\nend exponent ln(lam^3 f''/f'^2) around lambda**:")
for lam in (4.0, 4.5, cc.lambda_star_star, 5.0, 5.5):
    print(f"  lam = {lam:.4f}: {log_end_ratio(lam):+.5f}")

print("\nH1 over x = t/s at three values of lambda (peak location x*):")
xs = np.linspace(0.05, 2.0, 8)
for lam in (5.0, 5.33, 6.0):
    ef = exponent_functions(lam)
    row = " ".join(f"{v:+.3f}" for v in ef.h1(xs))
    print(f"  lam = {lam}: x* = {ef.x_star:.4f}  H1 = {row}")

print(f"\nD = {{3, 4}}: a* = {critical_constants('3,4').a_star:.4f} vs 17/9 = {17 / 9:.4f}")

print("\nthresholds at c = 5.4 (m = 2.7 n):")
for n in (10**3, 10**4, 10**6):
    p = model_params(n, int(2.7 * n))
    th = thresholds(n, p.lam)
    print(f"  n = {n:>7}: lam = {p.lam:.5f}  eps0 = {th.eps0:.5f}  delta_n = {th.delta_n:.4f}"
          f"  sigma_n = {th.sigma_n:.4f}")
