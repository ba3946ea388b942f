"""The first-moment sweep over (s, t) and the sign flip near c**.

For each endpoint-set size s and neighbourhood size t the sweep evaluates
the log expected number of closed configurations per vertex.  Above c** the
maximum is negative (attained at t = 2s); below it the maximum is
positive.  At n = 10^6 the summed bound is still large because the margin
per vertex is small next to the polynomial prefactors.
"""
from posa import critical_constants, expectation_sweep, locate_sign_flip

n = 10**6
for c in (5.0, 5.2, 5.3, 5.35, 5.4, 6.0):
    r = expectation_sweep(n, int(c * n / 2))
    print(f"c = {c:<5} max exponent {r.max_exponent:+.5f} at x = {r.argmax_x:.3f}  "
          f"log total bound {r.total_log_bound:+9.2f}  sigma_n = {r.sigma:.3f}")

c = locate_sign_flip(n)
print(f"\nsign flip located at c = {c:.6f}; c** = {critical_constants().c_star_star:.6f}")
