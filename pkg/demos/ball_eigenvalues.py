"""Radial ball eigenproblems, the comparison function h, and the small-ball limit.

Run:  python demos/ball_eigenvalues.py
"""

import numpy as np

from specshape import balleig

# --- Euclidean unit ball ----------------------------------------------------
# The lowest nonconstant Neumann mode of the unit disk has radial part
# g(r) = J_1(k r) with k the first zero of J_1'; its eigenvalue is k^2.
k = balleig.euclid_bessel_root(2)
print(f"first zero of the shape derivative (n=2):  k'_1 = {k:.6f}")
print(f"unit-disk eigenvalue mu_2 = k'^2         = {k**2:.6f}")

profile = balleig.euclid_profile(2)
print(f"profile: g(0) = {profile.g[0]}, g'(0) = {profile.gp[0]}, "
      f"g'(1) = {profile.gp[-1]:.1e}, increasing = {profile.monotone_increasing()}")

# --- hyperbolic balls (curvature -4 Poincare disk) ---------------------------
print("\neta_2(B(a)) by shooting, with the sampled trend in a (recorded only):")
for a in (0.1, 0.3, 0.5, 0.7, 0.9):
    eta, _ = balleig.hyp_eigen(2, a)
    print(f"  a = {a:.1f}:  eta_2 = {eta:12.6f}")

# --- small-ball limit: hyperbolic -> Euclidean --------------------------------
a = 0.02
eta, _ = balleig.hyp_eigen(2, a)
print(f"\nsmall-ball limit: eta_2(B({a})) * a^2 = {eta * a * a:.5f} "
      f"vs k'^2 = {k**2:.5f}  (rel {abs(eta * a * a - k**2) / k**2:.2e})")

# --- the comparison function h ------------------------------------------------
# h is strictly decreasing with zero weighted average over the ball; this is
# exactly what the transplantation step needs.
for label, comp in (
    ("euclidean", balleig.h_profile(balleig.euclid_profile(2))),
    ("hyperbolic a=0.5", balleig.h_profile(balleig.hyp_eigen(2, 0.5)[1])),
):
    val, scale = comp.ball_integral()
    print(f"h[{label}]: decreasing = {comp.strictly_decreasing()}, "
          f"ball average (relative) = {abs(val) / scale:.2e}")

# --- the non-radiality check ---------------------------------------------------
rep = balleig.verify_second_nonradial(2, a=0.5)
print(f"\nsecond eigenfunction is not radial: "
      f"eta(ell=1) = {rep['eigenvalue_ell1']:.4f} < "
      f"eta(ell=0, first positive) = {rep['eigenvalue_ell0']:.4f}")

# --- CSV export -----------------------------------------------------------------
balleig.export_profile_csv(profile, "profile_euclid_n2.csv")
print("\nwrote profile_euclid_n2.csv (columns r, g, g_prime, h)")
