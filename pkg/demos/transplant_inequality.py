"""The weighted mass-transplantation step in isolation.

For a decreasing h with zero weighted ball average, any pair of regions whose
weighted volumes sum to twice the ball's has h-integral at most zero — with
equality exactly when both regions are the ball.

Run:  python demos/transplant_inequality.py
"""

import numpy as np

from specshape import balleig
from specshape.transplant import WeightedRegion, transplant_check

# Euclidean: compare the unit ball against an equal-area annulus ------------------
profile = balleig.euclid_profile(2)
comparison = balleig.h_profile(profile)
ball = WeightedRegion.ball(1.0)

print("Euclidean weight (Lebesgue):")
report = transplant_check(ball, ball, ball, comparison)
print(f"  L = U = B:        lhs = {report['lhs']:+.3e}  rhs = {report['rhs']:+.3e}  "
      f"equality = {report['equality']}")

r1 = 0.5
shell = WeightedRegion.shell(r1, float(np.sqrt(1 + r1 * r1)))
report = transplant_check(shell, shell, ball, comparison)
print(f"  L = U = annulus:  lhs = {report['lhs']:+.3e}  rhs = {report['rhs']:+.3e}  "
      f"slack = {report['slack_rel']:.3f} of scale  (strict)")

# hyperbolic: the same story in the Poincare disk ---------------------------------
a = 0.4
eta, prof = balleig.hyp_eigen(2, a)
comparison_h = balleig.h_profile(prof)
ball_h = WeightedRegion.ball(a, weight="hyp_volume")

# a hyperbolic-volume-matched shell
t_in = 0.3
target = a**2 / (1 - a**2) + t_in**2 / (1 - t_in**2)
r_out = float(np.sqrt(target / (1 + target)))
shell_h = WeightedRegion.shell(t_in, r_out, weight="hyp_volume")

print("\nhyperbolic weight (1-r^2)^{-2}:")
report = transplant_check(ball_h, ball_h, ball_h, comparison_h)
print(f"  L = U = B(a):     lhs = {report['lhs']:+.3e}  rhs = {report['rhs']:+.3e}  "
      f"equality = {report['equality']}")
report = transplant_check(shell_h, shell_h, ball_h, comparison_h)
print(f"  L = U = shell:    lhs = {report['lhs']:+.3e}  rhs = {report['rhs']:+.3e}  "
      f"slack = {report['slack_rel']:.3f} of scale  (strict)")

# pushing mass outward strictly decreases the integral -----------------------------
print("\nmonotone rearrangement sanity (Euclidean):")
base = ball.integrate_radial(comparison.h_at)
for r1 in (0.2, 0.4, 0.6, 0.8):
    shell = WeightedRegion.shell(r1, float(np.sqrt(1 + r1 * r1)))
    val = shell.integrate_radial(comparison.h_at)
    print(f"  annulus from r = {r1:.1f}:  integral {val:+.4f}  <  ball {base:+.4f}")
