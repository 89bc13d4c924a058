"""Geometry kernel identities: reflections, folds, Mobius maps, metric weights.

Run:  python demos/geometry_kernel.py
"""

import numpy as np

from specshape import geom

rng = np.random.default_rng(0)

# reflections and folds -------------------------------------------------------
h = geom.Halfspace([1.0, 0.0], 0.5)
y = np.array([1.3, 0.7])
print("reflect across {x = 0.5}:", y, "->", geom.reflect_hyperplane(h, y))
print("fold onto {x <= 0.5}:    ", y, "->", geom.fold_euclid(h, y))

# Mobius self-maps of the disk --------------------------------------------------
x = np.array([0.3, -0.2])
print("\nT_x(0) =", geom.mobius(x, np.zeros(2)), " (the map sends 0 to x)")
print("T_{-x}(T_x(y)) - y =",
      geom.mobius(-x, geom.mobius(x, np.array([0.4, 0.1]))) - np.array([0.4, 0.1]))

# the complex form agrees in 2-d
z, w = 0.3 - 0.2j, 0.4 + 0.1j
print("complex form gap:",
      abs((z + w) / (1 + np.conj(z) * w)
          - complex(*geom.mobius(x, np.array([w.real, w.imag])))))

# conjugation with reflections: T_{R_p x} o R_p = R_p o T_x
worst = 0.0
for _ in range(100):
    angle = rng.uniform(0, 2 * np.pi)
    p = np.array([np.cos(angle), np.sin(angle)])
    xx = rng.uniform(-0.5, 0.5, 2)
    yy = rng.uniform(-0.5, 0.5, 2)
    lhs = geom.mobius(geom.reflect_origin(p, xx), geom.reflect_origin(p, yy))
    rhs = geom.reflect_origin(p, geom.mobius(xx, yy))
    worst = max(worst, np.abs(lhs - rhs).max())
print("conjugation identity, worst of 100 random draws:", worst)

# hyperbolic reflection and fold ------------------------------------------------
hh = geom.Halfspace([0.0, 1.0], 0.4, geom.HYPERBOLIC)
pt = np.array([0.2, 0.6])
refl = geom.hyp_reflect(hh, pt)
print("\nhyperbolic reflection is an involution:",
      np.abs(geom.hyp_reflect(hh, refl) - pt).max())
center, radius = geom.geodesic_boundary_circle(hh)
print(f"geodesic boundary circle: center {center}, radius {radius:.4f}, "
      f"orthogonality |c|^2 - r^2 = {center @ center - radius**2:.6f} (should be 1)")

# metric weights ------------------------------------------------------------------
print("\nvolume weight at r=1/2 (n=2):", geom.hyp_volume_weight(0.5, 2), "= 16/9")
print("hyperbolic volume of the disk of chart radius a = 0.5:",
      geom.hyp_ball_volume(0.5), "= pi/3")
print("hyperbolic distance to r = tanh(1):", geom.hyp_distance(np.tanh(1.0)))
