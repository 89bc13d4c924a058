"""Topological degree three ways, plus the reflection-symmetry theorem.

Run:  python demos/degree_gallery.py
"""

import numpy as np

from specshape import degree as deg

# controls ---------------------------------------------------------------------
print("controls:")
print("  identity on S^1, winding:    ", deg.winding_number(deg.identity_map(1)).degree)
print("  negation on S^1, winding:    ", deg.winding_number(deg.antipodal_map(1)).degree,
      " (degree (-1)^{m+1} = 1 for odd m)")
print("  identity on S^2, Jacobian:   ", deg.degree_jacobian(deg.identity_map(2)).degree)
print("  antipodal on S^2, Jacobian:  ", deg.degree_jacobian(deg.antipodal_map(2)).degree)
print("  constant on S^2, Jacobian:   ", deg.degree_jacobian(deg.constant_map(2)).degree)

# z -> z^3 has winding 3
def _cubed(p):
    z = (p[:, 0] + 1j * p[:, 1]) ** 3
    return np.stack([z.real, z.imag], axis=1)

cube = deg.SphereMap(1, _cubed)
print("  z -> z^3 on S^1, winding:    ", deg.winding_number(cube).degree)

# cross-oracle agreement ----------------------------------------------------------
rng = np.random.default_rng(5)
print("\ncross-oracle agreement on random smooth S^2 maps:")
for _ in range(5):
    const = 0.6 * rng.normal(size=3)
    lin = np.eye(3) + 0.3 * rng.normal(size=(3, 3))

    def field(p, const=const, lin=lin):
        raw = p @ lin.T + const
        return raw / np.linalg.norm(raw, axis=1, keepdims=True)

    sphere_map = deg.SphereMap(2, field)
    d_jac = deg.degree_jacobian(sphere_map).degree
    d_pre = deg.degree_preimage(sphere_map, rng=rng).degree
    print(f"  jacobian {d_jac:+d}  preimage {d_pre:+d}  agree: {d_jac == d_pre}")

# the reflection-symmetry theorem ---------------------------------------------------
print("\nrandom reflection-symmetric maps (phi(-p) = R_p phi(p)):")
rng = np.random.default_rng(42)
for m in (1, 2):
    degrees = []
    for _ in range(25):
        rep = deg.verify_symmetric_degree(deg.random_symmetric_map(m, rng))
        degrees.append(rep["degree"])
    kind = "all exactly 1" if m == 1 else "all odd"
    print(f"  S^{m}: degrees {sorted(set(degrees))}  ({kind})")

# the homotopy lemma ------------------------------------------------------------------
print("\nsign-definite normal component forces the degree:")
print("  psi = identity:", deg.homotopy_degree(deg.identity_map(2)).degree)
print("  psi = -id on S^2:", deg.homotopy_degree(deg.antipodal_map(2)).degree,
      " (= (-1)^{m+1})")
