"""Strict inequality for the square: mu_3 = pi/2 sits far below the two-ball bound.

The square of area 2 pi has the separated spectrum pi (j^2 + k^2)/2, so
mu_2 = mu_3 = pi/2 is a degenerate pair; the certification handles the
degeneracy by certifying once per eigenspace basis vector.

Run:  python demos/square_inequality.py
"""

import numpy as np

from specshape import trial
from specshape.mesh import DomainSpec, PolygonPrimitive

L = float(np.sqrt(2.0 * np.pi))
spec = DomainSpec(
    "euclidean",
    [PolygonPrimitive(((0, 0), (L, 0), (L, L), (0, L)))],
    0.1,
    name="square",
)

cert = trial.certify_bound(spec)

print(f"eigenvalues: {np.round(cert.eigenvalues, 6)}")
print(f"analytic mu_3 = pi/2 =        {np.pi / 2:.6f}")
print(f"reference (ball mu_2):        {cert.reference_eigenvalue:.6f}")
print(f"degenerate mu_2 = mu_3 pair:  {cert.degenerate_pair}")
for cand in cert.f_candidates:
    print(f"  f index {cand['f_index']}: bound {cand['bound']:.6f} at "
          f"theta = {cand['theta']:.4f}, t = {cand['t']:.4f}")
print(f"worst trial bound:            {cert.trial_bound:.6f}")
print(f"margin (reference - mu_3):    {cert.margin:.4f}   <- about 1.82")
print(f"margin relative:              {cert.margin_rel:.1%}")
print(f"equality case:                {cert.equality_case}  (strictly inside the bound)")
