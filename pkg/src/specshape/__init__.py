"""specshape: numerical spectral-geometry toolkit.

Neumann eigenvalues of Euclidean and Poincare-disk (curvature -4) domains,
radial ball eigenproblems, fold-map trial functions with mass centering,
weighted mass transplantation, and topological degree of sphere maps --
assembled into certified upper bounds for the third Neumann eigenvalue.
"""

from .geom import (
    EUCLIDEAN,
    HYPERBOLIC,
    GeometryConfig,
    Halfspace,
    MobiusMap,
    fold_euclid,
    fold_hyp,
    hyp_distance,
    hyp_reflect,
    hyp_volume_weight,
    mobius,
    mobius_jacobian,
    reflect_hyperplane,
    reflect_origin,
)
from .balleig import (
    ComparisonProfile,
    RadialProfile,
    euclid_bessel_root,
    euclid_profile,
    gradient_sum_identity,
    h_profile,
    hyp_eigen,
    hyp_ode_rhs,
    verify_second_nonradial,
)
from .mesh import DomainSpec, Mesh, build_mesh
from .fem import EigenResult, assemble, eigenfunction_eval, solve_neumann
from .trial import (
    Certificate,
    TrialField,
    center_of_mass,
    certify_bound,
    combine_quotients,
    find_w_zero,
    moment_center,
    w_field,
)
from .transplant import WeightedRegion, decompose_domain, transplant_check
from .degree import (
    DegreeResult,
    SphereMap,
    check_reflection_symmetry,
    degree_jacobian,
    degree_preimage,
    homotopy_degree,
    random_symmetric_map,
    verify_symmetric_degree,
    winding_number,
)

__version__ = "0.1.0"
