"""Neumann eigensolver on triangulated domains.

Piecewise-quadratic (P2) scalar elements on straight triangles; degrees of
freedom at vertices and edge midpoints. The generalized pencil K u = lambda M u
is assembled with the fixed degree-4 triangle rule, with the hyperbolic
weights evaluated at quadrature nodes:

    stiffness density (1-|x|^2)^{2-n}   (identically 1 when n = 2)
    mass density      (1-|x|^2)^{-n}

Euclidean meshes use unit densities. The pencil is solved by shift-invert
ARPACK with a negative shift, which is robust next to the Neumann zero mode.
On disconnected domains the numerically-degenerate kernel block is rotated so
the first eigenvector is the global constant and the rest are locally-constant
complements; this makes "first excited state" well defined when eta_2 = 0.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import eigsh
from scipy.spatial import cKDTree

from .errors import NumericalError, OutOfDomainError
from .geom import EUCLIDEAN, HYPERBOLIC
from .mesh import TRI_QP

# P2 shape functions and barycentric derivatives at the 6 quadrature points
def _shape_table():
    lam = TRI_QP  # (6 qp, 3)
    n_qp = lam.shape[0]
    N = np.empty((n_qp, 6))
    dN = np.zeros((n_qp, 6, 3))
    l0, l1, l2 = lam[:, 0], lam[:, 1], lam[:, 2]
    N[:, 0] = l0 * (2 * l0 - 1)
    N[:, 1] = l1 * (2 * l1 - 1)
    N[:, 2] = l2 * (2 * l2 - 1)
    N[:, 3] = 4 * l0 * l1
    N[:, 4] = 4 * l1 * l2
    N[:, 5] = 4 * l2 * l0
    dN[:, 0, 0] = 4 * l0 - 1
    dN[:, 1, 1] = 4 * l1 - 1
    dN[:, 2, 2] = 4 * l2 - 1
    dN[:, 3, 0], dN[:, 3, 1] = 4 * l1, 4 * l0
    dN[:, 4, 1], dN[:, 4, 2] = 4 * l2, 4 * l1
    dN[:, 5, 2], dN[:, 5, 0] = 4 * l0, 4 * l2
    return N, dN


_SHAPE_N, _SHAPE_DN = _shape_table()


def _p2_shapes_at(lam):
    """P2 shape values for arbitrary barycentric coordinates lam (..., 3)."""
    l0, l1, l2 = lam[..., 0], lam[..., 1], lam[..., 2]
    return np.stack(
        [
            l0 * (2 * l0 - 1),
            l1 * (2 * l1 - 1),
            l2 * (2 * l2 - 1),
            4 * l0 * l1,
            4 * l1 * l2,
            4 * l2 * l0,
        ],
        axis=-1,
    )


def _edge_dofs(mesh):
    """Assign one dof per unique edge; returns (tri_dofs (T, 6), n_dofs, edges)."""
    t = mesh.triangles
    pairs = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    pairs = np.sort(pairs, axis=1)
    uniq, inverse = np.unique(pairs, axis=0, return_inverse=True)
    n_vert = mesh.num_vertices
    edge_ids = inverse.reshape(3, -1).T + n_vert  # columns: e01, e12, e20
    tri_dofs = np.concatenate([t, edge_ids], axis=1)
    return tri_dofs, n_vert + len(uniq), uniq


def dof_points(mesh):
    """Coordinates of all P2 dofs (vertices then edge midpoints)."""
    _, _, edges = _edge_dofs(mesh)
    mids = 0.5 * (mesh.vertices[edges[:, 0]] + mesh.vertices[edges[:, 1]])
    return np.concatenate([mesh.vertices, mids], axis=0)


def assemble(mesh, geometry=None):
    """Stiffness and mass matrices for the Neumann problem on the mesh.

    Returns (K, M) in CSR format. K is symmetric positive-semidefinite with the
    constants of each component in its kernel; M is symmetric positive-definite.
    """
    geometry = geometry or mesh.geometry
    tri_dofs, n_dofs, _ = _edge_dofs(mesh)
    v = mesh.vertices
    t = mesh.triangles
    areas = mesh.triangle_areas()

    # gradients of barycentric coordinates, (T, 3, 2)
    grad_lam = np.empty((len(t), 3, 2))
    for i in range(3):
        d = v[t[:, (i + 2) % 3]] - v[t[:, (i + 1) % 3]]
        grad_lam[:, i, 0] = -d[:, 1]
        grad_lam[:, i, 1] = d[:, 0]
    grad_lam /= (2.0 * areas)[:, None, None]

    # shape gradients at quadrature points, (T, qp, 6, 2)
    grads = np.einsum("qsk,tkd->tqsd", _SHAPE_DN, grad_lam)

    qpts = mesh.quad_points()  # (T, qp, 2)
    qwts = mesh.quad_weights()  # (T, qp)
    if geometry == HYPERBOLIC:
        r2 = np.sum(qpts * qpts, axis=-1)
        n = 2
        w_stiff = qwts * (1.0 - r2) ** (2 - n)
        w_mass = qwts * (1.0 - r2) ** (-n)
    else:
        w_stiff = qwts
        w_mass = qwts

    k_loc = np.einsum("tq,tqsd,tqrd->tsr", w_stiff, grads, grads)
    m_loc = np.einsum("tq,qs,qr->tsr", w_mass, _SHAPE_N, _SHAPE_N)

    rows = np.repeat(tri_dofs, 6, axis=1).reshape(-1)
    cols = np.tile(tri_dofs, (1, 6)).reshape(-1)
    K = sparse.coo_matrix((k_loc.reshape(-1), (rows, cols)), shape=(n_dofs, n_dofs))
    M = sparse.coo_matrix((m_loc.reshape(-1), (rows, cols)), shape=(n_dofs, n_dofs))
    return K.tocsr(), M.tocsr()


@dataclass
class EigenResult:
    """First k Neumann eigenpairs with solver diagnostics."""

    eigenvalues: np.ndarray
    vectors: np.ndarray  # (n_dofs, k), M-orthonormal
    mesh: object
    geometry: str
    residuals: np.ndarray
    kernel_dim: int
    tri_dofs: np.ndarray = field(repr=False, default=None)
    K: object = field(repr=False, default=None)
    M: object = field(repr=False, default=None)

    @property
    def degenerate_pair(self):
        """True when mu_2 and mu_3 coincide to 1e-6 relative."""
        lam = self.eigenvalues
        if len(lam) < 3:
            return False
        return abs(lam[2] - lam[1]) < 1e-6 * max(abs(lam[1]), 1e-300)

    def eval_at_quad(self, index):
        """Eigenfunction values at the mesh quadrature nodes, shape (T, 6)."""
        coeffs = self.vectors[:, index]
        return np.einsum("qs,ts->tq", _SHAPE_N, coeffs[self.tri_dofs])

    def to_dict(self):
        return {
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "residuals": [float(x) for x in self.residuals],
            "kernel_dim": int(self.kernel_dim),
            "geometry": self.geometry,
            "n_dofs": int(self.vectors.shape[0]),
        }

    def export_nodal_csv(self, path, indices=None):
        """Write nodal fields (x, y, u_i per requested eigenfunction) as CSV."""
        if self.mesh is None:
            raise ValueError("nodal export needs the mesh reference")
        indices = list(range(self.vectors.shape[1])) if indices is None else indices
        pts = dof_points(self.mesh)
        with open(path, "w") as fh:
            fh.write("x,y," + ",".join(f"u{j}" for j in indices) + "\n")
            for row, (x, y) in enumerate(pts):
                vals = ",".join(f"{self.vectors[row, j]:.17g}" for j in indices)
                fh.write(f"{x:.17g},{y:.17g},{vals}\n")


def _component_indicators(mesh, tri_dofs, n_dofs):
    labels = mesh.component_labels
    out = []
    for comp in np.unique(labels):
        ind = np.zeros(n_dofs)
        ind[np.unique(tri_dofs[labels == comp])] = 1.0
        out.append(ind)
    return out


def solve_neumann(K, M, k, mesh=None, geometry=None):
    """k smallest eigenpairs of K u = lambda M u with the kernel aligned.

    The zero eigenspace (one constant per component) is detected by relative
    threshold and rotated so its first vector is the global constant; vector
    signs are fixed by the first sizable coefficient.
    """
    n = K.shape[0]
    if k >= n:
        raise ValueError("requested more eigenpairs than dofs")
    scale = K.diagonal().sum() / max(M.diagonal().sum(), 1e-300)
    sigma = -1e-2 * max(scale, 1e-6)
    # deterministic Krylov start vector: identical runs give identical output
    v0 = np.random.default_rng(0x5eed).standard_normal(n)
    try:
        lam, U = eigsh(K, k=k, M=M, sigma=sigma, which="LM", v0=v0)
    except Exception as exc:  # ARPACK failures surface as NumericalError
        raise NumericalError(f"generalized eigensolve failed: {exc}") from exc
    order = np.argsort(lam)
    lam, U = lam[order], U[:, order]

    # kernel rotation: first vector becomes the global constant
    kernel = lam < 1e-6 * max(abs(lam[-1]), 1e-300)
    m = int(np.count_nonzero(kernel))
    if m >= 1:
        Uk = U[:, :m]
        ones = np.ones(n)
        alpha = Uk.T @ (M @ ones)
        basis = np.eye(m)
        # orthogonal completion of alpha-hat
        q, _ = np.linalg.qr(np.concatenate([alpha[:, None], basis], axis=1))
        if q[:, 0] @ alpha < 0:
            q[:, 0] *= -1
        U[:, :m] = Uk @ q[:, :m]

    # M-orthonormalize (Gram-Schmidt; near-identity correction)
    for j in range(k):
        for i in range(j):
            U[:, j] -= (U[:, i] @ (M @ U[:, j])) * U[:, i]
        nrm = np.sqrt(U[:, j] @ (M @ U[:, j]))
        U[:, j] /= nrm

    # deterministic signs
    for j in range(k):
        col = U[:, j]
        idx = np.argmax(np.abs(col) > 0.5 * np.abs(col).max())
        if col[idx] < 0:
            U[:, j] = -col

    resid = np.empty(k)
    for j in range(k):
        r = K @ U[:, j] - lam[j] * (M @ U[:, j])
        resid[j] = np.linalg.norm(r) / np.linalg.norm(M @ U[:, j])
    if np.any(resid > 1e-8):
        raise NumericalError(f"eigen residuals too large: {resid}")

    tri_dofs = None
    if mesh is not None:
        tri_dofs, _, _ = _edge_dofs(mesh)
    return EigenResult(
        eigenvalues=lam,
        vectors=U,
        mesh=mesh,
        geometry=geometry or (mesh.geometry if mesh is not None else EUCLIDEAN),
        residuals=resid,
        kernel_dim=m,
        tri_dofs=tri_dofs,
        K=K,
        M=M,
    )


def solve_mesh(mesh, k=6):
    """Assemble and solve in one step."""
    K, M = assemble(mesh)
    return solve_neumann(K, M, k, mesh=mesh)


def _locate(mesh, points, tree=None):
    """Triangle index and barycentric coordinates for each query point."""
    points = np.atleast_2d(points)
    v = mesh.vertices
    t = mesh.triangles
    if tree is None:
        tree = cKDTree(v[t].mean(axis=1))
    k_near = min(24, len(t))
    _, cand = tree.query(points, k=k_near)
    cand = np.atleast_2d(cand)
    tri_idx = np.full(len(points), -1, dtype=np.int64)
    bary = np.zeros((len(points), 3))
    for row, pt in enumerate(points):
        for c in cand[row]:
            a, b, cc = v[t[c, 0]], v[t[c, 1]], v[t[c, 2]]
            mat = np.array([[b[0] - a[0], cc[0] - a[0]], [b[1] - a[1], cc[1] - a[1]]])
            try:
                uv = np.linalg.solve(mat, pt - a)
            except np.linalg.LinAlgError:
                continue
            lam = np.array([1.0 - uv[0] - uv[1], uv[0], uv[1]])
            if np.all(lam >= -1e-10):
                tri_idx[row] = c
                bary[row] = np.clip(lam, 0.0, 1.0)
                break
    return tri_idx, bary


def eigenfunction_eval(result, index, points):
    """Nodal P2 interpolation of eigenfunction `index` at the given points."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    tri_idx, bary = _locate(result.mesh, points)
    if np.any(tri_idx < 0):
        bad = points[tri_idx < 0][0]
        raise OutOfDomainError(f"point {bad} lies outside the meshed domain")
    shapes = _p2_shapes_at(bary)  # (N, 6)
    coeffs = result.vectors[result.tri_dofs[tri_idx], index]  # (N, 6)
    vals = np.sum(shapes * coeffs, axis=1)
    return vals if len(vals) > 1 else float(vals[0])
