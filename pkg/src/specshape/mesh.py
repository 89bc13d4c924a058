"""Domain descriptions, conforming triangulation, refinement, weighted quadrature.

Domains are unions of primitives (disks, polygons, geodesic disks) meshed
independently and concatenated; overlapping or nearly-tangent unions are
rejected. Disks are approximated by inscribed polygons whose chord error is
O(h^2) and re-projected onto the true circle under refinement. Triangulation
is Delaunay on boundary loops plus a hexagonal interior lattice, relaxed by a
few Lloyd iterations.

Integration uses a fixed 6-point, degree-4 triangle rule, optionally weighted
by the hyperbolic volume density (1-|x|^2)^{-n} or energy density
(1-|x|^2)^{2-n} evaluated at the quadrature nodes.
"""

import json
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from scipy.spatial import Delaunay

from .errors import InvalidDomainError
from .geom import EUCLIDEAN, HYPERBOLIC, euclid_disk_of_geodesic_ball, mobius

HYP_BOUNDARY_MARGIN = 1e-3  # hyperbolic domains stay inside |x| <= 1 - margin

# 6-point degree-4 rule (barycentric coordinates and weights summing to 1)
_QA = 0.445948490915965
_QB = 0.091576213509771
TRI_QP = np.array(
    [
        [1.0 - 2 * _QA, _QA, _QA],
        [_QA, 1.0 - 2 * _QA, _QA],
        [_QA, _QA, 1.0 - 2 * _QA],
        [1.0 - 2 * _QB, _QB, _QB],
        [_QB, 1.0 - 2 * _QB, _QB],
        [_QB, _QB, 1.0 - 2 * _QB],
    ]
)
TRI_QW = np.array([0.223381589678011] * 3 + [0.109951743655322] * 3)


def _cross2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


# ---------------------------------------------------------------------------
# primitives


@dataclass(frozen=True)
class DiskPrimitive:
    center: tuple
    radius: float

    def boundary_loop(self, h):
        c = np.asarray(self.center, dtype=float)
        m = max(12, int(np.ceil(2.0 * np.pi * self.radius / (0.8 * h))))
        theta = 2.0 * np.pi * np.arange(m) / m
        return c + self.radius * np.stack([np.cos(theta), np.sin(theta)], axis=1)

    def contains(self, pts):
        c = np.asarray(self.center, dtype=float)
        return np.linalg.norm(pts - c, axis=-1) < self.radius

    def project_boundary(self, pts):
        c = np.asarray(self.center, dtype=float)
        d = pts - c
        norms = np.linalg.norm(d, axis=-1, keepdims=True)
        return c + self.radius * d / norms

    @property
    def curved(self):
        return True

    def translated(self, dz):
        c = np.asarray(self.center, dtype=float) + np.asarray(dz, dtype=float)
        return DiskPrimitive(tuple(c), self.radius)

    def scaled(self, s):
        c = s * np.asarray(self.center, dtype=float)
        return DiskPrimitive(tuple(c), s * self.radius)

    def mobius_transformed(self, x):
        # Mobius maps send circles to circles: recover the image disk from
        # three mapped boundary points
        c = np.asarray(self.center, dtype=float)
        pts = c + self.radius * np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]])
        img = mobius(x, pts)
        center, radius = _circumcircle(img[0], img[1], img[2])
        return DiskPrimitive(tuple(center), radius)

    def to_dict(self):
        return {
            "type": "disk",
            "center": [float(v) for v in self.center],
            "radius": float(self.radius),
        }


@dataclass(frozen=True)
class PolygonPrimitive:
    vertices: tuple  # ((x, y), ...) counterclockwise

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[0] < 3 or verts.shape[1] != 2:
            raise InvalidDomainError("polygon needs at least three 2-d vertices")
        if _polygon_area(verts) < 0:
            verts = verts[::-1]
        if _polygon_self_intersects(verts):
            raise InvalidDomainError("polygon boundary self-intersects")
        object.__setattr__(self, "vertices", tuple(map(tuple, verts)))

    @property
    def array(self):
        return np.asarray(self.vertices, dtype=float)

    def boundary_loop(self, h):
        verts = self.array
        out = []
        for a, b in zip(verts, np.roll(verts, -1, axis=0)):
            steps = max(1, int(np.ceil(np.linalg.norm(b - a) / (0.8 * h))))
            frac = np.arange(steps) / steps
            out.append(a + frac[:, None] * (b - a))
        return np.concatenate(out, axis=0)

    def contains(self, pts):
        return _points_in_polygon(np.atleast_2d(pts), self.array)

    def project_boundary(self, pts):
        return pts

    @property
    def curved(self):
        return False

    def translated(self, dz):
        return PolygonPrimitive(tuple(map(tuple, self.array + np.asarray(dz))))

    def scaled(self, s):
        return PolygonPrimitive(tuple(map(tuple, s * self.array)))

    def mobius_transformed(self, x):
        # sides become circular arcs; mapping vertices keeps O(h^2) chord error
        return PolygonPrimitive(tuple(map(tuple, mobius(x, self.array))))

    def to_dict(self):
        return {"type": "polygon", "vertices": [list(v) for v in self.vertices]}


@dataclass(frozen=True)
class GeodesicDiskPrimitive:
    """Geodesic ball T_x(B(a)) described by its Mobius center and radius parameter."""

    center: tuple
    radius_param: float

    def realize(self):
        c, r = euclid_disk_of_geodesic_ball(np.asarray(self.center, float), self.radius_param)
        return DiskPrimitive(tuple(c), r)

    def to_dict(self):
        return {
            "type": "geodesic_disk",
            "center": [float(v) for v in self.center],
            "radius_param": float(self.radius_param),
        }


def _circumcircle(a, b, c):
    d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
    ux = (
        (a @ a) * (b[1] - c[1]) + (b @ b) * (c[1] - a[1]) + (c @ c) * (a[1] - b[1])
    ) / d
    uy = (
        (a @ a) * (c[0] - b[0]) + (b @ b) * (a[0] - c[0]) + (c @ c) * (b[0] - a[0])
    ) / d
    center = np.array([ux, uy])
    return center, float(np.linalg.norm(a - center))


def _polygon_area(verts):
    x, y = verts[:, 0], verts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _polygon_self_intersects(verts):
    m = len(verts)
    segs = [(verts[i], verts[(i + 1) % m]) for i in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            if j == i or (j + 1) % m == i or (i + 1) % m == j:
                continue
            if _segments_cross(*segs[i], *segs[j]):
                return True
    return False


def _segments_cross(a, b, c, d):
    def orient(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    return (o1 * o2 < 0) and (o3 * o4 < 0)


def _points_in_polygon(pts, loop):
    x, y = pts[:, 0], pts[:, 1]
    inside = np.zeros(len(pts), dtype=bool)
    x0, y0 = loop[:, 0], loop[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    for ax, ay, bx, by in zip(x0, y0, x1, y1):
        cond = (ay > y) != (by > y)
        if not np.any(cond):
            continue
        xs = ax + (y - ay) * (bx - ax) / (by - ay)
        inside ^= cond & (x < xs)
    return inside


def _min_dist_to_loop(pts, loop, block=1024):
    a = loop
    b = np.roll(loop, -1, axis=0)
    d = b - a
    L2 = np.maximum((d * d).sum(axis=1), 1e-300)
    best = np.empty(len(pts))
    for lo in range(0, len(pts), block):
        chunk = pts[lo : lo + block]
        diff = chunk[:, None, :] - a[None, :, :]
        t = np.clip((diff * d[None]).sum(-1) / L2[None], 0.0, 1.0)
        proj = a[None] + t[..., None] * d[None]
        dist = np.linalg.norm(chunk[:, None, :] - proj, axis=-1)
        best[lo : lo + block] = dist.min(axis=1)
    return best


# ---------------------------------------------------------------------------
# domain spec


@dataclass
class DomainSpec:
    """Declarative description of a domain: geometry, primitives, target mesh size."""

    geometry: str
    primitives: list
    h: float
    name: str = ""

    def __post_init__(self):
        if self.geometry not in (EUCLIDEAN, HYPERBOLIC):
            raise InvalidDomainError(f"unknown geometry {self.geometry!r}")
        if not self.primitives:
            raise InvalidDomainError("domain spec has no primitives")
        if self.h <= 0:
            raise InvalidDomainError("mesh size h must be positive")

    def realized_primitives(self):
        out = []
        for prim in self.primitives:
            out.append(prim.realize() if isinstance(prim, GeodesicDiskPrimitive) else prim)
        return out

    def to_dict(self):
        return {
            "geometry": self.geometry,
            "h": float(self.h),
            "name": self.name,
            "primitives": [p.to_dict() for p in self.primitives],
        }

    def to_json(self, path=None):
        doc = json.dumps(self.to_dict(), indent=2, sort_keys=True)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(doc + "\n")
        return doc

    @classmethod
    def from_dict(cls, doc):
        prims = []
        for entry in doc["primitives"]:
            kind = entry["type"]
            if kind == "disk":
                prims.append(DiskPrimitive(tuple(entry["center"]), float(entry["radius"])))
            elif kind == "polygon":
                prims.append(PolygonPrimitive(tuple(map(tuple, entry["vertices"]))))
            elif kind == "geodesic_disk":
                prims.append(
                    GeodesicDiskPrimitive(tuple(entry["center"]), float(entry["radius_param"]))
                )
            else:
                raise InvalidDomainError(f"unknown primitive type {kind!r}")
        return cls(doc["geometry"], prims, float(doc["h"]), doc.get("name", ""))

    @classmethod
    def from_json(cls, source):
        if isinstance(source, (str, bytes)) and str(source).lstrip().startswith("{"):
            return cls.from_dict(json.loads(source))
        with open(source) as fh:
            return cls.from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# mesh


class Mesh:
    """Conforming triangulation of a union of primitives.

    vertices: (V, 2) floats; triangles: (T, 3) vertex indices, counterclockwise;
    component_labels: (T,) ints; vertex_primitive: (V,) index of the primitive
    boundary carrying each vertex (-1 for interior vertices).
    """

    def __init__(self, vertices, triangles, geometry, primitives, vertex_primitive,
                 component_labels=None):
        self.vertices = np.asarray(vertices, dtype=float)
        self.triangles = np.asarray(triangles, dtype=np.int64)
        self.geometry = geometry
        self.primitives = list(primitives)
        self.vertex_primitive = np.asarray(vertex_primitive, dtype=np.int64)
        self._orient()
        self.boundary_edges = self._find_boundary_edges()
        if component_labels is None:
            component_labels = self._label_components()
        self.component_labels = np.asarray(component_labels, dtype=np.int64)
        self._areas = None
        self._qpts = None
        self._qwts = None
        if geometry == HYPERBOLIC:
            norms = np.linalg.norm(self.vertices, axis=1)
            if norms.max() > 1.0 - HYP_BOUNDARY_MARGIN + 1e-12:
                raise InvalidDomainError(
                    f"hyperbolic mesh reaches |x| = {norms.max():.6f}; must stay "
                    f"inside 1 - {HYP_BOUNDARY_MARGIN}"
                )

    # -- construction helpers

    def _orient(self):
        v = self.vertices
        t = self.triangles
        cross = _cross2(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])
        flip = cross < 0
        if np.any(flip):
            self.triangles = t.copy()
            self.triangles[flip] = self.triangles[flip][:, [0, 2, 1]]

    def _edge_counts(self):
        t = self.triangles
        edges = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        edges = np.sort(edges, axis=1)
        uniq, counts = np.unique(edges, axis=0, return_counts=True)
        return uniq, counts

    def _find_boundary_edges(self):
        uniq, counts = self._edge_counts()
        if np.any(counts > 2):
            raise InvalidDomainError("non-conforming mesh: edge shared by > 2 triangles")
        return uniq[counts == 1]

    def _label_components(self):
        t = self.triangles
        edge_map = {}
        rows, cols = [], []
        for idx in range(len(t)):
            for a, b in ((0, 1), (1, 2), (2, 0)):
                key = (min(t[idx, a], t[idx, b]), max(t[idx, a], t[idx, b]))
                other = edge_map.get(key)
                if other is None:
                    edge_map[key] = idx
                else:
                    rows.append(other)
                    cols.append(idx)
        graph = sparse.coo_matrix(
            (np.ones(len(rows)), (rows, cols)), shape=(len(t), len(t))
        )
        _, labels = connected_components(graph, directed=False)
        return labels

    # -- basic queries

    @property
    def num_vertices(self):
        return len(self.vertices)

    @property
    def num_triangles(self):
        return len(self.triangles)

    def triangle_areas(self):
        if self._areas is None:
            v = self.vertices
            t = self.triangles
            self._areas = 0.5 * _cross2(
                v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]]
            )
        return self._areas

    def quad_points(self):
        """Quadrature nodes, shape (T, 6, 2)."""
        if self._qpts is None:
            corners = self.vertices[self.triangles]  # (T, 3, 2)
            self._qpts = np.einsum("qk,tkd->tqd", TRI_QP, corners)
        return self._qpts

    def quad_weights(self):
        """Quadrature weights including triangle areas, shape (T, 6)."""
        if self._qwts is None:
            self._qwts = self.triangle_areas()[:, None] * TRI_QW[None, :]
        return self._qwts

    def max_diameter(self):
        v = self.vertices
        t = self.triangles
        e = [np.linalg.norm(v[t[:, i]] - v[t[:, j]], axis=1) for i, j in ((0, 1), (1, 2), (2, 0))]
        return float(np.max(e))

    def bounding_radius(self):
        return float(np.linalg.norm(self.vertices, axis=1).max())

    def min_angle(self):
        v = self.vertices[self.triangles]
        angles = []
        for i in range(3):
            a = v[:, (i + 1) % 3] - v[:, i]
            b = v[:, (i + 2) % 3] - v[:, i]
            cosang = np.sum(a * b, axis=1) / (
                np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1)
            )
            angles.append(np.arccos(np.clip(cosang, -1.0, 1.0)))
        return float(np.degrees(np.min(angles)))

    # -- integration

    def _weight_values(self, weight, pts):
        if weight in (None, "none"):
            return 1.0
        r2 = np.sum(pts * pts, axis=-1)
        if np.any(r2 >= 1.0):
            raise InvalidDomainError("weight singular: quadrature node outside unit disk")
        n = pts.shape[-1]
        if weight == "hyp_volume":
            return (1.0 - r2) ** (-n)
        if weight == "hyp_gradient":
            return (1.0 - r2) ** (2 - n)
        raise ValueError(f"unknown weight {weight!r}")

    def integrate(self, f=None, weight="none"):
        """Quadrature of f (callable on (N, 2) points; None means 1) over the mesh."""
        if weight not in (None, "none"):
            vert_norm = np.linalg.norm(self.vertices, axis=1).max()
            if vert_norm >= 1.0:
                raise InvalidDomainError(
                    f"hyperbolic weight singular on mesh reaching |x| = {vert_norm}"
                )
        pts = self.quad_points()
        wts = self.quad_weights() * self._weight_values(weight, pts)
        if f is None:
            return float(np.sum(wts))
        vals = f(pts.reshape(-1, 2)).reshape(pts.shape[:2])
        return float(np.sum(wts * vals))

    def area(self):
        return float(self.triangle_areas().sum())

    def volume(self, weight="none"):
        return self.integrate(None, weight=weight)

    # -- refinement

    def refine(self):
        """Uniform 4-way subdivision with curved-boundary midpoints re-projected."""
        v = self.vertices
        t = self.triangles
        boundary = {tuple(e) for e in np.sort(self.boundary_edges, axis=1).tolist()}
        edge_index = {}
        new_pts = [v]
        new_prim = [self.vertex_primitive]
        next_id = len(v)

        def midpoint(i, j):
            nonlocal next_id
            key = (min(i, j), max(i, j))
            idx = edge_index.get(key)
            if idx is not None:
                return idx
            mid = 0.5 * (v[i] + v[j])
            prim_id = -1
            pi, pj = self.vertex_primitive[i], self.vertex_primitive[j]
            if key in boundary and pi == pj and pi >= 0:
                prim = self.primitives[pi]
                if prim.curved:
                    mid = prim.project_boundary(mid[None, :])[0]
                prim_id = pi
            new_pts.append(mid[None, :])
            new_prim.append(np.array([prim_id]))
            edge_index[key] = next_id
            next_id += 1
            return edge_index[key]

        children = np.empty((4 * len(t), 3), dtype=np.int64)
        labels = np.repeat(self.component_labels, 4)
        for k, (i, j, l) in enumerate(t):
            mij, mjl, mli = midpoint(i, j), midpoint(j, l), midpoint(l, i)
            children[4 * k + 0] = (i, mij, mli)
            children[4 * k + 1] = (mij, j, mjl)
            children[4 * k + 2] = (mli, mjl, l)
            children[4 * k + 3] = (mij, mjl, mli)
        return Mesh(
            np.concatenate(new_pts, axis=0),
            children,
            self.geometry,
            self.primitives,
            np.concatenate(new_prim),
            component_labels=labels,
        )

    # -- transforms (labels and connectivity preserved)

    def translated(self, dz):
        dz = np.asarray(dz, dtype=float)
        prims = [p.translated(dz) for p in self.primitives]
        return Mesh(self.vertices + dz, self.triangles, self.geometry, prims,
                    self.vertex_primitive, self.component_labels)

    def scaled(self, s):
        prims = [p.scaled(float(s)) for p in self.primitives]
        return Mesh(self.vertices * float(s), self.triangles, self.geometry, prims,
                    self.vertex_primitive, self.component_labels)

    def mobius_transformed(self, x):
        if self.geometry != HYPERBOLIC:
            raise ValueError("Mobius transforms apply to hyperbolic meshes")
        prims = [p.mobius_transformed(x) for p in self.primitives]
        return Mesh(mobius(x, self.vertices), self.triangles, self.geometry, prims,
                    self.vertex_primitive, self.component_labels)

    # -- validation & export

    def validate(self):
        """Check conformity invariants; raises InvalidDomainError on failure."""
        if np.any(self.triangle_areas() <= 0):
            raise InvalidDomainError("inverted or degenerate triangle present")
        uniq, counts = self._edge_counts()
        if np.any(counts > 2):
            raise InvalidDomainError("edge shared by more than two triangles")
        # boundary loops: every boundary vertex has boundary-degree exactly 2
        bverts, bdeg = np.unique(self.boundary_edges, return_counts=True)
        if np.any(bdeg != 2):
            raise InvalidDomainError("boundary edges do not form closed loops")
        n_loops = self._count_boundary_loops()
        n_comp = len(np.unique(self.component_labels))
        euler = self.num_vertices - len(uniq) + self.num_triangles
        if euler != 2 * n_comp - n_loops:
            raise InvalidDomainError(
                f"Euler characteristic {euler} inconsistent with {n_comp} components "
                f"and {n_loops} boundary loops"
            )
        return True

    def _count_boundary_loops(self):
        edges = self.boundary_edges
        if len(edges) == 0:
            return 0
        nodes = np.unique(edges)
        remap = {v: i for i, v in enumerate(nodes)}
        rows = [remap[e[0]] for e in edges]
        cols = [remap[e[1]] for e in edges]
        graph = sparse.coo_matrix(
            (np.ones(len(rows)), (rows, cols)), shape=(len(nodes), len(nodes))
        )
        n, _ = connected_components(graph, directed=False)
        return n

    def export_text(self, path):
        """Plain-text vertex/element dump for external viewing."""
        with open(path, "w") as fh:
            fh.write(f"vertices {self.num_vertices}\n")
            for x, y in self.vertices:
                fh.write(f"{x:.17g} {y:.17g}\n")
            fh.write(f"triangles {self.num_triangles}\n")
            for a, b, c in self.triangles:
                fh.write(f"{a} {b} {c}\n")


# ---------------------------------------------------------------------------
# mesher


def _hex_lattice(bbox_min, bbox_max, spacing, jitter=0.0):
    dx = spacing
    dy = spacing * np.sqrt(3.0) / 2.0
    xs = np.arange(bbox_min[0] - dx, bbox_max[0] + 2 * dx, dx)
    ys = np.arange(bbox_min[1] - dy, bbox_max[1] + 2 * dy, dy)
    pts = []
    for row, y in enumerate(ys):
        offset = 0.5 * dx if row % 2 else 0.0
        pts.append(np.stack([xs + offset + jitter, np.full_like(xs, y)], axis=1))
    return np.concatenate(pts, axis=0)


def _triangulate_loop(loop, inside_fn, spacing, lloyd_iters=4, jitter=0.0):
    lattice = _hex_lattice(loop.min(axis=0), loop.max(axis=0), spacing, jitter)
    keep = inside_fn(lattice)
    keep &= _min_dist_to_loop(lattice, loop) >= 0.5 * spacing
    pts = np.concatenate([loop, lattice[keep]], axis=0)
    n_bound = len(loop)

    def build(points):
        tri = Delaunay(points)
        cells = tri.simplices
        centroids = points[cells].mean(axis=1)
        keep = inside_fn(centroids)
        # slivers of three consecutive loop vertices defeat the centroid test;
        # decide them exactly by the local turn of the (CCW) boundary
        all_boundary = np.all(cells < n_bound, axis=1)
        for idx in np.nonzero(all_boundary)[0]:
            members = set(int(v) for v in cells[idx])
            for m in members:
                if {(m + 1) % n_bound, (m + 2) % n_bound} <= members:
                    a = points[m]
                    b = points[(m + 1) % n_bound]
                    c = points[(m + 2) % n_bound]
                    turn = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
                    keep[idx] = turn > 0
                    break
        return cells[keep]

    cells = build(pts)
    for _ in range(lloyd_iters):
        centroids = pts[cells].mean(axis=1)
        areas = 0.5 * np.abs(
            _cross2(pts[cells[:, 1]] - pts[cells[:, 0]], pts[cells[:, 2]] - pts[cells[:, 0]])
        )
        acc = np.zeros_like(pts)
        wsum = np.zeros(len(pts))
        for k in range(3):
            np.add.at(acc, cells[:, k], areas[:, None] * centroids)
            np.add.at(wsum, cells[:, k], areas)
        movable = wsum > 0
        movable[:n_bound] = False
        pts[movable] = acc[movable] / wsum[movable, None]
        cells = build(pts)
    return pts, cells, n_bound


def _boundary_matches_loop(pts, cells, n_bound):
    edges = np.concatenate([cells[:, [0, 1]], cells[:, [1, 2]], cells[:, [2, 0]]])
    edges = np.sort(edges, axis=1)
    uniq, counts = np.unique(edges, axis=0, return_counts=True)
    boundary = {tuple(e) for e in uniq[counts == 1].tolist()}
    expected = {
        tuple(sorted((i, (i + 1) % n_bound))) for i in range(n_bound)
    }
    return boundary == expected


def _mesh_primitive(prim, h, factor=0.8):
    # the boundary loop is fixed by h; diameter retries only shrink the lattice
    loop = prim.boundary_loop(h)
    inside = lambda pts: _points_in_polygon(pts, loop)
    spacing = factor * h
    for attempt, jitter in enumerate((0.0, 0.11 * spacing, 0.23 * spacing)):
        pts, cells, n_bound = _triangulate_loop(loop, inside, spacing, jitter=jitter)
        if len(cells) and _boundary_matches_loop(pts, cells, n_bound):
            return pts, cells, n_bound
    raise InvalidDomainError("failed to recover the domain boundary in the triangulation")


def _primitive_separations(prims, h):
    loops = [p.boundary_loop(h / 2.0) for p in prims]
    for i in range(len(prims)):
        for j in range(i + 1, len(prims)):
            if np.any(prims[i].contains(loops[j])) or np.any(prims[j].contains(loops[i])):
                raise InvalidDomainError(f"primitives {i} and {j} overlap")
            gap = _min_dist_to_loop(loops[i], loops[j]).min()
            if gap < h:
                raise InvalidDomainError(
                    f"primitives {i} and {j} are separated by {gap:.4g} < h = {h}"
                )


def build_mesh(spec):
    """Triangulate a DomainSpec; raises InvalidDomainError for unusable specs."""
    prims = spec.realized_primitives()
    if spec.geometry == HYPERBOLIC:
        for prim in prims:
            loop = prim.boundary_loop(spec.h)
            if np.linalg.norm(loop, axis=1).max() > 1.0 - HYP_BOUNDARY_MARGIN:
                raise InvalidDomainError("hyperbolic primitive reaches the unit circle")
    if len(prims) > 1:
        _primitive_separations(prims, spec.h)

    factor = 0.8
    for _ in range(4):
        all_pts, all_cells, vert_prim = [], [], []
        offset = 0
        for pid, prim in enumerate(prims):
            pts, cells, n_bound = _mesh_primitive(prim, spec.h, factor)
            all_pts.append(pts)
            all_cells.append(cells + offset)
            ids = np.full(len(pts), -1, dtype=np.int64)
            ids[:n_bound] = pid
            vert_prim.append(ids)
            offset += len(pts)

        mesh = Mesh(
            np.concatenate(all_pts, axis=0),
            np.concatenate(all_cells, axis=0),
            spec.geometry,
            prims,
            np.concatenate(vert_prim),
        )
        if mesh.max_diameter() <= spec.h:
            mesh.validate()
            return mesh
        factor *= 0.97 * spec.h / mesh.max_diameter()
    raise InvalidDomainError("could not satisfy the max triangle diameter bound")
