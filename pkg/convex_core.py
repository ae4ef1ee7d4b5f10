'''
Convex Core: Sphere Grids, Support Functions and Polytopes

This module is the geometric backbone of Support & Measure. A convex body is carried by its
support function sampled on a discretized unit sphere (the Minkowski structure), and turned
into an explicit polytope by halfspace intersection whenever volumes, facet areas or
pictures are needed.

Core Types:
-----------
- SphereGrid: ordered unit directions with quadrature weights; the common index set of all
  functions and measures.
- SupportVector: support numbers of a body on a SphereGrid, with a 'tight' flag that marks
  vectors known to be exact support functions.
- Polytope: vertices plus facet normals, offsets and (N-1)-areas.

Core Functions:
---------------
- make_grid(dim, resolution): uniform angles in dim 2, icosphere directions with spherical
  Voronoi weights in dim 3.
- support_eval(x, z): support value of a SupportVector or Polytope in any unit direction.
- minkowski_combine(terms): nonnegative combination of support vectors on one grid.
- convexify(f): support function of {x : (x, u_i) <= f_i}, the envelope below f.
- reconstruct(x): Polytope realising a support vector; facet normals come from the grid.
- volume(p): (1/N) * sum(offset * area).
- contains(outer, inner): inclusion of co(inner) in co(outer), raw grid functions accepted.
- steiner_normalize(x): canonical translate with Steiner point at the origin.
- directional_breadth(x, z): h(z) + h(-z).
- support_gradient(x, z): extreme point of x in direction z.

Utilities:
----------
- unit(coords): validated unit Direction.
- affine_dimension(points): dimension of the affine hull of a point cloud.
- steiner_point(x): Steiner point of a support vector (grid moment) or dim 2 polytope (exact).

Design Notes:
-------------
- dim 2 halfspace intersection is a single sorted-angle deque pass (no solver); dim 3 uses
  scipy's HalfspaceIntersection seeded by a least-squares centre or, failing that, the
  Chebyshev centre from the in-repo simplex.
- All comparisons read their tolerances from config.TOL.
- Values are immutable after construction (arrays are flagged read-only).

Dependencies:
-------------
- numpy
- scipy.spatial (ConvexHull, HalfspaceIntersection, SphericalVoronoi)
- lp_simplex, config, errors

Author:
-------
Support & Measure Project
'''

import math
from collections import deque
from dataclasses import dataclass
from typing import Optional
import numpy as np
from scipy.spatial import ConvexHull, HalfspaceIntersection, SphericalVoronoi, QhullError
from config import TOL
from errors import (InvalidArgumentError, InvalidStateError, EmptyBodyError, InvalidGridError,
                    DegenerateBodyError)
from lp_simplex import solve_lp

SIGMA = {2: 2.0 * math.pi, 3: 4.0 * math.pi}

def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a

def unit(coords) -> np.ndarray:
    z = np.asarray(coords, dtype=float).reshape(-1)
    norm = float(np.linalg.norm(z))
    if not np.all(np.isfinite(z)) or norm == 0.0:
        raise InvalidArgumentError(f"Cannot build a direction from {coords!r}.")
    return z / norm

def _require_unit(z):
    z = np.asarray(z, dtype=float).reshape(-1)
    if abs(np.linalg.norm(z) - 1.0) > 1e3 * TOL.unit:
        raise InvalidArgumentError("Direction must have unit norm.")
    return z

def affine_dimension(points, tol=1e-9) -> int:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if len(pts) <= 1:
        return 0
    centred = pts - pts.mean(axis=0)
    s = np.linalg.svd(centred, compute_uv=False)
    scale = max(1.0, float(np.abs(pts).max()))
    return int(np.sum(s > tol * scale))

# Grids

@dataclass(frozen=True, eq=False)
class SphereGrid:
    dim: int
    dirs: np.ndarray
    qweights: np.ndarray
    resolution: Optional[int] = None

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise InvalidArgumentError(f"Only dimensions 2 and 3 are supported, got {self.dim}.")
        object.__setattr__(self, "dirs", _frozen(self.dirs))
        object.__setattr__(self, "qweights", _frozen(self.qweights))
        if self.dirs.ndim != 2 or self.dirs.shape[1] != self.dim or len(self.qweights) != len(self.dirs):
            raise InvalidArgumentError("Grid directions and weights have inconsistent shapes.")
        self.check_invariants(symmetric=False)

    def check_invariants(self, symmetric=True):
        '''
        Raises InvalidGridError unless the weights sum to the sphere area (TOL.grid_mass,
        relative), dim 2 directions increase strictly in angle and, when asked, the first
        moment sum q_i u_i vanishes (TOL.grid_symmetry).
        '''
        if np.any(self.qweights < 0) or not np.all(np.isfinite(self.qweights)):
            raise InvalidGridError("Quadrature weights must be finite and nonnegative.")
        report = self.invariant_report()
        if report["mass_gap"] > TOL.grid_mass:
            raise InvalidGridError(f"Quadrature weights sum to {self.qweights.sum():.9g}, "
                                   f"not {self.sigma:.9g}.")
        if self.dim == 2 and self.size > 1 and np.any(np.diff(self.angles()) <= 0.0):
            raise InvalidGridError("dim 2 grid directions must be sorted by angle.")
        if symmetric and report["asymmetry"] > TOL.grid_symmetry:
            raise InvalidGridError(f"Grid is not balanced: |sum q u| = {report['asymmetry']:.3g}.")
        return report

    @property
    def size(self):
        return len(self.dirs)

    @property
    def sigma(self):
        return SIGMA[self.dim]

    def matches(self, other) -> bool:
        if self is other:
            return True
        return (isinstance(other, SphereGrid) and self.dim == other.dim and self.size == other.size
                and np.array_equal(self.dirs, other.dirs) and np.array_equal(self.qweights, other.qweights))

    def moment(self) -> np.ndarray:
        return (self.dirs * self.qweights[:, None]).T @ self.dirs

    def index_of(self, z, tol=None) -> Optional[int]:
        tol = TOL.snap if tol is None else tol
        z = np.asarray(z, dtype=float)
        i = int(np.argmax(self.dirs @ z))
        return i if np.linalg.norm(self.dirs[i] - z) <= tol else None

    def nearest(self, z) -> int:
        return int(np.argmax(self.dirs @ np.asarray(z, dtype=float)))

    def antipodes(self) -> np.ndarray:
        return np.argmax(self.dirs @ (-self.dirs).T, axis=0)

    def angles(self) -> np.ndarray:
        if self.dim != 2:
            raise InvalidStateError("Angles are only defined for dim 2 grids.")
        return np.mod(np.arctan2(self.dirs[:, 1], self.dirs[:, 0]), 2.0 * math.pi)

    def invariant_report(self) -> dict:
        mass_gap = abs(self.qweights.sum() - self.sigma) / self.sigma
        asymmetry = float(np.linalg.norm(self.qweights @ self.dirs))
        return {"mass_gap": float(mass_gap), "asymmetry": asymmetry}

    @classmethod
    def from_directions(cls, dirs, dim=None, symmetric=True):
        '''
        Grid on arbitrary spanning directions with Voronoi-type weights. Facet-normal grids of
        a single polytope are rarely balanced; they pass symmetric=False.
        '''
        grid = cls._from_directions(dirs, dim)
        grid.check_invariants(symmetric)
        return grid

    @classmethod
    def _from_directions(cls, dirs, dim):
        dirs = np.array([unit(d) for d in np.atleast_2d(dirs)])
        dim = dirs.shape[1] if dim is None else dim
        if dim == 2:
            theta = np.mod(np.arctan2(dirs[:, 1], dirs[:, 0]), 2.0 * math.pi)
            order = np.argsort(theta, kind="stable")
            dirs, theta = dirs[order], theta[order]
            gaps = np.diff(np.append(theta, theta[0] + 2.0 * math.pi))
            if gaps.max() >= math.pi:
                raise InvalidGridError("Directions do not span the plane.")
            q = 0.5 * (gaps + np.roll(gaps, 1))
            return cls(2, dirs, q)
        try:
            sv = SphericalVoronoi(dirs, radius=1.0, center=np.zeros(3))
            q = sv.calculate_areas()
        except (ValueError, QhullError) as e:
            raise InvalidGridError(f"Directions do not span space: {e}")
        return cls(3, dirs, q)

def _icosphere(level):
    t = (1.0 + math.sqrt(5.0)) / 2.0
    verts = [(-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0), (0, -1, t), (0, 1, t),
             (0, -1, -t), (0, 1, -t), (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1)]
    verts = [tuple(unit(v)) for v in verts]
    faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11), (1, 5, 9), (5, 11, 4),
             (11, 10, 2), (10, 7, 6), (7, 1, 8), (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8),
             (3, 8, 9), (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    for _ in range(level):
        midpoints = {}
        def midpoint(a, b):
            key = (min(a, b), max(a, b))
            if key not in midpoints:
                verts.append(tuple(unit(np.add(verts[a], verts[b]))))
                midpoints[key] = len(verts) - 1
            return midpoints[key]
        refined = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            refined += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = refined
    return np.array(verts)

def make_grid(dim: int, resolution: int) -> SphereGrid:
    if not isinstance(resolution, (int, np.integer)) or isinstance(resolution, bool):
        raise InvalidArgumentError("Grid resolution must be an integer.")
    resolution = int(resolution)
    if dim == 2:
        if resolution < 3:
            raise InvalidArgumentError("dim 2 grids need at least 3 directions.")
        theta = 2.0 * math.pi * np.arange(resolution) / resolution
        dirs = np.column_stack([np.cos(theta), np.sin(theta)])
        # exact zeros on the axes
        dirs[np.abs(dirs) < 1e-15] = 0.0
        q = np.full(resolution, 2.0 * math.pi / resolution)
        grid = SphereGrid(2, dirs, q, resolution)
    elif dim == 3:
        if resolution < 0:
            raise InvalidArgumentError("Icosphere subdivision level must be >= 0.")
        dirs = _icosphere(resolution)
        q = SphericalVoronoi(dirs, radius=1.0, center=np.zeros(3)).calculate_areas()
        grid = SphereGrid(3, dirs, q, resolution)
    else:
        raise InvalidArgumentError(f"Only dimensions 2 and 3 are supported, got {dim}.")
    grid.check_invariants()
    return grid

# Bodies

@dataclass(frozen=True, eq=False)
class Polytope:
    dim: int
    vertices: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray
    areas: np.ndarray

    def __post_init__(self):
        for name in ("vertices", "normals", "offsets", "areas"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @property
    def total_area(self):
        return float(self.areas.sum())

    def closure_residual(self) -> float:
        return float(np.linalg.norm(self.areas @ self.normals))

    def support(self, z) -> float:
        if len(self.vertices) == 0:
            raise InvalidStateError("Empty polytope has no support function.")
        return float(np.max(self.vertices @ np.asarray(z, dtype=float)))

    def translated(self, v):
        v = np.asarray(v, dtype=float)
        return Polytope(self.dim, self.vertices + v, self.normals, self.offsets + self.normals @ v, self.areas)

    def scaled(self, t):
        return Polytope(self.dim, self.vertices * t, self.normals, self.offsets * t,
                        self.areas * t ** (self.dim - 1))

    @classmethod
    def from_vertices(cls, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        dim = pts.shape[1]
        if dim not in (2, 3):
            raise InvalidArgumentError(f"Only dimensions 2 and 3 are supported, got {dim}.")
        try:
            hull = ConvexHull(pts)
        except (QhullError, ValueError) as e:
            raise DegenerateBodyError(f"Point set has no interior: {e}", affine_dim=affine_dimension(pts))
        normals, offsets, areas = _merge_facets(pts, hull.simplices, hull.equations)
        return cls(dim, pts[np.sort(hull.vertices)], normals, offsets, areas)

def _facet_area(corners):
    if corners.shape[1] == 2:
        return float(np.linalg.norm(corners[1] - corners[0]))
    return 0.5 * float(np.linalg.norm(np.cross(corners[1] - corners[0], corners[2] - corners[0])))

def _merge_facets(points, simplices, equations, snap_dirs=None, snap_h=None):
    '''Group hull simplices by outward normal; optionally snap normals to grid directions.'''
    dim = points.shape[1]
    keys, normals, offsets, areas = {}, [], [], []
    for simplex, eq in zip(simplices, equations):
        n, off = eq[:dim], -eq[dim]
        area = _facet_area(points[simplex])
        key = None
        if snap_dirs is not None:
            i = int(np.argmax(snap_dirs @ n))
            if snap_dirs[i] @ n >= 1.0 - 1e-7:
                key = ("grid", i)
                n, off = snap_dirs[i], snap_h[i]
        if key is None:
            for k, m in enumerate(normals):
                if np.linalg.norm(m - n) <= 1e-9:
                    key = ("raw", k)
                    break
            else:
                key = ("raw", len(normals))
        if key not in keys:
            keys[key] = len(normals)
            normals.append(np.array(n, dtype=float))
            offsets.append(float(off))
            areas.append(0.0)
        areas[keys[key]] += area
    normals, offsets, areas = np.array(normals), np.array(offsets), np.array(areas)
    scale = max(1e-300, areas.sum())
    keep = areas > 1e-14 * scale
    return normals[keep], offsets[keep], areas[keep]

@dataclass(frozen=True, eq=False)
class SupportVector:
    grid: SphereGrid
    h: np.ndarray
    tight: bool = False

    def __post_init__(self):
        h = _frozen(self.h).reshape(-1)
        if len(h) != self.grid.size:
            raise InvalidArgumentError(f"Support vector has {len(h)} values for a grid of {self.grid.size}.")
        object.__setattr__(self, "h", h)

    @property
    def dim(self):
        return self.grid.dim

    def with_h(self, h, tight=False):
        return SupportVector(self.grid, h, tight)

    def translated(self, v):
        return SupportVector(self.grid, self.h + self.grid.dirs @ np.asarray(v, dtype=float), self.tight)

    def scaled(self, t):
        if t < 0:
            raise InvalidArgumentError("Bodies can only be scaled by nonnegative factors.")
        return SupportVector(self.grid, self.h * t, self.tight)

    @classmethod
    def from_polytope(cls, p: Polytope, grid: SphereGrid):
        if p.dim != grid.dim:
            raise InvalidArgumentError("Polytope and grid dimensions differ.")
        return cls(grid, (grid.dirs @ p.vertices.T).max(axis=1), True)

    @classmethod
    def from_points(cls, points, grid: SphereGrid):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return cls(grid, (grid.dirs @ pts.T).max(axis=1), True)

    @classmethod
    def ball(cls, grid: SphereGrid, r=1.0, center=None):
        h = np.full(grid.size, float(r))
        if center is not None:
            h = h + grid.dirs @ np.asarray(center, dtype=float)
        return cls(grid, h, True)

    @classmethod
    def segment(cls, grid: SphereGrid, a, b):
        return cls.from_points([a, b], grid)

def check_grids(*xs):
    first = xs[0].grid
    for x in xs[1:]:
        if not first.matches(x.grid):
            raise InvalidArgumentError("Support vectors live on different grids.")
    return first

# Halfspace intersection

def _polygon_vertices(dirs, h, tol):
    '''Vertices (ccw) of {x : dirs x <= h} and the grid index of the line behind each edge.'''
    theta = np.mod(np.arctan2(dirs[:, 1], dirs[:, 0]), 2.0 * math.pi)
    order = np.argsort(theta, kind="stable")
    U, H, theta = dirs[order], h[order], theta[order]
    gaps = np.diff(np.append(theta, theta[0] + 2.0 * math.pi))
    if gaps.max() >= math.pi - 1e-12:
        raise InvalidGridError("Grid directions do not span the plane; the body would be unbounded.")
    scale = max(1.0, float(np.abs(H).max()))
    eps = tol * scale

    def meet(i, j):
        det = U[i, 0] * U[j, 1] - U[i, 1] * U[j, 0]
        if abs(det) < 1e-14:
            return None
        return np.array([(H[i] * U[j, 1] - H[j] * U[i, 1]) / det,
                         (U[i, 0] * H[j] - U[j, 0] * H[i]) / det])

    def outside(p, k):
        return p is not None and p @ U[k] > H[k] + eps

    dq = deque()
    for k in range(len(U)):
        while len(dq) >= 2 and outside(meet(dq[-2], dq[-1]), k):
            dq.pop()
        while len(dq) >= 2 and outside(meet(dq[0], dq[1]), k):
            dq.popleft()
        dq.append(k)
    while len(dq) >= 3 and outside(meet(dq[-2], dq[-1]), dq[0]):
        dq.pop()
    while len(dq) >= 3 and outside(meet(dq[0], dq[1]), dq[-1]):
        dq.popleft()

    kept = list(dq)
    if len(kept) < 3:
        raise EmptyBodyError("Halfspace intersection is empty.")
    kept_theta = theta[kept]
    kept_gaps = np.diff(np.append(kept_theta, kept_theta[0] + 2.0 * math.pi))
    if kept_gaps.max() >= math.pi - 1e-12:
        raise EmptyBodyError("Halfspace intersection is empty.")
    verts = []
    for a, b in zip(kept, kept[1:] + kept[:1]):
        p = meet(a, b)
        if p is None:
            raise EmptyBodyError("Halfspace intersection is empty.")
        verts.append(p)
    verts = np.array(verts)
    if np.max(verts @ U.T - H) > 10 * eps:
        raise EmptyBodyError("Halfspace intersection is empty.")
    return verts, order[kept]

def _interior_point(dirs, h, scale):
    design = np.column_stack([np.ones(len(dirs)), dirs])
    guess = np.linalg.lstsq(design, h, rcond=None)[0][1:]
    slack = h - dirs @ guess
    if slack.min() > 1e-6 * scale:
        return guess, float(slack.min())
    # Chebyshev centre: maximise r subject to dirs x + r <= h, x = x+ - x-.
    n, dim = dirs.shape
    A = np.hstack([dirs, -dirs, np.ones((n, 1))])
    c = np.zeros(2 * dim + 1)
    c[-1] = -1.0
    result = solve_lp(c, A_ub=A, b_ub=h)
    if result.status == "infeasible":
        raise EmptyBodyError("Halfspace intersection is empty.")
    if result.status == "unbounded":
        raise InvalidGridError("Grid directions do not span space; the body would be unbounded.")
    if not result.success:
        raise InvalidStateError(f"Interior point search failed ({result.status}).")
    x = result.x[:dim] - result.x[dim:2 * dim]
    return x, float(result.x[-1])

def _polyhedron_vertices(dirs, h, tol):
    scale = max(1.0, float(np.abs(h).max()))
    centre, radius = _interior_point(dirs, h, scale)
    if radius <= max(tol, 1e-9) * scale:
        if radius < -tol * scale:
            raise EmptyBodyError("Halfspace intersection is empty.")
        raise DegenerateBodyError("Body has empty interior.", affine_dim=_flat_dimension(dirs, h, tol))
    try:
        hs = HalfspaceIntersection(np.column_stack([dirs, -h]), centre)
    except QhullError as e:
        raise DegenerateBodyError(f"Halfspace intersection failed: {e}", affine_dim=_flat_dimension(dirs, h, tol))
    return hs.intersections

def _flat_dimension(dirs, h, tol):
    '''Affine dimension read off the zero-breadth directions of a grid function.'''
    anti = np.argmax(dirs @ (-dirs).T, axis=0)
    breadth = h + h[anti]
    scale = max(1.0, float(np.abs(h).max()))
    flat = dirs[breadth <= 1e3 * tol * scale]
    if len(flat) == 0:
        return dirs.shape[1]
    return dirs.shape[1] - int(np.linalg.matrix_rank(flat, tol=1e-6))

def body_vertices(grid, h, tol=None):
    tol = TOL.feasibility if tol is None else tol
    h = np.asarray(h, dtype=float)
    if not np.all(np.isfinite(h)):
        raise InvalidArgumentError("Support numbers must be finite.")
    if grid.dim == 2:
        verts, _ = _polygon_vertices(grid.dirs, h, tol)
        return verts
    return _polyhedron_vertices(grid.dirs, h, tol)

# Operations

def convexify(f: SupportVector) -> SupportVector:
    '''Envelope below f, recomputed even when f is flagged tight.'''
    verts = body_vertices(f.grid, f.h)
    h = np.minimum((f.grid.dirs @ verts.T).max(axis=1), f.h)
    return SupportVector(f.grid, h, True)

def reconstruct(x: SupportVector) -> Polytope:
    grid = x.grid
    tight = convexify(x)
    h = tight.h
    scale = max(1.0, float(np.abs(h).max()))
    if grid.dim == 2:
        verts, lines = _polygon_vertices(grid.dirs, h, TOL.feasibility)
        prev = np.roll(verts, 1, axis=0)
        lengths = np.linalg.norm(verts - prev, axis=1)
        keep = lengths > 1e-12 * scale
        if keep.sum() < 3:
            raise DegenerateBodyError("Body has zero area.", affine_dim=affine_dimension(verts))
        unique = verts[keep]
        area = 0.5 * abs(np.sum(unique[:, 0] * np.roll(unique[:, 1], -1) - unique[:, 1] * np.roll(unique[:, 0], -1)))
        if area <= 1e-12 * scale * scale:
            raise DegenerateBodyError("Body has zero area.", affine_dim=affine_dimension(unique))
        idx = lines[keep]
        return Polytope(2, unique, grid.dirs[idx], h[idx], lengths[keep])
    verts = _polyhedron_vertices(grid.dirs, h, TOL.feasibility)
    try:
        hull = ConvexHull(verts)
    except (QhullError, ValueError):
        raise DegenerateBodyError("Body has zero volume.", affine_dim=affine_dimension(verts))
    normals, offsets, areas = _merge_facets(verts, hull.simplices, hull.equations, grid.dirs, h)
    return Polytope(3, verts[np.sort(hull.vertices)], normals, offsets, areas)

def support_eval(x, z) -> float:
    z = _require_unit(z)
    if isinstance(x, Polytope):
        if len(z) != x.dim:
            raise InvalidArgumentError("Direction and body dimensions differ.")
        return x.support(z)
    if len(z) != x.dim:
        raise InvalidArgumentError("Direction and body dimensions differ.")
    try:
        if x.dim == 2:
            h = convexify(x).h
            theta = x.grid.angles()
            order = np.argsort(theta, kind="stable")
            t = math.atan2(z[1], z[0]) % (2.0 * math.pi)
            ext_theta = np.append(theta[order], theta[order][0] + 2.0 * math.pi)
            ext_h = np.append(h[order], h[order][0])
            if t < ext_theta[0]:
                t += 2.0 * math.pi
            return float(np.interp(t, ext_theta, ext_h))
        verts = body_vertices(x.grid, convexify(x).h)
    except EmptyBodyError as e:
        raise InvalidStateError(f"Empty body has no support function: {e}")
    return float(np.max(verts @ z))

def minkowski_combine(terms) -> SupportVector:
    terms = list(terms)
    if not terms:
        raise InvalidArgumentError("Minkowski combination needs at least one term.")
    grid = check_grids(*[x for _, x in terms])
    h = np.zeros(grid.size)
    for weight, x in terms:
        if weight < 0:
            raise InvalidArgumentError("Minkowski weights must be nonnegative.")
        h = h + weight * x.h
    return SupportVector(grid, h, all(x.tight for _, x in terms))

def volume(p: Polytope) -> float:
    return max(0.0, float(p.offsets @ p.areas) / p.dim)

def body_volume(x: SupportVector) -> float:
    try:
        return volume(reconstruct(x))
    except DegenerateBodyError:
        return 0.0

def contains(outer: SupportVector, inner: SupportVector) -> bool:
    '''
    co(inner) inside co(outer). Either argument may be a raw grid function: outer is read as
    the halfspace set it cuts out and inner is convexified first. When inner has no interior
    its raw values are compared instead, which can only under-report inclusion.
    '''
    check_grids(outer, inner)
    try:
        inner_h = convexify(inner).h
    except (EmptyBodyError, DegenerateBodyError):
        inner_h = inner.h
    return bool(np.all(inner_h <= outer.h + TOL.feasibility))

def steiner_point(x) -> np.ndarray:
    if isinstance(x, SupportVector):
        grid = x.grid
        return np.linalg.solve(grid.moment(), (grid.qweights * x.h) @ grid.dirs)
    if x.dim != 2:
        raise InvalidArgumentError("Exact Steiner points are implemented for polygons only.")
    theta = np.mod(np.arctan2(x.normals[:, 1], x.normals[:, 0]), 2.0 * math.pi)
    order = np.argsort(theta)
    U, H, theta = x.normals[order], x.offsets[order], theta[order]
    total = np.zeros(2)
    for k in range(len(U)):
        j = (k + 1) % len(U)
        a, b = theta[k], theta[j] + (2.0 * math.pi if j == 0 else 0.0)
        det = U[k, 0] * U[j, 1] - U[k, 1] * U[j, 0]
        v = np.array([(H[k] * U[j, 1] - H[j] * U[k, 1]) / det, (U[k, 0] * H[j] - U[j, 0] * H[k]) / det])
        s2 = math.sin(2 * b) - math.sin(2 * a)
        c2 = math.cos(2 * a) - math.cos(2 * b)
        moment = np.array([[(b - a) / 2 + s2 / 4, c2 / 4], [c2 / 4, (b - a) / 2 - s2 / 4]])
        total += moment @ v
    return total / math.pi

def steiner_normalize(x: SupportVector) -> SupportVector:
    return x.translated(-steiner_point(x))

def directional_breadth(x, z) -> float:
    z = _require_unit(z)
    return support_eval(x, z) + support_eval(x, -z)

def support_gradient(x, z) -> np.ndarray:
    '''A supergradient of the support function at z: a point of x extreme in direction z.'''
    z = _require_unit(z)
    if len(z) != x.dim:
        raise InvalidArgumentError("Direction and body dimensions differ.")
    if isinstance(x, Polytope):
        verts = x.vertices
    else:
        try:
            verts = body_vertices(x.grid, convexify(x).h)
        except EmptyBodyError as e:
            raise InvalidStateError(f"Empty body has no support function: {e}")
    return np.array(verts[int(np.argmax(verts @ z))])
