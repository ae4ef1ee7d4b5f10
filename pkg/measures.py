'''
Surface Area Measures and the Blaschke Structure

Discrete measures on the unit sphere and the functionals that pair them with support
functions. A polytope's surface area measure puts one atom at each facet normal, weighted
by the facet's (N-1)-area; adding such measures (the Blaschke sum) and pairing them with
support vectors (mixed volume V1) are the two operations everything else is built from.

Core Types:
-----------
- SphericalMeasure: atoms (direction, weight > 0); duplicate directions are merged on
  construction. Supports '+', scalar '*', restriction and lookup on a SphereGrid.
- AlexandrovReport: closure residual, spanning flag and verdict for a candidate measure.

Functions:
----------
- surface_area_measure(p): one atom per facet.
- validate_alexandrov(m, tol): closure plus "not concentrated on a great subsphere".
- pairing(f, m): <f, m> = (1/N) * sum f(u_i) w_i.
- mixed_volume_v1(y, x): <x, mu(y)>; V1(x, x) = V(x).
- ball_measure(grid, r): r^(N-1) times the grid quadrature weights.
- integral_breadth(x): normalised so a ball of radius r has breadth 2r.
- blaschke_sum(x, y, a, b): body whose measure is a*mu(x) + b*mu(y).
- extended_volume(f): <f, mu(co f)>.
- as_measure(y): accept a body or a measure.
- measure_distance(m1, m2): relative L1 distance after aligning atoms.
- measures_equal(m1, m2): atom-by-atom equality at relative tolerance.
- align_atoms(m1, m2, tol): common atom list with both weight vectors.
- values_at(f, dirs): support numbers at atom directions (interpolated off a dim 2 grid).

Notes:
------
- V1(y, x) is defined as <x, mu(y)> with the 1/N pairing constant in every dimension.
- Discrete measures are always atomic; AlexandrovReport.has_atoms records it and the
  verdict ignores it.

Dependencies:
-------------
- numpy
- convex_core, lp_simplex, config, errors

Author:
-------
Support & Measure Project
'''

import math
from dataclasses import dataclass, field
from typing import Optional
import numpy as np
from config import TOL, DEFAULT_GRID_2D
from errors import InvalidArgumentError, DegenerateBodyError, AlexandrovViolationError, NonconvergenceError
from convex_core import (SphereGrid, SupportVector, Polytope, reconstruct, make_grid, body_vertices,
                         steiner_normalize)
from lp_simplex import is_feasible

def _merge(dirs, weights, tol):
    kept_dirs, kept_w = [], []
    for u, w in zip(dirs, weights):
        if kept_dirs:
            dist = np.linalg.norm(np.asarray(kept_dirs) - u, axis=1)
            j = int(np.argmin(dist))
            if dist[j] <= tol:
                kept_w[j] += w
                continue
        kept_dirs.append(u)
        kept_w.append(float(w))
    return kept_dirs, kept_w

@dataclass(frozen=True, eq=False)
class SphericalMeasure:
    dim: int
    dirs: np.ndarray = None
    weights: np.ndarray = None

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise InvalidArgumentError(f"Only dimensions 2 and 3 are supported, got {self.dim}.")
        dirs = np.zeros((0, self.dim)) if self.dirs is None else np.asarray(self.dirs, dtype=float).reshape(-1, self.dim)
        weights = np.zeros(0) if self.weights is None else np.asarray(self.weights, dtype=float).reshape(-1)
        if len(dirs) != len(weights):
            raise InvalidArgumentError("Measure directions and weights differ in length.")
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise InvalidArgumentError("Measure weights must be finite and nonnegative.")
        norms = np.linalg.norm(dirs, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-8):
            raise InvalidArgumentError("Measure atoms must sit on unit directions.")
        positive = weights > 0
        kept_dirs, kept_w = _merge(dirs[positive] / norms[positive, None], weights[positive], TOL.snap)
        dirs = np.array(kept_dirs).reshape(-1, self.dim)
        weights = np.array(kept_w)
        dirs.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "dirs", dirs)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_atoms(cls, dim, atoms):
        atoms = list(atoms)
        if not atoms:
            return cls(dim)
        dirs, weights = zip(*atoms)
        return cls(dim, np.array(dirs, dtype=float), np.array(weights, dtype=float))

    @classmethod
    def from_grid_weights(cls, grid: SphereGrid, weights):
        return cls(grid.dim, grid.dirs, np.maximum(np.asarray(weights, dtype=float), 0.0))

    def __len__(self):
        return len(self.weights)

    def atoms(self):
        return list(zip(self.dirs, self.weights))

    @property
    def total_mass(self):
        return float(self.weights.sum())

    @property
    def resultant(self):
        return self.weights @ self.dirs if len(self) else np.zeros(self.dim)

    def __add__(self, other):
        if not isinstance(other, SphericalMeasure):
            return NotImplemented
        if other.dim != self.dim:
            raise InvalidArgumentError("Cannot add measures of different dimension.")
        return SphericalMeasure(self.dim, np.vstack([self.dirs, other.dirs]),
                                np.concatenate([self.weights, other.weights]))

    def __mul__(self, t):
        if t < 0:
            raise InvalidArgumentError("Measures can only be scaled by nonnegative factors.")
        return SphericalMeasure(self.dim, self.dirs, self.weights * float(t))

    __rmul__ = __mul__

    def restricted(self, keep):
        keep = np.asarray(keep, dtype=bool)
        return SphericalMeasure(self.dim, self.dirs[keep], self.weights[keep])

    def weight_at(self, u, tol=None) -> float:
        tol = TOL.snap if tol is None else tol
        if not len(self):
            return 0.0
        dist = np.linalg.norm(self.dirs - np.asarray(u, dtype=float), axis=1)
        j = int(np.argmin(dist))
        return float(self.weights[j]) if dist[j] <= tol else 0.0

    def on_grid(self, grid: SphereGrid, tol=None, nearest=False) -> np.ndarray:
        '''Weights per grid direction; atoms off the grid raise unless nearest=True.'''
        if grid.dim != self.dim:
            raise InvalidArgumentError("Measure and grid dimensions differ.")
        tol = TOL.snap if tol is None else tol
        out = np.zeros(grid.size)
        if not len(self):
            return out
        idx = np.argmax(self.dirs @ grid.dirs.T, axis=1)
        if not nearest:
            off = np.linalg.norm(grid.dirs[idx] - self.dirs, axis=1) > tol
            if np.any(off):
                raise InvalidArgumentError(f"{int(off.sum())} atoms lie off the grid.")
        np.add.at(out, idx, self.weights)
        return out

    def to_dict(self):
        return {"dim": self.dim,
                "atoms": [{"u": [float(c) for c in u], "w": float(w)} for u, w in self.atoms()]}

@dataclass
class AlexandrovReport:
    closure_residual: float
    spanning: bool
    has_atoms: bool = True
    verdict: bool = False
    tol: float = field(default=0.0, repr=False)

    def to_dict(self):
        return {"closure_residual": self.closure_residual, "spanning": self.spanning,
                "has_atoms": self.has_atoms, "verdict": self.verdict}

def as_measure(y) -> SphericalMeasure:
    if isinstance(y, SphericalMeasure):
        return y
    if isinstance(y, Polytope):
        return surface_area_measure(y)
    if isinstance(y, SupportVector):
        return surface_area_measure(y)
    raise InvalidArgumentError(f"Expected a body or a measure, got {type(y).__name__}.")

def _segment_measure(x: SupportVector) -> SphericalMeasure:
    verts = body_vertices(x.grid, x.h)
    spread = verts - verts.mean(axis=0)
    axis = np.linalg.svd(spread)[2][0]
    ends = spread @ axis
    length = float(ends.max() - ends.min())
    if length <= 1e-12 * max(1.0, float(np.abs(x.h).max())):
        raise DegenerateBodyError("A point has no surface area measure.", affine_dim=0)
    normal = np.array([-axis[1], axis[0]])
    return SphericalMeasure(2, np.array([normal, -normal]), np.array([length, length]))

def surface_area_measure(p) -> SphericalMeasure:
    if isinstance(p, SupportVector):
        try:
            p = reconstruct(p)
        except DegenerateBodyError as e:
            # a segment in the plane still has two atoms
            if p.dim == 2 and e.affine_dim == 1:
                return _segment_measure(p)
            raise
    if len(p.areas) == 0:
        raise DegenerateBodyError("Polytope has no facets.", affine_dim=None)
    return SphericalMeasure(p.dim, p.normals, p.areas)

def validate_alexandrov(m: SphericalMeasure, tol=None) -> AlexandrovReport:
    tol = TOL.closure if tol is None else tol
    if not len(m):
        raise InvalidArgumentError("Cannot validate an empty measure.")
    closure = float(np.linalg.norm(m.resultant)) / m.total_mass
    spanning = False
    if np.linalg.matrix_rank(m.dirs) == m.dim:
        # origin interior to conv(u_i): some combination with all coefficients >= 1 vanishes
        A = m.dirs.T
        spanning, _ = is_feasible(A_eq=A, b_eq=-A.sum(axis=1), n=len(m))
    return AlexandrovReport(closure, bool(spanning), True, bool(closure <= tol and spanning), tol)

def values_at(f: SupportVector, dirs) -> np.ndarray:
    grid = f.grid
    if not len(dirs):
        return np.zeros(0)
    idx = np.argmax(dirs @ grid.dirs.T, axis=1)
    on_grid = np.linalg.norm(grid.dirs[idx] - dirs, axis=1) <= TOL.snap
    values = f.h[idx].astype(float)
    if np.all(on_grid):
        return values
    if grid.dim == 3:
        raise InvalidArgumentError("Measure atoms lie off the dim 3 grid.")
    theta = grid.angles()
    order = np.argsort(theta, kind="stable")
    ext_theta = np.append(theta[order], theta[order][0] + 2.0 * math.pi)
    ext_h = np.append(f.h[order], f.h[order][0])
    t = np.mod(np.arctan2(dirs[:, 1], dirs[:, 0]), 2.0 * math.pi)
    t = np.where(t < ext_theta[0], t + 2.0 * math.pi, t)
    return np.where(on_grid, values, np.interp(t, ext_theta, ext_h))

def pairing(f: SupportVector, m: SphericalMeasure) -> float:
    '''
    (1/N) sum f(u_i) w_i over the atoms of m. f is used as given: a raw grid function is paired
    with its raw values, not with those of its envelope, so pass convexify(f) to pair a body.
    Off-grid atoms interpolate in dim 2 (see values_at).
    '''
    if f.dim != m.dim:
        raise InvalidArgumentError("Function and measure dimensions differ.")
    if not len(m):
        return 0.0
    return float(values_at(f, m.dirs) @ m.weights) / m.dim

def mixed_volume_v1(y, x: SupportVector) -> float:
    return pairing(x, as_measure(y))

def ball_measure(grid: SphereGrid, r=1.0) -> SphericalMeasure:
    if r <= 0:
        raise InvalidArgumentError("Ball radius must be positive.")
    return SphericalMeasure(grid.dim, grid.dirs, grid.qweights * r ** (grid.dim - 1))

def integral_breadth(x: SupportVector) -> float:
    grid = x.grid
    return 2.0 * float(grid.qweights @ x.h) / grid.sigma

def blaschke_sum(x, y, a=1.0, b=1.0, grid: Optional[SphereGrid] = None, opts=None) -> SupportVector:
    from minkowski_solver import solve_minkowski_2d, solve_minkowski_3d

    if a < 0 or b < 0:
        raise InvalidArgumentError("Blaschke weights must be nonnegative.")
    mx, my = as_measure(x), as_measure(y)
    if mx.dim != my.dim:
        raise InvalidArgumentError("Cannot add bodies of different dimension.")
    combined = a * mx + b * my
    report = validate_alexandrov(combined) if len(combined) else AlexandrovReport(0.0, False)
    if not report.verdict:
        raise AlexandrovViolationError("Combined measure is not the surface measure of a body.", report)
    if combined.dim == 2:
        if grid is None:
            grid = next((z.grid for z in (x, y) if isinstance(z, SupportVector)), None) or make_grid(2, DEFAULT_GRID_2D)
        polygon = solve_minkowski_2d(combined)
        return steiner_normalize(SupportVector.from_polytope(polygon, grid))
    outcome = solve_minkowski_3d(combined, opts)
    if not outcome.converged:
        raise NonconvergenceError(f"Blaschke sum did not converge (residual {outcome.residual:.3g}).",
                                  residual=outcome.residual, best=outcome.body)
    return outcome.body

def extended_volume(f: SupportVector) -> float:
    try:
        polytope = reconstruct(f)
    except DegenerateBodyError:
        return 0.0
    return pairing(f, surface_area_measure(polytope))

def align_atoms(m1: SphericalMeasure, m2: SphericalMeasure, tol):
    if m1.dim != m2.dim:
        raise InvalidArgumentError("Measures have different dimensions.")
    dirs = [u for u in m1.dirs]
    w1 = list(m1.weights)
    w2 = [0.0] * len(w1)
    for v, n in zip(m2.dirs, m2.weights):
        if dirs:
            dist = np.linalg.norm(np.asarray(dirs) - v, axis=1)
            j = int(np.argmin(dist))
            if dist[j] <= tol:
                w2[j] += n
                continue
        dirs.append(v)
        w1.append(0.0)
        w2.append(float(n))
    return np.array(dirs).reshape(-1, m1.dim), np.array(w1), np.array(w2)

def measure_distance(m1: SphericalMeasure, m2: SphericalMeasure, tol=None) -> float:
    tol = TOL.snap if tol is None else tol
    _, w1, w2 = align_atoms(m1, m2, tol)
    scale = max(m1.total_mass, m2.total_mass)
    if scale == 0.0:
        return 0.0
    return float(np.abs(w1 - w2).sum()) / scale

def measures_equal(m1: SphericalMeasure, m2: SphericalMeasure, rel=None, tol=None) -> bool:
    rel = TOL.measure_rel if rel is None else rel
    tol = TOL.snap if tol is None else tol
    _, w1, w2 = align_atoms(m1, m2, tol)
    return bool(np.all(np.abs(w1 - w2) <= rel * np.maximum(np.maximum(w1, w2), 1e-300)))

