'''
Isoperimetric Problems: the Urysohn Family

Solvers, analytic constructions and optimality-condition verifiers for volume maximisation
under an integral breadth budget, with or without an obstacle, with a flattening direction,
for several objectives at once, and for bodies of revolution.

Solvers:
--------
solve_scalarized(spec, lam_vol, lam_flat, zbar) → IsoOutcome
    maximise lam_vol * V(h)^(1/N) - lam_flat * b_zbar(h) over the spec's feasible set.
    dim 2: the variables are tight support numbers on the grid. Edge lengths are the linear
    image a = D h of the support numbers, so convexity is D h >= 0 and V = h.D h / 2.
    dim 3: the variables are raw grid support numbers; V is the extended volume and its
    gradient is the facet-area vector of co(h).
    Both go through scipy's trust-constr with sparse linear constraints (breadth row, the
    antipodal pairs of the symmetric class, C = diag(1/q) D >= 0 in dim 2); dim 2 supplies the
    exact Hessian as a linear operator, dim 3 an SR1 update. Stationarity is measured afterwards
    as a relative KKT residual with multipliers fitted by bounded sparse least squares.
solve_urysohn(spec) → SupportVector
solve_flattening(spec) → ParetoPoint
solve_rotational_flattening(spec, grid3) → (ParetoPoint, SupportVector)
pareto_front_vector_iso(ys, target_volume, weight_grid) → [ParetoPoint]
    scaled Minkowski combinations, each with its Minkowski-inequality gap.
leidenfrost(area, lam) → (stadium, spheroid)
    free flattening solve at the breadth matching the area, then a stadium fit.

Constructions and fits:
-----------------------
lens_analytic(halfdim_radius, alpha, grid), lens_fit(xbar, halfdim_radius)
rounded_polygon_analytic(vertices, alpha, grid)
stadium_fit(x2d), classify_runs(x2d), rotate_lift(x2d, grid3)
pappus_volume(radius, half_length), revolution_volume(x2d)

Verifiers:
----------
verify_external_urysohn, verify_flattening, verify_current_hyperplane, verify_optimal_hulls
    Each returns a ConditionReport: one residual per condition, holds iff residual <= tol.
    Majorization conditions use decide_majorization and may come back undecided, which
    leaves the verdict at None. Measure identities use measure_distance; contact conditions
    are measured relative to the integral breadth.
pareto_audit(points) → [(i, j)] pairs where point j dominates point i.

Conventions:
------------
- The flattening / symmetry axis is the last coordinate: e2 in the plane, e3 in space.
- Meridians of bodies of revolution are even under x -> -x in the plane.

Dependencies:
-------------
- numpy
- scipy.optimize (minimize with trust-constr, LinearConstraint, SR1, lsq_linear, Bounds)
- scipy.sparse (edge operator, constraint rows, Hessian operator)
- rich (warnings on stderr)
- convex_core, measures, majorization, minkowski_solver, witness_fitting, config, errors

Author:
-------
Support & Measure Project
'''

import math
from dataclasses import dataclass, field
from typing import List, Optional
import numpy as np
from rich.console import Console
from scipy.optimize import minimize, lsq_linear, Bounds, LinearConstraint, SR1
from scipy.sparse import csr_matrix, coo_matrix, diags, vstack
from scipy.sparse.linalg import LinearOperator
from config import TOL, DEFAULT_MAX_ITERS, DEFAULT_GRID_2D, DEFAULT_GRID_3D_LEVEL
from errors import InvalidArgumentError, InfeasibleError, DegenerateBodyError, NonconvergenceError
from convex_core import (SphereGrid, SupportVector, make_grid, convexify, reconstruct, body_volume, steiner_point,
                         steiner_normalize, check_grids, unit, minkowski_combine)
from measures import (SphericalMeasure, surface_area_measure, as_measure, ball_measure, integral_breadth, pairing,
                      values_at, measure_distance)
from majorization import decide_majorization
from minkowski_solver import facet_areas
from witness_fitting import fit_minkowski_combination, axis_indices

console = Console(stderr=True)

URYSOHN_KINDS = ("free", "internal", "external")
FLATTENING_COEFFICIENTS = {"pairing": "1/N", "literal": "2N"}

# Problem and result types

@dataclass(frozen=True, eq=False)
class UrysohnSpec:
    kind: str
    breadth_target: float
    grid: SphereGrid
    obstacle: Optional[SupportVector] = None
    symmetric: bool = False

    def __post_init__(self):
        if self.kind not in URYSOHN_KINDS:
            raise InvalidArgumentError(f"Unknown Urysohn kind '{self.kind}', expected one of {URYSOHN_KINDS}.")
        if not math.isfinite(self.breadth_target) or self.breadth_target <= 0:
            raise InvalidArgumentError("The breadth target must be a positive number.")
        if self.kind == "free":
            if self.obstacle is not None:
                raise InvalidArgumentError("A free Urysohn problem takes no obstacle.")
            return
        if self.obstacle is None:
            raise InvalidArgumentError(f"An {self.kind} Urysohn problem needs an obstacle.")
        if not self.grid.matches(self.obstacle.grid):
            raise InvalidArgumentError("The obstacle lives on a different grid.")
        try:
            object.__setattr__(self, "obstacle", convexify(self.obstacle))
        except DegenerateBodyError:
            # flat obstacles have no halfspace envelope in dim 3
            pass

    @property
    def dim(self):
        return self.grid.dim

@dataclass(frozen=True, eq=False)
class FlatteningSpec:
    base: UrysohnSpec
    zbar: np.ndarray
    lam_vol: float = 1.0
    lam_flat: float = 0.0

    def __post_init__(self):
        z = unit(self.zbar)
        if len(z) != self.base.dim:
            raise InvalidArgumentError("The flattening direction has the wrong dimension.")
        if self.lam_vol < 0 or self.lam_flat < 0 or self.lam_vol + self.lam_flat == 0:
            raise InvalidArgumentError("Scalarization weights must be nonnegative and not both zero.")
        axis_indices(self.base.grid, z)
        object.__setattr__(self, "zbar", z)

@dataclass
class Condition:
    name: str
    holds: Optional[bool]
    residual: float
    tol: float

@dataclass
class ConditionReport:
    '''
    verdict is True when every condition holds, False when one fails and None when none fails
    but at least one could not be decided.
    '''
    conditions: List[Condition] = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    def add(self, name, residual, tol):
        residual = max(0.0, float(residual))
        self.conditions.append(Condition(name, bool(residual <= tol), residual, float(tol)))

    def add_decision(self, name, decision, tol):
        self.conditions.append(Condition(name, decision.holds, max(0.0, float(decision.residual)), float(tol)))

    @property
    def verdict(self) -> Optional[bool]:
        if not self.conditions or any(c.holds is False for c in self.conditions):
            return False
        if any(c.holds is None for c in self.conditions):
            return None
        return True

    def to_dict(self):
        return {"verdict": self.verdict,
                "conditions": [{"name": c.name, "holds": c.holds, "residual": c.residual, "tol": c.tol}
                               for c in self.conditions],
                "witnesses": {k: _plain(v) for k, v in self.witnesses.items()},
                "notes": {k: _plain(v) for k, v in self.notes.items()}}

def _plain(value):
    if isinstance(value, SphericalMeasure):
        return value.to_dict()
    if isinstance(value, SupportVector):
        return {"h": [float(v) for v in value.h]}
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    return value

@dataclass
class ParetoPoint:
    weights: tuple
    body: SupportVector
    objectives: np.ndarray
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {"weights": [float(w) for w in self.weights],
                "objectives": [float(v) for v in self.objectives],
                "details": {k: _plain(v) for k, v in self.details.items()}}

@dataclass
class IsoOutcome:
    body: SupportVector
    volume: float
    breadth: float
    kkt_residual: float
    iterations: int
    converged: bool
    message: str = ""

# Scalarized Urysohn solver

def edge_operator(grid: SphereGrid) -> csr_matrix:
    '''Sparse cyclic tridiagonal D with D @ h = edge lengths of the polygon whose tight support numbers are h.'''
    theta = grid.angles()
    order = np.argsort(theta, kind="stable")
    n = grid.size
    rank = np.empty(n, dtype=int)
    rank[order] = np.arange(n)
    nxt = order[(rank + 1) % n]
    prv = order[(rank - 1) % n]
    after = np.mod(theta[nxt] - theta, 2.0 * math.pi)
    before = np.mod(theta - theta[prv], 2.0 * math.pi)
    idx = np.arange(n)
    rows = np.concatenate([idx, idx, idx])
    cols = np.concatenate([idx, prv, nxt])
    values = np.concatenate([-(1.0 / np.tan(before) + 1.0 / np.tan(after)), 1.0 / np.sin(before), 1.0 / np.sin(after)])
    return coo_matrix((values, (rows, cols)), shape=(n, n)).tocsr()

def _check_feasible(spec: UrysohnSpec):
    if spec.kind == "free":
        return
    b0 = integral_breadth(spec.obstacle)
    slack = TOL.feasibility * max(1.0, b0)
    if spec.kind == "internal":
        if body_volume(spec.obstacle) <= 0.0:
            raise InvalidArgumentError("An internal obstacle must have interior points.")
        if spec.breadth_target > b0 + slack:
            raise InfeasibleError(f"Breadth target {spec.breadth_target:.6g} exceeds the obstacle's {b0:.6g}.")
    elif spec.breadth_target < b0 - slack:
        raise InfeasibleError(f"Breadth target {spec.breadth_target:.6g} is below the obstacle's {b0:.6g}.")
    if spec.symmetric:
        h0 = spec.obstacle.h
        if np.max(np.abs(h0 - h0[spec.grid.antipodes()])) > 1e-8 * max(1.0, float(np.abs(h0).max())):
            raise InvalidArgumentError("The symmetric class needs an obstacle symmetric about the origin.")

def _start(spec: UrysohnSpec) -> np.ndarray:
    grid, target = spec.grid, spec.breadth_target
    if spec.kind == "free":
        h = np.full(grid.size, 0.5 * target * grid.sigma / grid.qweights.sum())
    else:
        h0 = spec.obstacle.h
        b0 = integral_breadth(spec.obstacle)
        if spec.kind == "internal":
            # shrink the obstacle about its Steiner point
            s = grid.dirs @ steiner_point(spec.obstacle)
            h = np.minimum(s + (h0 - s) * (target / b0), h0)
        else:
            h = h0 + 0.5 * (target - b0)
    if spec.symmetric:
        h = 0.5 * (h + h[grid.antipodes()])
    return h

def _kkt_residual(grad, h, q, eq_rows, ineq_rows, ineq_values, lo, hi):
    '''
    Relative residual of grad F + sum lam_k grad c_k = 0, inequality multipliers >= 0.
    Constraint rows are sparse; the multipliers are fitted by bounded sparse least squares.
    '''
    n = len(h)
    active = 1e-6 * max(1.0, float(np.abs(h).max()))
    blocks, lower = [eq_rows], [np.full(eq_rows.shape[0], -np.inf)]
    if ineq_rows is not None:
        on = np.flatnonzero(ineq_values <= active)
        blocks.append(ineq_rows[on])
        lower.append(np.zeros(len(on)))
    at_lo = np.flatnonzero(h - lo <= active)
    at_hi = np.flatnonzero(hi - h <= active)
    if len(at_lo):
        blocks.append(csr_matrix((np.ones(len(at_lo)), (np.arange(len(at_lo)), at_lo)), shape=(len(at_lo), n)))
        lower.append(np.zeros(len(at_lo)))
    if len(at_hi):
        blocks.append(csr_matrix((-np.ones(len(at_hi)), (np.arange(len(at_hi)), at_hi)), shape=(len(at_hi), n)))
        lower.append(np.zeros(len(at_hi)))
    A = (diags(1.0 / q) @ vstack(blocks).T).tocsr()
    lower = np.concatenate(lower)
    g = grad / q
    norm = max(float(np.abs(g).max()), 1e-300)
    fit = lsq_linear(A, -g, bounds=(lower, np.full(len(lower), np.inf)), lsq_solver="lsmr",
                     lsmr_tol="auto", max_iter=500)
    return float(np.abs(A @ fit.x + g).max()) / norm

def _volume_hessian(D, a, vol, lam_vol, N):
    '''-lam_vol times the Hessian of V^(1/N) for V = h.D h / 2, as a linear operator.'''
    c1 = lam_vol * vol ** (1.0 / N - 1.0) / N
    c2 = lam_vol * (1.0 / N - 1.0) * vol ** (1.0 / N - 2.0) / N
    return LinearOperator(D.shape, matvec=lambda v: -(c1 * (D @ v) + c2 * a * float(a @ v)), dtype=float)

def solve_scalarized(spec: UrysohnSpec, lam_vol=1.0, lam_flat=0.0, zbar=None,
                     max_iters: Optional[int] = None) -> IsoOutcome:
    if lam_vol < 0 or lam_flat < 0 or lam_vol + lam_flat == 0:
        raise InvalidArgumentError("Scalarization weights must be nonnegative and not both zero.")
    _check_feasible(spec)
    grid = spec.grid
    N, n, q = grid.dim, grid.size, grid.qweights
    flat = np.zeros(n)
    if lam_flat > 0:
        if zbar is None:
            raise InvalidArgumentError("A flattening weight needs a flattening direction.")
        flat[list(axis_indices(grid, zbar))] = 1.0

    row = csr_matrix((2.0 * q / grid.sigma)[None, :])
    eq_rows = [row]
    constraints = [LinearConstraint(row, spec.breadth_target, spec.breadth_target)]
    if spec.symmetric:
        anti = grid.antipodes()
        pairs = np.array([(i, int(a)) for i, a in enumerate(anti) if i < a])
        k = np.arange(len(pairs))
        S = csr_matrix((np.concatenate([np.ones(len(pairs)), -np.ones(len(pairs))]),
                        (np.concatenate([k, k]), np.concatenate([pairs[:, 0], pairs[:, 1]]))),
                       shape=(len(pairs), n))
        eq_rows.append(S)
        constraints.append(LinearConstraint(S, 0.0, 0.0))
    eq_rows = vstack(eq_rows).tocsr()
    C = None
    if N == 2:
        D = edge_operator(grid)
        C = (diags(1.0 / q) @ D).tocsr()
        constraints.append(LinearConstraint(C, 0.0, np.inf))

    lo, hi = np.full(n, -np.inf), np.full(n, np.inf)
    if spec.kind == "internal":
        hi = spec.obstacle.h.copy()
    elif spec.kind == "external":
        lo = spec.obstacle.h.copy()
    floor = 1e-14 * spec.breadth_target ** N

    def volume_and_gradient(h):
        if N == 2:
            a = D @ h
            return 0.5 * float(h @ a), a
        areas, _, vol = facet_areas(grid, h)
        return vol, areas

    def objective(h):
        value = -lam_flat * float(flat @ h)
        grad = -lam_flat * flat
        if lam_vol > 0:
            vol, dvol = volume_and_gradient(h)
            vol = max(vol, floor)
            value += lam_vol * vol ** (1.0 / N)
            grad = grad + lam_vol * vol ** (1.0 / N - 1.0) * dvol / N
        return -value, -grad

    def hessian(h):
        if lam_vol == 0:
            return csr_matrix((n, n))
        vol, a = volume_and_gradient(h)
        return _volume_hessian(D, a, max(vol, floor), lam_vol, N)

    result = minimize(objective, _start(spec), jac=True, method="trust-constr",
                      hess=hessian if N == 2 else SR1(),
                      bounds=None if spec.kind == "free" else Bounds(lo, hi), constraints=constraints,
                      options={"maxiter": max_iters or DEFAULT_MAX_ITERS, "gtol": 1e-8, "xtol": 1e-10,
                               "barrier_tol": 1e-8, "sparse_jacobian": True})
    h = np.clip(result.x, lo, hi)
    scale = max(1.0, float(np.abs(h).max()))
    if N == 2 and float(np.min(C @ h)) >= -1e-7 * scale:
        body = SupportVector(grid, h, True)
    else:
        body = convexify(SupportVector(grid, h))
    if spec.kind == "free":
        body = steiner_normalize(body)

    _, grad = objective(h)
    kkt = _kkt_residual(-grad, h, q, eq_rows, C, None if C is None else C @ h, lo, hi)
    breadth = integral_breadth(body)
    gap = abs(breadth - spec.breadth_target) / spec.breadth_target
    converged = bool(kkt <= TOL.kkt and gap <= 1e-6)
    if not converged:
        console.print(f"[yellow]Warning:[/yellow] {spec.kind} Urysohn solve stopped after {result.nit} "
                      f"iterations (KKT residual {kkt:.3g}, breadth gap {gap:.3g}); returning the best iterate.")
    return IsoOutcome(body, body_volume(body), breadth, kkt, int(result.nit), converged, str(result.message))

def solve_urysohn(spec: UrysohnSpec, max_iters: Optional[int] = None) -> SupportVector:
    return solve_scalarized(spec, 1.0, 0.0, None, max_iters).body

def solve_flattening(spec: FlatteningSpec, max_iters: Optional[int] = None) -> ParetoPoint:
    outcome = solve_scalarized(spec.base, spec.lam_vol, spec.lam_flat, spec.zbar, max_iters)
    i, j = axis_indices(spec.base.grid, spec.zbar)
    b_flat = float(outcome.body.h[i] + outcome.body.h[j])
    details = {"kkt_residual": outcome.kkt_residual, "converged": outcome.converged,
               "iterations": outcome.iterations, "breadth": outcome.breadth}
    return ParetoPoint((spec.lam_vol, spec.lam_flat), outcome.body, np.array([-outcome.volume, b_flat]), details)

# Lens, stadium, bodies of revolution

def lens_analytic(halfdim_radius: float, alpha: float, grid: SphereGrid) -> SupportVector:
    '''Intersection of two balls of radius alpha^(1/(N-1)) through the rim of the flat disk.'''
    rho = float(halfdim_radius)
    if not rho > 0 or not alpha > 0:
        raise InvalidArgumentError("Lens parameters must be positive.")
    R = alpha ** (1.0 / (grid.dim - 1))
    if R < rho:
        raise InvalidArgumentError(f"Balls of radius {R:.6g} cannot pass through a rim of radius {rho:.6g}.")
    d = math.sqrt(R * R - rho * rho)
    c = np.abs(grid.dirs[:, -1])
    cap = c >= d / R
    h = np.where(cap, R - d * c, rho * np.sqrt(np.clip(1.0 - c * c, 0.0, None)))
    return SupportVector(grid, h, True)

def lens_fit(xbar: SupportVector, halfdim_radius: float):
    '''(alpha, support distance) of the lens with the same integral breadth as xbar.'''
    grid, N = xbar.grid, xbar.dim
    target = integral_breadth(xbar)

    def breadth_at(R):
        return integral_breadth(lens_analytic(halfdim_radius, R ** (N - 1), grid))

    lo, hi = float(halfdim_radius), 1e6 * float(halfdim_radius)
    if breadth_at(lo) <= target:
        R = lo
    elif breadth_at(hi) >= target:
        R = hi
    else:
        for _ in range(100):
            mid = math.sqrt(lo * hi)
            if breadth_at(mid) > target:
                lo = mid
            else:
                hi = mid
        R = math.sqrt(lo * hi)
    alpha = R ** (N - 1)
    lens = lens_analytic(halfdim_radius, alpha, grid)
    return alpha, float(np.max(np.abs(xbar.h - lens.h)))

def rounded_polygon_analytic(vertices, alpha: float, grid: SphereGrid) -> SupportVector:
    '''Polygon with every edge replaced by an outward arc of radius alpha through its endpoints.

    The body is the intersection of the edge disks, so its support is the envelope of their minimum.
    '''
    if grid.dim != 2:
        raise InvalidArgumentError("Rounded polygons live in the plane.")
    verts = np.asarray(vertices, dtype=float)
    if verts.ndim != 2 or verts.shape[1] != 2 or len(verts) < 3:
        raise InvalidArgumentError("A rounded polygon needs at least three planar vertices.")
    R = float(alpha)
    center = verts.mean(axis=0)
    h = np.full(grid.size, np.inf)
    for a, b in zip(verts, np.roll(verts, -1, axis=0)):
        half = 0.5 * float(np.linalg.norm(b - a))
        if R < half:
            raise InvalidArgumentError(f"Arcs of radius {R:.6g} cannot span an edge of length {2 * half:.6g}.")
        mid = 0.5 * (a + b)
        inward = np.array([a[1] - b[1], b[0] - a[0]]) / (2 * half)
        if inward @ (center - mid) < 0:
            inward = -inward
        c = mid + inward * math.sqrt(R * R - half * half)
        h = np.minimum(h, grid.dirs @ c + R)
    return convexify(SupportVector(grid, h))

@dataclass
class StadiumFit:
    radius: float
    half_length: float
    translation: np.ndarray
    residual: float

def stadium_fit(x2d: SupportVector) -> StadiumFit:
    if x2d.dim != 2:
        raise InvalidArgumentError("Stadium fits are planar.")
    grid = x2d.grid
    fit = fit_minkowski_combination(x2d, [SupportVector.ball(grid), SupportVector.segment(grid, [-1.0, 0.0], [1.0, 0.0])])
    return StadiumFit(float(fit.alphas[0]), float(fit.alphas[1]), fit.translation, fit.residual)

def classify_runs(x2d: SupportVector, factor=3.0):
    '''Cyclic runs of straight and arc edges; an edge is straight if it is factor times the median.'''
    p = reconstruct(x2d)
    lengths = p.areas
    straight = lengths >= factor * float(np.median(lengths))
    runs = []
    for flag in straight:
        label = "straight" if flag else "arc"
        if runs and runs[-1][0] == label:
            runs[-1][1] += 1
        else:
            runs.append([label, 1])
    if len(runs) > 1 and runs[0][0] == runs[-1][0]:
        runs[0][1] += runs.pop()[1]
    return [tuple(r) for r in runs]

def _mirror(dirs):
    return dirs * np.array([-1.0, 1.0])

def rotate_lift(x2d: SupportVector, grid3: Optional[SphereGrid] = None, tol=1e-8) -> SupportVector:
    '''
    Body swept by rotating a meridian (even in x) about the vertical axis.

    h3(u) = h2(sqrt(1 - c^2), c) with c = (u, e3). The meridian is read off the planar grid
    with the same interpolation as support_eval, so the result is not flagged tight; values
    along the axis are exact.
    '''
    if x2d.dim != 2:
        raise InvalidArgumentError("The meridian must be planar.")
    grid3 = grid3 or make_grid(3, DEFAULT_GRID_3D_LEVEL)
    if grid3.dim != 3:
        raise InvalidArgumentError("The lift needs a dim 3 grid.")
    meridian = convexify(x2d)
    mirrored = values_at(meridian, _mirror(meridian.grid.dirs))
    scale = max(1.0, float(np.abs(meridian.h).max()))
    if np.max(np.abs(meridian.h - mirrored)) > tol * scale:
        raise InvalidArgumentError("The meridian is not symmetric about the vertical axis.")
    c = np.clip(grid3.dirs[:, 2], -1.0, 1.0)
    dirs = np.column_stack([np.sqrt(np.clip(1.0 - c * c, 0.0, None)), c])
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return SupportVector(grid3, values_at(meridian, dirs))

def pappus_volume(radius: float, half_length: float) -> float:
    '''Volume swept by a horizontal stadium turning about its vertical symmetry axis.'''
    r, l = float(radius), float(half_length)
    return math.pi * (2.0 * r * l * l + math.pi * l * r * r + 4.0 * r ** 3 / 3.0)

def revolution_volume(x2d: SupportVector) -> float:
    '''pi * integral of halfwidth(y)^2 dy for a meridian symmetric about the vertical axis.'''
    verts = reconstruct(x2d).vertices
    nxt = np.roll(verts, -1, axis=0)

    def halfwidth(y):
        xs = list(verts[np.abs(verts[:, 1] - y) <= 1e-12, 0])
        lo, hi = np.minimum(verts[:, 1], nxt[:, 1]), np.maximum(verts[:, 1], nxt[:, 1])
        cross = (lo <= y) & (y <= hi) & (hi > lo)
        t = (y - verts[cross, 1]) / (nxt[cross, 1] - verts[cross, 1])
        xs.extend(verts[cross, 0] + t * (nxt[cross, 0] - verts[cross, 0]))
        return max(max(xs), 0.0) if xs else 0.0

    levels = np.unique(verts[:, 1])
    total = 0.0
    for a, b in zip(levels[:-1], levels[1:]):
        # halfwidth is linear between vertex heights, so Simpson is exact
        wa, wm, wb = halfwidth(a), halfwidth(0.5 * (a + b)), halfwidth(b)
        total += (b - a) / 6.0 * (wa * wa + 4.0 * wm * wm + wb * wb)
    return math.pi * total

def _mirror_index(grid: SphereGrid) -> np.ndarray:
    reflected = _mirror(grid.dirs)
    idx = np.argmax(reflected @ grid.dirs.T, axis=1)
    if np.max(np.linalg.norm(grid.dirs[idx] - reflected, axis=1)) > 1e-8:
        raise InvalidArgumentError("The planar grid is not symmetric about the vertical axis.")
    return idx

def _mirror_symmetrised(x2d: SupportVector) -> SupportVector:
    h = x2d.h
    return SupportVector(x2d.grid, 0.5 * (h + h[_mirror_index(x2d.grid)]), x2d.tight)

def solve_rotational_flattening(spec: FlatteningSpec, grid3: Optional[SphereGrid] = None,
                                max_iters: Optional[int] = None):
    '''Meridian solve in the plane, symmetrised about the vertical axis and lifted to space.'''
    if spec.base.dim != 2:
        raise InvalidArgumentError("The rotational problem is posed on a planar meridian.")
    if abs(abs(spec.zbar[1]) - 1.0) > 1e-12:
        raise InvalidArgumentError("The flattening direction of a meridian must be the vertical axis.")
    point = solve_flattening(spec, max_iters)
    return point, rotate_lift(_mirror_symmetrised(point.body), grid3)

def leidenfrost(area: float, lam, grid2: Optional[SphereGrid] = None, grid3: Optional[SphereGrid] = None):
    '''
    Minimal perimeter and vertical breadth at fixed area: a stadium, and its spheroid lift.

    lam = (lam1, lam2) weighs the disk and the vertical pair of atoms in the surface measure
    lam1 * ball + lam2 * (delta_e2 + delta_-e2), so the stadium has rho = half length / radius
    = lam2 / (2 lam1). The body comes from solve_scalarized on the free class with flattening
    weight rho / sqrt(pi + 4 rho) along e2, which is the weight whose optimum has that shape at
    any breadth; the breadth is chosen so the optimum has the requested area, and the result is
    rescaled onto it exactly. lam1 = 0 is the flat limit: vertical breadth alone is minimised
    at the breadth of the disk of that area, which gives a horizontal segment.
    '''
    if not area > 0:
        raise InvalidArgumentError("Area must be positive.")
    lam1, lam2 = (float(v) for v in lam)
    if lam1 < 0 or lam2 < 0 or lam1 + lam2 == 0:
        raise InvalidArgumentError("Leidenfrost weights must be nonnegative and not both zero.")
    grid2 = grid2 or make_grid(2, DEFAULT_GRID_2D)
    e2 = np.array([0.0, 1.0])
    if lam1 == 0:
        spec = UrysohnSpec("free", 2.0 * math.sqrt(area / math.pi), grid2)
        outcome = solve_scalarized(spec, lam_vol=0.0, lam_flat=1.0, zbar=e2)
        flat = _mirror_symmetrised(steiner_normalize(outcome.body))
        return flat, rotate_lift(flat, grid3)
    rho = lam2 / (2.0 * lam1)
    radius = math.sqrt(area / (math.pi + 4.0 * rho))
    spec = UrysohnSpec("free", radius * (2.0 + 4.0 * rho / math.pi), grid2)
    outcome = solve_scalarized(spec, lam_vol=1.0, lam_flat=rho / math.sqrt(math.pi + 4.0 * rho), zbar=e2)
    if outcome.volume <= 0.0:
        raise NonconvergenceError("Leidenfrost solve collapsed to a flat body.", residual=outcome.kkt_residual,
                                  best=outcome.body)
    stadium = _mirror_symmetrised(steiner_normalize(outcome.body))
    stadium = stadium.scaled(math.sqrt(area / body_volume(stadium)))
    fit = stadium_fit(stadium)
    if fit.residual > 1e-2 * max(1.0, integral_breadth(stadium)):
        console.print(f"[yellow]Warning:[/yellow] Leidenfrost body is {fit.residual:.3g} away from a stadium.")
    return stadium, rotate_lift(stadium, grid3)

# Vector isoperimetric problem

def pareto_audit(points: List[ParetoPoint], tol=1e-8):
    dominated = []
    for i, p in enumerate(points):
        for j, other in enumerate(points):
            if i != j and np.all(other.objectives <= p.objectives + tol) and np.any(other.objectives < p.objectives - tol):
                dominated.append((i, j))
    return dominated

def pareto_front_vector_iso(ys, target_volume: float, weight_grid) -> List[ParetoPoint]:
    '''
    Minimise sum lam_m V1(x, y_m) = sum lam_m <y_m, mu(x)> at V(x) = target_volume, one point
    per weight vector.

    By Minkowski's first inequality the minimiser is the combination Y = sum lam_m y_m scaled to
    the target volume. details['minkowski_gap'] is sum lam_m V1(x, y_m) - V(x)^((N-1)/N) V(Y)^(1/N),
    a lower bound on the objective of every body of that volume, zero at the optimum.
    '''
    ys = list(ys)
    if not ys:
        raise InvalidArgumentError("Need at least one objective body.")
    if not target_volume > 0:
        raise InvalidArgumentError("Target volume must be positive.")
    grid = check_grids(*ys)
    N = grid.dim
    bodies = [convexify(y) for y in ys]

    points = []
    for weights in weight_grid:
        lam = np.asarray(weights, dtype=float).reshape(-1)
        if len(lam) != len(ys) or np.any(lam < 0) or lam.sum() == 0:
            raise InvalidArgumentError(f"Weights {weights!r} must be {len(ys)} nonnegative values, not all zero.")
        combined = minkowski_combine(list(zip(lam, bodies)))
        combined_volume = body_volume(combined)
        if combined_volume <= 0.0:
            raise InvalidArgumentError(f"The combination for weights {lam.tolist()} has no interior.")
        t = (target_volume / combined_volume) ** (1.0 / N)
        body = steiner_normalize(combined.scaled(t))
        mu = surface_area_measure(body)
        objectives = np.array([pairing(y, mu) for y in bodies])
        gap = float(lam @ objectives) - body_volume(body) ** ((N - 1.0) / N) * combined_volume ** (1.0 / N)
        fit = fit_minkowski_combination(body, ys)
        points.append(ParetoPoint(tuple(lam.tolist()), body, objectives,
                                  {"alphas": t * lam, "fit_alphas": fit.alphas, "fit_residual": fit.residual,
                                   "minkowski_gap": gap}))
    dominated = pareto_audit(points)
    if dominated:
        console.print(f"[yellow]Warning:[/yellow] {len(dominated)} dominated pairs in the Pareto set.")
    return points

# Condition verifiers

def _measure_or_empty(m, dim) -> SphericalMeasure:
    if m is None:
        return SphericalMeasure(dim)
    m = as_measure(m)
    if m.dim != dim:
        raise InvalidArgumentError("Witness measure has the wrong dimension.")
    return m

def _contact_residual(xbar, x0, m, exclude=()):
    '''max |h_xbar - h_x0| over the support of m (minus excluded directions), relative to b(xbar).'''
    if not len(m):
        return 0.0
    dirs = m.dirs[m.weights > 1e-9 * m.total_mass]
    for z in exclude:
        dirs = dirs[np.linalg.norm(dirs - z, axis=1) > 1e-8]
    if not len(dirs):
        return 0.0
    gap = np.abs(values_at(xbar, dirs) - values_at(x0, dirs))
    return float(gap.max()) / max(integral_breadth(xbar), 1e-300)

def _relative(lhs, rhs):
    return abs(lhs - rhs) / max(abs(rhs), abs(lhs), 1e-300)

def verify_external_urysohn(xbar: SupportVector, x0: SupportVector, mu, alpha: float, tol=None) -> ConditionReport:
    tol = TOL.contact if tol is None else tol
    check_grids(xbar, x0)
    mu = _measure_or_empty(mu, xbar.dim)
    if alpha < 0:
        raise InvalidArgumentError("alpha must be nonnegative.")
    if np.any(x0.h > xbar.h + tol * integral_breadth(xbar)):
        raise InvalidArgumentError("The candidate does not contain the obstacle.")
    ball = ball_measure(xbar.grid)
    report = ConditionReport(witnesses={"mu": mu, "alpha": float(alpha)})
    decision = decide_majorization(alpha * ball, surface_area_measure(xbar) + mu, tol)
    report.add_decision("alpha ball majorizes mu(xbar) + mu", decision, tol)
    report.notes["majorization_method"] = decision.method
    lhs = body_volume(xbar) + pairing(xbar, mu)
    report.add("volume identity", _relative(lhs, alpha * pairing(xbar, ball)), tol)
    report.add("contact on spt(mu)", _contact_residual(xbar, x0, mu), tol)
    return report

def verify_flattening(kind: str, xbar: SupportVector, x0: SupportVector, zbar, alpha: float, beta: float,
                      x_witness=None, tol=None, coefficient="pairing") -> ConditionReport:
    tol = TOL.contact if tol is None else tol
    if kind not in ("internal", "external"):
        raise InvalidArgumentError(f"Unknown flattening kind '{kind}'.")
    if coefficient not in FLATTENING_COEFFICIENTS:
        raise InvalidArgumentError(f"Unknown identity coefficient '{coefficient}'.")
    if alpha < 0 or beta < 0:
        raise InvalidArgumentError("alpha and beta must be nonnegative.")
    check_grids(xbar, x0)
    N = xbar.dim
    z = unit(zbar)
    if len(z) != N:
        raise InvalidArgumentError("The flattening direction has the wrong dimension.")
    mu_x = _measure_or_empty(x_witness, N)
    ball = ball_measure(xbar.grid)
    target = alpha * ball + SphericalMeasure(N, np.array([z, -z]), np.array([beta, beta]))
    report = ConditionReport(witnesses={"alpha": float(alpha), "beta": float(beta), "x": mu_x})
    if kind == "internal":
        report.add("mu(xbar) = mu(x) + alpha ball + beta flat", measure_distance(surface_area_measure(xbar), mu_x + target), tol)
    else:
        decision = decide_majorization(surface_area_measure(xbar) + mu_x, target, tol)
        report.add_decision("mu(xbar) + mu(x) majorizes alpha ball + beta flat", decision, tol)
        report.notes["majorization_method"] = decision.method
        c = 1.0 / N if coefficient == "pairing" else 2.0 * N
        b_flat = float(values_at(xbar, np.array([z, -z])).sum())
        lhs = body_volume(xbar) + pairing(xbar, mu_x)
        report.add("volume identity", _relative(lhs, alpha * pairing(xbar, ball) + c * beta * b_flat), tol)
        report.notes["flattening_coefficient"] = FLATTENING_COEFFICIENTS[coefficient]
    report.add("contact on spt(mu(x))", _contact_residual(xbar, x0, mu_x), tol)
    return report

def verify_current_hyperplane(xbar: SupportVector, ybar: SupportVector, x0: SupportVector, z0, x_w, y_w,
                              alpha: float, beta: float, tol=None) -> ConditionReport:
    tol = TOL.contact if tol is None else tol
    check_grids(xbar, ybar, x0)
    N = xbar.dim
    z = unit(z0)
    if len(z) != N:
        raise InvalidArgumentError("z0 has the wrong dimension.")
    if alpha < 0 or beta < 0:
        raise InvalidArgumentError("alpha and beta must be nonnegative.")
    mx, my = _measure_or_empty(x_w, N), _measure_or_empty(y_w, N)
    ball = ball_measure(xbar.grid) * alpha ** (N - 1)
    report = ConditionReport(witnesses={"alpha": float(alpha), "beta": float(beta), "x": mx, "y": my})
    report.add("xbar = x # alpha ball", measure_distance(surface_area_measure(xbar), mx + ball), tol)
    report.add("ybar = y # alpha ball", measure_distance(surface_area_measure(ybar), my + ball), tol)
    scale = max(beta, 1e-300)
    report.add("mu(x) >= beta at z0", max(beta - mx.weight_at(z, 1e-8), 0.0) / scale, tol)
    report.add("mu(y) >= beta at -z0", max(beta - my.weight_at(-z, 1e-8), 0.0) / scale, tol)
    if beta == 0:
        report.notes["atom_conditions"] = "vacuous: beta = 0"
    report.add("contact on spt(x) off z0", _contact_residual(xbar, x0, mx, exclude=(z,)), tol)
    report.add("contact on spt(y) off -z0", _contact_residual(ybar, x0, my, exclude=(-z,)), tol)
    return report

def verify_optimal_hulls(xbars, ys, alphas, mus, nus, tol=None) -> ConditionReport:
    tol = TOL.contact if tol is None else tol
    xbars, ys, alphas, mus, nus = list(xbars), list(ys), list(alphas), list(mus), list(nus)
    if not xbars or not (len(xbars) == len(ys) == len(alphas) == len(mus) == len(nus)):
        raise InvalidArgumentError("Hull bodies, containers, alphas and witness measures must pair up.")
    if any(a < 0 for a in alphas) or not any(a > 0 for a in alphas):
        raise InvalidArgumentError("alphas must be nonnegative and not all zero.")
    grid = check_grids(*xbars, *ys)
    N = grid.dim
    mus = [_measure_or_empty(m, N) for m in mus]
    nus = [_measure_or_empty(m, N) for m in nus]
    ball = ball_measure(grid)
    total = SphericalMeasure(N)
    for nu in nus:
        total = total + nu
    report = ConditionReport(witnesses={"alphas": [float(a) for a in alphas], "mus": mus, "nus": nus})
    report.add("sum of nu = ball", measure_distance(total, ball), tol)
    report.notes["mass_gap"] = ball.total_mass - total.total_mass
    for k, (x, y, a, mu, nu) in enumerate(zip(xbars, ys, alphas, mus, nus), start=1):
        report.add(f"contact {k} on spt(mu)", _contact_residual(x, y, mu), tol)
        report.add(f"alpha mu(xbar) = mu + nu ({k})", measure_distance(a * surface_area_measure(x), mu + nu), tol)
    return report
