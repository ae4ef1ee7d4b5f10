'''
Minkowski Problem Solver

Rebuilds a convex body, up to translation, from a prescribed surface area measure.

- dim 2 is exact: the atoms sorted by angle are the edges of the polygon, walked in order.
- dim 3 is variational: on the atom normal set, minimise <h, m> / V(h)^(1/3) over raw
  support numbers h. V is the extended volume, so every iterate is convexified. The
  gradient of V at h is the facet-area vector of co(h), which gives the search direction.

Classes:
--------
SolveOptions
    max_iters, tol_residual, step_rule ('backtracking' | 'fixed'), step, initial.

SolveOutcome
    body (Steiner-normalised SupportVector), residual, iterations, converged, objective_trace.

Functions:
----------
solve_minkowski_2d(m) → Polytope
solve_minkowski_3d(m, opts) → SolveOutcome
solve_minkowski(m, grid, opts) → SolveOutcome
    Dimension dispatch used by the CLI and the Blaschke sum.
solve_residual(m, x) → float
    max over atoms of |area_x(u_i) - w_i| / w_i (facets missing from x count as area 0).

Scheme Constants:
-----------------
- Start: h = (total mass / 4pi)^(1/2), the ball with matching surface mass.
- Direction: d_i = -(1 - lam * a_i / w_i), lam = <h, w> / 3 on the V = 1 slice.
- Armijo constant 1e-4, shrink 0.5, step doubles after each accepted move (capped at 1).
- Each accepted iterate is rescaled to V = 1 and Steiner-normalised.

Dependencies:
-------------
- numpy
- convex_core, measures, config, errors

Author:
-------
Support & Measure Project
'''

import math
from dataclasses import dataclass, field
from typing import Optional, List
import numpy as np
from config import TOL, DEFAULT_MAX_ITERS, DEFAULT_GRID_2D
from errors import InvalidArgumentError, AlexandrovViolationError, EmptyBodyError, DegenerateBodyError, InvalidGridError
from convex_core import (SphereGrid, SupportVector, Polytope, convexify, reconstruct, steiner_normalize,
                         steiner_point, volume, make_grid)
from measures import SphericalMeasure, validate_alexandrov

ARMIJO = 1e-4
SHRINK = 0.5

@dataclass(frozen=True)
class SolveOptions:
    max_iters: int = DEFAULT_MAX_ITERS
    tol_residual: float = field(default_factory=lambda: TOL.solver_residual)
    step_rule: str = "backtracking"
    step: float = 0.5
    initial: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.max_iters < 1:
            raise InvalidArgumentError("max_iters must be at least 1.")
        if self.tol_residual <= 0:
            raise InvalidArgumentError("tol_residual must be positive.")
        if self.step_rule not in ("fixed", "backtracking"):
            raise InvalidArgumentError(f"Unknown step rule '{self.step_rule}'.")
        if self.step <= 0:
            raise InvalidArgumentError("step must be positive.")

@dataclass
class SolveOutcome:
    body: SupportVector
    residual: float
    iterations: int
    converged: bool
    objective_trace: List[float] = field(default_factory=list)

def _validated(m: SphericalMeasure):
    report = validate_alexandrov(m)
    if not report.verdict:
        raise AlexandrovViolationError(
            f"Measure fails Alexandrov's conditions (closure {report.closure_residual:.3g}, "
            f"spanning {report.spanning}).", report)
    return report

def solve_minkowski_2d(m: SphericalMeasure) -> Polytope:
    if m.dim != 2:
        raise InvalidArgumentError("solve_minkowski_2d needs a dim 2 measure.")
    _validated(m)
    theta = np.mod(np.arctan2(m.dirs[:, 1], m.dirs[:, 0]), 2.0 * math.pi)
    order = np.argsort(theta, kind="stable")
    U, w = m.dirs[order], m.weights[order]
    tangents = np.column_stack([-U[:, 1], U[:, 0]])
    walk = np.cumsum(w[:, None] * tangents, axis=0)
    vertices = np.vstack([np.zeros(2), walk[:-1]])
    offsets = np.einsum("ij,ij->i", vertices, U)
    polygon = Polytope(2, vertices, U, offsets, w)
    return polygon.translated(-steiner_point(polygon))

def facet_areas(grid: SphereGrid, h):
    '''Facet areas of co(h) per grid direction, the convexified h and its volume.'''
    tight = convexify(SupportVector(grid, h))
    try:
        p = reconstruct(tight)
    except DegenerateBodyError:
        return np.zeros(grid.size), tight.h, 0.0
    areas = np.zeros(grid.size)
    np.add.at(areas, np.argmax(p.normals @ grid.dirs.T, axis=1), p.areas)
    return areas, tight.h, volume(p)

def _atom_grid(m: SphericalMeasure) -> SphereGrid:
    try:
        return SphereGrid.from_directions(m.dirs, dim=3, symmetric=False)
    except InvalidGridError:
        return SphereGrid(3, m.dirs, np.full(len(m), 4.0 * math.pi / len(m)))

def solve_minkowski_3d(m: SphericalMeasure, opts: Optional[SolveOptions] = None) -> SolveOutcome:
    opts = opts or SolveOptions()
    if m.dim != 3:
        raise InvalidArgumentError("solve_minkowski_3d needs a dim 3 measure.")
    _validated(m)
    grid = _atom_grid(m)
    w = m.on_grid(grid, tol=1e-7)

    if opts.initial is not None:
        h = np.asarray(opts.initial, dtype=float)
        if h.shape != (grid.size,):
            raise InvalidArgumentError("Initial support numbers must have one value per atom.")
    else:
        h = np.full(grid.size, math.sqrt(w.sum() / (4.0 * math.pi)))

    def normalised(values):
        areas, tight_h, vol = facet_areas(grid, values)
        if vol <= 0.0:
            raise DegenerateBodyError("Iterate collapsed to zero volume.")
        scale = vol ** (-1.0 / 3.0)
        x = steiner_normalize(SupportVector(grid, tight_h * scale, True))
        return x.h, areas * scale * scale

    def residual_of(areas):
        if areas.sum() <= 0.0:
            return 1.0
        fit = areas * (w.sum() / areas.sum())
        return float(np.max(np.abs(fit - w) / w))

    h, areas = normalised(h)
    objective = float(h @ w)
    trace = [objective]
    residual = residual_of(areas)
    t = opts.step
    iterations = 0

    while residual > opts.tol_residual and iterations < opts.max_iters:
        iterations += 1
        lam = objective / 3.0
        gradient = w - lam * areas
        direction = -gradient / w
        slope = float(gradient @ direction)
        t = opts.step if opts.step_rule == "fixed" else min(1.0, 2.0 * t)
        accepted = None
        while t > 1e-14:
            try:
                trial_h, trial_areas = normalised(h + t * direction)
            except (EmptyBodyError, DegenerateBodyError):
                t *= SHRINK
                continue
            trial_objective = float(trial_h @ w)
            if opts.step_rule == "fixed" or trial_objective <= objective + ARMIJO * t * slope:
                accepted = (trial_h, trial_areas, trial_objective)
                break
            t *= SHRINK
        if accepted is None:
            break
        h, areas, objective = accepted
        trace.append(objective)
        residual = residual_of(areas)

    scale = math.sqrt(w.sum() / areas.sum()) if areas.sum() > 0 else 1.0
    body = steiner_normalize(SupportVector(grid, h * scale, True))
    final = solve_residual(m, body)
    return SolveOutcome(body, final, iterations, final <= opts.tol_residual, trace)

def solve_minkowski(m: SphericalMeasure, grid: Optional[SphereGrid] = None,
                    opts: Optional[SolveOptions] = None) -> SolveOutcome:
    if m.dim == 2:
        polygon = solve_minkowski_2d(m)
        grid = grid or make_grid(2, DEFAULT_GRID_2D)
        body = steiner_normalize(SupportVector.from_polytope(polygon, grid))
        return SolveOutcome(body, solve_residual(m, polygon), 0, True, [])
    return solve_minkowski_3d(m, opts)

def solve_residual(m: SphericalMeasure, x) -> float:
    if not len(m):
        return 0.0
    try:
        p = x if isinstance(x, Polytope) else reconstruct(x)
    except DegenerateBodyError:
        return 1.0
    if p.dim != m.dim:
        raise InvalidArgumentError("Measure and body dimensions differ.")
    dist = np.linalg.norm(m.dirs[:, None, :] - p.normals[None, :, :], axis=2)
    areas = np.where(dist <= 1e-7, p.areas[None, :], 0.0).sum(axis=1)
    return float(np.max(np.abs(areas - m.weights) / m.weights))
