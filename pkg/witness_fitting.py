'''
Witness Fitting for Optimality Conditions

The optimality theorems for the Urysohn family say that certain measures and scalars exist
(mu, alpha, beta, a witness body x). The verifiers in iso_problems only check them. This
module recovers them from a solved body, by reading the body's facet areas on its grid and
solving small nonnegative least-squares problems.

Conventions:
------------
- a_i is the facet area of the body at grid direction i (0 where the body has a vertex).
- q_i is the grid quadrature weight, so alpha * q is the ball measure scaled by alpha.
- The contact set is where the body touches its obstacle: |h_xbar - h_x0| <= touch * b(xbar).
- Free normals are the complement of the contact set.

Functions:
----------
grid_areas(x) → ndarray
contact_mask(xbar, x0, touch) → ndarray[bool]
axis_indices(grid, z) → (i, j) grid indices of z and -z
fit_external_urysohn(xbar, x0) → (mu, alpha)
fit_flattening(kind, xbar, x0, zbar) → FlatteningWitness
fit_current_hyperplane(xbar, ybar, x0, z0) → HyperplaneWitness
fit_optimal_hulls(xbars, ys) → (alphas, mus, nus)
fit_minkowski_combination(x, ys) → CombinationFit

Dependencies:
-------------
- numpy
- scipy.optimize.nnls
- convex_core, measures

Author:
-------
Support & Measure Project
'''

from dataclasses import dataclass
from typing import List
import numpy as np
from scipy.optimize import nnls
from errors import InvalidArgumentError
from convex_core import SupportVector, reconstruct, check_grids
from measures import SphericalMeasure, integral_breadth

TOUCH = 1e-6

@dataclass
class FlatteningWitness:
    kind: str
    alpha: float
    beta: float
    x_measure: SphericalMeasure

@dataclass
class HyperplaneWitness:
    alpha: float
    beta: float
    x_measure: SphericalMeasure
    y_measure: SphericalMeasure

@dataclass
class CombinationFit:
    alphas: np.ndarray
    translation: np.ndarray
    residual: float

def grid_areas(x: SupportVector) -> np.ndarray:
    p = reconstruct(x)
    areas = np.zeros(x.grid.size)
    np.add.at(areas, np.argmax(p.normals @ x.grid.dirs.T, axis=1), p.areas)
    return areas

def contact_mask(xbar: SupportVector, x0: SupportVector, touch=TOUCH) -> np.ndarray:
    check_grids(xbar, x0)
    scale = max(integral_breadth(xbar), 1e-300)
    return np.abs(xbar.h - x0.h) <= touch * scale

def _free_alpha(areas, q, free):
    if not np.any(free):
        free = np.ones_like(free)
    coef, _ = nnls(q[free, None], areas[free])
    return float(coef[0])

def fit_external_urysohn(xbar: SupportVector, x0: SupportVector, touch=TOUCH):
    grid = xbar.grid
    areas = grid_areas(xbar)
    contact = contact_mask(xbar, x0, touch)
    alpha = _free_alpha(areas, grid.qweights, ~contact)
    weights = np.where(contact, np.maximum(alpha * grid.qweights - areas, 0.0), 0.0)
    return SphericalMeasure.from_grid_weights(grid, weights), alpha

def axis_indices(grid, zbar):
    i, j = grid.index_of(zbar, 1e-8), grid.index_of(-np.asarray(zbar, dtype=float), 1e-8)
    if i is None or j is None:
        raise InvalidArgumentError("The flattening direction and its antipode must be grid directions.")
    return i, j

def fit_flattening(kind: str, xbar: SupportVector, x0: SupportVector, zbar, touch=TOUCH) -> FlatteningWitness:
    if kind not in ("internal", "external"):
        raise InvalidArgumentError(f"Unknown flattening kind '{kind}'.")
    grid = xbar.grid
    q = grid.qweights
    areas = grid_areas(xbar)
    contact = contact_mask(xbar, x0, touch)
    i, j = axis_indices(grid, zbar)
    flat = np.zeros(grid.size)
    flat[[i, j]] = 1.0
    free = ~contact
    if not np.any(free):
        free = np.ones(grid.size, dtype=bool)
    design = np.column_stack([q, flat])[free]
    (alpha, beta), _ = nnls(design, areas[free])
    model = alpha * q + beta * flat
    if kind == "internal":
        # mu(xbar) = mu(x) + alpha ball + beta (delta_z + delta_-z), x lives on the contact set
        weights = np.where(contact, np.maximum(areas - model, 0.0), 0.0)
    else:
        # mu(xbar) + mu(x) = alpha ball + beta (delta_z + delta_-z)
        weights = np.where(contact, np.maximum(model - areas, 0.0), 0.0)
    return FlatteningWitness(kind, float(alpha), float(beta), SphericalMeasure.from_grid_weights(grid, weights))

def _hyperplane_side(body, x0, z_index, touch):
    areas = grid_areas(body)
    contact = contact_mask(body, x0, touch)
    contact[z_index] = True
    return areas, contact

def fit_current_hyperplane(xbar: SupportVector, ybar: SupportVector, x0: SupportVector, z0,
                           touch=TOUCH) -> HyperplaneWitness:
    check_grids(xbar, ybar, x0)
    grid = xbar.grid
    q = grid.qweights
    i, j = axis_indices(grid, z0)
    ax, cx = _hyperplane_side(xbar, x0, i, touch)
    ay, cy = _hyperplane_side(ybar, x0, j, touch)
    free_x, free_y = ~cx, ~cy
    target = np.concatenate([ax[free_x], ay[free_y]])
    design = np.concatenate([q[free_x], q[free_y]])[:, None]
    if not len(target):
        target, design = np.concatenate([ax, ay]), np.concatenate([q, q])[:, None]
    coef, _ = nnls(design, target)
    ball = float(coef[0])
    wx = np.where(cx, np.maximum(ax - ball * q, 0.0), 0.0)
    wy = np.where(cy, np.maximum(ay - ball * q, 0.0), 0.0)
    beta = min(wx[i], wy[j])
    alpha = ball ** (1.0 / (grid.dim - 1))
    return HyperplaneWitness(alpha, float(beta), SphericalMeasure.from_grid_weights(grid, wx),
                             SphericalMeasure.from_grid_weights(grid, wy))

def fit_optimal_hulls(xbars: List[SupportVector], ys: List[SupportVector], touch=TOUCH):
    if len(xbars) != len(ys) or not xbars:
        raise InvalidArgumentError("Need one container per hull body.")
    check_grids(*xbars, *ys)
    grid = xbars[0].grid
    q = grid.qweights
    areas = [grid_areas(x) for x in xbars]
    contacts = [contact_mask(x, y, touch) for x, y in zip(xbars, ys)]
    # sum_k (alpha_k a_k - mu_k) = q with mu_k >= 0 on the contact set of body k
    columns = [a for a in areas]
    owners = []
    for k, contact in enumerate(contacts):
        for i in np.flatnonzero(contact):
            col = np.zeros(grid.size)
            col[i] = -1.0
            columns.append(col)
            owners.append((k, i))
    coef, _ = nnls(np.column_stack(columns), q)
    m = len(xbars)
    alphas = coef[:m]
    mu_weights = [np.zeros(grid.size) for _ in range(m)]
    for value, (k, i) in zip(coef[m:], owners):
        mu_weights[k][i] = value
    mus = [SphericalMeasure.from_grid_weights(grid, w) for w in mu_weights]
    nus = [SphericalMeasure.from_grid_weights(grid, np.maximum(alphas[k] * areas[k] - mu_weights[k], 0.0))
           for k in range(m)]
    return [float(a) for a in alphas], mus, nus

def fit_minkowski_combination(x: SupportVector, ys: List[SupportVector]) -> CombinationFit:
    '''Best h_x ~ sum alpha_m h_ym + (t, u) with alpha >= 0, in the least-squares sense.'''
    if not ys:
        raise InvalidArgumentError("Need at least one summand.")
    check_grids(x, *ys)
    dirs = x.grid.dirs
    design = np.column_stack([y.h for y in ys] + [dirs, -dirs])
    coef, _ = nnls(design, x.h)
    m = len(ys)
    alphas = coef[:m]
    translation = coef[m:m + x.dim] - coef[m + x.dim:]
    residual = float(np.max(np.abs(design @ coef - x.h)))
    return CombinationFit(alphas, translation, residual)
