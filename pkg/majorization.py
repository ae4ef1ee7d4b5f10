'''
Measure Majorization

Decides the two majorization orders between discrete measures as transport LPs and hands
back the flow as a witness.

- Linear order (mu >> nu over R^N): mu splits into pieces, one per atom of nu, and each
  piece has the same resultant as its atom. Mass does not have to match.
- Affine (Choquet) order: the pieces must also match mass, so each atom of nu is the
  barycentre of the mass sent to it.

Sampled sublinear and convex test functionals check the dual direction: a majorizing pair
never loses against any of them.

Types:
------
- TransportWitness: flow matrix (rows = mu atoms, cols = nu atoms) plus an independent
  invariant check.
- PointMeasure: point-supported measure in R^N for the affine order.
- SublinearFunctional: p(z) = max_g (g, z), or the Euclidean norm.
- ConvexFunctional: f(p) = max_k (a_k, p) + c_k + s * |p|^2.

Functions:
----------
- linear_majorizes(mu, nu) → (bool, TransportWitness | None)
- affine_majorizes(mu, nu) → (bool, TransportWitness | None)
- reshetnyak_gap(mu, nu, p) → sum m_i p(u_i) - sum n_j p(v_j)
- choquet_gap(mu, nu, f) → sum m_i f(p_i) - sum n_j f(q_j)
- sample_sublinear(dim, k, seed), sample_convex(dim, k, seed)
- compose_witnesses(w1, w2, nu) → witness of mu >> rho from mu >> nu >> rho
- majorization_defect(mu, nu) → (defect, method): upper bound on the slack of the transport
  system relative to the mass of nu.
- decide_majorization(mu, nu, tol) → MajorizationDecision: holds, fails or inconclusive. Used by
  the optimality-condition verifiers; a failure is only reported when a sublinear test
  functional or the full LP certifies it.

Notes:
------
- Only the finest partition of nu (one class per atom) is solved; coarser partitions
  follow by summing columns.
- All LPs go through lp_simplex; nothing here depends on an external solver.

Dependencies:
-------------
- numpy (random generator for samplers)
- lp_simplex, measures, config, errors

Author:
-------
Support & Measure Project
'''

from dataclasses import dataclass
from typing import Optional
import numpy as np
from config import TOL
from errors import InvalidArgumentError
from lp_simplex import solve_lp, is_feasible
from measures import SphericalMeasure, align_atoms

LP_CELLS = 6000  # largest surplus x deficit block handed to the simplex

@dataclass
class TransportWitness:
    flow: np.ndarray
    kind: str = "linear"

    def to_dict(self):
        rows, cols = self.flow.shape
        return {"rows": list(range(rows)), "cols": list(range(cols)),
                "flow": [[float(v) for v in row] for row in self.flow]}

    def check(self, mu, nu, tol=1e-8) -> bool:
        F = self.flow
        if F.shape != (len(mu.weights), len(nu.weights)) or np.any(F < -tol):
            return False
        scale = max(1.0, float(mu.weights.sum()), float(nu.weights.sum()))
        if np.max(np.abs(F.sum(axis=1) - mu.weights), initial=0.0) > tol * scale:
            return False
        support_mu, support_nu = _support(mu), _support(nu)
        resultants = F.T @ support_mu
        if np.max(np.abs(resultants - nu.weights[:, None] * support_nu), initial=0.0) > tol * scale:
            return False
        if self.kind == "affine":
            return bool(np.max(np.abs(F.sum(axis=0) - nu.weights), initial=0.0) <= tol * scale)
        return True

@dataclass(frozen=True, eq=False)
class PointMeasure:
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        points = np.atleast_2d(np.asarray(self.points, dtype=float))
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if len(points) != len(weights):
            raise InvalidArgumentError("Points and weights differ in length.")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise InvalidArgumentError("Point masses must be finite and nonnegative.")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @property
    def dim(self):
        return self.points.shape[1]

    @property
    def barycenter(self):
        return self.weights @ self.points / self.weights.sum()

def _support(m):
    return m.points if isinstance(m, PointMeasure) else m.dirs

@dataclass(frozen=True, eq=False)
class SublinearFunctional:
    generators: np.ndarray
    is_norm: bool = False

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        if self.is_norm:
            return np.linalg.norm(z, axis=-1)
        return np.max(z @ self.generators.T, axis=-1)

@dataclass(frozen=True, eq=False)
class ConvexFunctional:
    slopes: np.ndarray
    intercepts: np.ndarray
    quadratic: float = 0.0

    def __call__(self, p):
        p = np.asarray(p, dtype=float)
        return np.max(p @ self.slopes.T + self.intercepts, axis=-1) + self.quadratic * np.sum(p * p, axis=-1)

def _check_dims(mu, nu):
    if _support(mu).shape[1] != _support(nu).shape[1]:
        raise InvalidArgumentError("Measures live in different dimensions.")

def _transport_system(mu, nu, match_mass):
    '''Equality rows for flows f_ij >= 0 (row-major): row sums, resultants, optional column sums.'''
    P, Q = _support(mu), _support(nu)
    m, n, dim = len(mu.weights), len(nu.weights), P.shape[1]
    rows, rhs = [], []
    for i in range(m):
        row = np.zeros((m, n))
        row[i, :] = 1.0
        rows.append(row.ravel())
        rhs.append(mu.weights[i])
    for j in range(n):
        for k in range(dim):
            row = np.zeros((m, n))
            row[:, j] = P[:, k]
            rows.append(row.ravel())
            rhs.append(nu.weights[j] * Q[j, k])
        if match_mass:
            row = np.zeros((m, n))
            row[:, j] = 1.0
            rows.append(row.ravel())
            rhs.append(nu.weights[j])
    return np.array(rows), np.array(rhs)

def _decide(mu, nu, kind, tol):
    _check_dims(mu, nu)
    m, n = len(mu.weights), len(nu.weights)
    if m == 0:
        ok = n == 0 or np.allclose(nu.weights, 0.0)
        return ok, (TransportWitness(np.zeros((0, n)), kind) if ok else None)
    if n == 0:
        if kind == "affine":
            return False, None
        ok = np.linalg.norm(mu.weights @ _support(mu)) <= tol * max(1.0, mu.weights.sum())
        return bool(ok), None
    A, b = _transport_system(mu, nu, kind == "affine")
    feasible, x = is_feasible(A_eq=A, b_eq=b, n=m * n, tol=tol)
    if not feasible:
        return False, None
    return True, TransportWitness(x.reshape(m, n), kind)

def linear_majorizes(mu: SphericalMeasure, nu: SphericalMeasure, tol=None):
    return _decide(mu, nu, "linear", TOL.lp if tol is None else tol)

def affine_majorizes(mu: PointMeasure, nu: PointMeasure, tol=None):
    return _decide(mu, nu, "affine", TOL.lp if tol is None else tol)

def reshetnyak_gap(mu: SphericalMeasure, nu: SphericalMeasure, p: SublinearFunctional) -> float:
    _check_dims(mu, nu)
    left = float(mu.weights @ p(mu.dirs)) if len(mu.weights) else 0.0
    right = float(nu.weights @ p(nu.dirs)) if len(nu.weights) else 0.0
    return left - right

def choquet_gap(mu: PointMeasure, nu: PointMeasure, f: ConvexFunctional) -> float:
    _check_dims(mu, nu)
    return float(mu.weights @ f(mu.points)) - float(nu.weights @ f(nu.points))

def _uniform_ball(rng, k, dim):
    g = rng.normal(size=(k, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * rng.random(k)[:, None] ** (1.0 / dim)

def sample_sublinear(dim: int, k: int, seed: Optional[int] = None) -> SublinearFunctional:
    if dim not in (2, 3):
        raise InvalidArgumentError(f"Only dimensions 2 and 3 are supported, got {dim}.")
    if k < 0:
        raise InvalidArgumentError("Number of generators must be nonnegative.")
    if k == 0:
        return SublinearFunctional(np.zeros((0, dim)), is_norm=True)
    rng = np.random.default_rng(seed)
    return SublinearFunctional(_uniform_ball(rng, k, dim))

def sample_convex(dim: int, k: int, seed: Optional[int] = None) -> ConvexFunctional:
    if k < 1:
        raise InvalidArgumentError("A convex test function needs at least one affine piece.")
    rng = np.random.default_rng(seed)
    slopes = _uniform_ball(rng, k, dim)
    intercepts = rng.uniform(-1.0, 1.0, size=k)
    return ConvexFunctional(slopes, intercepts, float(rng.random()))

def compose_witnesses(first: TransportWitness, second: TransportWitness, nu) -> TransportWitness:
    n = np.asarray(nu.weights, dtype=float)
    if first.flow.shape[1] != len(n) or second.flow.shape[0] != len(n):
        raise InvalidArgumentError("Witness shapes do not chain through nu.")
    composed = (first.flow / n[None, :]) @ second.flow
    return TransportWitness(composed, first.kind if first.kind == second.kind else "linear")

def _slack_lp(dirs, supply, demand, mass):
    '''
    Least L1 resultant error, relative to mass, when the supply atoms are split over the demand
    atoms (one piece per demand atom, resultants matched) with any leftover carrying zero
    resultant. None when the simplex gives up.
    '''
    S = np.flatnonzero(supply > 1e-14 * mass)
    D = np.flatnonzero(demand > 1e-14 * mass)
    dim = dirs.shape[1]
    nS, nD = len(S), len(D)
    n_flow, n_err = nS * nD, 2 * dim * (nD + 1)
    n_vars = n_flow + nS + n_err
    A = np.zeros((nS + dim * (nD + 1), n_vars))
    rhs = np.zeros(A.shape[0])
    for r, i in enumerate(S):
        A[r, r * nD:(r + 1) * nD] = 1.0
        A[r, n_flow + r] = 1.0
        rhs[r] = supply[i]
    base = nS
    for c, j in enumerate(D):
        for k in range(dim):
            row = base + c * dim + k
            A[row, [r * nD + c for r in range(nS)]] = dirs[S, k]
            e = n_flow + nS + 2 * (c * dim + k)
            A[row, e], A[row, e + 1] = -1.0, 1.0
            rhs[row] = demand[j] * dirs[j, k]
    for k in range(dim):
        row = base + nD * dim + k
        A[row, n_flow:n_flow + nS] = dirs[S, k]
        e = n_flow + nS + 2 * (nD * dim + k)
        A[row, e], A[row, e + 1] = -1.0, 1.0
    cost = np.zeros(n_vars)
    cost[n_flow + nS:] = 1.0
    result = solve_lp(cost, A_eq=A, b_eq=rhs)
    if not result.success:
        return None
    return max(0.0, result.objective) / mass

def _lp_size(supply, demand, mass):
    return int(np.sum(supply > 1e-14 * mass)) * max(int(np.sum(demand > 1e-14 * mass)), 1)

def majorization_defect(mu: SphericalMeasure, nu: SphericalMeasure, tol=None):
    '''
    Upper bound on the slack of "mu >> nu" relative to mass(nu), and the method that produced it.

    Common mass stays in place; the surplus of mu must either cover the deficit atoms of nu
    with matching resultants or carry zero resultant overall. 'mass' means mu is lighter than
    nu, 'identity' that there is no deficit, 'lp' that the residual block went through the
    simplex, 'bound' that it was too large and the crude estimate is returned.
    '''
    tol = TOL.contact if tol is None else tol
    dirs, a, b = align_atoms(mu, nu, TOL.snap)
    mass = max(float(b.sum()), 1e-300)
    common = np.minimum(a, b)
    surplus, deficit = a - common, b - common
    # the Euclidean norm is sublinear, so mu must carry at least the mass of nu
    shortfall = (float(b.sum()) - float(a.sum())) / mass
    if shortfall > tol:
        return shortfall, "mass"
    bound = (float(deficit.sum()) + float(np.linalg.norm(surplus @ dirs))) / mass
    if bound <= tol:
        return bound, "identity"
    if _lp_size(surplus, deficit, mass) > LP_CELLS:
        return bound, "bound"
    slack = _slack_lp(dirs, surplus, deficit, mass)
    if slack is None:
        return bound, "bound"
    return min(bound, slack), "lp"

@dataclass
class MajorizationDecision:
    '''
    Outcome of "mu >> nu" at a tolerance. status is 'holds', 'fails' or 'inconclusive'.
    residual is the slack upper bound when the order holds or is undecided and the certified
    violation when it fails, both relative to mass(nu).
    '''
    status: str
    residual: float
    method: str

    @property
    def holds(self) -> Optional[bool]:
        return {"holds": True, "fails": False}.get(self.status)

def _sampled_violation(dirs, a, b, mass, samples, seed):
    '''
    Largest sum (b - a) p(u) / mass over 1-Lipschitz sublinear p: the norm, one cap
    max((v, z), 0) per atom v of nu, and random maxima of linear forms.
    '''
    dim = dirs.shape[1]
    diff = b - a
    worst = float(diff @ np.linalg.norm(dirs, axis=1))
    caps = np.maximum(dirs @ dirs[b > 0].T, 0.0)
    if caps.size:
        worst = max(worst, float(np.max(diff @ caps)))
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        p = sample_sublinear(dim, int(rng.integers(1, 9)), int(rng.integers(2 ** 31)))
        worst = max(worst, float(diff @ p(dirs)))
    return worst / mass

def decide_majorization(mu: SphericalMeasure, nu: SphericalMeasure, tol=None, samples=256, seed=0):
    '''
    Decides "mu >> nu" up to tol (relative to mass(nu)) without ever reporting a failure that
    is not certified.

    - 'mass' / 'resultant': a sublinear test (the norm, a linear functional) already fails.
    - 'exact': small supports go through the full slack LP, which decides either way.
    - 'identity' / 'lp': common mass cancelled and the remainder shown to fit.
    - 'sampled': the reduced bound is above tol; sublinear test functionals (caps at the atoms
      of nu and random ones) either certify a violation (fails) or find none (inconclusive).
    '''
    tol = TOL.contact if tol is None else tol
    if mu.dim != nu.dim:
        raise InvalidArgumentError("Measures live in different dimensions.")
    dirs, a, b = align_atoms(mu, nu, TOL.snap)
    mass = max(float(b.sum()), 1e-300)
    shortfall = (float(b.sum()) - float(a.sum())) / mass
    if shortfall > tol:
        return MajorizationDecision("fails", shortfall, "mass")
    mismatch = float(np.linalg.norm((a - b) @ dirs)) / mass
    if mismatch > tol:
        return MajorizationDecision("fails", mismatch, "resultant")
    if _lp_size(a, b, mass) <= LP_CELLS:
        slack = _slack_lp(dirs, a, b, mass)
        if slack is not None:
            return MajorizationDecision("holds" if slack <= tol else "fails", slack, "exact")
    defect, method = majorization_defect(mu, nu, tol)
    if defect <= tol:
        return MajorizationDecision("holds", defect, method)
    violation = _sampled_violation(dirs, a, b, mass, samples, seed)
    if violation > tol:
        return MajorizationDecision("fails", violation, "sampled")
    return MajorizationDecision("inconclusive", defect, "sampled")
