'''
Test Suite for Measure Majorization

Builds small measures whose majorization status is known by hand, checks the transport
witnesses independently, and samples test functionals for the dual inequality.

Dependencies:
-------------
- pytest
- numpy
- majorization, measures, convex_core, errors
'''

import itertools
import math
import numpy as np
import pytest
from majorization import (TransportWitness, PointMeasure, linear_majorizes, affine_majorizes,
                          reshetnyak_gap, choquet_gap, sample_sublinear, sample_convex,
                          compose_witnesses, majorization_defect, decide_majorization, SublinearFunctional)
from measures import SphericalMeasure, ball_measure
from convex_core import make_grid
from errors import InvalidArgumentError

R2 = math.sqrt(2.0)
DIAG = [1 / R2, 1 / R2]
ANTI_DIAG = [-1 / R2, -1 / R2]

def axes():
    return SphericalMeasure.from_atoms(2, [([1.0, 0.0], 1.0), ([0.0, 1.0], 1.0),
                                           ([-1.0, 0.0], 1.0), ([0.0, -1.0], 1.0)])

def diagonals(weight=R2):
    return SphericalMeasure.from_atoms(2, [(DIAG, weight), (ANTI_DIAG, weight)])

def test_axes_majorize_diagonals():
    mu, nu = axes(), diagonals()
    ok, witness = linear_majorizes(mu, nu)
    assert ok
    assert witness.flow.shape == (4, 2)
    assert witness.check(mu, nu)

def test_heavier_measure_is_not_majorized():
    ok, witness = linear_majorizes(axes(), 2 * axes())
    assert not ok
    assert witness is None

def test_measure_majorizes_itself():
    mu = axes()
    ok, witness = linear_majorizes(mu, mu)
    assert ok and witness.check(mu, mu)

def test_empty_measures():
    empty = SphericalMeasure(2)
    assert linear_majorizes(empty, empty)[0]
    assert not linear_majorizes(empty, axes())[0]
    assert linear_majorizes(axes(), empty)[0]

def test_dimension_mismatch():
    other = SphericalMeasure.from_atoms(3, [([0.0, 0.0, 1.0], 1.0)])
    with pytest.raises(InvalidArgumentError):
        linear_majorizes(axes(), other)

def test_sampled_sublinear_functionals_never_lose():
    mu, nu = axes(), diagonals()
    for seed in range(20):
        p = sample_sublinear(2, 4, seed)
        assert reshetnyak_gap(mu, nu, p) >= -1e-9
    norm = sample_sublinear(2, 0)
    assert norm.is_norm
    assert reshetnyak_gap(mu, nu, norm) == pytest.approx(4.0 - 2 * R2)

def test_sampler_validation():
    with pytest.raises(InvalidArgumentError):
        sample_sublinear(4, 3)
    with pytest.raises(InvalidArgumentError):
        sample_sublinear(2, -1)
    with pytest.raises(InvalidArgumentError):
        sample_convex(2, 0)

def test_samplers_are_seeded():
    a, b = sample_sublinear(3, 5, seed=7), sample_sublinear(3, 5, seed=7)
    assert np.array_equal(a.generators, b.generators)

def test_affine_order_spreads_mass():
    spread = PointMeasure([[-1.0, 0.0], [1.0, 0.0]], [1.0, 1.0])
    point = PointMeasure([[0.0, 0.0]], [2.0])
    ok, witness = affine_majorizes(spread, point)
    assert ok
    assert witness.kind == "affine"
    assert witness.check(spread, point)
    assert not affine_majorizes(point, spread)[0]
    for seed in range(10):
        assert choquet_gap(spread, point, sample_convex(2, 3, seed)) >= -1e-12

def test_point_measure_validation():
    with pytest.raises(InvalidArgumentError):
        PointMeasure([[0.0, 0.0]], [1.0, 2.0])
    with pytest.raises(InvalidArgumentError):
        PointMeasure([[0.0, 0.0]], [-1.0])
    assert PointMeasure([[0.0, 0.0], [2.0, 4.0]], [1.0, 1.0]).barycenter == pytest.approx([1.0, 2.0])

def test_witnesses_compose():
    mu, nu = axes(), diagonals()
    rho = 0.5 * nu
    ok1, first = linear_majorizes(mu, nu)
    ok2, second = linear_majorizes(nu, rho)
    assert ok1 and ok2
    composed = compose_witnesses(first, second, nu)
    assert composed.check(mu, rho)
    with pytest.raises(InvalidArgumentError):
        compose_witnesses(second, first, nu)

def test_witness_check_catches_tampering():
    mu, nu = axes(), diagonals()
    _, witness = linear_majorizes(mu, nu)
    broken = TransportWitness(witness.flow * 1.5)
    assert not broken.check(mu, nu)
    data = witness.to_dict()
    assert data["rows"] == [0, 1, 2, 3]
    assert len(data["flow"]) == 4

def test_majorization_defect_methods():
    mu = axes()
    defect, method = majorization_defect(mu, mu)
    assert method == "identity"
    assert defect == pytest.approx(0.0, abs=1e-12)
    defect, method = majorization_defect(mu, 2 * mu)
    assert method == "mass"
    assert defect == pytest.approx(0.5)
    defect, method = majorization_defect(mu, diagonals())
    assert method == "lp"
    assert defect == pytest.approx(0.0, abs=1e-9)

def vertical():
    return SphericalMeasure.from_atoms(2, [([0.0, 1.0], 1.0), ([0.0, -1.0], 1.0)])

def horizontal():
    return SphericalMeasure.from_atoms(2, [([1.0, 0.0], 1.0), ([-1.0, 0.0], 1.0)])

def test_vertical_pair_does_not_majorize_horizontal_pair():
    mu, nu = vertical(), horizontal()
    ok, witness = linear_majorizes(mu, nu)
    assert not ok and witness is None
    # same mass, same (zero) resultant, yet |x_1| separates them
    width = SublinearFunctional(np.array([[1.0, 0.0], [-1.0, 0.0]]))
    assert reshetnyak_gap(mu, nu, width) == pytest.approx(-2.0)

def _splits(pieces, step=10):
    rows = [r for r in itertools.product(range(step + 1), repeat=pieces) if sum(r) == step]
    return np.array(rows, dtype=float) / step

def brute_force_majorizes(mu, nu, tol=1e-9):
    '''Search every split of mu's atoms over nu's atoms in tenths.'''
    rows = _splits(len(nu.weights))
    picks = np.array(list(itertools.product(range(len(rows)), repeat=len(mu.weights))))
    F = rows[picks]
    resultants = np.einsum("kij,i,id->kjd", F, mu.weights, mu.dirs)
    target = nu.weights[:, None] * nu.dirs
    return bool(np.abs(resultants - target).max(axis=(1, 2)).min() <= tol)

def random_atoms(rng, k, dim=2):
    dirs = rng.normal(size=(k, dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return SphericalMeasure(dim, dirs, rng.uniform(0.5, 1.5, size=k))

def decomposed(rng, mu, pieces=2):
    rows = _splits(pieces)
    F = rows[rng.integers(len(rows), size=len(mu.weights))]
    R = np.einsum("ij,i,id->jd", F, mu.weights, mu.dirs)
    norms = np.linalg.norm(R, axis=1)
    if norms.min() < 1e-3:
        return None
    return SphericalMeasure(mu.dim, R / norms[:, None], norms)

def test_decomposition_oracle_agrees_with_the_lp():
    rng = np.random.default_rng(5)
    checked = 0
    while checked < 25:
        mu = random_atoms(rng, 3)
        nu = decomposed(rng, mu)
        if nu is None:
            continue
        checked += 1
        assert brute_force_majorizes(mu, nu)
        ok, witness = linear_majorizes(mu, nu)
        assert ok and witness.check(mu, nu)
        other = random_atoms(rng, 2)
        ok, witness = linear_majorizes(mu, other)
        assert ok or not brute_force_majorizes(mu, other)
        if ok:
            assert witness.check(mu, other)

def test_thousand_sublinear_samples_never_lose_on_a_majorizing_pair():
    rng = np.random.default_rng(8)
    mu = random_atoms(rng, 3)
    nu = decomposed(rng, mu)
    while nu is None:
        nu = decomposed(rng, mu)
    for seed in range(1000):
        p = sample_sublinear(2, 1 + seed % 6, seed)
        assert reshetnyak_gap(mu, nu, p) >= -1e-9

def test_decision_is_exact_on_small_supports():
    decision = decide_majorization(axes(), diagonals(), tol=1e-9)
    assert decision.status == "holds" and decision.method == "exact"
    assert decision.holds is True
    false = decide_majorization(vertical(), horizontal(), tol=1e-6)
    assert false.status == "fails" and false.method == "exact"
    assert false.holds is False
    assert false.residual == pytest.approx(1.0, abs=1e-9)

def test_decision_reports_mass_and_resultant_failures():
    decision = decide_majorization(axes(), 2 * axes())
    assert (decision.status, decision.method) == ("fails", "mass")
    assert decision.residual == pytest.approx(0.5)
    lopsided = SphericalMeasure.from_atoms(2, [([1.0, 0.0], 1.2), ([0.0, 1.0], 1.0),
                                               ([-1.0, 0.0], 0.8), ([0.0, -1.0], 1.0)])
    decision = decide_majorization(lopsided, axes())
    assert (decision.status, decision.method) == ("fails", "resultant")
    assert decision.residual == pytest.approx(0.1)

def test_large_true_pair_is_inconclusive_not_false():
    grid = make_grid(2, 200)
    ball = ball_measure(grid)
    q, u = grid.qweights, grid.dirs
    pairs = q[0::2, None] * u[0::2] + q[1::2, None] * u[1::2]
    norms = np.linalg.norm(pairs, axis=1)
    merged = SphericalMeasure(2, pairs / norms[:, None], norms)
    assert majorization_defect(ball, merged)[1] == "bound"
    decision = decide_majorization(ball, merged)
    assert decision.status == "inconclusive"
    assert decision.holds is None

def test_large_false_pair_is_certified():
    grid = make_grid(2, 200)
    squeezed = SphericalMeasure(2, grid.dirs, grid.qweights * (1.0 + 0.9 * np.cos(2.0 * grid.angles())))
    decision = decide_majorization(ball_measure(grid), squeezed)
    assert (decision.status, decision.method) == ("fails", "sampled")
    assert decision.residual > 0.05
