'''
Test Suite for the Urysohn Family

Solver runs mostly use coarse planar grids (120 directions); one lens solve runs at 720
directions under a wall-clock limit. The answers are compared with bodies known in closed form
(disk, rounded square, lens, rounded triangle, stadium). Verifiers are exercised on
constructions where the optimality conditions hold exactly, on ones where they fail for a
known reason, and on undecided majorization results.

Dependencies:
-------------
- pytest
- numpy
- iso_problems, convex_core, measures, majorization, witness_fitting, errors
'''

import math
import time
import numpy as np
import pytest
from iso_problems import (UrysohnSpec, FlatteningSpec, ConditionReport, ParetoPoint, edge_operator,
                          solve_scalarized, solve_urysohn, solve_flattening, solve_rotational_flattening,
                          lens_analytic, lens_fit, rounded_polygon_analytic, stadium_fit, classify_runs,
                          rotate_lift, pappus_volume, revolution_volume, leidenfrost, pareto_audit,
                          pareto_front_vector_iso, verify_external_urysohn, verify_flattening,
                          verify_current_hyperplane, verify_optimal_hulls)
from convex_core import SupportVector, make_grid, minkowski_combine, body_volume, contains, convexify
from measures import surface_area_measure, integral_breadth, pairing, blaschke_sum
from majorization import MajorizationDecision
from witness_fitting import grid_areas, contact_mask, fit_external_urysohn
from errors import InvalidArgumentError, InfeasibleError

SQUARE = [[1, 1], [-1, 1], [-1, -1], [1, -1]]

def square(grid, half=1.0):
    return SupportVector.from_points(np.array(SQUARE) * half, grid)

def stadium(grid, radius=1.0, half_length=0.5):
    return minkowski_combine([(radius, SupportVector.ball(grid)),
                              (half_length, SupportVector.segment(grid, [-1.0, 0.0], [1.0, 0.0]))])

def rounded_box(grid, left, right, bottom, top, rho):
    corners = [[left + rho, bottom + rho], [right - rho, bottom + rho], [right - rho, top - rho], [left + rho, top - rho]]
    return minkowski_combine([(1.0, SupportVector.from_points(corners, grid)), (rho, SupportVector.ball(grid))])

TRIANGLE = [[math.cos(t), math.sin(t)] for t in (math.pi / 2, 7 * math.pi / 6, 11 * math.pi / 6)]

def objective(body, ys, lam):
    mu = surface_area_measure(body)
    return float(sum(w * pairing(y, mu) for w, y in zip(lam, ys)))

def at_volume(x, target=1.0):
    return x.scaled((target / body_volume(x)) ** (1.0 / x.dim))

# Problem types

def test_spec_validation():
    grid = make_grid(2, 120)
    with pytest.raises(InvalidArgumentError):
        UrysohnSpec("sideways", 1.0, grid)
    with pytest.raises(InvalidArgumentError):
        UrysohnSpec("free", -1.0, grid)
    with pytest.raises(InvalidArgumentError):
        UrysohnSpec("free", 1.0, grid, square(grid))
    with pytest.raises(InvalidArgumentError):
        UrysohnSpec("internal", 1.0, grid)
    with pytest.raises(InvalidArgumentError):
        UrysohnSpec("internal", 1.0, grid, square(make_grid(2, 60)))

def test_flattening_spec_validation():
    grid = make_grid(2, 120)
    base = UrysohnSpec("free", 2.0, grid)
    assert FlatteningSpec(base, [0.0, 3.0]).zbar == pytest.approx([0.0, 1.0])
    with pytest.raises(InvalidArgumentError):
        FlatteningSpec(base, [0.0, 1.0], 0.0, 0.0)
    with pytest.raises(InvalidArgumentError):
        FlatteningSpec(base, [0.0, 0.0, 1.0])
    with pytest.raises(InvalidArgumentError):
        FlatteningSpec(UrysohnSpec("free", 2.0, make_grid(2, 119)), [1.0, 0.0])

def test_infeasible_targets():
    grid = make_grid(2, 120)
    with pytest.raises(InfeasibleError):
        solve_urysohn(UrysohnSpec("internal", 3.0, grid, square(grid)))
    with pytest.raises(InfeasibleError):
        solve_urysohn(UrysohnSpec("external", 2.0, grid, square(grid)))

def test_condition_report():
    report = ConditionReport()
    assert not report.verdict
    report.add("small", 1e-6, 1e-3)
    report.add("negative is clipped", -1.0, 1e-3)
    assert report.verdict
    report.add("large", 1.0, 1e-3)
    assert not report.verdict
    data = report.to_dict()
    assert [c["holds"] for c in data["conditions"]] == [True, True, False]
    assert data["conditions"][1]["residual"] == 0.0

def test_undecided_condition_leaves_the_verdict_open():
    report = ConditionReport()
    report.add("small", 1e-6, 1e-3)
    report.add_decision("majorization", MajorizationDecision("inconclusive", 1.0, "sampled"), 1e-3)
    assert report.verdict is None
    data = report.to_dict()
    assert data["verdict"] is None
    assert data["conditions"][1]["holds"] is None
    report.add_decision("other", MajorizationDecision("fails", 0.2, "lp"), 1e-3)
    assert report.verdict is False

# Solvers

def test_edge_operator_gives_edge_lengths():
    grid = make_grid(2, 8)
    x = square(grid)
    D = edge_operator(grid)
    assert D @ x.h == pytest.approx(grid_areas(x), abs=1e-12)
    assert 0.5 * x.h @ D @ x.h == pytest.approx(4.0)

def test_free_problem_gives_the_disk():
    grid = make_grid(2, 120)
    outcome = solve_scalarized(UrysohnSpec("free", 2.0, grid))
    assert outcome.converged
    assert outcome.breadth == pytest.approx(2.0, rel=1e-6)
    assert outcome.volume == pytest.approx(math.pi, rel=1e-3)
    assert np.ptp(outcome.body.h) < 1e-6

def test_internal_problem_rounds_the_square():
    grid = make_grid(2, 120)
    x0 = square(grid)
    target = 2.3
    body = solve_urysohn(UrysohnSpec("internal", target, grid, x0))
    assert integral_breadth(body) == pytest.approx(target, rel=1e-5)
    assert contains(x0, body)
    # perimeter 8(1 - rho) + 2 pi rho = pi * target
    rho = (math.pi * target - 8.0) / (2.0 * math.pi - 8.0)
    rounded = rounded_box(grid, -1.0, 1.0, -1.0, 1.0, rho)
    assert np.max(np.abs(body.h - rounded.h)) < 2e-2
    assert body_volume(body) == pytest.approx(body_volume(rounded), rel=1e-2)

def test_external_problem_around_a_segment_is_a_lens():
    grid = make_grid(2, 120)
    segment = SupportVector.segment(grid, [-1.0, 0.0], [1.0, 0.0])
    body = solve_urysohn(UrysohnSpec("external", 1.6, grid, segment))
    assert integral_breadth(body) == pytest.approx(1.6, rel=1e-5)
    assert contains(body, segment)
    alpha, distance = lens_fit(body, 1.0)
    assert alpha > 1.0
    assert distance < 2e-2

def test_fine_lens_solve_is_fast_and_verified():
    grid = make_grid(2, 720)
    segment = SupportVector.segment(grid, [-1.0, 0.0], [1.0, 0.0])
    start = time.perf_counter()
    body = solve_urysohn(UrysohnSpec("external", 1.6, grid, segment))
    assert time.perf_counter() - start < 60.0
    _, distance = lens_fit(body, 1.0)
    assert distance < 1e-2
    mu, alpha = fit_external_urysohn(body, segment)
    assert verify_external_urysohn(body, segment, mu, alpha, tol=1e-2).verdict is True

def test_external_problem_around_a_triangle_rounds_its_edges():
    grid = make_grid(2, 120)
    triangle = SupportVector.from_points(TRIANGLE, grid)
    analytic = rounded_polygon_analytic(TRIANGLE, 1.2, grid)
    assert contains(analytic, triangle)
    body = solve_urysohn(UrysohnSpec("external", integral_breadth(analytic), grid, triangle))
    assert np.max(np.abs(body.h - analytic.h)) < 2e-2
    _, alpha = fit_external_urysohn(body, triangle, touch=1e-4)
    assert alpha == pytest.approx(1.2, rel=5e-2)
    expected = contact_mask(analytic, triangle, touch=1e-4)
    assert np.count_nonzero(expected) > 0
    assert np.count_nonzero(contact_mask(body, triangle, touch=1e-4) != expected) <= 6

def test_disk_error_shrinks_with_the_grid():
    errors = []
    for n in (60, 120):
        outcome = solve_scalarized(UrysohnSpec("free", 2.0, make_grid(2, n)))
        errors.append(abs(outcome.volume - math.pi))
    assert errors[1] * 2.0 <= errors[0]

def test_perturbed_disks_have_less_area():
    grid = make_grid(2, 120)
    best = solve_scalarized(UrysohnSpec("free", 2.0, grid)).volume
    rng = np.random.default_rng(7)
    theta = grid.angles()
    for _ in range(100):
        k, amplitude, phase = rng.integers(2, 6), rng.uniform(0.01, 0.05), rng.uniform(0.0, 2.0 * math.pi)
        x = convexify(SupportVector(grid, 1.0 + amplitude * np.cos(k * theta + phase)))
        x = x.scaled(2.0 / integral_breadth(x))
        assert body_volume(x) <= best * (1.0 + 1e-6)

def test_flattening_gives_a_stadium():
    grid = make_grid(2, 120)
    box = SupportVector.from_points([[-5, -5], [5, -5], [5, 5], [-5, 5]], grid)
    spec = FlatteningSpec(UrysohnSpec("internal", 2.0, grid, box), [0.0, 1.0], 1.0, 0.3)
    point = solve_flattening(spec)
    assert point.weights == (1.0, 0.3)
    assert point.details["breadth"] == pytest.approx(2.0, rel=1e-5)
    fit = stadium_fit(point.body)
    # maximiser of sqrt(pi (2r - r^2)) - 0.6 r with half length pi (1 - r) / 2
    assert fit.radius == pytest.approx(0.68, abs=3e-2)
    assert fit.half_length == pytest.approx(0.50, abs=3e-2)
    assert point.objectives[1] == pytest.approx(2.0 * fit.radius, abs=2e-2)

def test_rotational_flattening_lifts_the_meridian():
    grid = make_grid(2, 120)
    grid3 = make_grid(3, 1)
    spec = FlatteningSpec(UrysohnSpec("free", 2.0, grid), [0.0, 1.0], 1.0, 0.3)
    point, lifted = solve_rotational_flattening(spec, grid3)
    top = point.body.h[grid.index_of([0.0, 1.0])]
    assert lifted.h[grid3.index_of([0.0, 0.0, 1.0])] == pytest.approx(top)
    with pytest.raises(InvalidArgumentError):
        solve_rotational_flattening(FlatteningSpec(UrysohnSpec("free", 2.0, grid), [1.0, 0.0], 1.0, 0.3), grid3)

# Constructions

def test_lens_construction():
    grid = make_grid(2, 360)
    assert lens_analytic(1.0, 1.0, grid).h == pytest.approx(np.ones(grid.size))
    lens = lens_analytic(1.0, 2.0, grid)
    assert lens.h[grid.index_of([0.0, 1.0])] == pytest.approx(2.0 - math.sqrt(3.0))
    assert lens.h[grid.index_of([1.0, 0.0])] == pytest.approx(1.0)
    with pytest.raises(InvalidArgumentError):
        lens_analytic(1.0, 0.5, grid)
    alpha, distance = lens_fit(lens, 1.0)
    assert alpha == pytest.approx(2.0, rel=1e-8)
    assert distance < 1e-8

def test_rotate_lift_of_a_disk_is_a_ball():
    lifted = rotate_lift(SupportVector.ball(make_grid(2, 120)), make_grid(3, 1))
    assert lifted.h == pytest.approx(np.ones(42))
    assert not lifted.tight
    with pytest.raises(InvalidArgumentError):
        rotate_lift(SupportVector.ball(make_grid(2, 120)).translated([0.5, 0.0]), make_grid(3, 1))

def test_volumes_of_revolution():
    assert pappus_volume(1.0, 0.0) == pytest.approx(4.0 * math.pi / 3.0)
    assert revolution_volume(square(make_grid(2, 8))) == pytest.approx(2.0 * math.pi)
    assert revolution_volume(SupportVector.ball(make_grid(2, 720))) == pytest.approx(4.0 * math.pi / 3.0, rel=1e-3)
    grid = make_grid(2, 720)
    assert revolution_volume(stadium(grid)) == pytest.approx(pappus_volume(1.0, 0.5), rel=1e-3)

def test_leidenfrost_stadium():
    grid2, grid3 = make_grid(2, 240), make_grid(3, 2)
    body, spheroid = leidenfrost(math.pi + 2.0, (1.0, 1.0), grid2, grid3)
    assert body_volume(body) == pytest.approx(math.pi + 2.0, rel=1e-9)
    fit = stadium_fit(body)
    # rho = lam2 / (2 lam1) = 1/2 and r = sqrt(A / (pi + 4 rho)) = 1
    assert fit.radius == pytest.approx(1.0, rel=1e-2)
    assert fit.half_length == pytest.approx(0.5, abs=1e-2)
    assert fit.residual < 1e-2
    assert spheroid.h[grid3.index_of([0.0, 0.0, 1.0])] == pytest.approx(1.0, rel=1e-2)
    assert spheroid.h[grid3.index_of([1.0, 0.0, 0.0])] == pytest.approx(1.5, rel=1e-2)
    runs = classify_runs(body)
    assert [label for label, _ in runs].count("straight") == 2
    assert sum(count for _, count in runs) == len(surface_area_measure(body))
    with pytest.raises(InvalidArgumentError):
        leidenfrost(1.0, (0.0, 0.0), grid2, grid3)
    with pytest.raises(InvalidArgumentError):
        leidenfrost(0.0, (1.0, 1.0), grid2, grid3)

def test_leidenfrost_shape_follows_the_weights():
    grid2, grid3 = make_grid(2, 240), make_grid(3, 1)
    body, _ = leidenfrost(math.pi, (1.0, 0.0), grid2, grid3)
    fit = stadium_fit(body)
    assert fit.radius == pytest.approx(1.0, rel=1e-2)
    assert fit.half_length == pytest.approx(0.0, abs=1e-2)
    longer, _ = leidenfrost(math.pi, (1.0, 2.0), grid2, grid3)
    assert stadium_fit(longer).half_length > 0.5

def test_leidenfrost_without_the_disk_is_flat():
    grid2, grid3 = make_grid(2, 240), make_grid(3, 1)
    flat, _ = leidenfrost(math.pi, (0.0, 1.0), grid2, grid3)
    top, bottom = grid2.index_of([0.0, 1.0]), grid2.index_of([0.0, -1.0])
    assert flat.h[top] + flat.h[bottom] < 1e-4
    assert body_volume(flat) < 1e-3
    assert integral_breadth(flat) == pytest.approx(2.0, rel=1e-4)

# Vector problem

def test_pareto_audit():
    points = [ParetoPoint((1.0,), None, np.array(obj)) for obj in ([1.0, 1.0], [2.0, 2.0], [0.0, 3.0])]
    assert pareto_audit(points) == [(1, 0)]

def test_vector_front_is_not_dominated():
    grid = make_grid(2, 120)
    ys = [square(grid), SupportVector.ball(grid)]
    weights = [[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
    points = pareto_front_vector_iso(ys, 1.0, weights)
    assert len(points) == 3
    for point in points:
        assert body_volume(point.body) == pytest.approx(1.0, rel=1e-9)
        assert point.details["minkowski_gap"] == pytest.approx(0.0, abs=1e-8)
        assert point.details["fit_residual"] < 1e-6
    assert pareto_audit(points) == []
    assert points[0].details["alphas"][1] == pytest.approx(0.0, abs=1e-6)
    with pytest.raises(InvalidArgumentError):
        pareto_front_vector_iso(ys, 1.0, [[1.0]])
    with pytest.raises(InvalidArgumentError):
        pareto_front_vector_iso(ys, 0.0, [[1.0, 1.0]])

def test_vector_front_beats_other_bodies_of_the_same_volume():
    grid = make_grid(2, 120)
    ys = [square(grid), SupportVector.ball(grid)]
    lam = (1.0, 1.0)
    ours = objective(pareto_front_vector_iso(ys, 1.0, [lam])[0].body, ys, lam)
    competitors = [SupportVector.ball(grid), square(grid), blaschke_sum(ys[0], ys[1], 1.0, 1.0),
                   SupportVector.from_points(TRIANGLE, grid)]
    for other in competitors:
        assert ours <= objective(at_volume(other), ys, lam) + 1e-9

def test_vector_front_in_space():
    grid = make_grid(3, 2)
    cube = SupportVector.from_points([[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)], grid)
    octahedron = SupportVector.from_points(np.vstack([1.5 * np.eye(3), -1.5 * np.eye(3)]), grid)
    ys = [cube, octahedron]
    point = pareto_front_vector_iso(ys, 1.0, [[1.0, 1.0]])[0]
    assert body_volume(point.body) == pytest.approx(1.0, rel=1e-9)
    assert point.details["fit_residual"] < 1e-2
    assert point.details["fit_alphas"] == pytest.approx(point.details["alphas"], abs=1e-2)
    assert point.details["minkowski_gap"] == pytest.approx(0.0, abs=1e-4)
    ours = objective(point.body, ys, (1.0, 1.0))
    assert ours <= objective(at_volume(SupportVector.ball(grid)), ys, (1.0, 1.0)) + 1e-6

# Verifiers

def test_external_urysohn_disk_in_disk():
    grid = make_grid(2, 720)
    disk = SupportVector.ball(grid)
    report = verify_external_urysohn(disk, disk, None, 1.0)
    assert report.verdict
    assert report.notes["majorization_method"] == "identity"

def test_external_urysohn_square_fails_on_mass():
    grid = make_grid(2, 720)
    report = verify_external_urysohn(square(grid), SupportVector.ball(grid), None, 1.0)
    assert not report.verdict
    assert report.notes["majorization_method"] == "mass"
    with pytest.raises(InvalidArgumentError):
        verify_external_urysohn(SupportVector.ball(grid), SupportVector.ball(grid, 2.0), None, 1.0)

def test_internal_flattening_of_an_untouched_disk():
    grid = make_grid(2, 720)
    disk, room = SupportVector.ball(grid), SupportVector.ball(grid, 2.0)
    assert not verify_flattening("internal", disk, room, [0.0, 1.0], 1.0, 0.5).verdict
    assert verify_flattening("internal", disk, room, [0.0, 1.0], 1.0, 0.0).verdict

def test_external_flattening_identity_coefficient():
    grid = make_grid(2, 720)
    x = stadium(grid)
    inside = SupportVector.ball(grid, 0.5)
    report = verify_flattening("external", x, inside, [0.0, 1.0], 1.0, 1.0)
    assert report.verdict
    assert report.notes["flattening_coefficient"] == "1/N"
    literal = verify_flattening("external", x, inside, [0.0, 1.0], 1.0, 1.0, coefficient="literal")
    assert not literal.verdict
    assert literal.notes["flattening_coefficient"] == "2N"
    with pytest.raises(InvalidArgumentError):
        verify_flattening("external", x, inside, [0.0, 1.0], 1.0, 1.0, coefficient="other")

def test_current_hyperplane_conditions_hold_on_rounded_halves():
    grid = make_grid(2, 720)
    rho = 0.5
    x0 = SupportVector.from_points([[-3, -1], [3, -1], [3, 1], [-3, 1]], grid)
    xbar = rounded_box(grid, -3.0, 0.0, -1.0, 1.0, rho)
    ybar = rounded_box(grid, 0.0, 3.0, -1.0, 1.0, rho)
    x = surface_area_measure(SupportVector.from_points([[-2.5, -0.5], [-0.5, -0.5], [-0.5, 0.5], [-2.5, 0.5]], grid))
    y = surface_area_measure(SupportVector.from_points([[0.5, -0.5], [2.5, -0.5], [2.5, 0.5], [0.5, 0.5]], grid))
    report = verify_current_hyperplane(xbar, ybar, x0, [1.0, 0.0], x, y, rho, 2.0 - 2.0 * rho)
    assert report.verdict
    vacuous = verify_current_hyperplane(xbar, ybar, x0, [1.0, 0.0], x, y, rho, 0.0)
    assert vacuous.notes["atom_conditions"] == "vacuous: beta = 0"
    too_much = verify_current_hyperplane(xbar, ybar, x0, [1.0, 0.0], x, y, rho, 2.0)
    assert not too_much.verdict

def test_optimal_hulls_of_a_single_ball():
    grid = make_grid(2, 720)
    ball = SupportVector.ball(grid)
    report = verify_optimal_hulls([ball], [ball], [1.0], [None], [surface_area_measure(ball)])
    assert report.verdict
    assert len(report.conditions) == 3
    with pytest.raises(InvalidArgumentError):
        verify_optimal_hulls([ball], [ball], [0.0], [None], [None])
    with pytest.raises(InvalidArgumentError):
        verify_optimal_hulls([ball], [ball, ball], [1.0], [None], [None])
