'''
Test Suite for the In-Repo Simplex

Small linear programs with known optima, plus the infeasible / unbounded / iteration-limit
statuses and the feasibility wrapper.

Dependencies:
-------------
- pytest
- numpy
- lp_simplex
'''

import numpy as np
import pytest
from lp_simplex import solve_lp, is_feasible

def test_textbook_maximisation():
    # max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18
    result = solve_lp([-3.0, -5.0], A_ub=[[1, 0], [0, 2], [3, 2]], b_ub=[4, 12, 18])
    assert result.success
    assert result.objective == pytest.approx(-36.0)
    assert result.x == pytest.approx([2.0, 6.0])

def test_equality_constraints():
    result = solve_lp([1.0, 2.0, 0.0], A_eq=[[1, 1, 1]], b_eq=[1.0])
    assert result.success
    assert result.objective == pytest.approx(0.0)
    assert result.x.sum() == pytest.approx(1.0)

def test_negative_right_hand_side_is_flipped():
    # x - y = -2 with x, y >= 0 and minimal y -> y = 2, x = 0
    result = solve_lp([0.0, 1.0], A_eq=[[1, -1]], b_eq=[-2.0])
    assert result.success
    assert result.x == pytest.approx([0.0, 2.0])

def test_infeasible():
    result = solve_lp([1.0], A_eq=[[1.0]], b_eq=[-1.0])
    assert result.status == "infeasible"
    assert result.x is None
    assert not result.success

def test_unbounded():
    result = solve_lp([-1.0, 0.0], A_ub=[[0.0, 1.0]], b_ub=[1.0])
    assert result.status == "unbounded"

def test_redundant_rows_are_dropped():
    result = solve_lp([1.0, 1.0], A_eq=[[1, 1], [2, 2]], b_eq=[1.0, 2.0])
    assert result.success
    assert result.objective == pytest.approx(1.0)

def test_iteration_limit_is_reported():
    result = solve_lp([-3.0, -5.0], A_ub=[[1, 0], [0, 2], [3, 2]], b_ub=[4, 12, 18], max_iter=0)
    assert result.status == "iteration_limit"

def test_no_constraints():
    assert solve_lp([1.0, 2.0]).objective == 0.0
    assert solve_lp([-1.0]).status == "unbounded"

def test_is_feasible_returns_a_point():
    A = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]])
    b = np.array([1.0, 1.5])
    ok, x = is_feasible(A_eq=A, b_eq=b)
    assert ok
    assert np.all(x >= 0)
    assert A @ x == pytest.approx(b)

def test_is_feasible_rejects():
    ok, x = is_feasible(A_eq=[[1.0, 1.0]], b_eq=[-1.0])
    assert not ok and x is None
