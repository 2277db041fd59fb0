#!/usr/bin/env python3
"""
Tests for the fixed point, thresholds and coefficients
"""
import sys
import os

# Add src directory to Python path
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), '..', 'src'))

import numpy as np
import pytest

from stopping.errors import OutOfDomain
from stopping.extrema_laws import constants
from stopping.model import solve_roots, validate
from stopping.threshold_solver import (
    alternative_rhs, bracket, coefficients, fixed_point_rhs, one_sided_bounds, residuals, solve,
)


def solved_system(raw):
    params = validate(raw)
    roots = solve_roots(params)
    consts = constants(params, roots)
    return params, roots, consts, solve(params, roots=roots, constants=consts)


def random_raw(count, seed=99):
    rng = np.random.default_rng(seed)
    return [rng.uniform(0.2, 5.0, size=5) for _ in range(count)]


def test_asymmetric_solution():
    params, roots, consts, s = solved_system((1, 3, 3, 1, 1))
    # formulas and the bound x1 >= E1 place the lower threshold near 2.775
    assert s.x1 == pytest.approx(2.775, abs=0.01)
    assert s.x2 == pytest.approx(1.122, abs=0.01)
    assert s.u == pytest.approx(3.897, abs=0.01)
    assert s.D1 == pytest.approx(2.775, abs=0.01)
    assert s.D2 == pytest.approx(0.134, abs=0.005)
    assert s.x1 >= consts.E1 and s.x2 >= consts.E2


def test_symmetric_solution():
    params, roots, consts, s = solved_system((1, 1, 1, 1, 1))
    assert s.x1 == s.x2
    assert s.D1 == s.D2
    assert s.x1 == pytest.approx(1.04, abs=0.005)
    assert abs(s.x1 + s.x2 - s.u) <= 1e-12


def test_fixed_point_and_alternative_equation_share_the_root():
    params, roots, consts, s = solved_system((1, 3, 3, 1, 1))
    assert abs(s.u - fixed_point_rhs(consts, roots, s.u)) <= 1e-12 * max(1.0, s.u)
    assert abs(s.u - alternative_rhs(consts, roots, s.u)) <= 1e-10 * max(1.0, s.u)
    with pytest.raises(OutOfDomain):
        fixed_point_rhs(consts, roots, -1.0)


def test_fixed_point_rhs_decreases_in_u():
    for raw in random_raw(200, seed=5):
        params = validate(raw)
        roots = solve_roots(params)
        consts = constants(params, roots)
        lo, hi = bracket(consts)
        grid = np.linspace(0.0, hi, 400)
        rhs = np.array([fixed_point_rhs(consts, roots, u) for u in grid])
        assert np.all(np.diff(rhs) < 0.0)
        assert rhs[0] == pytest.approx(
            2.0 * (consts.E1 * consts.F2 + consts.E2 * consts.F1) / (1.0 - consts.G1 * consts.G2), rel=1e-12)
        assert rhs[-1] > consts.E1 + consts.E2
        assert lo - fixed_point_rhs(consts, roots, lo) <= 0.0 <= hi - fixed_point_rhs(consts, roots, hi)


def test_one_sided_bounds_are_the_means():
    params, roots, consts, s = solved_system((0.8, 2.0, 1.5, 1.2, 0.6))
    lower_x1, lower_x2 = one_sided_bounds(consts)
    assert (lower_x1, lower_x2) == (consts.E1, consts.E2)
    assert s.x1 >= lower_x1 and s.x2 >= lower_x2


def test_coefficients_solve_linear_system():
    roots = solve_roots(validate((1, 3, 3, 1, 1)))
    D1, D2 = coefficients(2.0, 1.0, roots)
    e1, e2 = np.exp(-roots.r1 * 3.0), np.exp(-roots.r2 * 3.0)
    assert D1 + D2 * e2 == pytest.approx(2.0, abs=1e-14)
    assert D1 * e1 + D2 == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(OutOfDomain):
        coefficients(-1.0, 1.0, roots)


def test_random_parameter_invariants():
    for raw in random_raw(1000):
        params, roots, consts, s = solved_system(raw)
        report = residuals(params, roots, consts, s)
        scale = max(1.0, s.u)
        lo, hi = bracket(consts)

        assert report.fixed_point <= 1e-12 * scale
        assert report.threshold_sum <= 1e-12 * scale
        assert report.system_first <= 1e-12 * scale
        assert report.system_second <= 1e-12 * scale
        assert report.worst_identity() <= 1e-10 * scale
        assert lo <= s.u <= hi
        assert report.within_bracket
        assert report.x1_above_E1 and report.x2_above_E2
        assert report.coefficients_positive


def test_residual_report_flags_a_wrong_solution():
    params, roots, consts, s = solved_system((1, 1, 1, 1, 1))
    wrong = type(s)(u=s.u + 0.1, x1=s.x1 + 0.1, x2=s.x2, D1=s.D1, D2=s.D2)
    report = residuals(params, roots, consts, wrong)
    assert report.fixed_point > 1e-6
    assert report.worst_identity() > 1e-6


if __name__ == "__main__":
    print("🧪 Testing threshold solver...")
    test_asymmetric_solution()
    test_symmetric_solution()
    test_fixed_point_and_alternative_equation_share_the_root()
    test_fixed_point_rhs_decreases_in_u()
    test_one_sided_bounds_are_the_means()
    test_coefficients_solve_linear_system()
    test_random_parameter_invariants()
    test_residual_report_flags_a_wrong_solution()
    print("✅ Threshold solver tests passed")
