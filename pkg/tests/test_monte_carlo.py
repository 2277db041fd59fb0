#!/usr/bin/env python3
"""
Tests for the exact simulation of the stopped process
Value estimates use reduced path counts; the distribution checks run at full size
"""
import sys
import os
import math

# Add src directory to Python path
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), '..', 'src'))

import numpy as np
import pytest

from stopping.errors import OutOfDomain
from stopping.model import validate
from stopping.monte_carlo import (
    SimEstimate, block_stream, check_extremum, default_t_max, estimate_value,
    estimate_value_with_thresholds, overshoot_ks, sample_extrema, simulate_path, simulate_paths,
)
from stopping.value_function import build_model, value_at

ASYMMETRIC = build_model(validate((1, 3, 3, 1, 1)))
SYMMETRIC = build_model(validate((1, 1, 1, 1, 1)))


def test_block_streams_are_reproducible_and_distinct():
    first = block_stream(42, 0).random(5)
    assert np.array_equal(first, block_stream(42, 0).random(5))
    assert not np.array_equal(first, block_stream(42, 1).random(5))
    assert not np.array_equal(first, block_stream(43, 0).random(5))


def test_path_started_outside_stops_immediately():
    params, s = ASYMMETRIC.params, ASYMMETRIC.solution
    for start in (-s.x1 - 0.5, -s.x1, s.x2, s.x2 + 1.0):
        outcome = simulate_path(params, start, -s.x1, s.x2, block_stream(1, 0), default_t_max(params))
        assert outcome.exit_time == 0.0
        assert not outcome.truncated
        assert outcome.discounted_payoff == abs(start)


def test_single_path_exits_beyond_a_threshold():
    params, s = SYMMETRIC.params, SYMMETRIC.solution
    outcome = simulate_path(params, 0.0, -s.x1, s.x2, block_stream(7, 0), default_t_max(params))
    assert outcome.exit_time > 0.0
    assert outcome.exit_position <= -s.x1 or outcome.exit_position >= s.x2
    assert outcome.discounted_payoff == pytest.approx(
        math.exp(-params.r * outcome.exit_time) * abs(outcome.exit_position))


def test_tiny_horizon_truncates():
    params, s = SYMMETRIC.params, SYMMETRIC.solution
    paths = simulate_paths(params, 0.0, -s.x1, s.x2, block_stream(3, 0), 1000, t_max=1e-6)
    assert paths.truncated.sum() > 990
    assert np.all(np.isnan(paths.exit_time[paths.truncated]))
    with pytest.raises(OutOfDomain):
        simulate_path(params, 0.0, 1.0, -1.0, block_stream(3, 0), 1.0)


def test_estimate_independent_of_worker_count():
    params, s = ASYMMETRIC.params, ASYMMETRIC.solution
    single = estimate_value(params, s, 0.0, 20_000, seed=42, workers=1, block_size=4096)
    pooled = estimate_value(params, s, 0.0, 20_000, seed=42, workers=3, block_size=4096)
    assert single == pooled


def test_estimates_agree_with_value_function():
    for model in (ASYMMETRIC, SYMMETRIC):
        s = model.solution
        for start in (-s.x1, -s.x1 / 2.0, 0.0, s.x2 / 2.0, s.x2):
            estimate = estimate_value(model.params, s, start, 200_000, seed=42, block_size=50_000)
            value = value_at(model, start)
            assert abs(estimate.mean - value) <= 4.0 * estimate.stderr + 1e-9 * max(1.0, value)
            assert estimate.truncated_count == 0
            assert not estimate.flagged


def test_perturbed_thresholds_do_no_better():
    for model in (ASYMMETRIC, SYMMETRIC):
        s = model.solution
        value = value_at(model, 0.0)
        for lower, upper in ((-s.x1 - 0.2, s.x2), (-s.x1 + 0.2, s.x2), (-s.x1, s.x2 - 0.2), (-s.x1, s.x2 + 0.2),
                             (-s.x1 - 0.2, s.x2 + 0.2), (-s.x1 + 0.2, s.x2 - 0.2)):
            estimate = estimate_value_with_thresholds(model.params, lower, upper, 0.0, 200_000, seed=42)
            assert estimate.mean <= value + 3.0 * estimate.stderr
    with pytest.raises(OutOfDomain):
        estimate_value_with_thresholds(ASYMMETRIC.params, 0.5, 1.0, 0.0, 10, seed=1)


def test_single_path_estimate_has_zero_stderr():
    estimate = estimate_value(SYMMETRIC.params, SYMMETRIC.solution, 0.0, 1, seed=5)
    assert estimate.n == 1 and estimate.stderr == 0.0
    assert SimEstimate(mean=1.0, stderr=0.1, n=1000, truncated_count=1).flagged


def test_extrema_match_defective_exponential_laws():
    # same draws as `simulate --extrema` at its default size and seed
    for model in (ASYMMETRIC, SYMMETRIC):
        sample = sample_extrema(model.params, 1_000_000, seed=42)
        assert np.all(sample.supremum >= 0.0) and np.all(sample.infimum <= 0.0)
        for name, values, law in (('supremum', sample.supremum, model.supremum_law),
                                  ('infimum', sample.infimum, model.infimum_law)):
            check = check_extremum(name, values, law)
            assert abs(check.atom_frequency - law.atom_mass) <= 3.0 * check.atom_stderr
            assert check.ks_statistic < check.ks_critical
            assert check.passed


def test_overshoots_are_memoryless():
    for model in (ASYMMETRIC, SYMMETRIC):
        s = model.solution
        checks = overshoot_ks(model.params, -s.x1, s.x2, 0.0, 1_000_000, seed=42)
        assert [check.threshold for check in checks.values()] == ['upper', 'lower']
        for check in checks.values():
            assert check.count > 1000
            assert check.passed


if __name__ == "__main__":
    print("🧪 Testing Monte Carlo simulation...")
    test_block_streams_are_reproducible_and_distinct()
    test_path_started_outside_stops_immediately()
    test_single_path_exits_beyond_a_threshold()
    test_tiny_horizon_truncates()
    test_estimate_independent_of_worker_count()
    test_estimates_agree_with_value_function()
    test_perturbed_thresholds_do_no_better()
    test_single_path_estimate_has_zero_stderr()
    test_extrema_match_defective_exponential_laws()
    test_overshoots_are_memoryless()
    print("✅ Monte Carlo tests passed")
