#!/usr/bin/env python3
"""
Tests for the laws of the supremum and infimum and the derived constants
"""
import sys
import os
import math

# Add src directory to Python path
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), '..', 'src'))

import numpy as np
import pytest

from stopping.errors import OutOfDomain, OutOfSupport
from stopping.extrema_laws import (
    Orientation, constants, density, law_of_infimum, law_of_supremum, moment_by_quadrature,
)
from stopping.model import psi, solve_roots, validate


def solved(raw):
    params = validate(raw)
    roots = solve_roots(params)
    return params, roots


def test_asymmetric_laws_and_constants():
    params, roots = solved((1, 3, 3, 1, 1))
    sup, inf = law_of_supremum(params, roots), law_of_infimum(params, roots)
    assert sup.atom_mass == pytest.approx((1.0 + math.sqrt(1.6)) / 3.0, abs=1e-14)
    assert inf.atom_mass == pytest.approx(math.sqrt(1.6) - 1.0, abs=1e-14)
    assert sup.rate == roots.r2 and inf.rate == roots.r1

    c = constants(params, roots)
    assert c.E1 == pytest.approx(2.774852, abs=1e-6)
    assert c.E2 == pytest.approx(0.108185, abs=1e-6)
    assert c.F1 == pytest.approx(2.92495, abs=1e-5)
    assert c.F2 == pytest.approx(1.026334, abs=1e-6)
    assert c.F1 == pytest.approx(1.0 + c.G1, abs=1e-15)
    assert c.F2 == pytest.approx(1.0 + c.G2, abs=1e-15)
    assert c.G1 * c.G2 < 1.0


def test_symmetric_constants_closed_form():
    params, roots = solved((1, 1, 1, 1, 1))
    c = constants(params, roots)
    assert c.E1 == c.E2 == pytest.approx(math.sqrt(3.0) - 1.0, abs=1e-14)
    assert c.F1 == c.F2 == pytest.approx(3.0 - math.sqrt(3.0), abs=1e-14)
    assert c.G1 == pytest.approx(2.0 - math.sqrt(3.0), abs=1e-14)


def test_density_support_and_cdf():
    params, roots = solved((1, 3, 3, 1, 1))
    sup, inf = law_of_supremum(params, roots), law_of_infimum(params, roots)
    assert density(sup, 0.5) == pytest.approx((1 - sup.atom_mass) * sup.rate * math.exp(-sup.rate * 0.5))
    with pytest.raises(OutOfSupport):
        density(sup, -0.1)
    with pytest.raises(OutOfSupport):
        inf.density(0.1)
    assert sup.cdf(0.0) == pytest.approx(sup.atom_mass)
    assert sup.cdf(-1.0) == 0.0
    assert inf.cdf(0.0) == 1.0
    assert inf.cdf(-1e9) == pytest.approx(0.0)


def test_means_and_moments_by_quadrature():
    for raw in [(1, 3, 3, 1, 1), (1, 1, 1, 1, 1), (0.7, 2.5, 4.0, 0.3, 0.4)]:
        params, roots = solved(raw)
        for law in (law_of_supremum(params, roots), law_of_infimum(params, roots)):
            assert moment_by_quadrature(law, lambda x: x) == pytest.approx(law.mean(), abs=1e-9)
            assert moment_by_quadrature(law, lambda x: np.ones_like(x)) == pytest.approx(1.0, abs=1e-9)
            z = 0.4 * law.rate * law.sign
            assert moment_by_quadrature(law, lambda x: np.exp(z * x)) == pytest.approx(
                law.exponential_moment(z), abs=1e-9)


def test_constants_are_moments_of_the_extrema():
    rng = np.random.default_rng(23)
    cases = [(1, 3, 3, 1, 1), (1, 1, 1, 1, 1)] + [tuple(rng.uniform(0.5, 3.0, size=5)) for _ in range(20)]
    for raw in cases:
        params, roots = solved(raw)
        sup, inf = law_of_supremum(params, roots), law_of_infimum(params, roots)
        c = constants(params, roots)

        assert c.E1 == pytest.approx(-inf.mean(), rel=1e-12)
        assert c.E2 == pytest.approx(sup.mean(), rel=1e-12)
        assert c.E1 == pytest.approx(-moment_by_quadrature(inf, lambda x: x), abs=1e-10 * max(1.0, c.E1))
        assert c.E2 == pytest.approx(moment_by_quadrature(sup, lambda x: x), abs=1e-10 * max(1.0, c.E2))

        r1, r2 = roots.r1, roots.r2
        assert 1.0 / moment_by_quadrature(inf, lambda x: np.exp(r2 * x)) == pytest.approx(
            c.F1, abs=1e-10 * c.F1)
        assert 1.0 / moment_by_quadrature(sup, lambda x: np.exp(-r1 * x)) == pytest.approx(
            c.F2, abs=1e-10 * c.F2)
        assert c.F1 == pytest.approx(1.0 / inf.exponential_moment(r2), rel=1e-12)
        assert c.F2 == pytest.approx(1.0 / sup.exponential_moment(-r1), rel=1e-12)


def test_g_constants_positive_with_product_below_one():
    rng = np.random.default_rng(41)
    for _ in range(2000):
        params, roots = solved(np.exp(rng.uniform(np.log(0.05), np.log(20.0), size=5)))
        c = constants(params, roots)
        assert c.E1 > 0.0 and c.E2 > 0.0
        assert c.G1 > 0.0 and c.G2 > 0.0
        assert c.G1 * c.G2 < 1.0


def test_exponential_moment_outside_domain():
    params, roots = solved((1, 3, 3, 1, 1))
    with pytest.raises(OutOfDomain):
        law_of_supremum(params, roots).exponential_moment(roots.r2)
    with pytest.raises(OutOfDomain):
        law_of_infimum(params, roots).exponential_moment(-roots.r1)


def test_extrema_factorise_the_killed_transform():
    rng = np.random.default_rng(11)
    for _ in range(50):
        params, roots = solved(rng.uniform(0.2, 5.0, size=5))
        sup, inf = law_of_supremum(params, roots), law_of_infimum(params, roots)
        for z in np.linspace(-0.9 * roots.r1, 0.9 * roots.r2, 7):
            product = sup.exponential_moment(z) * inf.exponential_moment(z)
            assert product == pytest.approx(params.r / (params.r - psi(params, z)), rel=1e-10)


def test_sample_matches_atom():
    params, roots = solved((1, 3, 3, 1, 1))
    law = law_of_supremum(params, roots)
    draws = law.sample(np.random.default_rng(5), 200_000)
    assert np.all(draws >= 0.0)
    stderr = math.sqrt(law.atom_mass * (1 - law.atom_mass) / len(draws))
    assert abs(np.mean(draws == 0.0) - law.atom_mass) < 5 * stderr
    assert law_of_infimum(params, roots).orientation is Orientation.INFIMUM


if __name__ == "__main__":
    print("🧪 Testing extrema laws...")
    test_asymmetric_laws_and_constants()
    test_symmetric_constants_closed_form()
    test_density_support_and_cdf()
    test_means_and_moments_by_quadrature()
    test_constants_are_moments_of_the_extrema()
    test_g_constants_positive_with_product_below_one()
    test_exponential_moment_outside_domain()
    test_extrema_factorise_the_killed_transform()
    test_sample_matches_atom()
    print("✅ Extrema law tests passed")
