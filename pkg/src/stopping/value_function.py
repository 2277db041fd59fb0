"""
Value function, averaging functions and the numerical verification of the
hypotheses under which V is the value of the stopping problem.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from config import StoppingConfig
from stopping.errors import OutOfDomain
from stopping.extrema_laws import (
    ExtremaLaw, Orientation, WHConstants, constants as wh_constants,
    law_of_infimum, law_of_supremum, TRUNCATION_RATES,
)
from stopping.model import ModelParams, RootPair, solve_roots
from stopping.threshold_solver import Solution, coefficients, solve
from stopping.utils.quadrature import integrate_adaptive

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ValueModel:
    params: ModelParams
    roots: RootPair
    constants: WHConstants
    solution: Solution

    @property
    def infimum_law(self) -> ExtremaLaw:
        return law_of_infimum(self.params, self.roots)

    @property
    def supremum_law(self) -> ExtremaLaw:
        return law_of_supremum(self.params, self.roots)


@dataclass(frozen=True)
class GridSpec:
    interior_points: int = StoppingConfig.INTERIOR_POINTS
    exterior_points: int = StoppingConfig.EXTERIOR_POINTS
    exterior_scales: float = StoppingConfig.EXTERIOR_SCALES


@dataclass
class VerificationReport:
    representation_sup_error: float
    majorant_min_gap: float
    q1_monotone: bool
    q2_monotone: bool
    q1_continuous_at_threshold: bool
    q2_continuous_at_threshold: bool
    q1_threshold_residual: float
    q2_threshold_residual: float
    interior_points: int
    exterior_points: int
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = bool(
            self.representation_sup_error <= StoppingConfig.REPRESENTATION_TOLERANCE
            and self.majorant_min_gap >= -StoppingConfig.MAJORANT_TOLERANCE
            and self.q1_monotone and self.q2_monotone
            and self.q1_continuous_at_threshold and self.q2_continuous_at_threshold
        )


def build_model(params: ModelParams) -> ValueModel:
    roots = solve_roots(params)
    consts = wh_constants(params, roots)
    solution = solve(params, roots=roots, constants=consts)
    return ValueModel(params=params, roots=roots, constants=consts, solution=solution)


def model_from_solution(params: ModelParams, solution: Solution) -> ValueModel:
    """Attach a stored solution to freshly derived roots and constants"""
    roots = solve_roots(params)
    return ValueModel(params=params, roots=roots, constants=wh_constants(params, roots), solution=solution)


def perturb_solution(model: ValueModel, dx2: float) -> ValueModel:
    """Shift the upper threshold and refit D1, D2 (a deliberately wrong solution)"""
    s = model.solution
    x2 = s.x2 + dx2
    D1, D2 = coefficients(s.x1, x2, model.roots)
    return replace(model, solution=Solution(u=s.x1 + x2, x1=s.x1, x2=x2, D1=D1, D2=D2))


# Averaging functions

def _q1_branch(model: ValueModel, x):
    s, c = model.solution, model.constants
    return -x - c.E1 - c.F1 * s.D2 * np.exp(model.roots.r2 * (x - s.x2))


def _q2_branch(model: ValueModel, x):
    s, c = model.solution, model.constants
    return x - c.E2 - c.F2 * s.D1 * np.exp(-model.roots.r1 * (x + s.x1))


def q1_values(model: ValueModel, x):
    x = np.asarray(x, dtype=float)
    return np.where(x < -model.solution.x1, _q1_branch(model, x), 0.0)


def q2_values(model: ValueModel, x):
    x = np.asarray(x, dtype=float)
    return np.where(x > model.solution.x2, _q2_branch(model, x), 0.0)


def q1(model: ValueModel, x: float) -> float:
    return float(q1_values(model, x))


def q2(model: ValueModel, x: float) -> float:
    return float(q2_values(model, x))


# Value function

def values(model: ValueModel, x):
    """Vectorised V over an array of starting points"""
    s, roots = model.solution, model.roots
    x = np.asarray(x, dtype=float)
    inside = s.D1 * np.exp(-roots.r1 * (x + s.x1)) + s.D2 * np.exp(roots.r2 * (x - s.x2))
    return np.where(x < -s.x1, -x, np.where(x > s.x2, x, inside))


def value_at(model: ValueModel, x: float) -> float:
    return float(values(model, x))


# Expected averaging functions

def expected_q1_closed(model: ValueModel, x: float) -> float:
    s = model.solution
    if x < -s.x1:
        raise OutOfDomain(f"closed form of E_x Q1(I) holds for x >= {-s.x1!r}, got {x!r}")
    return float(s.D1 * np.exp(-model.roots.r1 * (x + s.x1)))


def expected_q2_closed(model: ValueModel, x: float) -> float:
    s = model.solution
    if x > s.x2:
        raise OutOfDomain(f"closed form of E_x Q2(M) holds for x <= {s.x2!r}, got {x!r}")
    return float(s.D2 * np.exp(model.roots.r2 * (x - s.x2)))


def expected_q_quadrature(model: ValueModel, x: float,
                          which: Union[Orientation, str]) -> float:
    """E_x Q1(I) or E_x Q2(M) by integrating against the extremum's law

    The integral starts where the averaging function leaves zero, so each
    integrand is a single smooth branch.
    """
    which = Orientation(which)
    s = model.solution
    if which is Orientation.INFIMUM:
        law, branch, atom_value = model.infimum_law, _q1_branch, q1(model, x)
        start = max(0.0, x + s.x1)
        shift = -1.0
    else:
        law, branch, atom_value = model.supremum_law, _q2_branch, q2(model, x)
        start = max(0.0, s.x2 - x)
        shift = 1.0

    weight = (1.0 - law.atom_mass) * law.rate

    def integrand(t):
        return branch(model, x + shift * t) * weight * np.exp(-law.rate * t)

    continuous = integrate_adaptive(
        integrand, start, start + TRUNCATION_RATES / law.rate,
        tol=StoppingConfig.QUADRATURE_TOLERANCE, fail_tol=StoppingConfig.QUADRATURE_FAILURE)
    return law.atom_mass * atom_value + continuous


# Verification

def exterior_grid(model: ValueModel, grid_spec: GridSpec):
    s, c = model.solution, model.constants
    lower_count = grid_spec.exterior_points // 2
    lower = np.linspace(-s.x1 - grid_spec.exterior_scales * c.E1, -s.x1, lower_count)
    upper = np.linspace(s.x2, s.x2 + grid_spec.exterior_scales * c.E2,
                        grid_spec.exterior_points - lower_count)
    return lower, upper


def interior_grid(model: ValueModel, grid_spec: GridSpec):
    s = model.solution
    return np.linspace(-s.x1, s.x2, grid_spec.interior_points)


def verify_hypotheses(model: ValueModel, grid_spec: Optional[GridSpec] = None) -> VerificationReport:
    grid_spec = grid_spec or GridSpec()
    s, c = model.solution, model.constants
    lower, upper = exterior_grid(model, grid_spec)

    representation = 0.0
    for x in np.concatenate([lower, upper]):
        total = (expected_q_quadrature(model, x, Orientation.INFIMUM)
                 + expected_q_quadrature(model, x, Orientation.SUPREMUM))
        representation = max(representation, abs(total - abs(x)))

    interior = interior_grid(model, grid_spec)
    gap = float(np.min(values(model, interior) - np.abs(interior)))

    scale = StoppingConfig.CLOSED_FORM_TOLERANCE * max(1.0, s.u)
    q1_slopes = np.diff(_q1_branch(model, lower))
    q2_slopes = np.diff(_q2_branch(model, upper))
    q1_residual = abs(float(_q1_branch(model, -s.x1)))
    q2_residual = abs(float(_q2_branch(model, s.x2)))

    report = VerificationReport(
        representation_sup_error=float(representation),
        majorant_min_gap=gap,
        q1_monotone=bool(np.all(q1_slopes <= scale)),
        q2_monotone=bool(np.all(q2_slopes >= -scale)),
        q1_continuous_at_threshold=q1_residual <= scale,
        q2_continuous_at_threshold=q2_residual <= scale,
        q1_threshold_residual=q1_residual,
        q2_threshold_residual=q2_residual,
        interior_points=len(interior),
        exterior_points=len(lower) + len(upper),
    )
    if report.passed:
        logger.info(f"Hypotheses verified: representation error {representation:.3e}, majorant gap {gap:.3e}")
    else:
        logger.warning(f"Verification failed: {report}")
    return report
