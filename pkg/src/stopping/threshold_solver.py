"""
Threshold solver: the fixed point for the width u = x1 + x2 of the
continuation region, the thresholds x1, x2 and the coefficients D1, D2 of the
value function inside (-x1, x2).
"""

import sys
import math
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import optimize

from config import StoppingConfig
from stopping.errors import ConsistencyFailure, OutOfDomain, SolverFailure
from stopping.extrema_laws import WHConstants, constants as wh_constants
from stopping.model import ModelParams, RootPair, psi, solve_roots

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Solution:
    u: float    # width of the continuation region
    x1: float   # magnitude of the lower threshold
    x2: float   # upper threshold
    D1: float
    D2: float


@dataclass(frozen=True)
class SolutionResiduals:
    """Every identity the solution must satisfy, as absolute residuals"""
    root_negative: float
    root_positive: float
    root_margin: float
    fixed_point: float
    alternative_equation: float
    threshold_sum: float
    system_first: float
    system_second: float
    lower_iff: float
    upper_iff: float
    d1_identity: float
    bracket_lower: float
    bracket_upper: float
    within_bracket: bool
    x1_above_E1: bool
    x2_above_E2: bool
    coefficients_positive: bool

    def worst_identity(self):
        return max(self.fixed_point, self.alternative_equation, self.threshold_sum,
                   self.system_first, self.system_second, self.lower_iff,
                   self.upper_iff, self.d1_identity)


def fixed_point_rhs(constants: WHConstants, roots: RootPair, u: float) -> float:
    """Right-hand side of the scalar equation whose unique positive root is u"""
    if u < 0.0:
        raise OutOfDomain(f"u={u!r} must be non-negative")
    c = constants
    e1 = math.exp(-roots.r1 * u)
    e2 = math.exp(-roots.r2 * u)
    e12 = e1 * e2
    numerator = (c.E1 + c.E2 + (c.E1 * c.G2 + c.E2 * c.G1) * e12
                 + c.E1 * c.F2 * e1 + c.E2 * c.F1 * e2)
    return numerator / (1.0 - c.G1 * c.G2 * e12)


def _x1_expression(constants: WHConstants, roots: RootPair, u: float) -> float:
    c = constants
    e2 = math.exp(-roots.r2 * u)
    e12 = math.exp(-(roots.r1 + roots.r2) * u)
    return (c.E1 * (1.0 - e12) + c.F1 * u * e2) / (1.0 + c.G1 * e12 + c.F1 * e2)


def _x2_expression(constants: WHConstants, roots: RootPair, u: float) -> float:
    c = constants
    e1 = math.exp(-roots.r1 * u)
    e12 = math.exp(-(roots.r1 + roots.r2) * u)
    return (c.E2 * (1.0 - e12) + c.F2 * u * e1) / (1.0 + c.G2 * e12 + c.F2 * e1)


def alternative_rhs(constants: WHConstants, roots: RootPair, u: float) -> float:
    """Equivalent equation u = x1(u) + x2(u); shares its positive root with fixed_point_rhs"""
    return _x1_expression(constants, roots, u) + _x2_expression(constants, roots, u)


def bracket(constants: WHConstants) -> Tuple[float, float]:
    c = constants
    return c.E1 + c.E2, c.E1 * (1.0 + c.F2) + c.E2 * (1.0 + c.F1)


def one_sided_bounds(constants: WHConstants) -> Tuple[float, float]:
    """Roots of the one-sided averaging functions: lower bounds for x1 and x2"""
    return constants.E1, constants.E2


def solve_u(constants: WHConstants, roots: RootPair) -> float:
    """Unique root of u = fixed_point_rhs(u) inside the bracket, by Brent's method"""
    lo, hi = bracket(constants)
    h = lambda u: u - fixed_point_rhs(constants, roots, u)
    h_lo, h_hi = h(lo), h(hi)
    logger.debug(f"Fixed point bracket [{lo!r}, {hi!r}] with h=({h_lo!r}, {h_hi!r})")

    if h_lo > 0.0 or h_hi < 0.0:
        raise SolverFailure("fixed point bracket has no sign change", {
            'h_lower': h_lo, 'h_upper': h_hi})

    if h_lo == 0.0:
        u = lo
    elif h_hi == 0.0:
        u = hi
    else:
        u = optimize.brentq(h, lo, hi, xtol=1e-14, rtol=4 * sys.float_info.epsilon, maxiter=200)

    residual = abs(h(u))
    if residual > StoppingConfig.CLOSED_FORM_TOLERANCE * max(1.0, u):
        raise SolverFailure("fixed point residual exceeds tolerance", {'residual': residual, 'u': u})
    return u


def thresholds(constants: WHConstants, roots: RootPair, u: float) -> Tuple[float, float]:
    """x1, x2 from u; raises ConsistencyFailure unless they add up to u"""
    x1 = _x1_expression(constants, roots, u)
    x2 = _x2_expression(constants, roots, u)
    gap = abs(x1 + x2 - u)
    if gap > StoppingConfig.CONSISTENCY_TOLERANCE * max(1.0, u):
        raise ConsistencyFailure(f"x1 + x2 = {x1 + x2!r} deviates from u = {u!r} by {gap:.3e}")
    return x1, x2


def coefficients(x1: float, x2: float, roots: RootPair) -> Tuple[float, float]:
    """D1, D2 from the closed form, cross-checked against the 2x2 linear system"""
    if x1 <= 0.0 or x2 <= 0.0:
        raise OutOfDomain(f"thresholds must be positive, got x1={x1!r}, x2={x2!r}")
    u = x1 + x2
    e1 = math.exp(-roots.r1 * u)
    e2 = math.exp(-roots.r2 * u)
    denominator = 1.0 - e1 * e2
    D1 = (x1 - x2 * e2) / denominator
    D2 = (x2 - x1 * e1) / denominator

    system = np.array([[1.0, e2], [e1, 1.0]])
    direct = np.linalg.solve(system, np.array([x1, x2]))
    discrepancy = float(np.max(np.abs(direct - np.array([D1, D2]))))
    if discrepancy > StoppingConfig.CONSISTENCY_TOLERANCE * max(1.0, u):
        raise ConsistencyFailure(f"closed-form D1, D2 disagree with the linear system by {discrepancy:.3e}")
    return D1, D2


def residuals(params: ModelParams, roots: RootPair, constants: WHConstants,
              solution: Solution) -> SolutionResiduals:
    """Every identity the solution should satisfy, as absolute residuals and flags"""
    c, s = constants, solution
    a1, r1, r2 = params.alpha1, roots.r1, roots.r2
    e1 = math.exp(-r1 * s.u)
    e2 = math.exp(-r2 * s.u)
    lo, hi = bracket(constants)

    d1_rhs = ((a1 - r1) / a1) * (r2 / (a1 + r2) * s.x1 + 1.0 / a1 + a1 / (a1 + r2) * s.D1)

    return SolutionResiduals(
        root_negative=abs(psi(params, -r1) - params.r),
        root_positive=abs(psi(params, r2) - params.r),
        root_margin=roots.margin(params),
        fixed_point=abs(s.u - fixed_point_rhs(constants, roots, s.u)),
        alternative_equation=abs(s.u - alternative_rhs(constants, roots, s.u)),
        threshold_sum=abs(s.x1 + s.x2 - s.u),
        system_first=abs(s.D1 + s.D2 * e2 - s.x1),
        system_second=abs(s.D1 * e1 + s.D2 - s.x2),
        lower_iff=abs(s.x1 - (c.E1 + c.F1 * s.D2 * e2)),
        upper_iff=abs(s.x2 - (c.E2 + c.F2 * s.D1 * e1)),
        d1_identity=abs(s.D1 - d1_rhs),
        bracket_lower=lo,
        bracket_upper=hi,
        within_bracket=lo <= s.u <= hi,
        x1_above_E1=s.x1 >= c.E1,
        x2_above_E2=s.x2 >= c.E2,
        coefficients_positive=s.D1 > 0.0 and s.D2 > 0.0,
    )


def solve(params: ModelParams, roots: Optional[RootPair] = None,
          constants: Optional[WHConstants] = None) -> Solution:
    """Thresholds and coefficients for params, rejected unless every identity holds"""
    roots = roots or solve_roots(params)
    constants = constants or wh_constants(params, roots)

    u = solve_u(constants, roots)
    x1, x2 = thresholds(constants, roots, u)
    D1, D2 = coefficients(x1, x2, roots)
    solution = Solution(u=u, x1=x1, x2=x2, D1=D1, D2=D2)
    logger.debug(f"Solved {params}: {solution}")

    report = residuals(params, roots, constants, solution)
    if not report.coefficients_positive:
        logger.warning(f"Finding: non-positive coefficient D1={D1!r}, D2={D2!r} for {params}")
        raise ConsistencyFailure(f"coefficients must be positive, got D1={D1!r}, D2={D2!r}")
    if report.worst_identity() > StoppingConfig.CONSISTENCY_TOLERANCE * max(1.0, u):
        raise ConsistencyFailure(f"solution identities violated (worst residual {report.worst_identity():.3e})")
    return solution
