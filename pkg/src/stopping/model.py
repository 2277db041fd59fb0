"""
Model parameters, characteristic exponent and the roots of psi(z) = r
"""

import sys
import math
import logging
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

from scipy import optimize

from config import StoppingConfig
from stopping.errors import (
    NonFiniteParameter, NonPositiveParameter, OutOfDomain, SolverFailure, ValidationError,
)

logger = logging.getLogger(__name__)

PARAM_NAMES = ('alpha1', 'lambda1', 'alpha2', 'lambda2', 'r')


@dataclass(frozen=True)
class ModelParams:
    """Jump rates, jump intensities and discount rate of the process"""
    alpha1: float   # rate of downward jump sizes
    lambda1: float  # intensity of downward jumps
    alpha2: float   # rate of upward jump sizes
    lambda2: float  # intensity of upward jumps
    r: float        # discount rate

    def as_tuple(self):
        return (self.alpha1, self.lambda1, self.alpha2, self.lambda2, self.r)

    def as_dict(self):
        return dict(zip(PARAM_NAMES, self.as_tuple()))

    @property
    def total_intensity(self):
        return self.lambda1 + self.lambda2

    @property
    def is_symmetric(self):
        return self.alpha1 == self.alpha2 and self.lambda1 == self.lambda2


@dataclass(frozen=True)
class RootPair:
    """Magnitudes of the roots -r1 < 0 < r2 of psi(z) = r"""
    r1: float
    r2: float

    def margin(self, params: ModelParams) -> float:
        """Distance of the closest root to its pole"""
        return min(params.alpha1 - self.r1, params.alpha2 - self.r2)


def validate(raw: Union[Sequence[float], Mapping[str, float]]) -> ModelParams:
    """Validate a raw five-tuple (or mapping keyed by parameter name)"""
    if isinstance(raw, Mapping):
        missing = [name for name in PARAM_NAMES if name not in raw]
        if missing:
            raise ValidationError(f"missing parameter: {missing[0]}")
        values = [raw[name] for name in PARAM_NAMES]
    else:
        values = list(raw)
        if len(values) != len(PARAM_NAMES):
            raise OutOfDomain(f"expected {len(PARAM_NAMES)} parameters {PARAM_NAMES}, got {len(values)}")

    checked = []
    for name, value in zip(PARAM_NAMES, values):
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise NonFiniteParameter(name, value)
        if not math.isfinite(value):
            raise NonFiniteParameter(name, value)
        if value <= 0.0:
            raise NonPositiveParameter(name, value)
        checked.append(value)

    return ModelParams(*checked)


def psi(params: ModelParams, z: float) -> float:
    """Characteristic exponent -l1 z/(a1+z) + l2 z/(a2-z) on (-alpha1, alpha2)"""
    if not (-params.alpha1 < z < params.alpha2):
        raise OutOfDomain(f"z={z!r} outside ({-params.alpha1!r}, {params.alpha2!r})")
    return -params.lambda1 * z / (params.alpha1 + z) + params.lambda2 * z / (params.alpha2 - z)


def quadratic_coefficients(params: ModelParams):
    """Coefficients of psi(z) = r after clearing the denominators"""
    a1, l1, a2, l2, r = params.as_tuple()
    a = l1 + l2 + r
    b = l2 * a1 - l1 * a2 - r * (a2 - a1)
    c = -r * a1 * a2
    return a, b, c


def psi_derivative(params: ModelParams, z: float) -> float:
    if not (-params.alpha1 < z < params.alpha2):
        raise OutOfDomain(f"z={z!r} outside ({-params.alpha1!r}, {params.alpha2!r})")
    return (-params.lambda1 * params.alpha1 / (params.alpha1 + z) ** 2
            + params.lambda2 * params.alpha2 / (params.alpha2 - z) ** 2)


def _polish(params: ModelParams, z: float) -> float:
    """One Newton step on psi(z) = r, kept only if it lowers the residual"""
    step = (psi(params, z) - params.r) / psi_derivative(params, z)
    candidate = z - step
    if not (-params.alpha1 < candidate < params.alpha2):
        return z
    if abs(psi(params, candidate) - params.r) < abs(psi(params, z) - params.r):
        return candidate
    return z


def residual_scale(params: ModelParams, z: float) -> float:
    """Largest magnitude among r and the two terms of psi(z); rounding error scales with it"""
    downward = params.lambda1 * z / (params.alpha1 + z)
    upward = params.lambda2 * z / (params.alpha2 - z)
    return max(params.r, abs(downward), abs(upward))


def _root_residuals(params: ModelParams, roots: RootPair):
    """Residuals of psi(z) = r relative to the size of the cancelling terms"""
    return {
        'negative_root': abs(psi(params, -roots.r1) - params.r) / residual_scale(params, -roots.r1),
        'positive_root': abs(psi(params, roots.r2) - params.r) / residual_scale(params, roots.r2),
    }


def bisect_roots(params: ModelParams) -> RootPair:
    """Locate both roots by bisection on psi itself (cross-check path)"""
    f = lambda z: psi(params, z) - params.r
    shrink = 1.0 - 1e-12
    lo, hi = -params.alpha1 * shrink, params.alpha2 * shrink

    if f(lo) <= 0.0 or f(hi) <= 0.0:
        raise SolverFailure("psi does not exceed r near its poles", {
            'left_pole_gap': f(lo), 'right_pole_gap': f(hi)})

    negative = optimize.bisect(f, lo, 0.0, xtol=1e-15, rtol=4 * sys.float_info.epsilon, maxiter=400)
    positive = optimize.bisect(f, 0.0, hi, xtol=1e-15, rtol=4 * sys.float_info.epsilon, maxiter=400)
    return RootPair(r1=-negative, r2=positive)


def solve_roots(params: ModelParams) -> RootPair:
    """Roots of psi(z) = r from the quadratic, checked against bisection"""
    a, b, c = quadratic_coefficients(params)
    discriminant = b * b - 4.0 * a * c  # c < 0 keeps this positive
    q = -0.5 * (b + math.copysign(math.sqrt(discriminant), b))
    first, second = q / a, c / q
    negative, positive = min(first, second), max(first, second)
    if -params.alpha1 < negative < 0.0 < positive < params.alpha2:
        negative, positive = _polish(params, negative), _polish(params, positive)
    if params.is_symmetric:
        # psi is odd here, so the roots are exact mirror images
        magnitude = 0.5 * (positive - negative)
        negative, positive = -magnitude, magnitude
    roots = RootPair(r1=-negative, r2=positive)
    logger.debug(f"Quadratic roots: r1={roots.r1!r}, r2={roots.r2!r}")

    if not (0.0 < roots.r1 < params.alpha1 and 0.0 < roots.r2 < params.alpha2):
        raise SolverFailure("roots fall outside their brackets", {
            'r1': roots.r1, 'r2': roots.r2})

    residuals = _root_residuals(params, roots)
    if max(residuals.values()) > StoppingConfig.ROOT_TOLERANCE:
        raise SolverFailure("root residuals exceed tolerance", residuals)

    check = bisect_roots(params)
    disagreement = max(abs(check.r1 - roots.r1), abs(check.r2 - roots.r2))
    if disagreement > StoppingConfig.CONSISTENCY_TOLERANCE:
        raise SolverFailure("quadratic and bisection roots disagree", {'disagreement': disagreement})

    if roots.margin(params) < 1e-8:
        logger.warning(f"Root within {roots.margin(params):.3e} of a pole; constants are ill-conditioned")

    return roots
