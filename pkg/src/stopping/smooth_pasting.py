"""
Angles of the value function at the thresholds.

The jump V'(x+) - V'(x-) at each threshold is computed from the piecewise
closed form and from the averaging-function identity (outward derivative of
the averaging function times the atom of the matching extremum). At the lower
threshold the identity is applied to the reflected process -X.
"""

import enum
import math
import logging
from dataclasses import dataclass

from config import StoppingConfig
from stopping.errors import OutOfDomain
from stopping.model import psi
from stopping.value_function import ValueModel, value_at

logger = logging.getLogger(__name__)

FD_STEP = 1e-4


class Threshold(enum.Enum):
    LOWER = 'lower'
    UPPER = 'upper'


@dataclass(frozen=True)
class AngleReport:
    threshold: Threshold
    direct_jump: float
    theorem_jump: float
    agreement_residual: float
    smooth_pasting_holds: bool
    atom_mass: float
    finite_difference_jump: float
    moment_alpha: float
    moment_condition_holds: bool

    @property
    def identities_agree(self):
        return self.agreement_residual <= StoppingConfig.ANGLE_TOLERANCE


def direct_jump(model: ValueModel, threshold: Threshold) -> float:
    """V'(x+) - V'(x-) differentiating the piecewise closed form"""
    s, r1, r2 = model.solution, model.roots.r1, model.roots.r2
    u = s.x1 + s.x2
    if Threshold(threshold) is Threshold.UPPER:
        inside = -r1 * s.D1 * math.exp(-r1 * u) + r2 * s.D2
        return 1.0 - inside
    inside = -r1 * s.D1 + r2 * s.D2 * math.exp(-r2 * u)
    return inside - (-1.0)


def theorem_jump(model: ValueModel, threshold: Threshold) -> float:
    """Outward derivative of the averaging function times the extremum's atom"""
    s, c, r1, r2 = model.solution, model.constants, model.roots.r1, model.roots.r2
    u = s.x1 + s.x2
    if Threshold(threshold) is Threshold.UPPER:
        slope = 1.0 + r1 * c.F2 * s.D1 * math.exp(-r1 * u)
        return slope * model.supremum_law.atom_mass
    slope = 1.0 + r2 * c.F1 * s.D2 * math.exp(-r2 * u)
    return slope * model.infimum_law.atom_mass


def one_sided_derivative(model: ValueModel, x: float, side: int, h: float = FD_STEP) -> float:
    """Richardson-extrapolated one-sided difference; side=+1 right, -1 left"""
    v0 = value_at(model, x)

    def difference(step):
        return side * (value_at(model, x + side * step) - v0) / step

    return 2.0 * difference(h / 2.0) - difference(h)


def finite_difference_jump(model: ValueModel, x: float, h: float = FD_STEP) -> float:
    return one_sided_derivative(model, x, 1, h) - one_sided_derivative(model, x, -1, h)


def interior_smoothness_check(model: ValueModel, x: float, h: float = FD_STEP) -> float:
    s = model.solution
    if not (-s.x1 + 1e-3 <= x <= s.x2 - 1e-3):
        raise OutOfDomain(f"x={x!r} must lie in the continuation region at least 1e-3 from the thresholds")
    return finite_difference_jump(model, x, h)


def exponential_moment_condition(model: ValueModel, threshold: Threshold):
    """Check E e^{aX_1} < e^r for a = r2/2 (upper) or the reflected process with a = r1/2"""
    if Threshold(threshold) is Threshold.UPPER:
        alpha = model.roots.r2 / 2.0
        exponent = psi(model.params, alpha)
    else:
        alpha = model.roots.r1 / 2.0
        exponent = psi(model.params, -alpha)
    return alpha, exponent < model.params.r


def angle_report(model: ValueModel, threshold: Threshold) -> AngleReport:
    threshold = Threshold(threshold)
    direct = direct_jump(model, threshold)
    via_theorem = theorem_jump(model, threshold)
    location = model.solution.x2 if threshold is Threshold.UPPER else -model.solution.x1
    atom = (model.supremum_law if threshold is Threshold.UPPER else model.infimum_law).atom_mass
    alpha, moment_ok = exponential_moment_condition(model, threshold)

    report = AngleReport(
        threshold=threshold,
        direct_jump=direct,
        theorem_jump=via_theorem,
        agreement_residual=abs(direct - via_theorem),
        smooth_pasting_holds=abs(direct) <= StoppingConfig.ANGLE_TOLERANCE,
        atom_mass=atom,
        finite_difference_jump=finite_difference_jump(model, location),
        moment_alpha=alpha,
        moment_condition_holds=moment_ok,
    )
    if not report.identities_agree:
        logger.warning(f"Finding: angle identities disagree at the {threshold.value} threshold: {report}")
    return report
