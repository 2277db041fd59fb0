"""
Laws of the overall supremum M and infimum I up to an independent Exp(r) time.

Both are defective exponentials: an atom at zero plus an exponential density on
the half-line of the matching sign. The atom is always carried separately from
the continuous part.
"""

import enum
import math
import logging
from dataclasses import dataclass

import numpy as np

from config import StoppingConfig
from stopping.errors import OutOfDomain, OutOfSupport
from stopping.model import ModelParams, RootPair
from stopping.utils.quadrature import integrate_adaptive

logger = logging.getLogger(__name__)

TRUNCATION_RATES = 40.0  # continuous part integrated over [0, 40/rate]


class Orientation(enum.Enum):
    SUPREMUM = 'supremum'
    INFIMUM = 'infimum'


@dataclass(frozen=True)
class ExtremaLaw:
    atom_mass: float
    rate: float
    orientation: Orientation

    @property
    def sign(self):
        return 1.0 if self.orientation is Orientation.SUPREMUM else -1.0

    def in_support(self, x):
        return x >= 0.0 if self.orientation is Orientation.SUPREMUM else x <= 0.0

    def density(self, x: float) -> float:
        """Continuous part only; the atom is read from atom_mass"""
        if not self.in_support(x):
            raise OutOfSupport(f"x={x!r} outside the support of the {self.orientation.value} law")
        return (1.0 - self.atom_mass) * self.rate * math.exp(-self.rate * abs(x))

    def cdf(self, x: float) -> float:
        if self.orientation is Orientation.SUPREMUM:
            if x < 0.0:
                return 0.0
            return 1.0 - (1.0 - self.atom_mass) * math.exp(-self.rate * x)
        if x >= 0.0:
            return 1.0
        return (1.0 - self.atom_mass) * math.exp(self.rate * x)

    def mean(self) -> float:
        return self.sign * (1.0 - self.atom_mass) / self.rate

    def exponential_moment(self, z: float) -> float:
        """E e^{zM} for the supremum, E e^{zI} for the infimum"""
        s = self.sign * z
        if s >= self.rate:
            raise OutOfDomain(f"exponential moment of order {z!r} is infinite")
        return self.atom_mass + (1.0 - self.atom_mass) * self.rate / (self.rate - s)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        atoms = rng.random(n) < self.atom_mass
        magnitudes = rng.standard_exponential(n) / self.rate
        return np.where(atoms, 0.0, self.sign * magnitudes)


@dataclass(frozen=True)
class WHConstants:
    E1: float
    E2: float
    F1: float
    F2: float
    G1: float
    G2: float


def law_of_supremum(params: ModelParams, roots: RootPair) -> ExtremaLaw:
    """Law of the supremum up to an Exp(r) time: atom r2/alpha2 at 0, Exp(r2) tail"""
    return ExtremaLaw(atom_mass=roots.r2 / params.alpha2, rate=roots.r2,
                      orientation=Orientation.SUPREMUM)


def law_of_infimum(params: ModelParams, roots: RootPair) -> ExtremaLaw:
    """Mirror of law_of_supremum on the negative half-line with rate r1"""
    return ExtremaLaw(atom_mass=roots.r1 / params.alpha1, rate=roots.r1,
                      orientation=Orientation.INFIMUM)


def density(law: ExtremaLaw, x: float) -> float:
    return law.density(x)


def constants(params: ModelParams, roots: RootPair) -> WHConstants:
    """E1 = -E[I], E2 = E[M], F1 = 1/E[exp(r2 I)], F2 = 1/E[exp(-r1 M)] for infimum I and supremum M"""
    a1, a2 = params.alpha1, params.alpha2
    r1, r2 = roots.r1, roots.r2

    E1 = 1.0 / r1 - 1.0 / a1
    E2 = 1.0 / r2 - 1.0 / a2
    F1 = (a1 / r1) * (r1 + r2) / (a1 + r2)
    F2 = (a2 / r2) * (r1 + r2) / (r1 + a2)
    G1 = F1 - 1.0
    G2 = F2 - 1.0

    result = WHConstants(E1=E1, E2=E2, F1=F1, F2=F2, G1=G1, G2=G2)
    logger.debug(f"Wiener-Hopf constants: {result}")
    if not G1 * G2 < 1.0:
        logger.warning(f"G1*G2={G1 * G2!r} is not below 1")
    return result


def moment_by_quadrature(law: ExtremaLaw, func) -> float:
    """E func(extremum): atom weight at zero plus the truncated continuous part"""
    weight = 1.0 - law.atom_mass

    def integrand(s):
        return func(law.sign * s) * weight * law.rate * np.exp(-law.rate * s)

    continuous = integrate_adaptive(
        integrand, 0.0, TRUNCATION_RATES / law.rate,
        tol=StoppingConfig.QUADRATURE_TOLERANCE, fail_tol=StoppingConfig.QUADRATURE_FAILURE)
    return law.atom_mass * float(func(0.0)) + continuous
