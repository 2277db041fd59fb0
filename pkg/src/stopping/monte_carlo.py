"""
Exact event-driven simulation of the compound Poisson process.

Paths are constant between jumps, so first exit from an interval happens at a
jump epoch and no time discretisation is needed. Paths are simulated in fixed
blocks; block b draws from its own Philox stream keyed by (seed, b), so
results do not depend on how many workers process the blocks.
"""

import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats

from config import StoppingConfig
from stopping.errors import OutOfDomain
from stopping.extrema_laws import ExtremaLaw
from stopping.model import ModelParams
from stopping.threshold_solver import Solution

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PathOutcome:
    exit_time: Optional[float]   # None when the path hit the time cap
    exit_position: float
    discounted_payoff: float

    @property
    def truncated(self):
        return self.exit_time is None


@dataclass(frozen=True)
class SimEstimate:
    mean: float
    stderr: float
    n: int
    truncated_count: int
    truncation_bias_bound: float = 0.0

    @property
    def truncated_fraction(self):
        return self.truncated_count / self.n

    @property
    def flagged(self):
        return self.truncated_fraction > StoppingConfig.TRUNCATION_CEILING


@dataclass(frozen=True)
class BlockPaths:
    exit_time: np.ndarray        # nan where truncated
    exit_position: np.ndarray
    truncated: np.ndarray
    started_inside: np.ndarray


@dataclass(frozen=True)
class ExtremumCheck:
    name: str
    atom_frequency: float
    expected_atom: float
    atom_stderr: float
    continuous_count: int
    ks_statistic: float
    ks_critical: float
    ks_pvalue: float

    @property
    def atom_within_tolerance(self):
        return abs(self.atom_frequency - self.expected_atom) <= 3.0 * self.atom_stderr

    @property
    def ks_passed(self):
        return self.ks_statistic < self.ks_critical

    @property
    def passed(self):
        return self.atom_within_tolerance and self.ks_passed


@dataclass(frozen=True)
class ExtremaSample:
    n: int
    supremum: np.ndarray
    infimum: np.ndarray


def default_t_max(params: ModelParams) -> float:
    """Horizon at which an unfinished path is truncated, T_MAX_FACTOR mean discount times"""
    return StoppingConfig.T_MAX_FACTOR / params.r


def block_stream(seed: int, block_index: int) -> np.random.Generator:
    """Counter-based stream owned by one block of paths"""
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(block_index,))
    return np.random.Generator(np.random.Philox(sequence))


def _block_sizes(n: int, block_size: int):
    full, rest = divmod(n, block_size)
    return [block_size] * full + ([rest] if rest else [])


def _run_blocks(n, seed, workers, block_size, simulate_block):
    """Apply simulate_block(rng, size) to every block, results in block order"""
    sizes = _block_sizes(n, block_size)
    tasks = [(index, size) for index, size in enumerate(sizes)]

    def run(task):
        index, size = task
        return simulate_block(block_stream(seed, index), size)

    if workers <= 1 or len(tasks) <= 1:
        return [run(task) for task in tasks]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(run, tasks))


def _outside(position, lower, upper):
    return (position <= lower) | (position >= upper)


def simulate_path(params: ModelParams, start: float, lower: float, upper: float,
                  rng_stream: np.random.Generator, t_max: float) -> PathOutcome:
    """One path stopped at the first exit from (lower, upper)"""
    if not lower < upper or t_max <= 0.0:
        raise OutOfDomain(f"need lower < upper and t_max > 0, got ({lower!r}, {upper!r}), t_max={t_max!r}")

    intensity = params.total_intensity
    down_probability = params.lambda1 / intensity
    position, t = float(start), 0.0

    while not (position <= lower or position >= upper):
        t += rng_stream.standard_exponential() / intensity
        if t > t_max:
            return PathOutcome(exit_time=None, exit_position=position, discounted_payoff=0.0)
        if rng_stream.random() < down_probability:
            position -= rng_stream.standard_exponential() / params.alpha1
        else:
            position += rng_stream.standard_exponential() / params.alpha2

    return PathOutcome(exit_time=t, exit_position=position,
                       discounted_payoff=math.exp(-params.r * t) * abs(position))


def simulate_paths(params: ModelParams, start: float, lower: float, upper: float,
                   rng_stream: np.random.Generator, n: int, t_max: float) -> BlockPaths:
    """Vectorised form of simulate_path over n independent paths"""
    intensity = params.total_intensity
    down_probability = params.lambda1 / intensity

    position = np.full(n, float(start))
    t = np.zeros(n)
    exit_time = np.full(n, np.nan)
    truncated = np.zeros(n, dtype=bool)

    started_inside = ~_outside(position, lower, upper)
    exit_time[~started_inside] = 0.0
    active = np.flatnonzero(started_inside)

    while active.size:
        t_next = t[active] + rng_stream.standard_exponential(active.size) / intensity
        capped = t_next > t_max
        truncated[active[capped]] = True
        active, t_next = active[~capped], t_next[~capped]
        t[active] = t_next

        down = rng_stream.random(active.size) < down_probability
        sizes = rng_stream.standard_exponential(active.size) / np.where(down, params.alpha1, params.alpha2)
        position[active] += np.where(down, -sizes, sizes)

        exited = _outside(position[active], lower, upper)
        exit_time[active[exited]] = t[active[exited]]
        active = active[~exited]

    return BlockPaths(exit_time=exit_time, exit_position=position,
                      truncated=truncated, started_inside=started_inside)


def _discounted_payoffs(params: ModelParams, paths: BlockPaths) -> np.ndarray:
    times = np.where(paths.truncated, 0.0, paths.exit_time)
    payoff = np.exp(-params.r * times) * np.abs(paths.exit_position)
    return np.where(paths.truncated, 0.0, payoff)


def _estimate(params, lower, upper, start, n, seed, workers, block_size, t_max):
    if n < 1:
        raise OutOfDomain(f"path count must be at least 1, got {n!r}")
    t_max = t_max or default_t_max(params)
    workers = workers or StoppingConfig.WORKERS
    block_size = block_size or StoppingConfig.BLOCK_SIZE

    blocks = _run_blocks(n, seed, workers, block_size,
                         lambda rng, size: simulate_paths(params, start, lower, upper, rng, size, t_max))
    payoffs = np.concatenate([_discounted_payoffs(params, paths) for paths in blocks])
    truncated_count = int(sum(int(np.count_nonzero(paths.truncated)) for paths in blocks))

    mean = float(np.mean(payoffs))
    stderr = float(np.std(payoffs, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    per_path_bound = math.exp(-params.r * t_max) * (
        max(-lower, upper) + 1.0 / min(params.alpha1, params.alpha2) + abs(start))

    estimate = SimEstimate(mean=mean, stderr=stderr, n=n, truncated_count=truncated_count,
                           truncation_bias_bound=truncated_count / n * per_path_bound)
    if estimate.flagged:
        logger.warning(f"Truncated fraction {estimate.truncated_fraction:.3e} exceeds the ceiling at start {start!r}")
    logger.debug(f"Estimate at start {start!r} on ({lower!r}, {upper!r}): {estimate}")
    return estimate


def estimate_value(params: ModelParams, solution: Solution, start: float, n: int, seed: int,
                   workers: Optional[int] = None, block_size: Optional[int] = None,
                   t_max: Optional[float] = None) -> SimEstimate:
    """Discounted payoff of the rule that stops on leaving (-x1, x2)"""
    return _estimate(params, -solution.x1, solution.x2, start, n, seed, workers, block_size, t_max)


def estimate_value_with_thresholds(params: ModelParams, lower: float, upper: float, start: float,
                                   n: int, seed: int, workers: Optional[int] = None,
                                   block_size: Optional[int] = None,
                                   t_max: Optional[float] = None) -> SimEstimate:
    """Same estimator under an arbitrary two-sided rule, used to check that moved thresholds do no better"""
    if not lower < start < upper:
        raise OutOfDomain(f"start {start!r} must lie strictly inside ({lower!r}, {upper!r})")
    return _estimate(params, lower, upper, start, n, seed, workers, block_size, t_max)


def overshoots(params: ModelParams, lower: float, upper: float, start: float, n: int, seed: int,
               workers: Optional[int] = None, block_size: Optional[int] = None):
    """Overshoots beyond the upper and the lower threshold of paths started inside"""
    if not lower < start < upper:
        raise OutOfDomain(f"start {start!r} must lie strictly inside ({lower!r}, {upper!r})")
    t_max = default_t_max(params)
    blocks = _run_blocks(n, seed, workers or StoppingConfig.WORKERS, block_size or StoppingConfig.BLOCK_SIZE,
                         lambda rng, size: simulate_paths(params, start, lower, upper, rng, size, t_max))
    above, below = [], []
    for paths in blocks:
        counted = paths.started_inside & ~paths.truncated
        above.append(paths.exit_position[counted & (paths.exit_position >= upper)] - upper)
        below.append(lower - paths.exit_position[counted & (paths.exit_position <= lower)])
    return np.concatenate(above), np.concatenate(below)


@dataclass(frozen=True)
class OvershootCheck:
    threshold: str
    count: int
    ks_statistic: float
    ks_critical: float
    ks_pvalue: float

    @property
    def passed(self):
        return self.ks_statistic < self.ks_critical


def ks_against_exponential(sample: np.ndarray, rate: float):
    """KS statistic, 1% critical value and p-value of sample against Exp(rate)"""
    if len(sample) == 0:
        raise OutOfDomain("KS test needs at least one observation")
    statistic, pvalue = stats.kstest(sample, 'expon', args=(0.0, 1.0 / rate))
    critical = float(stats.kstwo.ppf(0.99, len(sample)))
    return float(statistic), critical, float(pvalue)


def overshoot_ks(params: ModelParams, lower: float, upper: float, start: float, n: int, seed: int,
                 workers: Optional[int] = None, block_size: Optional[int] = None):
    """Overshoots should be Exp(alpha2) above and Exp(alpha1) below by memorylessness"""
    above, below = overshoots(params, lower, upper, start, n, seed, workers, block_size)
    checks = {}
    for name, sample, rate in (('upper', above, params.alpha2), ('lower', below, params.alpha1)):
        statistic, critical, pvalue = ks_against_exponential(sample, rate)
        checks[name] = OvershootCheck(threshold=name, count=len(sample), ks_statistic=statistic,
                                      ks_critical=critical, ks_pvalue=pvalue)
    return checks


def _simulate_extrema_block(params: ModelParams, rng: np.random.Generator, n: int):
    intensity = params.total_intensity
    down_probability = params.lambda1 / intensity

    horizon = rng.standard_exponential(n) / params.r
    position = np.zeros(n)
    t = np.zeros(n)
    running_max = np.zeros(n)
    running_min = np.zeros(n)
    active = np.arange(n)

    while active.size:
        t_next = t[active] + rng.standard_exponential(active.size) / intensity
        alive = t_next <= horizon[active]
        active, t_next = active[alive], t_next[alive]
        t[active] = t_next

        down = rng.random(active.size) < down_probability
        sizes = rng.standard_exponential(active.size) / np.where(down, params.alpha1, params.alpha2)
        position[active] += np.where(down, -sizes, sizes)
        running_max[active] = np.maximum(running_max[active], position[active])
        running_min[active] = np.minimum(running_min[active], position[active])

    return running_max, running_min


def sample_extrema(params: ModelParams, n: int, seed: int, workers: Optional[int] = None,
                   block_size: Optional[int] = None) -> ExtremaSample:
    """Supremum and infimum from 0 up to an independent Exp(r) horizon"""
    if n < 1:
        raise OutOfDomain(f"path count must be at least 1, got {n!r}")
    blocks = _run_blocks(n, seed, workers or StoppingConfig.WORKERS, block_size or StoppingConfig.BLOCK_SIZE,
                         lambda rng, size: _simulate_extrema_block(params, rng, size))
    return ExtremaSample(n=n,
                         supremum=np.concatenate([block[0] for block in blocks]),
                         infimum=np.concatenate([block[1] for block in blocks]))


def check_extremum(name: str, values: np.ndarray, law: ExtremaLaw) -> ExtremumCheck:
    """Compare an empirical extremum with its defective exponential law"""
    n = len(values)
    frequency = float(np.mean(values == 0.0))
    continuous = np.abs(values[values != 0.0])
    statistic, critical, pvalue = ks_against_exponential(continuous, law.rate)
    return ExtremumCheck(
        name=name,
        atom_frequency=frequency,
        expected_atom=law.atom_mass,
        atom_stderr=math.sqrt(law.atom_mass * (1.0 - law.atom_mass) / n),
        continuous_count=len(continuous),
        ks_statistic=statistic,
        ks_critical=critical,
        ks_pvalue=pvalue,
    )
