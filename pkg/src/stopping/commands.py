"""
Command handlers for the stopping solver CLI
Each handler builds a structured document from module reports and an exit code
"""

import sys
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from config import StoppingConfig
from stopping.error_handlers import EXIT_OK, EXIT_VERIFICATION
from stopping.errors import ConfigError
from stopping.monte_carlo import (
    check_extremum, estimate_value, estimate_value_with_thresholds, overshoot_ks, sample_extrema,
)
from stopping.smooth_pasting import Threshold, angle_report, interior_smoothness_check
from stopping.solution_store import SolutionStore, load_solution
from stopping.threshold_solver import one_sided_bounds, residuals
from stopping.utils.formatting import plain, render_curve_csv, render_json, render_table
from stopping.value_function import (
    ValueModel, build_model, model_from_solution, perturb_solution, value_at, values, verify_hypotheses,
)
from stopping.run_config import RunConfig

logger = logging.getLogger(__name__)

INTERIOR_MARGIN = 1e-3


@dataclass
class CommandResult:
    command: str
    document: dict
    exit_code: int = EXIT_OK
    body: Optional[str] = None   # raw payload (curve CSV) written instead of the document


class StoppingCommands:
    """Class containing all command handlers"""

    def __init__(self):
        self.handlers = {}
        self.register_commands()

    def register_commands(self):
        self.handlers['solve'] = self.cmd_solve
        self.handlers['verify'] = self.cmd_verify
        self.handlers['angle'] = self.cmd_angle
        self.handlers['simulate'] = self.cmd_simulate
        self.handlers['curve'] = self.cmd_curve

    def run(self, config: RunConfig, stream=None) -> int:
        """Dispatch one command, write its output and return the exit code"""
        logger.info(f"Running {config.command}")
        result = self.handlers[config.command](config)
        self.emit(result, config, stream)
        logger.info(f"{config.command} finished with exit code {result.exit_code}")
        return result.exit_code

    # Output

    def emit(self, result: CommandResult, config: RunConfig, stream=None):
        stream = stream or sys.stdout

        if result.body is not None:
            if config.output:
                self._write(config.output, result.body)
                stream.write(self._render(result.document, config.format))
            else:
                stream.write(result.body)
            return

        if config.output and result.command == 'solve' and config.format == 'json':
            # a JSON solve is a solution file that verify --solution reads back
            SolutionStore(config.output).save(result.document)
            return

        text = self._render(result.document, config.format)
        if config.output:
            self._write(config.output, text)
        else:
            stream.write(text)

    @staticmethod
    def _render(document, output_format):
        return render_json(document) if output_format == 'json' else render_table(document)

    @staticmethod
    def _write(path, text):
        with open(path, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        logger.info(f"Wrote {path}")

    # Model construction

    def _model(self, config: RunConfig) -> ValueModel:
        if config.solution:
            params, solution = load_solution(config.solution)
            if config.params is not None and config.params != params:
                raise ConfigError(f"parameters {config.params} disagree with the stored solution {params}")
            model = model_from_solution(params, solution)
        else:
            model = build_model(config.params)

        if config.corrupt_x2 is not None:
            logger.warning(f"Shifting x2 by {config.corrupt_x2!r}; the solution is deliberately wrong")
            model = perturb_solution(model, config.corrupt_x2)
        return model

    @staticmethod
    def _base_document(command: str, model: ValueModel) -> dict:
        return {
            'command': command,
            'params': model.params.as_dict(),
            'solution': plain(model.solution),
        }

    # Commands

    def cmd_solve(self, config: RunConfig) -> CommandResult:
        model = self._model(config)
        report = residuals(model.params, model.roots, model.constants, model.solution)
        x1_bound, x2_bound = one_sided_bounds(model.constants)

        document = self._base_document('solve', model)
        document['roots'] = plain(model.roots)
        document['constants'] = plain(model.constants)
        document['one_sided_bounds'] = {'x1': x1_bound, 'x2': x2_bound}
        document['residuals'] = plain(report)
        return CommandResult('solve', document)

    def _angle_section(self, model: ValueModel):
        reports = [angle_report(model, threshold) for threshold in Threshold]
        checks = {
            'angle_identities': all(report.identities_agree for report in reports),
            'angles_positive': all(report.direct_jump > 0.0 for report in reports),
            'finite_differences': all(
                abs(report.direct_jump - report.finite_difference_jump)
                <= StoppingConfig.INTERIOR_SMOOTHNESS_TOLERANCE for report in reports),
            'moment_conditions': all(report.moment_condition_holds for report in reports),
        }
        return reports, checks

    def cmd_verify(self, config: RunConfig) -> CommandResult:
        model = self._model(config)
        s = model.solution
        hypotheses = verify_hypotheses(model)
        identities = residuals(model.params, model.roots, model.constants, s)
        angles, checks = self._angle_section(model)

        checks['hypotheses'] = hypotheses.passed
        checks['identities'] = (
            identities.worst_identity() <= StoppingConfig.CONSISTENCY_TOLERANCE * max(1.0, s.u)
            and identities.coefficients_positive
            and identities.x1_above_E1 and identities.x2_above_E2
        )
        passed = all(checks.values())
        if not passed:
            failing = ', '.join(name for name, ok in checks.items() if not ok)
            logger.warning(f"Verification failed: {failing}")

        document = self._base_document('verify', model)
        document['verification'] = plain(hypotheses)
        document['residuals'] = plain(identities)
        document['angles'] = plain(angles)
        document['checks'] = checks
        document['passed'] = passed
        return CommandResult('verify', document, EXIT_OK if passed else EXIT_VERIFICATION)

    def cmd_angle(self, config: RunConfig) -> CommandResult:
        model = self._model(config)
        s = model.solution
        angles, checks = self._angle_section(model)

        interior = []
        for x in np.linspace(-s.x1, s.x2, 7)[1:-1]:
            if not (-s.x1 + INTERIOR_MARGIN <= x <= s.x2 - INTERIOR_MARGIN):
                continue
            jump = interior_smoothness_check(model, float(x))
            interior.append({
                'x': float(x),
                'jump': jump,
                'smooth': abs(jump) <= StoppingConfig.INTERIOR_SMOOTHNESS_TOLERANCE,
            })
        checks['interior_smooth'] = all(point['smooth'] for point in interior)
        passed = all(checks.values())

        document = self._base_document('angle', model)
        document['angles'] = plain(angles)
        document['interior'] = interior
        document['checks'] = checks
        document['passed'] = passed
        return CommandResult('angle', document, EXIT_OK if passed else EXIT_VERIFICATION)

    def _perturbed_rules(self, model: ValueModel, delta: float):
        """Two-sided rules with one or both thresholds moved by delta"""
        s = model.solution
        rules = [
            ('x1-', -(s.x1 - delta), s.x2),
            ('x1+', -(s.x1 + delta), s.x2),
            ('x2-', -s.x1, s.x2 - delta),
            ('x2+', -s.x1, s.x2 + delta),
            ('both+', -(s.x1 + delta), s.x2 + delta),
            ('both-', -(s.x1 - delta), s.x2 - delta),
        ]
        return [(name, lower, upper) for name, lower, upper in rules if lower < upper]

    def cmd_simulate(self, config: RunConfig) -> CommandResult:
        model = self._model(config)
        params, s = model.params, model.solution
        starts = config.starts or (-s.x1, -s.x1 / 2.0, 0.0, s.x2 / 2.0, s.x2)

        estimates = []
        for start in starts:
            estimate = estimate_value(params, s, start, config.n, config.seed, workers=config.workers)
            value = value_at(model, start)
            gate = (StoppingConfig.VALUE_GATE_SIGMAS * estimate.stderr
                    + StoppingConfig.VALUE_GATE_FLOOR * max(1.0, abs(value)))
            passed = abs(estimate.mean - value) <= gate and not estimate.flagged
            if not passed:
                logger.warning(f"Estimate {estimate.mean!r} at start {start!r} misses V={value!r} (gate {gate:.3e})")
            estimates.append({
                'start': start,
                'value': value,
                'estimate': plain(estimate),
                'truncated_fraction': estimate.truncated_fraction,
                'flagged': estimate.flagged,
                'passed': passed,
            })

        document = self._base_document('simulate', model)
        document['n'] = config.n
        document['seed'] = config.seed
        document['estimates'] = estimates
        all_passed = all(item['passed'] for item in estimates)

        if config.perturb is not None:
            perturbed = []
            for start in starts:
                value = value_at(model, start)
                for name, lower, upper in self._perturbed_rules(model, config.perturb):
                    if not lower < start < upper:
                        continue
                    estimate = estimate_value_with_thresholds(
                        params, lower, upper, start, config.n, config.seed, workers=config.workers)
                    dominated = estimate.mean <= value + StoppingConfig.DOMINANCE_GATE_SIGMAS * estimate.stderr
                    perturbed.append({
                        'start': start,
                        'rule': name,
                        'lower': lower,
                        'upper': upper,
                        'value': value,
                        'estimate': plain(estimate),
                        'passed': dominated,
                    })
            document['perturbed'] = perturbed
            all_passed = all_passed and all(item['passed'] for item in perturbed)

        if config.extrema:
            sample = sample_extrema(params, config.n, config.seed, workers=config.workers)
            extrema = [check_extremum('supremum', sample.supremum, model.supremum_law),
                       check_extremum('infimum', sample.infimum, model.infimum_law)]
            overshoot = overshoot_ks(params, -s.x1, s.x2, 0.0, config.n, config.seed, workers=config.workers)
            document['extrema'] = [dict(plain(check), passed=check.passed) for check in extrema]
            document['overshoots'] = [dict(plain(check), passed=check.passed) for check in overshoot.values()]
            all_passed = (all_passed and all(check.passed for check in extrema)
                          and all(check.passed for check in overshoot.values()))

        document['passed'] = all_passed
        return CommandResult('simulate', document, EXIT_OK if all_passed else EXIT_VERIFICATION)

    def cmd_curve(self, config: RunConfig) -> CommandResult:
        model = self._model(config)
        grid = np.linspace(config.grid_min, config.grid_max, config.grid_points)
        curve = values(model, grid)
        payoff = np.abs(grid)

        document = self._base_document('curve', model)
        document['rows'] = int(config.grid_points)
        document['grid_min'] = config.grid_min
        document['grid_max'] = config.grid_max
        document['output'] = config.output
        return CommandResult('curve', document, body=render_curve_csv(grid, curve, payoff))
