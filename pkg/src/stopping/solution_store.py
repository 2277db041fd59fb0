"""
Solution Store for the stopping solver
Persists a solved parameter set as JSON and loads it back for verification
"""

import json
import os
import logging
from typing import Tuple

from stopping.errors import ConfigError
from stopping.model import ModelParams, validate
from stopping.threshold_solver import Solution
from stopping.utils.formatting import render_json

logger = logging.getLogger(__name__)

SOLUTION_FIELDS = ('u', 'x1', 'x2', 'D1', 'D2')


class SolutionStore:
    """JSON file holding one parameter set and its solution"""

    def __init__(self, filename="data/solution.json"):
        self.filename = filename

    def save(self, document: dict):
        """Write any document carrying 'params' and 'solution' sections"""
        if 'params' not in document or 'solution' not in document:
            raise ConfigError("a solution document needs 'params' and 'solution' sections")
        directory = os.path.dirname(self.filename)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(self.filename, 'w', encoding='utf-8', newline='') as f:
            f.write(render_json(document))
        logger.info(f"Saved solution to {self.filename}")

    def load(self) -> Tuple[ModelParams, Solution]:
        """Read the file back into validated parameters and a Solution"""
        try:
            with open(self.filename, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"solution file {self.filename} is not valid JSON: {e}")

        if not isinstance(data, dict) or 'params' not in data or 'solution' not in data:
            raise ConfigError(f"solution file {self.filename} needs 'params' and 'solution' sections")

        params = validate(data['params'])
        stored = data['solution']
        missing = [name for name in SOLUTION_FIELDS if name not in stored]
        if missing:
            raise ConfigError(f"solution file {self.filename} is missing {', '.join(missing)}")

        try:
            solution = Solution(**{name: float(stored[name]) for name in SOLUTION_FIELDS})
        except (TypeError, ValueError) as e:
            raise ConfigError(f"solution file {self.filename} holds a non-numeric value: {e}")

        logger.info(f"Loaded solution for {params} from {self.filename}")
        return params, solution


def load_solution(path: str) -> Tuple[ModelParams, Solution]:
    return SolutionStore(path).load()
