"""
Error handling module for the stopping solver CLI
Maps exceptions to exit codes and user-facing messages
"""

import sys
import logging

from stopping.errors import (
    ConfigError, ConsistencyFailure, NonFiniteParameter, NonPositiveParameter,
    QuadratureNonConvergence, SolverFailure, ValidationError,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VERIFICATION = 2
EXIT_INTERNAL = 3


class ErrorHandlers:
    """Class containing all error handling functionality"""

    @staticmethod
    def exit_code_for(error: BaseException) -> int:
        if isinstance(error, (ValidationError, OSError)):
            return EXIT_INPUT
        # solver, consistency and quadrature failures as well as anything unexpected
        return EXIT_INTERNAL

    @staticmethod
    def describe(error: BaseException) -> str:
        """One-line message for standard error"""
        if isinstance(error, (NonPositiveParameter, NonFiniteParameter)):
            return f"invalid parameter {error.field}: {error}"
        if isinstance(error, ConfigError):
            return f"configuration error: {error}"
        if isinstance(error, ValidationError):
            return f"invalid input: {error}"
        if isinstance(error, OSError):
            target = f" ({error.filename})" if error.filename else ""
            return f"cannot access file{target}: {error.strerror or error}"
        if isinstance(error, SolverFailure):
            return f"solver failure: {error}"
        if isinstance(error, ConsistencyFailure):
            return f"consistency failure: {error}"
        if isinstance(error, QuadratureNonConvergence):
            return f"quadrature did not converge: {error}"
        return f"unexpected error: {error}"

    @classmethod
    def handle(cls, error: BaseException, command: str = None) -> int:
        """Report an error from a command and return its exit code"""
        code = cls.exit_code_for(error)
        message = cls.describe(error)

        if code == EXIT_INPUT:
            logger.error(f"Command {command} rejected its input: {error}")
        elif isinstance(error, (SolverFailure, ConsistencyFailure, QuadratureNonConvergence)):
            logger.error(f"Command {command} failed: {error}")
        else:
            # Log the full error for debugging
            logger.error(f"Unexpected error in {command}: {error}", exc_info=True)

        print(f"error: {message}", file=sys.stderr)
        return code
