"""
Error taxonomy shared by the physics services, the harness and the CLI.

Every failure carries a message and the process exit code the CLI should use,
the same way service errors elsewhere carry an HTTP status code.
"""

from __future__ import annotations

from typing import Optional

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class StaError(Exception):
    code = "numerical_error"
    default_exit_code = EXIT_NUMERICAL

    def __init__(self, message: str, exit_code: Optional[int] = None):
        self.message = message
        self.exit_code = self.default_exit_code if exit_code is None else exit_code
        super().__init__(message)


class ConfigError(StaError):
    code = "config_error"
    default_exit_code = EXIT_CONFIG


class MissingBaselineError(StaError):
    code = "missing_baseline"
    default_exit_code = EXIT_CONFIG


class DegenerateInputError(StaError):
    code = "degenerate_input"


class InvalidSpecError(StaError):
    code = "invalid_spec"


class StepTooCoarseError(StaError):
    code = "step_too_coarse"


class SingularityError(StaError):
    code = "singularity"


class SingularStartError(StaError):
    code = "singular_start"


class StiffnessError(StaError):
    code = "stiffness"


class ToleranceNotMetError(StaError):
    code = "tolerance_not_met"


class NonFiniteStateError(StaError):
    code = "non_finite_state"


class RecurrenceError(StaError):
    code = "recurrence"


class BoundaryDressingError(StaError):
    code = "boundary_dressing"
