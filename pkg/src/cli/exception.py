from enum import IntEnum

from src.services.management.exceptions import (
    ConfigurationError,
    InputError,
    PreconditionError,
    ResourceCapError,
    ScopeError,
    ToolkitError,
)


class ExitCode(IntEnum):
    OK = 0
    CHECKS_FAILED = 1
    CONFIGURATION = 2
    SCOPE = 3
    RESOURCE = 4
    TOOLKIT = 5


def exit_code_for(exc: ToolkitError) -> ExitCode:
    """Exit status of a run aborted by a toolkit error"""
    if isinstance(exc, ConfigurationError):
        return ExitCode.CONFIGURATION
    if isinstance(exc, (ScopeError, PreconditionError, InputError)):
        return ExitCode.SCOPE
    if isinstance(exc, ResourceCapError):
        return ExitCode.RESOURCE
    return ExitCode.TOOLKIT


def exit_code_for_summary(summary: bool) -> ExitCode:
    return ExitCode.OK if summary else ExitCode.CHECKS_FAILED
