"""
Shared error types and process exit statuses for the interview script toolkit
"""
from enum import IntEnum


class ExitStatus(IntEnum):
    """Exit statuses returned by every command"""
    SUCCESS = 0
    VALIDATION_ERROR = 1
    BACKEND_ERROR = 2
    CONFIGURATION_ERROR = 3


class ToolkitError(Exception):
    """Base class for all toolkit errors; carries the exit status it maps to"""
    exit_status = ExitStatus.VALIDATION_ERROR


class ConfigurationError(ToolkitError):
    """Invalid or missing configuration, including credentials"""
    exit_status = ExitStatus.CONFIGURATION_ERROR


class BackendError(ToolkitError):
    """Chat-completion backend failure (network, HTTP status, malformed reply)"""
    exit_status = ExitStatus.BACKEND_ERROR
