"""
Core package for the interview script toolkit
"""
from .config_manager import AppConfig, ConfigManager
from .base_action import BaseAction
from .exceptions import BackendError, ConfigurationError, ExitStatus, ToolkitError

__all__ = [
    "AppConfig",
    "ConfigManager",
    "BaseAction",
    "BackendError",
    "ConfigurationError",
    "ExitStatus",
    "ToolkitError",
]
