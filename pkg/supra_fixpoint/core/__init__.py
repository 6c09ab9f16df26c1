"""Core module for the package.

This module contains the ambient functionality shared by every service:
- Configuration management
- Logging
- Exception handling
- Report serialization utilities
"""

# This directory contains modules for:
# - config.py: Settings and environment variables
# - logging.py: Logging setup and configuration
# - exceptions.py: Custom exception classes and error reports
# - error_handlers.py: Error handling for CLI command handlers
# - utils.py: Report serialization helpers

from supra_fixpoint.core.config import settings, get_setting, get_settings_dict
from supra_fixpoint.core.logging import setup_logging, supra_logger, get_logger, log_structured
from supra_fixpoint.core.exceptions import (
    SupraError,
    DomainError,
    PreconditionError,
    InfeasibleError,
    NumericOverflowError,
    DivergenceError,
    ExpressionEvaluationError,
    CapExceededError,
    ConfigurationError,
    ExpressionSyntaxError,
)
from supra_fixpoint.core.error_handlers import create_error_response, with_error_handling
from supra_fixpoint.core.utils import dump_report, write_report
