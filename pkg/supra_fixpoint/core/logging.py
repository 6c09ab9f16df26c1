import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from typing import Any, Dict, Optional

_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

# Create the package logger; it does not propagate to the root logger
supra_logger = logging.getLogger("supra_fixpoint")
supra_logger.propagate = False
supra_logger.setLevel(logging.WARNING)

formatter = logging.Formatter(
    "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S",
)

# Reports go to stdout, so log lines go to stderr
console_handler = logging.StreamHandler(sys.stderr)
console_handler.setFormatter(formatter)
supra_logger.addHandler(console_handler)

file_handler: Optional[RotatingFileHandler] = None
log_file = os.getenv("SUPRA_LOG_FILE")
if log_file:
    log_dir = os.path.dirname(log_file)
    if log_dir and not os.path.exists(log_dir):
        os.makedirs(log_dir)

    # 10 MB max size, keep 5 backup files
    file_handler = RotatingFileHandler(
        log_file,
        maxBytes=10 * 1024 * 1024,
        backupCount=5,
    )
    file_handler.setFormatter(formatter)
    supra_logger.addHandler(file_handler)

log_level = os.getenv("SUPRA_LOG_LEVEL", "WARNING").upper()
if log_level in _LEVELS:
    supra_logger.setLevel(getattr(logging, log_level))


def setup_logging(level: Optional[str] = None) -> logging.Logger:
    """Set the package log level (used by the CLI ``--log-level`` flag).

    Args:
        level: One of DEBUG, INFO, WARNING, ERROR, CRITICAL; ignored when unknown

    Returns:
        The package logger
    """
    if level and level.upper() in _LEVELS:
        supra_logger.setLevel(getattr(logging, level.upper()))
    return supra_logger


def get_logger(name: str, level: Optional[str] = None) -> logging.Logger:
    """Create a logger for a specific module.

    Module loggers are children of ``supra_fixpoint`` and inherit its handlers
    and level unless a level is given explicitly.

    Args:
        name: The name of the module (typically __name__)
        level: Optional log level override

    Returns:
        A configured logger instance
    """
    if not name.startswith("supra_fixpoint"):
        name = f"supra_fixpoint.{name}"
    logger = logging.getLogger(name)

    if level and level.upper() in _LEVELS:
        logger.setLevel(getattr(logging, level.upper()))

    return logger


def log_structured(logger: logging.Logger, level: str, message: str, data: Dict[str, Any]) -> None:
    """Log a message with structured data.

    Args:
        logger: The logger instance
        level: The log level (debug, info, warning, error, critical)
        message: The log message
        data: Dictionary of structured data to include
    """
    numeric = getattr(logging, level.upper(), logging.INFO)
    if logger.isEnabledFor(numeric):
        logger.log(numeric, f"{message} - {data}")
