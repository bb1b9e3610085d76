"""Logging for the CLI, the harness and the numerical services.

Records go to the console and to a rotating file. Experiments may run on
worker threads, so file records carry the thread name. Python warnings
raised inside numpy/scipy (non-converged ``quad`` calls, overflow in power
iterations) are captured into the ``py.warnings`` logger instead of being
printed between report lines.
"""
import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional

from src.core.config import LoggingConfig
from src.core.exceptions import ConfigError

DATE_FORMAT = '%Y-%m-%d %H:%M:%S'
CONSOLE_FORMAT = '%(asctime)s [%(levelname)s] %(name)s: %(message)s'
FILE_FORMAT = '%(asctime)s [%(levelname)s] %(name)s (%(threadName)s) [%(filename)s:%(lineno)d] - %(message)s'
LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _level(name: str) -> int:
    level = name.strip().upper()
    if level not in LEVELS:
        raise ConfigError(f"LOG_LEVEL must be one of {', '.join(LEVELS)}, got {name!r}")
    return getattr(logging, level)


def setup_logging(config: Optional[LoggingConfig] = None, verbose: bool = False) -> logging.Logger:
    """
    Configure the root logger.

    Args:
        config: Logging configuration. If None, uses the global configuration.
        verbose: Show DEBUG records on the console as well.

    Returns:
        Configured root logger

    Raises:
        ConfigError: unknown LOG_LEVEL
    """
    if config is None:
        from src.core.config import get_config
        config = get_config().logging

    level = _level(config.log_level)
    logger = logging.getLogger()
    logger.setLevel(logging.DEBUG if verbose else level)
    for handler in logger.handlers:
        handler.close()
    logger.handlers = []

    console_handler = logging.StreamHandler()
    console_handler.setLevel(logging.DEBUG if verbose else level)
    console_handler.setFormatter(logging.Formatter(CONSOLE_FORMAT, datefmt=DATE_FORMAT))
    logger.addHandler(console_handler)

    try:
        Path(config.log_file).parent.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(
            config.log_file,
            maxBytes=config.log_max_bytes,
            backupCount=config.log_backup_count,
            encoding='utf-8'
        )
    except OSError as e:
        logger.warning(f"Cannot open log file {config.log_file} ({e}); logging to console only")
    else:
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(FILE_FORMAT, datefmt=DATE_FORMAT))
        logger.addHandler(file_handler)

    logging.captureWarnings(True)
    logger.debug(f"Logging to {config.log_file} at level {config.log_level}")
    return logger


def get_logger(name: str) -> logging.Logger:
    """Module-level logger, usually ``get_logger(__name__)``."""
    return logging.getLogger(name)
