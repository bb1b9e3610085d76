"""Test suite for logging setup."""
import logging
from logging.handlers import RotatingFileHandler

import pytest

from src.core.config import LoggingConfig
from src.core.exceptions import ConfigError
from src.core.logging import get_logger, setup_logging


@pytest.fixture(autouse=True)
def restore_root():
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    for handler in root.handlers:
        if handler not in handlers:
            handler.close()
    root.handlers, root.level = handlers, level
    logging.captureWarnings(False)


class TestSetupLogging:
    """Test cases for setup_logging."""

    def test_console_and_file(self, tmp_path):
        """Test that both handlers are installed and the log directory is created."""
        log_file = tmp_path / "logs" / "glstool.log"
        root = setup_logging(LoggingConfig(log_file=str(log_file), log_level="WARNING"))
        kinds = [type(h) for h in root.handlers]
        assert RotatingFileHandler in kinds
        assert logging.StreamHandler in kinds
        assert root.level == logging.WARNING
        assert log_file.parent.is_dir()

    def test_verbose(self, tmp_path):
        """Test that verbose mode lets DEBUG records through."""
        root = setup_logging(LoggingConfig(log_file=str(tmp_path / "x.log")), verbose=True)
        assert root.isEnabledFor(logging.DEBUG)

    def test_unknown_level(self, tmp_path):
        """Test that an unknown LOG_LEVEL raises ConfigError."""
        with pytest.raises(ConfigError, match="LOG_LEVEL"):
            setup_logging(LoggingConfig(log_file=str(tmp_path / "x.log"), log_level="chatty"))

    def test_unopenable_file(self, tmp_path):
        """Test that a blocked log path falls back to the console."""
        blocker = tmp_path / "blocked"
        blocker.write_text("")
        root = setup_logging(LoggingConfig(log_file=str(blocker / "glstool.log")))
        assert [type(h) for h in root.handlers] == [logging.StreamHandler]

    def test_records_reach_file(self, tmp_path):
        """Test that module loggers write to the log file."""
        log_file = tmp_path / "glstool.log"
        setup_logging(LoggingConfig(log_file=str(log_file)))
        get_logger("src.services.experiments").info("lp_scaling: pass")
        for handler in logging.getLogger().handlers:
            handler.flush()
        assert "lp_scaling: pass" in log_file.read_text()
