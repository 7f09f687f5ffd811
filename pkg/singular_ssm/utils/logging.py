import logging
from datetime import datetime
from pathlib import Path

# Global logger instance
_logger = None

_FORMAT = '%(asctime)s - %(relative_path)s - %(levelname)s - %(message)s'
_DATEFMT = '%Y-%m-%d %H:%M:%S'


def get_logger(name: str = "singular_ssm") -> logging.Logger:
    """
    Get or create the package logger with file path tracking.

    Only a console handler is attached here; file logging is switched on by
    the command-line entry point through enable_file_logging().

    Args:
        name: Logger name (default: singular_ssm)

    Returns:
        Configured logger instance
    """
    global _logger

    if _logger is None:
        _logger = logging.getLogger(name)
        _logger.setLevel(logging.INFO)

        # Avoid duplicate handlers
        if not _logger.handlers:
            console_handler = logging.StreamHandler()
            console_handler.setLevel(logging.INFO)
            console_handler.setFormatter(logging.Formatter(_FORMAT, datefmt=_DATEFMT))
            _logger.addHandler(console_handler)

            # Add filter to inject relative path
            _logger.addFilter(RelativePathFilter())

    return _logger


def enable_file_logging(log_dir: str = "log", level: int = logging.INFO) -> Path:
    """
    Attach a timestamped file handler to the package logger.

    Args:
        log_dir: Directory for log files, created if missing
        level: Level of the file handler

    Returns:
        Path of the log file
    """
    logger = get_logger()

    log_path = Path(log_dir)
    log_path.mkdir(parents=True, exist_ok=True)
    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    log_file = log_path / f"singular_ssm_{timestamp}.log"

    for handler in logger.handlers:
        if isinstance(handler, logging.FileHandler) and Path(handler.baseFilename) == log_file.resolve():
            return log_file

    file_handler = logging.FileHandler(log_file)
    file_handler.setLevel(level)
    file_handler.setFormatter(logging.Formatter(_FORMAT, datefmt=_DATEFMT))
    logger.addHandler(file_handler)
    logger.info(f"File logging enabled: {log_file}")
    return log_file


def set_verbosity(verbose: bool) -> None:
    """Switch the package logger between INFO and DEBUG."""
    logger = get_logger()
    level = logging.DEBUG if verbose else logging.INFO
    logger.setLevel(level)
    for handler in logger.handlers:
        handler.setLevel(level)


class RelativePathFilter(logging.Filter):
    """Injects `relative_path`: the emitting file relative to the directory holding singular_ssm/."""

    _root = Path(__file__).resolve().parents[2]

    def filter(self, record: logging.LogRecord) -> bool:
        path = Path(record.pathname).resolve()
        record.relative_path = str(path.relative_to(self._root)) if path.is_relative_to(self._root) else record.filename
        return True
