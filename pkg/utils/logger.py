"""
Logging utilities for the interview script toolkit
"""
import logging
import sys
from pathlib import Path
from logging.handlers import RotatingFileHandler
from typing import Optional, Union


def setup_logger(name: Optional[str] = None, level: str = "INFO", debug: bool = False,
                 log_dir: Optional[Union[str, Path]] = "logs") -> logging.Logger:
    """
    Setup logger with console and file output.

    ``name=None`` configures the root logger, which every class logger in the
    toolkit propagates to. The console writes to stderr so that reports on
    stdout stay machine-readable. ``log_dir=None`` disables the file handler.
    """

    logger = logging.getLogger(name)

    if debug:
        level = "DEBUG"
    logger.setLevel(getattr(logging, level.upper()))

    logger.handlers.clear()

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.DEBUG if debug else getattr(logging, level.upper()))
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_dir is not None:
        log_path = Path(log_dir)
        log_path.mkdir(parents=True, exist_ok=True)

        file_handler = RotatingFileHandler(
            log_path / f"{name or 'interview_scripts'}.log",
            maxBytes=10*1024*1024,  # 10MB
            backupCount=5,
            encoding="utf-8",
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    if name is not None:
        logger.propagate = False

    return logger
