"""
@brief      Console and per-run file logging of the library
"""
import logging
import os
import sys
from datetime import datetime
from typing import Dict, Optional

from colorlog import ColoredFormatter, StreamHandler

RUN_LOG_FILE_NAME = "run.log"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

_SHORT_FMT = "%(log_color)s%(levelname)-8s %(cyan)s%(asctime)s %(reset)s%(message)s"
_LONG_FMT = (
    "%(log_color)s%(levelname)-8s %(cyan)s%(asctime)s "
    "[%(name)s:%(lineno)d] %(reset)s%(message)s"
)


class LevelFormatter(ColoredFormatter):
    """Colored formatter with one format string per log level. Levels without an entry use
    ``default_fmt``."""

    def __init__(
        self,
        level_fmts: Dict[int, str],
        default_fmt: str,
        datefmt: Optional[str] = None,
        no_color: bool = False,
    ):
        super().__init__(fmt=default_fmt, datefmt=datefmt, style="%", no_color=no_color)
        self.default_fmt = default_fmt
        self.level_fmts = dict(level_fmts)

    def format(self, record: logging.LogRecord) -> str:
        self._style._fmt = self.level_fmts.get(record.levelno, self.default_fmt)
        try:
            return super().format(record)
        finally:
            self._style._fmt = self.default_fmt


def add_colorlog_console_logger(logger: logging.Logger, log_level: int = logging.INFO):
    """Apply the library console format to ``logger``. INFO lines are short, all other levels
    name the emitting module and line."""
    handler = StreamHandler(stream=sys.stdout)
    handler.setFormatter(
        LevelFormatter({logging.INFO: _SHORT_FMT}, default_fmt=_LONG_FMT, datefmt=DATE_FORMAT)
    )
    logger.addHandler(handler)
    logger.setLevel(log_level)


def add_plain_console_logger(logger: logging.Logger, log_level: int = logging.INFO):
    """Console output without color escape sequences."""
    handler = logging.StreamHandler(stream=sys.stdout)
    handler.setFormatter(
        logging.Formatter(fmt="%(levelname)-8s %(asctime)s %(message)s", datefmt=DATE_FORMAT)
    )
    logger.addHandler(handler)
    logger.setLevel(log_level)


def add_run_file_logger(
    logger: logging.Logger, run_dir: str, log_level: int = logging.INFO
) -> logging.FileHandler:
    """Write everything the logger emits at ``log_level`` or above into ``run.log`` of a run
    directory. Returns the handler so it can be removed again after the run."""
    os.makedirs(run_dir, exist_ok=True)
    handler = logging.FileHandler(
        filename=os.path.join(run_dir, RUN_LOG_FILE_NAME), encoding="utf-8", mode="w"
    )
    handler.setLevel(log_level)
    handler.setFormatter(
        logging.Formatter(
            fmt="%(levelname)-8s: %(asctime)s.%(msecs)03d [%(name)s] %(message)s",
            datefmt=DATE_FORMAT,
        )
    )
    logger.addHandler(handler)
    if logger.level == logging.NOTSET or logger.level > log_level:
        logger.setLevel(log_level)
    return handler


def remove_run_file_logger(logger: logging.Logger, handler: Optional[logging.Handler]):
    if handler is None:
        return
    logger.removeHandler(handler)
    handler.close()


def get_current_time_string(ms_prec: bool) -> str:
    now = datetime.now()
    if ms_prec:
        return now.strftime(f"{DATE_FORMAT}.%f")[:-3]
    return now.strftime(DATE_FORMAT)
