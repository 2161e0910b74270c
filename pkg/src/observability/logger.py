import logging
import json
import os
import sys
from datetime import datetime
from typing import Any, Dict, Optional

_LEVELS = {"DEBUG": logging.DEBUG, "INFO": logging.INFO, "WARNING": logging.WARNING, "ERROR": logging.ERROR}


def _env_level() -> int:
    return _LEVELS.get(os.getenv("ENCLOSE_LOG_LEVEL", "WARNING").upper(), logging.WARNING)


class StructuredLogger:
    """
    Structured JSON logger for enclosure runs.
    One JSON object per record on stderr; stdout is reserved for result tables.
    """

    def __init__(self, name: str, level: Optional[int] = None):
        self.logger = logging.getLogger(name)
        self.logger.setLevel(level if level is not None else _env_level())
        self.logger.propagate = False

        if not self.logger.handlers:
            handler = logging.StreamHandler(sys.stderr)
            self.logger.addHandler(handler)

        self.trace_id: Optional[str] = None

    def set_trace_id(self, trace_id: Optional[str]):
        """Set run id for record correlation"""
        self.trace_id = trace_id

    def set_level(self, level: int):
        self.logger.setLevel(level)

    def _format_message(self, level: str, message: str, **kwargs: Any) -> str:
        log_entry = {
            "timestamp": datetime.now().isoformat(),
            "level": level,
            "logger": self.logger.name,
            "message": message,
            "trace_id": self.trace_id or "no-trace",
            **kwargs,
        }
        return json.dumps(log_entry, default=str)

    def info(self, message: str, **kwargs: Any):
        if self.logger.isEnabledFor(logging.INFO):
            self.logger.info(self._format_message("INFO", message, **kwargs))

    def error(self, message: str, **kwargs: Any):
        self.logger.error(self._format_message("ERROR", message, **kwargs))

    def warning(self, message: str, **kwargs: Any):
        if self.logger.isEnabledFor(logging.WARNING):
            self.logger.warning(self._format_message("WARNING", message, **kwargs))

    def debug(self, message: str, **kwargs: Any):
        if self.logger.isEnabledFor(logging.DEBUG):
            self.logger.debug(self._format_message("DEBUG", message, **kwargs))


# Global logger registry
_loggers: Dict[str, StructuredLogger] = {}


def get_logger(name: str) -> StructuredLogger:
    """Get or create a structured logger"""
    if name not in _loggers:
        _loggers[name] = StructuredLogger(name)
    return _loggers[name]


def set_trace_id_for_all(trace_id: Optional[str]):
    """Stamp a run id on every registered logger"""
    for logger in _loggers.values():
        logger.set_trace_id(trace_id)


def set_level_for_all(level: int):
    """Used by --verbose"""
    for logger in _loggers.values():
        logger.set_level(level)
