"""
Structured logging setup

Loggers wrap the stdlib logger of the same name and leave handlers alone;
only configure_logging (called by the CLI) touches the root logger.
"""

import logging
import sys

import structlog

from .config import settings

_json_output = settings.log_json
_json_renderer = structlog.processors.JSONRenderer()
_console_renderer = structlog.dev.ConsoleRenderer(colors=False)


def _render(logger, method_name, event_dict):
    renderer = _json_renderer if _json_output else _console_renderer
    return renderer(logger, method_name, event_dict)


_PROCESSORS = [
    structlog.stdlib.filter_by_level,
    structlog.stdlib.add_logger_name,
    structlog.stdlib.add_log_level,
    structlog.processors.TimeStamper(fmt="iso"),
    structlog.processors.StackInfoRenderer(),
    structlog.processors.format_exc_info,
    _render,
]


def configure_logging(level: str = None, json: bool = None) -> None:
    """Route log output to stderr at the given level"""
    global _json_output

    level = (level or settings.log_level).upper()
    _json_output = settings.log_json if json is None else json

    logging.basicConfig(
        format="%(message)s",
        stream=sys.stderr,
        level=getattr(logging, level, logging.INFO),
        force=True,
    )


def get_logger(name: str):
    return structlog.wrap_logger(
        logging.getLogger(name),
        processors=_PROCESSORS,
        wrapper_class=structlog.stdlib.BoundLogger,
    )
