# packages/shared/log.py
from __future__ import annotations

import logging
import sys
from typing import Optional

import structlog

from packages.shared.settings import settings

_configured = False


def _stderr_logger(*_args: object) -> structlog.PrintLogger:
    # resolved per call: sys.stderr may be swapped (capture, redirection) after configuration
    return structlog.PrintLogger(sys.stderr)


def configure_logging(level: Optional[str] = None, json: Optional[bool] = None) -> None:
    """Route structlog events to stderr; stdout stays free for command output."""
    global _configured
    level_name = (level or settings.LOG_LEVEL).upper()
    as_json = settings.LOG_JSON if json is None else json

    renderer = (
        structlog.processors.JSONRenderer(sort_keys=True)
        if as_json
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(
            logging.getLevelName(level_name)
        ),
        logger_factory=_stderr_logger,
        cache_logger_on_first_use=False,
    )
    _configured = True


def get_logger(name: str) -> structlog.typing.FilteringBoundLogger:
    if not _configured:
        configure_logging()
    return structlog.get_logger(name)
