from __future__ import annotations

import logging
import sys
from pathlib import Path

_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
_DATEFMT = "%Y-%m-%dT%H:%M:%S"

# search nodes are logged here at DEBUG
TRANSCRIPT_LOGGER = "wooley.decider"


def setup_logging(level: str = "INFO", log_file: str | Path | None = None) -> None:
    """
    Logging to stderr; stdout is reserved for verdicts and JSON output.
    With log_file, records are also appended to that file (long surveys).
    """
    root = logging.getLogger()
    if root.handlers:
        return

    lvl = getattr(logging, level.upper(), logging.INFO)
    root.setLevel(lvl)

    formatter = logging.Formatter(fmt=_FORMAT, datefmt=_DATEFMT)
    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file is not None:
        handlers.append(logging.FileHandler(log_file, mode="a", encoding="utf-8"))
    for handler in handlers:
        handler.setFormatter(formatter)
        root.addHandler(handler)


def enable_transcript() -> None:
    """Let search-node DEBUG records through regardless of the root level."""
    logging.getLogger(TRANSCRIPT_LOGGER).setLevel(logging.DEBUG)
