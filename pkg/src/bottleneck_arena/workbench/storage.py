"""Storage - read input documents and persist canonical reports."""

import logging
import sys
from pathlib import Path
from typing import Optional

from ..models.reports import RunReport
from .serialization import canonical_json

logger = logging.getLogger(__name__)


def report_text(report: RunReport) -> str:
    """Canonical JSON of a report; timing is left out unless it was measured."""
    exclude = {"timing"} if report.timing is None else None
    return canonical_json(report.model_dump(mode="json", exclude=exclude))


def read_text(path: str | Path) -> str:
    path = Path(path)
    logger.debug("Reading %s", path)
    with open(path, encoding="utf-8") as f:
        return f.read()


def write_output(text: str, out: Optional[str | Path] = None) -> None:
    """
    Write to `out`, creating parent directories, or to stdout when no path
    is given. Nothing but results ever goes to stdout.
    """
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(out).resolve()
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    except OSError as e:
        logger.error("Failed to write %s: %s", path, e)
        raise
    logger.info("Wrote %d bytes to %s", len(text.encode("utf-8")), path)
