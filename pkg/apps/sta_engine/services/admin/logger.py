import json
import logging
import sys
from typing import Any, Dict, Optional

from apps.sta_engine.config.settings import settings

log = logging.getLogger("sta.admin")


class _JsonFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        entry: Dict[str, Any] = {
            "level": record.levelname,
            "logger": record.name,
        }
        if isinstance(record.msg, dict):
            entry.update(record.msg)
        else:
            entry["message"] = record.getMessage()
        return json.dumps(entry, sort_keys=True, default=str)


def configure_logging(level: Optional[str] = None, fmt: Optional[str] = None) -> None:
    """
    Root handler on stderr; stdout stays reserved for CLI envelopes.
    """
    level = (level or settings.STA_LOG_LEVEL).upper()
    fmt = fmt or settings.STA_LOG_FORMAT

    handler = logging.StreamHandler(sys.stderr)
    if fmt == "json":
        handler.setFormatter(_JsonFormatter())
    else:
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s %(message)s"))

    root = logging.getLogger()
    for existing in list(root.handlers):
        root.removeHandler(existing)
    root.addHandler(handler)
    root.setLevel(level)
    log_event(log, "logging_configured", logging.DEBUG, log_level=level, log_format=fmt)


def log_event(logger: logging.Logger, event: str, level: int = logging.INFO, **fields: Any) -> Dict[str, Any]:
    entry: Dict[str, Any] = {"event": event, **fields}
    logger.log(level, entry)
    return entry
