import functools
import json
import sys
from typing import Any, Callable, Dict, Optional

import click

from apps.sta_engine.services.physics.errors import StaError


def ok(data: Any = None, meta: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    return {
        "ok": True,
        "data": data,
        "meta": meta or {},
    }


def error(message: str, code: str = "error") -> Dict[str, Any]:
    return {
        "ok": False,
        "error": code,
        "message": message,
    }


def emit(envelope: Dict[str, Any]) -> None:
    click.echo(json.dumps(envelope, indent=2, sort_keys=True, default=str))


def guarded(fn: Callable) -> Callable:
    """
    StaError -> error envelope on stdout + the error's exit code.
    """

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except StaError as e:
            emit(error(e.message, code=e.code))
            sys.exit(e.exit_code)

    return wrapper
