import platform
import sys
from importlib.metadata import PackageNotFoundError, version
from typing import Any, Dict

from apps.sta_engine.config.settings import settings

_LIBRARIES = ("numpy", "scipy", "pandas", "pydantic", "click")


def _library_versions() -> Dict[str, str]:
    out: Dict[str, str] = {}
    for name in _LIBRARIES:
        try:
            out[name] = version(name)
        except PackageNotFoundError:
            out[name] = "missing"
    return out


def system_snapshot() -> Dict[str, Any]:
    """
    Run-environment summary embedded in every manifest. No timestamps or
    process ids: reruns must write identical manifests.
    """
    return {
        "python_version": sys.version.split()[0],
        "platform": platform.platform(),
        "libraries": _library_versions(),
        "settings": {
            "STA_VERSION": settings.STA_VERSION,
            "STA_THREADS": settings.STA_THREADS,
            "STA_MU_ODE_METHOD": settings.STA_MU_ODE_METHOD,
            "STA_MU_ODE_RTOL": settings.STA_MU_ODE_RTOL,
            "STA_MU_ODE_ATOL": settings.STA_MU_ODE_ATOL,
            "STA_MU_BOUNDARY_STRICT": settings.STA_MU_BOUNDARY_STRICT,
            "STA_CSV_FLOAT_FORMAT": settings.STA_CSV_FLOAT_FORMAT,
        },
    }
