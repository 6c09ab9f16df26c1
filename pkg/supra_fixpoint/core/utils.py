import json
import math
import os
from pathlib import Path
from typing import Any, Optional


def create_dir_if_not_exists(directory: str) -> None:
    """Create a directory if it doesn't exist.

    Args:
        directory: The directory path to create
    """
    if directory:
        os.makedirs(directory, exist_ok=True)


def jsonable_float(value: float) -> Any:
    """Map non-finite floats to strings so reports stay valid JSON."""
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def dump_report(payload: Any) -> str:
    """Serialize a report deterministically (stable key order, fixed separators)."""
    return json.dumps(payload, indent=2, sort_keys=False, allow_nan=False) + "\n"


def write_report(text: str, out: Optional[str] = None) -> Optional[Path]:
    """Write a serialized report to ``out``; returns the path written, or None for stdout.

    Args:
        text: The serialized report
        out: Optional output path; parent directories are created
    """
    if not out:
        return None
    path = Path(out)
    create_dir_if_not_exists(str(path.parent))
    path.write_text(text, encoding="utf-8")
    return path
