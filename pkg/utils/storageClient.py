# utils/storageClient.py
import json
import logging
from pathlib import Path
from typing import Any

import numpy as np

logger = logging.getLogger(__name__)


def _to_builtin(obj: Any) -> Any:
    # numpy scalars/arrays leak into manifests and fixtures
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def load_file(path: str) -> Any:
    """Parsed JSON, or None when the file is missing or not valid JSON."""
    p = Path(path)
    if not p.exists():
        return None
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        logger.warning(f"[storage] {p} is not valid JSON: {e}")
        return None


def save_file(path: str, data: Any) -> None:
    """Write JSON (indent=2, UTF-8, trailing newline). OSError propagates."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(json.dumps(data, indent=2, default=_to_builtin) + "\n", encoding="utf-8")
