import json
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from ..exceptions import DataError


def to_jsonable(value: Any) -> Any:
    """numpy scalars/arrays to Python types; NaN and inf become None."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def load_json(json_file: Union[str, Path]) -> Dict:
    try:
        with open(json_file, 'r') as f:
            return json.load(f)
    except FileNotFoundError:
        raise DataError(f"file not found: {json_file}")
    except json.JSONDecodeError as e:
        raise DataError(f"{json_file}: invalid JSON ({e})")


def write_json(data: Any, json_file: Union[str, Path]) -> None:
    try:
        with open(json_file, 'w') as f:
            json.dump(to_jsonable(data), f, indent=2)
    except OSError as e:
        raise DataError(f"cannot write '{json_file}': {e.strerror}")


def format_value(value: Any, digits: int = 4) -> str:
    if value is None:
        return "-"
    if isinstance(value, (bool, np.bool_)):
        return "yes" if value else "no"
    if isinstance(value, (int, np.integer)):
        return str(value)
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            return "-"
        if value != 0 and abs(value) < 10 ** -digits:
            return f"{value:.2e}"
        return f"{value:.{digits}f}"
    return str(value)


def format_table(headers: Sequence[str], rows: Sequence[Sequence[Any]], digits: int = 4,
                 title: Optional[str] = None) -> str:
    """Plain-text table with left-aligned text and right-aligned numbers."""
    cells: List[List[str]] = [[format_value(v, digits) for v in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in cells:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))

    def line(values, raw=None):
        parts = []
        for i, v in enumerate(values):
            numeric = raw is not None and isinstance(raw[i], (int, float, np.integer, np.floating)) \
                and not isinstance(raw[i], (bool, np.bool_))
            parts.append(v.rjust(widths[i]) if numeric else v.ljust(widths[i]))
        return "  ".join(parts).rstrip()

    out = []
    if title:
        out.append(title)
    out.append(line(headers))
    out.append("  ".join("-" * w for w in widths))
    for raw, row in zip(rows, cells):
        out.append(line(row, raw))
    return "\n".join(out)
