"""
Rendering helpers for command output
Turns report dataclasses into plain documents and renders them as JSON,
aligned tables or curve CSV
"""

import csv
import enum
import io
import json
from dataclasses import fields, is_dataclass

import numpy as np


def plain(value):
    """Convert dataclasses, enums and numpy scalars into JSON-ready values"""
    if is_dataclass(value) and not isinstance(value, type):
        return {f.name: plain(getattr(value, f.name)) for f in fields(value)}
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, dict):
        return {key: plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(item) for item in value]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def render_json(document: dict) -> str:
    return json.dumps(document, indent=2) + "\n"


def _flatten(prefix, value, rows):
    if isinstance(value, dict):
        for key, item in value.items():
            _flatten(f"{prefix}.{key}" if prefix else key, item, rows)
    elif isinstance(value, list):
        for index, item in enumerate(value):
            _flatten(f"{prefix}[{index}]", item, rows)
    else:
        rows.append((prefix, value))


def _cell(value):
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return f"{value:.12g}"
    if value is None:
        return '-'
    return str(value)


def render_table(document: dict) -> str:
    rows = []
    _flatten('', document, rows)
    width = max((len(key) for key, _ in rows), default=0)
    title = str(document.get('command', 'result')).title()
    lines = [f"=== {title} ==="]
    lines += [f"{key.ljust(width)}  {_cell(value)}" for key, value in rows if key != 'command']
    lines.append("=" * (len(title) + 8))
    return "\n".join(lines) + "\n"


def render_curve_csv(x, v, g) -> str:
    """Curve rows with the header x,V,g at full double precision"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(['x', 'V', 'g'])
    for row in zip(x, v, g):
        writer.writerow([format(float(item), '.17g') for item in row])
    return buffer.getvalue()
