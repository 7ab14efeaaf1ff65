"""File input and output.

Every document the tool reads is UTF-8 JSON. Output CSV files carry a header
row, LF line endings and UTF-8; floats are written with 17 significant digits so they
round-trip exactly.
"""

import csv
import json
import logging
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

import numpy as np

from sectorlab.digraph import GeometricDigraph
from sectorlab.pointprocess import MarkedPointCloud

logger = logging.getLogger(__name__)


READABLE_SUFFIXES = (".json",)


def load_data(path: Path | str) -> Any:
    """Parse a JSON document.

    Raises:
        FileNotFoundError: If the file doesn't exist.
        ValueError: If the path is not a readable ``.json`` document.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Data file not found: {path}")
    if not path.is_file():
        raise ValueError(f"Path is not a file: {path}")
    if path.suffix.lower() not in READABLE_SUFFIXES:
        raise ValueError(f"Unsupported file format: {path.suffix[1:] or path.name}")

    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ValueError(f"Invalid JSON in file {path}: {e}") from e
    except UnicodeDecodeError as e:
        raise ValueError(f"Cannot decode JSON file {path}: {e}") from e


# ---------------------------------------------------------------------------
# Writers
# ---------------------------------------------------------------------------


def format_value(value: Any) -> str:
    """CSV cell text: 17 significant digits for floats, empty for ``None``."""
    if value is None:
        return ""
    if isinstance(value, bool | np.bool_):
        return "true" if value else "false"
    if isinstance(value, float | np.floating):
        return format(float(value), ".17g")
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write a headed CSV file (LF line endings, UTF-8)."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    logger.debug(f"Wrote {path}")
    return path


def jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, list | tuple):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, float | np.floating):
        value = float(obj)
        return value if np.isfinite(value) else None
    return obj


def write_json(path: Path, payload: Any) -> Path:
    """Write ``payload`` as indented UTF-8 JSON with a trailing newline.

    Non-finite floats become ``null``.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(jsonable(payload), indent=2, ensure_ascii=False, allow_nan=False)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text + "\n")
    logger.debug(f"Wrote {path}")
    return path


def write_points_csv(path: Path, cloud: MarkedPointCloud) -> Path:
    """``index,x,y,inclination`` (3-D clouds add ``z`` and ``elevation``)."""
    if cloud.dimension == 3:
        header = ["index", "x", "y", "z", "inclination", "elevation"]
        elevations = cloud.elevations if cloud.elevations is not None else np.zeros(cloud.n)
        rows = (
            (i, p[0], p[1], p[2], cloud.inclinations[i], elevations[i])
            for i, p in enumerate(cloud.positions)
        )
    else:
        header = ["index", "x", "y", "inclination"]
        rows = ((i, p[0], p[1], cloud.inclinations[i]) for i, p in enumerate(cloud.positions))
    return write_csv(path, header, rows)


def write_degrees_csv(path: Path, g: GeometricDigraph) -> Path:
    return write_csv(
        path,
        ["index", "out_deg", "in_deg"],
        ((i, g.out_deg[i], g.in_deg[i]) for i in range(g.n)),
    )


def write_arcs_csv(path: Path, g: GeometricDigraph) -> Path:
    if g.arcs is None:
        raise ValueError("digraph was built without arcs")
    return write_csv(path, ["source", "target"], ((a, b) for a, b in g.arcs))
