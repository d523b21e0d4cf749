"""
File formats written and read by the command line.

- CSV tables, numbers at 17 significant digits, optional timestamp line
- field dumps ("# affine-field v1")
- grayscale heatmaps: plain-text P2 pixmaps and 8-bit PNG via Pillow
"""
import csv
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, List, Sequence, Union

import numpy as np
from PIL import Image

from affine_vlab.core.errors import ConfigParseError, UnsupportedShape
from affine_vlab.numerics.fields import ScalarField
from affine_vlab.numerics.geometry import GridDomain

logger = logging.getLogger(__name__)

FIELD_HEADER = "# affine-field v1"
PathLike = Union[str, Path]


def format_number(value) -> str:
    """17 significant digits for floats; ints and bools as integers."""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


# ==================== CSV ====================

def write_csv(path: PathLike, columns: Sequence[str], rows: Iterable[Sequence], timestamp: bool = False) -> Path:
    """
    Write a CSV table.

    Args:
        path: Output file
        columns: Header names
        rows: Row sequences aligned with columns
        timestamp: Prepend a "# generated ..." line
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        if timestamp:
            fh.write(f"# generated {datetime.now(timezone.utc).isoformat()}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_number(v) for v in row])
    logger.info(f"[Storage] wrote {path}")
    return path


def read_csv(path: PathLike) -> List[dict]:
    """Rows as dicts of strings, skipping '#' lines."""
    with Path(path).open(encoding="utf-8") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(lines))


# ==================== Field dumps ====================

def dump_field(u: ScalarField, path: PathLike) -> Path:
    """
    Write u in the affine-field v1 format.

    Header, then ``dim h shape...``, then one line per row of the last axis.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    shape = u.dom.shape
    rows = u.values.reshape(-1, shape[-1])
    lines = [FIELD_HEADER, " ".join([str(u.dom.dim), format_number(u.dom.h)] + [str(s) for s in shape])]
    lines.extend(" ".join(format_number(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")
    logger.info(f"[Storage] dumped {shape} field to {path}")
    return path


def load_field(path: PathLike) -> ScalarField:
    """
    Read an affine-field v1 file.

    The grid is centred at the origin and nodes with nonzero values are
    interior.

    Raises:
        ConfigParseError: malformed file (with line number)
    """
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != FIELD_HEADER:
        raise ConfigParseError(f"missing header {FIELD_HEADER!r}", line=1)
    try:
        meta = lines[1].split()
        dim, h = int(meta[0]), float(meta[1])
        shape = tuple(int(s) for s in meta[2:])
    except (IndexError, ValueError):
        raise ConfigParseError("expected 'dim h shape...'", line=2)
    if len(shape) != dim or dim not in (2, 3) or h <= 0:
        raise ConfigParseError(f"inconsistent grid description {lines[1]!r}", line=2)

    expected_rows = int(np.prod(shape[:-1]))
    body = [line for line in lines[2:] if line.strip()]
    if len(body) != expected_rows:
        raise ConfigParseError(f"expected {expected_rows} value rows, found {len(body)}", line=3)
    values = np.empty((expected_rows, shape[-1]))
    for k, line in enumerate(body):
        parts = line.split()
        if len(parts) != shape[-1]:
            raise ConfigParseError(f"expected {shape[-1]} values, found {len(parts)}", line=k + 3)
        try:
            values[k] = [float(v) for v in parts]
        except ValueError:
            raise ConfigParseError("non-numeric value", line=k + 3)
    values = values.reshape(shape)

    origin = -0.5 * h * (np.asarray(shape) - 1)
    dom = GridDomain.from_mask(origin, h, values != 0)
    return ScalarField(dom, values)


# ==================== Heatmaps ====================

def heatmap_pixels(u: ScalarField) -> np.ndarray:
    """
    8-bit min-max normalized image, top row = largest y.

    3D fields use the middle slice of the last axis. Shape is
    ``(shape[1], shape[0])``: width follows x, height follows y.
    """
    values = u.values
    if u.dom.dim == 3:
        values = values[:, :, values.shape[2] // 2]
    elif u.dom.dim != 2:
        raise UnsupportedShape(f"heatmaps need a 2D or 3D field, got {u.dom.dim}D")
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi > lo:
        scaled = np.rint(255.0 * (values - lo) / (hi - lo))
    else:
        scaled = np.zeros_like(values)
    return np.flipud(scaled.T).astype(np.uint8)


def write_pgm(u: ScalarField, path: PathLike) -> Path:
    """Plain-text P2 pixmap."""
    pixels = heatmap_pixels(u)
    height, width = pixels.shape
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["P2", f"{width} {height}", "255"]
    lines.extend(" ".join(str(int(v)) for v in row) for row in pixels)
    path.write_text("\n".join(lines) + "\n")
    logger.info(f"[Storage] wrote {width}x{height} pixmap {path}")
    return path


def write_png(u: ScalarField, path: PathLike) -> Path:
    """8-bit grayscale PNG."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    img = Image.fromarray(heatmap_pixels(u), mode="L")
    img.save(path, format="PNG")
    logger.info(f"[Storage] wrote {img.width}x{img.height} PNG {path}")
    return path
