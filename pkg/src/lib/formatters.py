"""
Output formatters for vfa result files.
Supports: CSV tables and matrices, PGM (P5) images, JSON sidecars
"""
import csv
import io
import json
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, List, Sequence

import numpy as np

from src.errors import DimensionMismatch
from src.version import __version__


class BaseFormatter(ABC):
    """Abstract base class for result formatters"""

    extension = ""

    @abstractmethod
    def format(self, data: Any) -> bytes:
        """Serialize ``data`` to the file's bytes"""

    def write(self, path: Path, data: Any) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(self.format(data))
        return path


class CSVTableFormatter(BaseFormatter):
    """Header row plus data rows; floats written with repr for exact round trips"""

    extension = ".csv"

    def __init__(self, header: Sequence[str]):
        self.header = list(header)

    @staticmethod
    def _cell(value: Any) -> str:
        if isinstance(value, (bool, np.bool_)):
            return "true" if value else "false"
        if isinstance(value, (float, np.floating)):
            return repr(float(value))
        return str(value)

    def format(self, rows: Sequence[Sequence[Any]]) -> bytes:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.header)
        for row in rows:
            if len(row) != len(self.header):
                raise DimensionMismatch(f"Row {row!r} does not match header {self.header}")
            writer.writerow([self._cell(v) for v in row])
        return buffer.getvalue().encode("utf-8")


class CSVMatrixFormatter(BaseFormatter):
    """Dense real matrix, one CSV row per matrix row, no header"""

    extension = ".csv"

    def format(self, matrix: np.ndarray) -> bytes:
        matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        lines = [",".join(repr(float(v)) for v in row) for row in matrix]
        return ("\n".join(lines) + "\n").encode("utf-8")


class PGMFormatter(BaseFormatter):
    """8-bit binary greymap: pixel = floor(255 * value / max), rows are matrix rows"""

    extension = ".pgm"

    def format(self, matrix: np.ndarray) -> bytes:
        matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        if np.any(matrix < 0):
            raise DimensionMismatch("PGM export needs a nonnegative matrix")
        peak = matrix.max(initial=0.0)
        if peak > 0:
            pixels = np.floor(255.0 * matrix / peak).clip(0, 255).astype(np.uint8)
        else:
            pixels = np.zeros(matrix.shape, dtype=np.uint8)
        height, width = pixels.shape
        header = f"P5\n{width} {height}\n255\n".encode("ascii")
        return header + pixels.tobytes(order="C")


class JSONFormatter(BaseFormatter):
    """JSON sidecar with the producing version added"""

    extension = ".json"

    def _add_meta(self, data: Dict[str, Any]) -> Dict[str, Any]:
        return {**data, "version": __version__}

    def format(self, data: Dict[str, Any]) -> bytes:
        output = self._add_meta(data)
        return (json.dumps(output, indent=2, sort_keys=True, default=_json_default) + "\n").encode("utf-8")


def _json_default(value: Any):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def read_signal_csv(path: Path, n: int) -> np.ndarray:
    """Signal CSV ``vertex,value`` with 1-based vertices, one row per vertex."""
    path = Path(path)
    signal = np.zeros(n)
    seen = set()
    with path.open(newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["vertex", "value"]:
            raise DimensionMismatch(f"{path}: expected header 'vertex,value'")
        for row in reader:
            vertex = int(row["vertex"])
            if not 1 <= vertex <= n:
                raise DimensionMismatch(f"{path}: vertex {vertex} outside 1..{n}")
            if vertex in seen:
                raise DimensionMismatch(f"{path}: vertex {vertex} listed twice")
            seen.add(vertex)
            signal[vertex - 1] = float(row["value"])
    if len(seen) != n:
        raise DimensionMismatch(f"{path}: signal has {len(seen)} entries, graph has N={n}")
    return signal


def signal_rows(f: np.ndarray) -> List[List[Any]]:
    return [[vertex, float(value)] for vertex, value in enumerate(np.real(f), start=1)]


def get_formatter(format_type: str) -> BaseFormatter:
    """Get a header-less formatter instance by type"""
    formatters = {
        "csv": CSVMatrixFormatter,
        "pgm": PGMFormatter,
        "json": JSONFormatter,
    }
    if format_type not in formatters:
        raise DimensionMismatch(f"Unknown output format: {format_type}")
    return formatters[format_type]()
