"""File formats: iteration traces, partition CSVs, comparison tables, PPM maps."""
from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path

import numpy as np

from .baselines import ComparisonReport
from .classifier import IterationTrace, Partition
from .errors import UnsupportedDimensionError, ValidationError
from .probability import FeatureGrid

TRACE_HEADER = ("iter", "shannon_mi_bits", "semantic_mi_bits", "cells_changed")
COMPARE_HEADER = ("classifier", "mi_bits", "error_rate", "threshold", "equivalent")

PALETTE = np.array(
    [
        (230, 60, 60),
        (60, 180, 75),
        (60, 100, 220),
        (240, 200, 40),
        (150, 60, 200),
        (70, 200, 220),
    ],
    dtype=np.uint8,
)


def fmt(x) -> str:
    """Nine significant digits, enough for every tolerance used here."""
    if x is None:
        return ""
    return f"{x:.9g}"


def atomic_write(path, data: bytes | str):
    """Write via a temp file in the same directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode("utf-8")
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def write_trace(trace: IterationTrace, path):
    rows = [
        (r.iter, fmt(r.shannon_mi_bits), fmt(r.semantic_mi_bits), r.cells_changed)
        for r in trace.records
    ]
    atomic_write(path, _csv_text(TRACE_HEADER, rows))


def read_trace(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def partition_csv(partition: Partition) -> str:
    grid = partition.grid
    idx = grid.index_arrays()
    if grid.ndim == 1:
        header = ("z_index", "label")
    else:
        header = ("m_index", "n_index", "label")
    rows = zip(*(i.tolist() for i in idx), partition.labels.tolist())
    return _csv_text(header, rows)


def write_partition(partition: Partition, path):
    atomic_write(path, partition_csv(partition))


def read_partition(path, grid: FeatureGrid, n_labels: int | None = None) -> Partition:
    """Load a partition CSV written by ``write_partition``.

    ``n_labels`` defaults to one more than the largest label present.
    """
    expected = ["z_index", "label"] if grid.ndim == 1 else ["m_index", "n_index", "label"]
    data = Path(path).read_text().splitlines()
    if not data or data[0].split(",") != expected:
        raise ValidationError(f"{path}: header must be {','.join(expected)}")
    labels = np.full(grid.n_cells, -1, dtype=np.intp)
    for lineno, line in enumerate(data[1:], start=2):
        if not line.strip():
            continue
        try:
            vals = [int(v) for v in line.split(",")]
        except ValueError:
            raise ValidationError(f"{path}:{lineno}: non-integer field") from None
        if len(vals) != len(expected):
            raise ValidationError(f"{path}:{lineno}: expected {len(expected)} fields")
        *cell, lab = vals
        if any(c < 0 or c >= s for c, s in zip(cell, grid.shape)):
            raise ValidationError(f"{path}:{lineno}: cell index outside the grid")
        labels[np.ravel_multi_index(tuple(cell), grid.shape)] = lab
    if np.any(labels < 0):
        raise ValidationError(f"{path}: partition does not cover every cell")
    if n_labels is None:
        n_labels = int(labels.max()) + 1
    return Partition(grid, labels, n_labels)


def read_pmf_csv(path, grid: FeatureGrid) -> np.ndarray:
    """Unnormalized weights per cell (``z_index,weight`` or ``m_index,n_index,weight``)."""
    expected = ["z_index", "weight"] if grid.ndim == 1 else ["m_index", "n_index", "weight"]
    data = Path(path).read_text().splitlines()
    if not data or data[0].split(",") != expected:
        raise ValidationError(f"{path}: header must be {','.join(expected)}")
    w = np.zeros(grid.n_cells)
    for lineno, line in enumerate(data[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(expected):
            raise ValidationError(f"{path}:{lineno}: expected {len(expected)} fields")
        try:
            cell = tuple(int(v) for v in parts[:-1])
            weight = float(parts[-1])
        except ValueError:
            raise ValidationError(f"{path}:{lineno}: malformed number") from None
        if any(c < 0 or c >= s for c, s in zip(cell, grid.shape)) or weight < 0:
            raise ValidationError(f"{path}:{lineno}: bad cell index or negative weight")
        w[np.ravel_multi_index(cell, grid.shape)] += weight
    if w.sum() <= 0:
        raise ValidationError(f"{path}: no positive weight")
    return w / w.sum()


def partition_image(partition: Partition) -> np.ndarray:
    """RGB array ``[row, col, 3]`` with row 0 at the top of the n axis."""
    if partition.grid.ndim != 2:
        raise UnsupportedDimensionError("only 2D partitions can be rendered")
    lab = partition.as_array()  # [m, n]
    return PALETTE[lab.T[::-1] % len(PALETTE)]


def render_partition(partition: Partition, path):
    """Write the partition as a binary P6 pixmap, one pixel per cell."""
    img = partition_image(partition)
    h, w, _ = img.shape
    atomic_write(path, f"P6\n{w} {h}\n255\n".encode("ascii") + img.tobytes())


def read_ppm(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    magic, dims, maxval, body = raw.split(b"\n", 3)
    if magic != b"P6" or maxval != b"255":
        raise ValidationError(f"{path}: not an 8-bit P6 pixmap")
    w, h = (int(v) for v in dims.split())
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w, 3)


def write_compare(report: ComparisonReport, path):
    eq = "equivalent" if report.equivalent else "different"
    rows = [
        ("mmi", fmt(report.mmi_partition_mi), fmt(report.mmi_error_rate), fmt(report.mmi_threshold), eq),
        ("mpp", fmt(report.mpp_partition_mi), fmt(report.mpp_error_rate), fmt(report.mpp_threshold), eq),
    ]
    atomic_write(path, _csv_text(COMPARE_HEADER, rows))
