"""Least-error-rate baseline and helpers for comparing it with the MMI partition."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classifier import (
    CmConfig,
    Partition,
    SemanticChannelTable,
    partition_mi,
    run_cm,
)
from .errors import MultiBoundaryError, UnsupportedDimensionError, ValidationError
from .generators import ClassSetup


def mpp_classifier(setup: ClassSetup) -> Partition:
    """Maximum-posterior labeling; zero-mass cells get label 0."""
    joint = setup.priors[:, None] * setup.conditionals
    labels = np.argmax(joint, axis=0)
    labels[setup.cell_mass() <= 0] = 0
    return Partition(setup.grid, labels, setup.n_classes)


def error_rate(partition: Partition, setup: ClassSetup) -> float:
    """Probability that the label differs from the true class."""
    if partition.n_labels != setup.n_classes:
        raise ValidationError(
            f"{partition.n_labels} labels cannot be scored against {setup.n_classes} classes"
        )
    if partition.grid != setup.grid:
        raise ValidationError("partition and class setup live on different grids")
    wrong = setup.priors[:, None] * setup.conditionals
    wrong[partition.labels, np.arange(setup.grid.n_cells)] = 0.0
    return float(min(wrong.sum(), 1.0))


def visible_classifier(semantic: SemanticChannelTable) -> np.ndarray:
    """For every class, the label with the largest ratio (lowest label on ties)."""
    if not np.any(semantic.active):
        raise ValidationError("every label is inactive")
    r = np.where(semantic.active[:, None], semantic.ratio, -np.inf)
    return np.argmax(r, axis=0)


def extract_threshold_1d(partition: Partition) -> float:
    """Coordinate of the first cell after the single label change of a 1D partition."""
    grid = partition.grid
    if grid.ndim != 1:
        raise UnsupportedDimensionError("thresholds exist only on 1D grids")
    coords = grid.axes[0].coords()
    change = np.flatnonzero(np.diff(partition.labels) != 0) + 1
    if change.size != 1:
        raise MultiBoundaryError(coords[change].tolist())
    return float(coords[change[0]])


@dataclass
class ComparisonReport:
    mmi_partition_mi: float
    mpp_partition_mi: float
    mmi_error_rate: float
    mpp_error_rate: float
    mmi_threshold: float | None = None
    mpp_threshold: float | None = None
    equivalent: bool = False
    converged: bool = True
    violations: list[str] = field(default_factory=list)

    @property
    def thresholds_1d(self):
        if self.mmi_threshold is None and self.mpp_threshold is None:
            return None
        return {"mmi": self.mmi_threshold, "mpp": self.mpp_threshold}


def _threshold_or_none(partition: Partition):
    if partition.grid.ndim != 1:
        return None
    try:
        return extract_threshold_1d(partition)
    except MultiBoundaryError:
        return None


def compare(setup: ClassSetup, config: CmConfig, init: Partition) -> ComparisonReport:
    """Run CM and the MPP classifier on one setup and collect both scores.

    Ordering violations (MPP losing on error rate, or CM losing on MI) are
    listed in ``violations`` rather than raised.
    """
    if init.n_labels != setup.n_classes:
        raise ValidationError("comparison needs one label per class")
    trace = run_cm(setup, init, config)
    mmi = trace.final_partition
    mpp = mpp_classifier(setup)
    report = ComparisonReport(
        mmi_partition_mi=partition_mi(mmi, setup),
        mpp_partition_mi=partition_mi(mpp, setup),
        mmi_error_rate=error_rate(mmi, setup),
        mpp_error_rate=error_rate(mpp, setup),
        mmi_threshold=_threshold_or_none(mmi),
        mpp_threshold=_threshold_or_none(mpp),
        converged=trace.converged,
    )
    positive = setup.cell_mass() > 0
    report.equivalent = bool(np.array_equal(mmi.labels[positive], mpp.labels[positive]))
    if report.mpp_error_rate > report.mmi_error_rate + 1e-12:
        report.violations.append(
            f"MPP error {report.mpp_error_rate:.9g} exceeds MMI error {report.mmi_error_rate:.9g}"
        )
    if report.mmi_partition_mi < report.mpp_partition_mi - 1e-9:
        report.violations.append(
            f"MMI partition MI {report.mmi_partition_mi:.9g} below MPP {report.mpp_partition_mi:.9g}"
        )
    return report
