"""The channels-matching (CM) iteration for MMI classification of unseen instances.

One iteration:

1. the partition gives the Shannon channel ``P(y_j|x_i)`` by summing each
   class conditional over the cells of every label;
2. Matching I turns that channel into the ratio table
   ``r_j(x_i) = P(y_j|x_i) / P(y_j)``, standing in for ``T(theta_j|x)/T(theta_j)``;
3. every cell ``z`` gets the label maximizing ``sum_i P(x_i|z) log2 r_j(x_i)``
   (Matching II).

The loop repeats until the partition stops changing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .errors import ConfigurationError, UnsupportedDimensionError, ValidationError
from .generators import ClassSetup
from .probability import FeatureGrid, as_pmf, shannon_mi


@dataclass(frozen=True, eq=False)
class Partition:
    """One label per grid cell (flat C-order array)."""

    grid: FeatureGrid
    labels: np.ndarray
    n_labels: int

    def __post_init__(self):
        lab = np.array(self.labels, dtype=np.intp).ravel()
        if lab.size != self.grid.n_cells:
            raise ValidationError(
                f"partition has {lab.size} cells, grid has {self.grid.n_cells}"
            )
        if self.n_labels < 1:
            raise ValidationError("n_labels must be positive")
        if lab.size and (lab.min() < 0 or lab.max() >= self.n_labels):
            raise ValidationError(f"labels must lie in [0, {self.n_labels})")
        lab.setflags(write=False)
        object.__setattr__(self, "labels", lab)

    def as_array(self) -> np.ndarray:
        """Labels reshaped to the grid, ``[m_index, n_index]`` in 2D."""
        return self.labels.reshape(self.grid.shape)

    def relabel(self, perm: Sequence[int]) -> "Partition":
        """Apply ``new = perm[old]`` to every cell."""
        return Partition(self.grid, np.asarray(perm)[self.labels], self.n_labels)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return (
            self.grid == other.grid
            and self.n_labels == other.n_labels
            and np.array_equal(self.labels, other.labels)
        )


@dataclass(frozen=True)
class SemanticChannelTable:
    """Ratio table ``r_j(x_i)`` indexed ``[label, class]`` with its provenance.

    ``construction`` is ``"ratio"`` for ``P(y_j|x)/P(y_j)``; ``"truth"`` when
    built from normalized truth functions and their logical probabilities.
    """

    ratio: np.ndarray
    active: np.ndarray
    label_probs: np.ndarray
    construction: str = "ratio"

    @property
    def n_labels(self) -> int:
        return self.ratio.shape[0]

    def log_ratio(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log2(self.ratio)


@dataclass(frozen=True)
class CmConfig:
    max_iters: int = 50
    mi_tol: float = 0.0
    channel_smoothing_eps: float = 1e-12
    tie_rule: str = "lowest-label"

    def __post_init__(self):
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValidationError("max_iters must be a positive integer")
        if not self.mi_tol >= 0:
            raise ValidationError("mi_tol must be nonnegative")
        if not self.channel_smoothing_eps >= 0:
            raise ValidationError("channel_smoothing_eps must be nonnegative")
        if self.tie_rule != "lowest-label":
            raise ValidationError(f"unsupported tie rule {self.tie_rule!r}")


@dataclass(frozen=True)
class IterationRecord:
    iter: int
    shannon_mi_bits: float
    semantic_mi_bits: float
    cells_changed: int


@dataclass
class IterationTrace:
    """Per-iteration history of a CM run.

    ``partitions[0]`` is the initial partition and ``partitions[k]`` the one
    produced by iteration ``k``. ``stop_reason`` is one of ``"fixed_point"``,
    ``"mi_stall"`` or ``"max_iters"``; only the first two count as converged.
    A ``"mi_stall"`` stop needs ``mi_tol > 0`` and may end on a record with
    cells still changing.
    """

    records: list[IterationRecord] = field(default_factory=list)
    partitions: list[Partition] = field(default_factory=list)
    initial_mi_bits: float = 0.0
    stop_reason: str = "max_iters"

    @property
    def converged(self) -> bool:
        return self.stop_reason != "max_iters"

    @property
    def final_partition(self) -> Partition:
        return self.partitions[-1]

    @property
    def final_mi_bits(self) -> float:
        return self.records[-1].shannon_mi_bits if self.records else self.initial_mi_bits

    def mi_after(self, n_iters: int) -> float:
        """Shannon MI after ``n_iters`` iterations (0 = initial partition)."""
        if n_iters == 0:
            return self.initial_mi_bits
        return self.records[min(n_iters, len(self.records)) - 1].shannon_mi_bits


def _check_grid(partition: Partition, setup: ClassSetup):
    if partition.grid != setup.grid:
        raise ValidationError("partition and class setup live on different grids")


def shannon_channel(partition: Partition, setup: ClassSetup) -> np.ndarray:
    """``P(y_j|x_i)`` as ``[class, label]``."""
    _check_grid(partition, setup)
    return kernels.channel_from_labels(
        np.ascontiguousarray(setup.conditionals), partition.labels, partition.n_labels
    )


def induced_joint(channel: np.ndarray, priors) -> np.ndarray:
    """``P(x_i, y_j) = P(x_i) P(y_j|x_i)``."""
    return np.asarray(priors)[:, None] * channel


def matching_one(channel, priors, eps: float = 0.0) -> SemanticChannelTable:
    """Fit the semantic channel to a Shannon channel.

    ``r_j(x_i) = (P(y_j|x_i) + eps) / (P(y_j) + eps)``: flooring every
    channel entry at ``eps`` and renormalizing the rows leaves exactly this
    ratio, and keeps ``sum_i P(x_i) r_j(x_i) = 1``. Labels with no mass
    (possible only with ``eps == 0``) are inactive.
    """
    ch = np.asarray(channel, dtype=float)
    p = as_pmf(priors)
    if ch.ndim != 2 or ch.shape[0] != p.size:
        raise ValidationError("channel rows must match the priors")
    if eps < 0:
        raise ValidationError("eps must be nonnegative")
    py = p @ ch
    denom = py + eps
    active = denom > 0
    ratio = np.zeros((ch.shape[1], ch.shape[0]))
    ratio[active] = (ch[:, active] + eps).T / denom[active, None]
    return SemanticChannelTable(ratio, active, py)


def semantic_table_from_truths(truths, logicals) -> SemanticChannelTable:
    """Build the table from truth functions: ``r_j = T(theta_j|x) / T(theta_j)``."""
    tv = np.array([getattr(t, "values", t) for t in truths], dtype=float)
    lg = np.asarray(logicals, dtype=float)
    active = lg > 0
    ratio = np.zeros_like(tv)
    ratio[active] = tv[active] / lg[active, None]
    return SemanticChannelTable(ratio, active, np.full(lg.shape, np.nan), "truth")


def info_surface(semantic: SemanticChannelTable, setup: ClassSetup, label: int) -> np.ndarray:
    """Conditional semantic information ``I(X; theta_j | z)`` for every cell.

    Zero-mass cells are NaN; a zero ratio under positive posterior gives -inf.
    """
    if not semantic.active[label]:
        raise ConfigurationError(f"label {label} is inactive")
    post = setup.posterior()
    lr = semantic.log_ratio()[label]
    with np.errstate(invalid="ignore"):
        terms = np.where(post > 0, post * lr[:, None], 0.0)
    out = terms.sum(axis=0)
    out[setup.cell_mass() <= 0] = np.nan
    return out


def _reclassify(semantic, post_t, valid, prev: Partition):
    if not np.any(semantic.active):
        raise ConfigurationError("every label is inactive")
    labels, changed = kernels.reclassify(
        post_t,
        np.ascontiguousarray(semantic.log_ratio()),
        semantic.active.astype(np.uint8),
        prev.labels,
        valid.astype(np.uint8),
    )
    return Partition(prev.grid, labels, semantic.n_labels), changed


def matching_two(
    semantic: SemanticChannelTable, setup: ClassSetup, previous: Partition | None = None
) -> Partition:
    """Label each cell by the largest conditional semantic information.

    Ties go to the lowest label. Zero-mass cells keep their label from
    ``previous`` (label 0 without one).
    """
    if previous is None:
        previous = Partition(setup.grid, np.zeros(setup.grid.n_cells, np.intp), semantic.n_labels)
    else:
        _check_grid(previous, setup)
    post_t = np.ascontiguousarray(setup.posterior().T)
    part, _ = _reclassify(semantic, post_t, setup.cell_mass() > 0, previous)
    return part


def partition_mi(partition: Partition, setup: ClassSetup) -> float:
    """Shannon MI between true class and label under this partition."""
    return shannon_mi(induced_joint(shannon_channel(partition, setup), setup.priors))


def _semantic_mi_of(joint: np.ndarray, semantic: SemanticChannelTable) -> float:
    ratio = semantic.ratio.T  # [class, label]
    mask = joint > 0
    with np.errstate(divide="ignore"):
        return float(np.sum(joint[mask] * np.log2(ratio[mask])))


def run_cm(setup: ClassSetup, init: Partition, config: CmConfig | None = None) -> IterationTrace:
    """Alternate Matching I and Matching II until the partition is stable.

    Each record holds the Shannon MI of the new partition and the semantic MI
    of the new joint measured with the ratios that produced it (the quantity
    Matching II maximizes).
    """
    config = config or CmConfig()
    _check_grid(init, setup)
    post_t = np.ascontiguousarray(setup.posterior().T)
    valid = setup.cell_mass() > 0
    cond = np.ascontiguousarray(setup.conditionals)
    priors = setup.priors

    trace = IterationTrace(partitions=[init])
    current = init
    channel = kernels.channel_from_labels(cond, current.labels, current.n_labels)
    prev_mi = shannon_mi(induced_joint(channel, priors))
    trace.initial_mi_bits = prev_mi

    for it in range(1, config.max_iters + 1):
        semantic = matching_one(channel, priors, config.channel_smoothing_eps)
        current, changed = _reclassify(semantic, post_t, valid, current)
        channel = kernels.channel_from_labels(cond, current.labels, current.n_labels)
        joint = induced_joint(channel, priors)
        mi = shannon_mi(joint)
        trace.records.append(
            IterationRecord(it, mi, _semantic_mi_of(joint, semantic), int(changed))
        )
        trace.partitions.append(current)
        if changed == 0:
            trace.stop_reason = "fixed_point"
            break
        if mi - prev_mi < config.mi_tol:
            trace.stop_reason = "mi_stall"
            break
        prev_mi = mi
    return trace


def _bands(count: int, n_labels: int) -> np.ndarray:
    width = count // n_labels
    if width < 1:
        raise ValidationError(f"cannot split {count} cells into {n_labels} bands")
    return np.minimum(np.arange(count) // width, n_labels - 1)


def _need_labels(n_labels: int):
    if n_labels < 2:
        raise ValidationError("an initial partition needs at least two labels")


def init_vertical(grid: FeatureGrid, n_labels: int) -> Partition:
    """Equal-width bands along ``m``, labeled left to right; remainder joins the last."""
    _need_labels(n_labels)
    if grid.ndim != 2:
        raise UnsupportedDimensionError("vertical bands need a 2D grid")
    band = _bands(grid.shape[0], n_labels)
    return Partition(grid, np.repeat(band, grid.shape[1]), n_labels)


def init_horizontal(grid: FeatureGrid, n_labels: int) -> Partition:
    """Equal-height bands along ``n``, labeled bottom to top."""
    _need_labels(n_labels)
    if grid.ndim != 2:
        raise UnsupportedDimensionError("horizontal bands need a 2D grid")
    band = _bands(grid.shape[1], n_labels)
    return Partition(grid, np.tile(band, grid.shape[0]), n_labels)


def init_threshold_1d(grid: FeatureGrid, z_prime: float) -> Partition:
    """Label 0 below ``z_prime``, label 1 from the cell at ``z_prime`` upward."""
    if grid.ndim != 1:
        raise UnsupportedDimensionError("a threshold partition needs a 1D grid")
    coords = grid.axes[0].coords()
    return Partition(grid, (coords >= z_prime - 1e-9 * grid.axes[0].step).astype(np.intp), 2)


def init_random(grid: FeatureGrid, n_labels: int, seed: int) -> Partition:
    _need_labels(n_labels)
    rng = np.random.default_rng(seed)
    return Partition(grid, rng.integers(0, n_labels, grid.n_cells), n_labels)
