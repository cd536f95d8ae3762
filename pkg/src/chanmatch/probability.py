"""Grids, probability tables, Shannon quantities and semantic information.

All information quantities are in bits. ``0 * log 0`` is taken as 0, while a
positive weight sitting on a zero model probability raises instead of
silently producing ``-inf``.

Array conventions: a joint table is indexed ``[class, label]``; truth
functions and ratio tables are indexed ``[label, class]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateTruthError, DomainError, ValidationError

PMF_TOL = 1e-9
LOG2E = math.log2(math.e)


@dataclass(frozen=True)
class Axis:
    lo: float
    hi: float
    step: float

    def __post_init__(self):
        if not (self.step > 0):
            raise ValidationError(f"axis step must be positive, got {self.step}")
        if not (self.hi > self.lo):
            raise ValidationError(f"axis needs hi > lo, got [{self.lo}, {self.hi}]")
        if self.count < 2:
            raise ValidationError("axis must contain at least two cells")

    @property
    def count(self) -> int:
        # tiny slack so that e.g. (1.0 - 0.0) / 0.1 counts 11 cells, not 10
        return int(math.floor((self.hi - self.lo) / self.step + 1e-9)) + 1

    def coords(self) -> np.ndarray:
        """Lower edge of every cell; this is the coordinate reported for a cell."""
        return self.lo + self.step * np.arange(self.count, dtype=float)

    def centers(self) -> np.ndarray:
        """Midpoint of every cell, where densities are evaluated."""
        return self.coords() + 0.5 * self.step


@dataclass(frozen=True)
class FeatureGrid:
    """A 1D or 2D rectangular grid of feature cells.

    Cell ``k`` of an axis covers ``[lo + k*step, lo + (k+1)*step)``. Cells are
    flattened in C order, so in 2D the flat index is ``m_index * n_count +
    n_index`` with ``m`` the horizontal axis.
    """

    axes: tuple[Axis, ...]

    def __post_init__(self):
        axes = tuple(a if isinstance(a, Axis) else Axis(*a) for a in self.axes)
        if len(axes) not in (1, 2):
            raise ValidationError(f"grid must have 1 or 2 axes, got {len(axes)}")
        object.__setattr__(self, "axes", axes)

    @classmethod
    def regular(cls, *bounds: tuple[float, float, float]) -> "FeatureGrid":
        return cls(tuple(Axis(*b) for b in bounds))

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.count for a in self.axes)

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.shape))

    def centers(self) -> np.ndarray:
        """Cell midpoints as an array of shape ``(n_cells, ndim)``."""
        mesh = np.meshgrid(*(a.centers() for a in self.axes), indexing="ij")
        return np.stack([g.ravel() for g in mesh], axis=1)

    def index_arrays(self) -> tuple[np.ndarray, ...]:
        """Per-axis integer index of every flat cell."""
        return np.unravel_index(np.arange(self.n_cells), self.shape)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def as_pmf(weights, tol: float = PMF_TOL) -> np.ndarray:
    """Validate ``weights`` as a probability vector and renormalize it.

    Raises ValidationError on negative entries or a sum off by more than tol.
    """
    p = np.array(weights, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValidationError("a pmf must be a non-empty 1D array")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise ValidationError("pmf weights must be finite and nonnegative")
    s = p.sum()
    if abs(s - 1.0) > tol:
        raise ValidationError(f"pmf weights sum to {s!r}, not 1")
    return _readonly(p / s)


def as_conditional(rows, tol: float = PMF_TOL) -> np.ndarray:
    """Validate a 2D table whose rows are each a pmf."""
    m = np.array(rows, dtype=float)
    if m.ndim != 2 or m.size == 0:
        raise ValidationError("a conditional pmf must be a non-empty 2D array")
    if not np.all(np.isfinite(m)) or np.any(m < 0):
        raise ValidationError("conditional pmf entries must be finite and nonnegative")
    s = m.sum(axis=1)
    bad = np.flatnonzero(np.abs(s - 1.0) > tol)
    if bad.size:
        raise ValidationError(f"row {bad[0]} sums to {s[bad[0]]!r}, not 1")
    return _readonly(m / s[:, None])


def as_joint(table, tol: float = PMF_TOL) -> np.ndarray:
    """Validate a joint probability table ``P(x_i, y_j)``."""
    j = np.array(table, dtype=float)
    if j.ndim != 2 or j.size == 0:
        raise ValidationError("a joint pmf must be a non-empty 2D array")
    if not np.all(np.isfinite(j)) or np.any(j < 0):
        raise ValidationError("joint entries must be finite and nonnegative")
    s = j.sum()
    if abs(s - 1.0) > tol:
        raise ValidationError(f"joint entries sum to {s!r}, not 1")
    return _readonly(j / s)


@dataclass(frozen=True)
class TruthFunction:
    """Membership values ``T(theta_j | x_i)`` of one label over all classes.

    ``logical_probability`` caches ``T(theta_j)`` for the prior the function was
    built against, so repeated evaluations cannot drift apart.
    """

    values: np.ndarray
    logical_probability: float | None = field(default=None)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValidationError("truth values must be a non-empty 1D array")
        if not np.all(np.isfinite(v)) or np.any(v < 0) or np.any(v > 1):
            raise ValidationError("truth values must lie in [0, 1]")
        object.__setattr__(self, "values", _readonly(v))

    @property
    def n_classes(self) -> int:
        return self.values.size


def _truth_values(t) -> np.ndarray:
    return t.values if isinstance(t, TruthFunction) else np.asarray(t, dtype=float)


def xlogy2(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Elementwise ``p * log2(q)`` with ``0 * log 0 = 0``; raises if ``p > 0 = q``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if np.any((p > 0) & (q <= 0)):
        raise DomainError("positive probability over a zero model value")
    out = np.zeros(np.broadcast(p, q).shape)
    mask = np.broadcast_to(p > 0, out.shape)
    pb, qb = np.broadcast_to(p, out.shape), np.broadcast_to(q, out.shape)
    out[mask] = pb[mask] * np.log2(qb[mask])
    return out


def entropy(p) -> float:
    p = as_pmf(p)
    return float(-xlogy2(p, p).sum())


def cross_entropy(p, q) -> float:
    """``H(p, q) = -sum p log2 q`` in bits."""
    return float(-xlogy2(as_pmf(p), as_pmf(q)).sum())


def shannon_mi(joint) -> float:
    """Mutual information of a joint table, in bits."""
    j = as_joint(joint)
    px = j.sum(axis=1)
    py = j.sum(axis=0)
    rows, cols = np.nonzero(j > 0)
    # log of each factor separately: px * py can underflow for tiny entries
    jj = j[rows, cols]
    mi = float(np.sum(jj * (np.log2(jj) - np.log2(px[rows]) - np.log2(py[cols]))))
    # rounding can leave -1e-17 on product tables
    return max(mi, 0.0)


def logical_probability(t, prior) -> float:
    """``T(theta_j) = sum_i P(x_i) T(theta_j|x_i)``."""
    tv = _truth_values(t)
    p = as_pmf(prior)
    if tv.shape != p.shape:
        raise ValidationError(
            f"truth function covers {tv.size} classes but prior has {p.size}"
        )
    return float(np.dot(p, tv))


def likelihood_from_truth(t, prior) -> np.ndarray:
    """``P(x|theta_j) = T(theta_j|x) P(x) / T(theta_j)``."""
    tv = _truth_values(t)
    p = as_pmf(prior)
    lp = logical_probability(tv, p)
    if lp <= 0:
        raise DegenerateTruthError("truth function has zero logical probability")
    return as_pmf(tv * p / lp)


def truth_from_likelihood(likelihood, prior) -> TruthFunction:
    """Recover the truth function from a likelihood by normalizing its max to 1.

    ``T(theta_j|x_i)`` is the ratio ``P(x_i|theta_j)/P(x_i)`` divided by its
    largest value; that divisor's reciprocal is the logical probability.
    """
    lik = as_pmf(likelihood)
    p = as_pmf(prior)
    if lik.shape != p.shape:
        raise ValidationError("likelihood and prior must cover the same classes")
    if np.any((lik > 0) & (p <= 0)):
        raise DomainError("prior is zero where the likelihood is positive")
    ratio = np.zeros_like(lik)
    pos = p > 0
    ratio[pos] = lik[pos] / p[pos]
    top = ratio.max()
    return TruthFunction(np.minimum(ratio / top, 1.0), logical_probability=1.0 / top)


def sample_log_likelihood(counts: Sequence[int], model) -> float:
    """``log2 prod_i P(x_i|theta_j)^N_ji`` for label counts ``N_ji``."""
    n = np.asarray(counts)
    if n.ndim != 1 or np.any(n < 0) or not np.all(n == np.round(n)):
        raise ValidationError("counts must be nonnegative integers")
    if n.sum() <= 0:
        raise ValidationError("counts must have a positive total")
    q = as_pmf(model)
    if q.shape != n.shape:
        raise ValidationError("counts and model must cover the same classes")
    if np.any((n > 0) & (q <= 0)):
        raise DomainError("model assigns zero probability to an observed class")
    return float(xlogy2(n.astype(float), q).sum())


def semantic_info_point(t_value: float, t_logical: float) -> float:
    """``log2(T(theta_j|x_i) / T(theta_j))``; negative for a misleading label."""
    if not (t_value > 0 and t_logical > 0):
        raise DomainError("semantic information needs positive arguments")
    return math.log2(t_value / t_logical)


def semantic_info_conditional(sampling, t, t_logical: float) -> float:
    """Average semantic information of one label under its sampling distribution."""
    s = as_pmf(sampling)
    tv = _truth_values(t)
    if tv.shape != s.shape:
        raise ValidationError("sampling distribution and truth function differ in size")
    if not t_logical > 0:
        raise DomainError("logical probability must be positive")
    return float(xlogy2(s, tv).sum() - math.log2(t_logical))


def semantic_mi(joint, truths, logicals) -> float:
    """Semantic mutual information ``sum_ij P(x_i,y_j) log2 T(theta_j|x_i)/T(theta_j)``.

    ``truths`` is indexed ``[label, class]``; pass ``P(y_j|x_i)/P(y_j)`` as the
    truths with unit logicals to get the matched-channel case.
    """
    j = as_joint(joint)
    tv = np.array([_truth_values(t) for t in truths], dtype=float)
    lg = np.asarray(logicals, dtype=float)
    if tv.shape != j.T.shape or lg.shape != (j.shape[1],):
        raise ValidationError(
            f"truths {tv.shape} / logicals {lg.shape} do not match joint {j.shape}"
        )
    if np.any(lg[j.sum(axis=0) > 0] <= 0):
        raise DomainError("logical probability must be positive for used labels")
    safe_lg = np.where(lg > 0, lg, 1.0)
    return float(xlogy2(j, tv.T / safe_lg[None, :]).sum())


def semantic_mi_gaussian_decomposition(joint, class_values, mus, sigma: float):
    """Split the SMI of Gaussian truth functions into ``H(theta) - H(theta|X)``.

    Truth functions are ``exp(-(x - mu_j)^2 / (2 sigma^2))`` evaluated at the
    real value attached to each class. Returns ``(h_theta, h_theta_given_x,
    smi)`` in bits.
    """
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    j = as_joint(joint)
    xv = np.asarray(class_values, dtype=float)
    mu = np.asarray(mus, dtype=float)
    if xv.shape != (j.shape[0],) or mu.shape != (j.shape[1],):
        raise ValidationError("class_values/mus do not match the joint table")
    px = j.sum(axis=1)
    py = j.sum(axis=0)
    sq = (xv[:, None] - mu[None, :]) ** 2 / (2.0 * sigma**2)  # [class, label]
    logicals = px @ np.exp(-sq)
    h_theta = float(-xlogy2(py, logicals).sum())
    h_theta_given_x = float(np.sum(j * sq) * LOG2E)
    return h_theta, h_theta_given_x, h_theta - h_theta_given_x
