"""Class-conditional distributions on grids, Gaussian smoothing, and presets."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DegenerateSampleError, SupportError, ValidationError
from .probability import FeatureGrid, as_conditional, as_pmf


@dataclass(frozen=True)
class Gaussian1D:
    mu: float
    sigma: float

    ndim = 1

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ValidationError(f"sigma must be positive, got {self.sigma}")

    def density(self, points: np.ndarray) -> np.ndarray:
        z = (points[:, 0] - self.mu) / self.sigma
        return np.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2 * math.pi))


@dataclass(frozen=True)
class Gaussian2D:
    """Bivariate normal; covariance entries are in grid units squared."""

    mu_m: float
    mu_n: float
    cov_mm: float
    cov_nn: float
    cov_mn: float = 0.0

    ndim = 2

    def __post_init__(self):
        if not (self.cov_mm > 0 and self.cov_nn > 0 and self.det > 0):
            raise ValidationError(
                f"covariance ({self.cov_mm}, {self.cov_nn}, {self.cov_mn})"
                " is not positive definite"
            )

    @property
    def det(self) -> float:
        return self.cov_mm * self.cov_nn - self.cov_mn**2

    def density(self, points: np.ndarray) -> np.ndarray:
        dm = points[:, 0] - self.mu_m
        dn = points[:, 1] - self.mu_n
        q = (self.cov_nn * dm * dm - 2 * self.cov_mn * dm * dn + self.cov_mm * dn * dn) / self.det
        return np.exp(-0.5 * q) / (2 * math.pi * math.sqrt(self.det))


Shape = Union[Gaussian1D, Gaussian2D]


@dataclass(frozen=True)
class Component:
    weight: float
    shape: Shape


@dataclass(frozen=True)
class ClassSpec:
    """Prior of one true class plus the mixture describing ``P(Z|x_i)``."""

    prior: float
    components: tuple[Component, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not (0 < self.prior <= 1):
            raise ValidationError(f"class prior must be in (0, 1], got {self.prior}")
        if not comps:
            raise ValidationError("a class needs at least one component")
        for c in comps:
            if not (0 < c.weight <= 1):
                raise ValidationError(f"component weight must be in (0, 1], got {c.weight}")
        if abs(sum(c.weight for c in comps) - 1.0) > 1e-9:
            raise ValidationError("component weights must sum to 1")
        if len({c.shape.ndim for c in comps}) != 1:
            raise ValidationError("all components must share one dimensionality")

    @property
    def ndim(self) -> int:
        return self.components[0].shape.ndim

    @classmethod
    def single(cls, prior: float, shape: Shape) -> "ClassSpec":
        return cls(prior, (Component(1.0, shape),))


@dataclass(frozen=True)
class ClassSetup:
    """Priors ``P(x_i)`` and conditionals ``P(z|x_i)`` (rows) on a grid."""

    grid: FeatureGrid
    priors: np.ndarray
    conditionals: np.ndarray

    def __post_init__(self):
        priors = as_pmf(self.priors)
        cond = as_conditional(self.conditionals)
        if cond.shape != (priors.size, self.grid.n_cells):
            raise ValidationError(
                f"conditionals have shape {cond.shape}, expected"
                f" ({priors.size}, {self.grid.n_cells})"
            )
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "conditionals", cond)

    @property
    def n_classes(self) -> int:
        return self.priors.size

    def cell_mass(self) -> np.ndarray:
        """``P(z) = sum_i P(x_i) P(z|x_i)``."""
        return self.priors @ self.conditionals

    def posterior(self) -> np.ndarray:
        """``P(x_i|z)`` as ``[class, cell]``; columns of zero-mass cells are zero."""
        pz = self.cell_mass()
        joint = self.priors[:, None] * self.conditionals
        return np.divide(joint, pz, out=np.zeros_like(joint), where=pz > 0)

    def with_priors(self, priors: Sequence[float]) -> "ClassSetup":
        return ClassSetup(self.grid, np.asarray(priors, dtype=float), self.conditionals)


def discretize(spec: ClassSpec, grid: FeatureGrid) -> np.ndarray:
    """Midpoint-rule discretization of a class mixture, renormalized over the grid."""
    if spec.ndim != grid.ndim:
        raise ValidationError(
            f"class is {spec.ndim}D but the grid is {grid.ndim}D"
        )
    pts = grid.centers()
    w = np.zeros(grid.n_cells)
    for c in spec.components:
        w += c.weight * c.shape.density(pts)
    total = math.fsum(w)
    if not total > 0:
        raise SupportError("distribution has no mass on the grid")
    return as_pmf(w / total)


def build_setup(grid: FeatureGrid, specs: Sequence[ClassSpec]) -> ClassSetup:
    priors = np.array([s.prior for s in specs], dtype=float)
    cond = np.stack([discretize(s, grid) for s in specs])
    return ClassSetup(grid, priors, cond)


def fit_gaussian_smoother(empirical, grid: FeatureGrid) -> Shape:
    """Moment-matched Gaussian for an empirical pmf over grid cells.

    Within the Gaussian family, maximizing ``sum_k P(z_k|x) log P(z_k|theta)``
    is maximum likelihood, whose solution is the sample mean and covariance.
    """
    p = as_pmf(empirical)
    if p.size != grid.n_cells:
        raise ValidationError("empirical pmf does not match the grid")
    pts = grid.centers()
    mean = p @ pts
    d = pts - mean
    cov = (p[:, None] * d).T @ d
    var = np.diag(cov)
    if np.any(var <= 1e-12 * np.array([a.step for a in grid.axes]) ** 2):
        raise DegenerateSampleError("empirical distribution has zero variance on an axis")
    if grid.ndim == 1:
        return Gaussian1D(float(mean[0]), float(math.sqrt(var[0])))
    return Gaussian2D(float(mean[0]), float(mean[1]), float(cov[0, 0]), float(cov[1, 1]), float(cov[0, 1]))


def smooth_empirical(empirical, grid: FeatureGrid) -> np.ndarray:
    """Replace an unsmooth empirical pmf by its fitted Gaussian's discretization."""
    g = fit_gaussian_smoother(empirical, grid)
    return discretize(ClassSpec.single(1.0, g), grid)


EXAMPLE1_GRID = ((0.0, 100.0, 1.0),)
EXAMPLE2_GRID = ((0.0, 200.0, 1.0), (0.0, 160.0, 1.0))


def example1_specs(priors: Sequence[float] = (0.8, 0.2)) -> list[ClassSpec]:
    return [
        ClassSpec.single(priors[0], Gaussian1D(30.0, 15.0)),
        ClassSpec.single(priors[1], Gaussian1D(70.0, 10.0)),
    ]


def example1_setup(priors: Sequence[float] = (0.8, 0.2)) -> ClassSetup:
    """Two 1D Gaussian classes on ``z`` in [0, 100] (the medical-test example)."""
    return build_setup(FeatureGrid.regular(*EXAMPLE1_GRID), example1_specs(priors))


def example2_specs() -> list[ClassSpec]:
    # third class folds two mixture components with masses 0.2 and 0.1
    return [
        ClassSpec.single(0.2, Gaussian2D(50, 50, 75, 200, 50)),
        ClassSpec.single(0.5, Gaussian2D(75, 90, 200, 75, -50)),
        ClassSpec(
            0.3,
            (
                Component(2.0 / 3.0, Gaussian2D(100, 50, 125, 125, 75)),
                Component(1.0 / 3.0, Gaussian2D(120, 80, 75, 125, 0)),
            ),
        ),
    ]


def example2_setup() -> ClassSetup:
    """Three classes on a 201 x 161 grid; the third is a two-component mixture."""
    return build_setup(FeatureGrid.regular(*EXAMPLE2_GRID), example2_specs())
