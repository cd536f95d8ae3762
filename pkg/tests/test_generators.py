from statistics import NormalDist

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chanmatch.errors import DegenerateSampleError, SupportError, ValidationError
from chanmatch.generators import (
    ClassSpec,
    Component,
    Gaussian1D,
    Gaussian2D,
    discretize,
    example1_setup,
    example2_setup,
    example2_specs,
    fit_gaussian_smoother,
)
from chanmatch.probability import FeatureGrid

G100 = FeatureGrid.regular((0, 100, 1))


def test_gaussian_validation():
    with pytest.raises(ValidationError):
        Gaussian1D(0, 0)
    with pytest.raises(ValidationError):
        Gaussian2D(0, 0, 1, 1, 2)  # det < 0
    with pytest.raises(ValidationError):
        ClassSpec(0.5, (Component(0.5, Gaussian1D(0, 1)),))
    with pytest.raises(ValidationError):
        ClassSpec(0.5, (Component(0.5, Gaussian1D(0, 1)), Component(0.5, Gaussian2D(0, 0, 1, 1))))


def test_discretize_mode_is_the_cell_containing_the_mean():
    p = discretize(ClassSpec.single(1, Gaussian1D(50.3, 10)), G100)
    assert np.argmax(p) == 50


def test_discretize_symmetric_about_a_cell_center():
    # the cell centers of [0, 100] step 1 are symmetric about 50.5
    p = discretize(ClassSpec.single(1, Gaussian1D(50.5, 7)), G100)
    assert np.max(np.abs(p - p[::-1])) <= 1e-12


def test_discretize_upper_tail_matches_cdf_oracle():
    p = discretize(ClassSpec.single(1, Gaussian1D(70, 10)), G100)
    d = NormalDist(70, 10)
    # cells z >= 50 cover [50, 101); the grid covers [0, 101)
    oracle = (d.cdf(101) - d.cdf(50)) / (d.cdf(101) - d.cdf(0))
    assert p[50:].sum() == pytest.approx(oracle, abs=1e-3)
    assert p[50:].sum() == pytest.approx(0.977, abs=1e-3)


def test_discretize_errors():
    with pytest.raises(SupportError):
        discretize(ClassSpec.single(1, Gaussian1D(1e5, 1)), G100)
    with pytest.raises(ValidationError):
        discretize(ClassSpec.single(1, Gaussian2D(0, 0, 1, 1)), G100)


@settings(max_examples=40, deadline=None)
@given(st.floats(-20, 120), st.floats(0.5, 40), st.floats(5, 40))
def test_discretize_is_a_pmf(mu, sigma, other):
    spec = ClassSpec(1.0, (Component(0.5, Gaussian1D(mu, sigma)), Component(0.5, Gaussian1D(50, other))))
    p = discretize(spec, G100)
    assert np.all(p >= 0)
    assert abs(p.sum() - 1) <= 1e-9


def _truncated_normal_moments(mu, sigma, lo, hi):
    d = NormalDist()
    a, b = (lo - mu) / sigma, (hi - mu) / sigma
    z = d.cdf(b) - d.cdf(a)
    shift = (d.pdf(a) - d.pdf(b)) / z
    var = sigma**2 * (1 + (a * d.pdf(a) - b * d.pdf(b)) / z - shift**2)
    return mu + sigma * shift, var**0.5


def test_fit_example1_class0_matches_truncated_moments():
    p = discretize(ClassSpec.single(1, Gaussian1D(30, 15)), G100)
    g = fit_gaussian_smoother(p, G100)
    # the grid [0, 101) cuts the Gaussian at 2 sigma, which moves the moments
    mean, sd = _truncated_normal_moments(30, 15, 0, 101)
    assert g.mu == pytest.approx(mean, abs=0.05)
    assert g.sigma == pytest.approx(sd, abs=0.05)
    assert abs(g.mu - 30) < 1.0 and abs(g.sigma - 15) < 1.0


@settings(max_examples=30, deadline=None)
@given(st.floats(30, 70), st.floats(2, 7.5))
def test_fit_recovers_params_inside_grid(mu, sigma):
    p = discretize(ClassSpec.single(1, Gaussian1D(mu, sigma)), G100)
    g = fit_gaussian_smoother(p, G100)
    assert abs(g.mu - mu) <= 0.5
    assert abs(g.sigma - sigma) <= 0.5


def test_fit_2d_recovers_covariance():
    grid = FeatureGrid.regular((0, 100, 1), (0, 80, 1))
    src = Gaussian2D(50, 40, 60, 40, 20)
    g = fit_gaussian_smoother(discretize(ClassSpec.single(1, src), grid), grid)
    assert (g.mu_m, g.mu_n) == pytest.approx((50, 40), abs=0.5)
    # midpoint rule adds step^2/12 to each variance
    assert (g.cov_mm, g.cov_nn, g.cov_mn) == pytest.approx((60, 40, 20), abs=0.5)


def test_fit_point_mass_is_degenerate():
    p = np.zeros(G100.n_cells)
    p[40] = 1
    with pytest.raises(DegenerateSampleError):
        fit_gaussian_smoother(p, G100)


def test_fit_mixture_uses_total_variance():
    spec = ClassSpec(1, (Component(0.5, Gaussian1D(25, 5)), Component(0.5, Gaussian1D(75, 5))))
    g = fit_gaussian_smoother(discretize(spec, G100), G100)
    # law of total variance: 0.5*(25+625) + 0.5*(25+5625) - 50^2 = 650
    assert g.sigma**2 == pytest.approx(650, abs=1.0)
    assert g.sigma > 5


def test_example1_setup():
    s = example1_setup()
    assert np.allclose(s.priors, [0.8, 0.2])
    assert s.grid.shape == (101,)
    assert np.argmax(s.conditionals[0]) in (29, 30)  # center 29.5 and 30.5 tie with mu = 30
    assert s.conditionals[0, 30] == pytest.approx(s.conditionals[0, 29], rel=1e-12)
    assert np.allclose(s.conditionals.sum(axis=1), 1, atol=1e-9)


def test_example2_setup():
    s = example2_setup()
    assert np.allclose(s.priors, [0.2, 0.5, 0.3])
    assert s.grid.shape == (201, 161)
    assert np.allclose(s.conditionals.sum(axis=1), 1, atol=1e-9)
    dets = [c.shape.det for spec in example2_specs() for c in spec.components]
    assert dets == [75 * 200 - 50**2, 200 * 75 - 50**2, 125 * 125 - 75**2, 75 * 125]
    assert all(d > 0 for d in dets)
    weights = [c.weight for c in example2_specs()[2].components]
    assert weights == pytest.approx([2 / 3, 1 / 3])


def test_setups_are_deterministic():
    assert example2_setup().conditionals.tobytes() == example2_setup().conditionals.tobytes()
    assert example1_setup().conditionals.tobytes() == example1_setup().conditionals.tobytes()
