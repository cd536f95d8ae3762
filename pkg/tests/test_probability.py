import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from chanmatch.errors import DegenerateTruthError, DomainError, ValidationError
from chanmatch.probability import (
    Axis,
    FeatureGrid,
    TruthFunction,
    as_joint,
    as_pmf,
    cross_entropy,
    likelihood_from_truth,
    logical_probability,
    sample_log_likelihood,
    semantic_info_conditional,
    semantic_info_point,
    semantic_mi,
    semantic_mi_gaussian_decomposition,
    shannon_mi,
    truth_from_likelihood,
)


def simplex(n, min_value=1e-3):
    return (
        arrays(float, n, elements=st.floats(min_value, 1.0))
        .filter(lambda a: a.sum() > 1e-3)
        .map(lambda a: a / a.sum())
    )


# -- grids and tables --------------------------------------------------------


def test_axis_cell_count_and_centers():
    ax = Axis(0, 100, 1)
    assert ax.count == 101
    assert ax.coords()[54] == 54.0
    assert ax.centers()[54] == 54.5
    assert Axis(0.0, 1.0, 0.1).count == 11


@pytest.mark.parametrize("bad", [(0, 100, 0), (0, 100, -1), (5, 5, 1), (0, 1, 2)])
def test_axis_rejects_degenerate(bad):
    with pytest.raises(ValidationError):
        Axis(*bad)


def test_grid_flattening_is_c_order():
    g = FeatureGrid.regular((0, 2, 1), (0, 3, 1))
    assert g.shape == (3, 4) and g.n_cells == 12
    m, n = g.index_arrays()
    assert (m[5], n[5]) == (1, 1)
    assert np.allclose(g.centers()[5], [1.5, 1.5])


def test_grid_needs_one_or_two_axes():
    with pytest.raises(ValidationError):
        FeatureGrid.regular((0, 1, 1), (0, 1, 1), (0, 1, 1))


def test_pmf_renormalizes_within_tolerance_and_rejects_beyond():
    p = as_pmf([0.5, 0.5 + 5e-10])
    assert p.sum() == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValidationError):
        as_pmf([0.5, 0.6])
    with pytest.raises(ValidationError):
        as_pmf([1.2, -0.2])
    assert not p.flags.writeable


# -- Shannon MI ---------------------------------------------------------------


def test_mi_noiseless_binary_channel():
    assert shannon_mi(np.diag([0.5, 0.5])) == pytest.approx(1.0, abs=1e-12)


def test_mi_rejects_invalid_joint():
    with pytest.raises(ValidationError):
        shannon_mi([[0.5, 0.6], [0.0, 0.0]])
    with pytest.raises(ValidationError):
        shannon_mi([[1.1, -0.1], [0.0, 0.0]])


@given(simplex(3, 0.0), simplex(4, 0.0))
def test_mi_zero_on_product_joints(px, py):
    assert abs(shannon_mi(np.outer(px, py))) <= 1e-12


@given(arrays(float, (3, 3), elements=st.floats(0, 1)).filter(lambda a: a.sum() > 1e-3))
def test_mi_nonnegative(a):
    assert shannon_mi(a / a.sum()) >= 0.0


# -- logical probability and the two Bayes directions -------------------------


def test_logical_probability_examples():
    assert logical_probability([1, 1, 1], [0.2, 0.3, 0.5]) == pytest.approx(1.0)
    assert logical_probability([1, 0], [0.5, 0.5]) == 0.5
    assert logical_probability([0.25, 1.0], [0.8, 0.2]) == pytest.approx(0.4, abs=1e-15)
    with pytest.raises(ValidationError):
        logical_probability([1, 0, 1], [0.5, 0.5])


def test_likelihood_from_truth_examples():
    p = np.array([0.1, 0.6, 0.3])
    assert np.allclose(likelihood_from_truth([1, 1, 1], p), p)
    assert np.allclose(likelihood_from_truth([1, 0], [0.5, 0.5]), [1, 0])
    assert np.allclose(likelihood_from_truth([0.25, 1.0], [0.8, 0.2]), [0.5, 0.5])
    with pytest.raises(DegenerateTruthError):
        likelihood_from_truth([0, 1], [1.0, 0.0])


def test_truth_from_likelihood_examples():
    p = np.array([0.1, 0.6, 0.3])
    assert np.allclose(truth_from_likelihood(p, p).values, 1.0)
    assert np.allclose(truth_from_likelihood([1, 0], [0.5, 0.5]).values, [1, 0])
    t = truth_from_likelihood([0.5, 0.5], [0.8, 0.2])
    assert np.allclose(t.values, [0.25, 1.0])
    # logical probability is the reciprocal of the largest ratio (2.5)
    assert t.logical_probability == pytest.approx(0.4)
    assert t.logical_probability == pytest.approx(logical_probability(t, [0.8, 0.2]))
    with pytest.raises(DomainError):
        truth_from_likelihood([0.5, 0.5], [1.0, 0.0])


def test_truth_function_rejects_out_of_range():
    with pytest.raises(ValidationError):
        TruthFunction([0.5, 1.2])


@settings(max_examples=100)
@given(st.integers(2, 6).flatmap(lambda n: st.tuples(simplex(n), simplex(n, 0.01))))
def test_bayes_round_trip(pair):
    raw, prior = pair
    t = raw / raw.max()
    back = truth_from_likelihood(likelihood_from_truth(t, prior), prior)
    assert np.allclose(back.values, t, atol=1e-9)
    assert back.values.max() == pytest.approx(1.0, abs=1e-9)


# -- likelihood vs cross-entropy ---------------------------------------------


def test_sample_log_likelihood_examples():
    assert sample_log_likelihood([1, 0], [1, 0]) == 0.0
    assert sample_log_likelihood([1, 1], [0.5, 0.5]) == pytest.approx(-2.0)
    # direct product oracle: log2(0.75**3 * 0.25)
    assert sample_log_likelihood([3, 1], [0.75, 0.25]) == pytest.approx(-3.2451124978365313, abs=1e-12)
    with pytest.raises(DomainError):
        sample_log_likelihood([1, 1], [1.0, 0.0])
    with pytest.raises(ValidationError):
        sample_log_likelihood([0, 0], [0.5, 0.5])


@settings(max_examples=100)
@given(
    st.integers(2, 5).flatmap(
        lambda n: st.tuples(st.lists(st.integers(0, 20), min_size=n, max_size=n), simplex(n))
    )
)
def test_log_likelihood_is_scaled_cross_entropy(case):
    counts, model = case
    counts = np.array(counts)
    if counts.sum() == 0:
        counts[0] = 1
    n = counts.sum()
    expected = -n * cross_entropy(counts / n, model)
    assert sample_log_likelihood(counts, model) == pytest.approx(expected, abs=1e-9)


# -- semantic information ----------------------------------------------------


def test_semantic_info_point_examples():
    assert semantic_info_point(0.3, 0.3) == 0.0
    assert semantic_info_point(1.0, 0.25) == pytest.approx(2.0)
    assert semantic_info_point(0.25, 0.4) == pytest.approx(-0.6780719051126377, abs=1e-12)
    with pytest.raises(DomainError):
        semantic_info_point(0.0, 0.5)


def test_semantic_info_conditional_examples():
    assert semantic_info_conditional([1, 0], [1, 0], 0.5) == pytest.approx(1.0)
    assert semantic_info_conditional([0.3, 0.7], [1, 1], 1.0) == 0.0
    with pytest.raises(DomainError):
        semantic_info_conditional([0.5, 0.5], [1, 0], 0.5)


def test_semantic_mi_matched_and_trivial():
    joint = np.array([[0.3, 0.1], [0.2, 0.4]])
    py = joint.sum(axis=0)
    px = joint.sum(axis=1)
    ratio = (joint / px[:, None]) / py[None, :]
    assert semantic_mi(joint, ratio.T, np.ones(2)) == pytest.approx(shannon_mi(joint), abs=1e-12)
    assert semantic_mi(joint, np.ones((2, 2)), [1.0, 1.0]) == 0.0


def test_semantic_mi_swapped_truths_is_negative():
    joint = np.diag([0.5, 0.5])
    swapped = [[0.2, 1.0], [1.0, 0.2]]
    logicals = [logical_probability(t, [0.5, 0.5]) for t in swapped]
    # brute-force evaluation of the double sum
    oracle = 0.0
    for i in range(2):
        for j in range(2):
            if joint[i, j] > 0:
                oracle += joint[i, j] * math.log2(swapped[j][i] / logicals[j])
    got = semantic_mi(joint, swapped, logicals)
    assert got == pytest.approx(oracle, abs=1e-12)
    assert got < 0


def test_semantic_mi_rejects_zero_truth_under_mass():
    with pytest.raises(DomainError):
        semantic_mi(np.diag([0.5, 0.5]), [[0, 1], [1, 0]], [0.5, 0.5])


joints3 = arrays(float, (3, 3), elements=st.floats(1e-3, 1)).map(lambda a: a / a.sum())


@settings(max_examples=100)
@given(joints3)
def test_matched_channel_identity(joint):
    px, py = joint.sum(axis=1), joint.sum(axis=0)
    ratio = joint / np.outer(px, py)
    assert semantic_mi(joint, ratio.T, np.ones(3)) == pytest.approx(shannon_mi(joint), abs=1e-9)


@settings(max_examples=50)
@given(joints3, arrays(float, (3, 3), elements=st.floats(0.05, 1)))
def test_semantic_mi_bounded_by_shannon(joint, truths):
    px = joint.sum(axis=1)
    logicals = [logical_probability(t, px) for t in truths]
    assert semantic_mi(joint, truths, logicals) <= shannon_mi(joint) + 1e-9


def test_semantic_mi_maximized_by_matched_ratio_under_perturbation():
    rng = np.random.default_rng(3)
    for _ in range(20):
        joint = rng.dirichlet(np.ones(9)).reshape(3, 3)
        px, py = joint.sum(axis=1), joint.sum(axis=0)
        matched = (joint / px[:, None]).T  # P(y_j|x_i), [label, class]
        best = shannon_mi(joint)
        for j in range(3):
            for i in range(3):
                for f in (0.5, 0.9, 1.1, 2.0):
                    t = matched.copy()
                    t[j, i] *= f
                    t /= t.max(axis=1, keepdims=True)
                    logicals = [logical_probability(row, px) for row in t]
                    assert semantic_mi(joint, t, logicals) <= best + 1e-9


# -- Gaussian decomposition --------------------------------------------------


def _smi_via_truths(joint, xv, mus, sigma):
    px = joint.sum(axis=1)
    truths = np.exp(-((xv[None, :] - np.asarray(mus)[:, None]) ** 2) / (2 * sigma**2))
    logicals = [logical_probability(t, px) for t in truths]
    return semantic_mi(joint, truths, logicals)


def test_gaussian_decomposition_single_label():
    joint = np.array([[1.0]])
    h, hx, smi = semantic_mi_gaussian_decomposition(joint, [5.0], [5.0], 2.0)
    assert hx == 0.0 and h == 0.0 and smi == 0.0


def test_gaussian_decomposition_symmetric_uniform():
    joint = np.full((2, 2), 0.25)
    xv = np.array([-1.0, 1.0])
    h, hx, smi = semantic_mi_gaussian_decomposition(joint, xv, [-1.0, 1.0], 1.5)
    assert smi == pytest.approx(_smi_via_truths(joint, xv, [-1.0, 1.0], 1.5), abs=1e-6)
    assert h - hx == pytest.approx(smi)


def test_gaussian_decomposition_rejects_bad_sigma():
    with pytest.raises(DomainError):
        semantic_mi_gaussian_decomposition(np.diag([0.5, 0.5]), [0, 1], [0, 1], 0.0)


def test_gaussian_decomposition_example1_geometry(ex1):
    from chanmatch import init_threshold_1d, shannon_channel

    joint = ex1.priors[:, None] * shannon_channel(init_threshold_1d(ex1.grid, 54), ex1)
    xv = np.array([30.0, 70.0])
    _, _, smi = semantic_mi_gaussian_decomposition(joint, xv, [30.0, 70.0], 10.0)
    assert smi == pytest.approx(_smi_via_truths(joint, xv, [30.0, 70.0], 10.0), abs=1e-6)


@settings(max_examples=50)
@given(
    joints3,
    arrays(float, 3, elements=st.floats(-5, 5)),
    arrays(float, 3, elements=st.floats(-5, 5)),
    st.floats(0.5, 5),
)
def test_gaussian_decomposition_agrees_with_semantic_mi(joint, xv, mus, sigma):
    _, _, smi = semantic_mi_gaussian_decomposition(joint, xv, mus, sigma)
    assert smi == pytest.approx(_smi_via_truths(joint, xv, mus, sigma), abs=1e-6)


def test_joint_validation_rejects_bad_sum():
    with pytest.raises(ValidationError):
        as_joint([[0.2, 0.2], [0.2, 0.2]])
