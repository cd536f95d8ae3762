"""Pure numpy versions of the kernels in ``_kernels.pyx``.

Accumulation order matches the compiled loops term for term, so results are
bit-identical between backends.
"""
import numpy as np


def channel_from_labels(cond, labels, n_labels):
    labels = np.asarray(labels)
    if labels.size and (labels.min() < 0 or labels.max() >= n_labels):
        raise ValueError("label out of range")
    return np.stack(
        [np.bincount(labels, weights=row, minlength=n_labels) for row in cond]
    ).astype(np.float64)


def reclassify(post_t, log_ratio, active, prev, valid):
    active = np.asarray(active, dtype=bool)
    valid = np.asarray(valid, dtype=bool)
    prev = np.asarray(prev)
    idx = np.flatnonzero(active)
    if idx.size == 0:
        raise ValueError("no active label")
    n_cells, n_cls = post_t.shape
    surf = np.zeros((idx.size, n_cells))
    pos = post_t > 0
    for i in range(n_cls):
        col = post_t[:, i]
        with np.errstate(invalid="ignore"):
            term = col[None, :] * log_ratio[idx, i][:, None]
        surf = surf + np.where(pos[None, :, i], term, 0.0)
    # argmax returns the first maximum, i.e. the lowest active label;
    # an all -inf column also resolves to the first active label
    labels = idx[np.argmax(surf, axis=0)]
    labels = np.where(valid, labels, prev).astype(np.intp)
    return labels, int(np.count_nonzero(labels != prev))
