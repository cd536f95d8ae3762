# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops of the channels-matching iteration.

Both kernels accumulate in exactly the order used by ``_kernels_py`` so the
two backends produce bit-identical results.
"""
import numpy as np

from libc.math cimport INFINITY


def channel_from_labels(const double[:, ::1] cond, const Py_ssize_t[::1] labels,
                        Py_ssize_t n_labels):
    """Sum ``P(z|x_i)`` over the cells carrying each label."""
    cdef Py_ssize_t n_cls = cond.shape[0], n_cells = cond.shape[1]
    cdef Py_ssize_t i, k, lab
    out = np.zeros((n_cls, n_labels), dtype=np.float64)
    cdef double[:, ::1] o = out
    for k in range(n_cells):
        lab = labels[k]
        if lab < 0 or lab >= n_labels:
            raise ValueError(f"label {lab} out of range at cell {k}")
    with nogil:
        for i in range(n_cls):
            for k in range(n_cells):
                o[i, labels[k]] += cond[i, k]
    return out


def reclassify(const double[:, ::1] post_t, const double[:, ::1] log_ratio,
               const unsigned char[::1] active, const Py_ssize_t[::1] prev,
               const unsigned char[::1] valid):
    """Relabel each valid cell with the label of largest conditional information.

    ``post_t`` is ``P(x_i|z)`` laid out ``[cell, class]``; ``log_ratio`` is
    ``[label, class]``. Ties go to the lowest label; invalid cells keep ``prev``.
    Returns ``(labels, n_changed)``.
    """
    cdef Py_ssize_t n_cells = post_t.shape[0], n_cls = post_t.shape[1]
    cdef Py_ssize_t n_labels = log_ratio.shape[0]
    cdef Py_ssize_t k, i, j, best_j, first_active = -1, changed = 0
    cdef double s, best, p
    for j in range(n_labels):
        if active[j]:
            first_active = j
            break
    if first_active < 0:
        raise ValueError("no active label")
    labels = np.empty(n_cells, dtype=np.intp)
    cdef Py_ssize_t[::1] out = labels
    with nogil:
        for k in range(n_cells):
            if not valid[k]:
                out[k] = prev[k]
                continue
            best = -INFINITY
            best_j = first_active
            for j in range(n_labels):
                if not active[j]:
                    continue
                s = 0.0
                for i in range(n_cls):
                    p = post_t[k, i]
                    if p > 0:
                        s = s + p * log_ratio[j, i]
                if s > best:
                    best = s
                    best_j = j
            out[k] = best_j
            if best_j != prev[k]:
                changed += 1
    return labels, changed
