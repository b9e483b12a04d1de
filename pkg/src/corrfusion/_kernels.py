"""Hot numeric kernels, numba-compiled with a pure-numpy fallback.

The numba path is used when numba imports cleanly; set
``CORRFUSION_DISABLE_NUMBA=1`` in the environment to force the numpy path
(``USING_NUMBA`` reports which one is active). Both implementations of each
kernel are importable directly for testing and benchmarking.

Kernels:
  class_sums            per-class column sums of a feature matrix
  nn_predict            1-nearest-neighbour labels (ties -> lowest index)
  prefix_accuracy_sweep NN accuracy at every prefix dimension of a projection
"""

from __future__ import annotations

import os

import numpy as np


def class_sums_numpy(x, labels, n_classes):
    n = x.shape[1]
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), labels] = 1.0
    return x @ onehot


def nn_predict_numpy(train, train_labels, query):
    nq = query.shape[1]
    preds = np.empty(nq, dtype=np.int64)
    for q in range(nq):
        d2 = ((train - query[:, q : q + 1]) ** 2).sum(axis=0)
        preds[q] = train_labels[int(np.argmin(d2))]
    return preds


def prefix_accuracy_sweep_numpy(train, train_labels, query, query_labels):
    k, _ = train.shape
    nq = query.shape[1]
    acc = np.empty(k)
    d2 = np.zeros((nq, train.shape[1]))
    for d in range(k):
        d2 += (query[d][:, None] - train[d][None, :]) ** 2
        nearest = np.argmin(d2, axis=1)
        acc[d] = float(np.mean(train_labels[nearest] == query_labels))
    return acc


try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    _HAVE_NUMBA = False

if _HAVE_NUMBA:

    @njit(cache=True)
    def class_sums_numba(x, labels, n_classes):
        m, n = x.shape
        out = np.zeros((m, n_classes))
        for j in range(n):
            l = labels[j]
            for i in range(m):
                out[i, l] += x[i, j]
        return out

    @njit(cache=True)
    def nn_predict_numba(train, train_labels, query):
        d, nt = train.shape
        nq = query.shape[1]
        preds = np.empty(nq, dtype=np.int64)
        for q in range(nq):
            best = np.inf
            best_j = 0
            for j in range(nt):
                s = 0.0
                for i in range(d):
                    diff = train[i, j] - query[i, q]
                    s += diff * diff
                if s < best:
                    best = s
                    best_j = j
            preds[q] = train_labels[best_j]
        return preds

    @njit(cache=True)
    def prefix_accuracy_sweep_numba(train, train_labels, query, query_labels):
        k, nt = train.shape
        nq = query.shape[1]
        acc = np.empty(k)
        d2 = np.zeros((nq, nt))
        for d in range(k):
            hits = 0
            for q in range(nq):
                best = np.inf
                best_j = 0
                for j in range(nt):
                    diff = train[d, j] - query[d, q]
                    v = d2[q, j] + diff * diff
                    d2[q, j] = v
                    if v < best:
                        best = v
                        best_j = j
                if train_labels[best_j] == query_labels[q]:
                    hits += 1
            acc[d] = hits / nq
        return acc


def _env_disabled() -> bool:
    return os.environ.get("CORRFUSION_DISABLE_NUMBA", "").strip().lower() in {
        "1",
        "true",
        "yes",
    }


USING_NUMBA = _HAVE_NUMBA and not _env_disabled()

if USING_NUMBA:
    _class_sums = class_sums_numba
    _nn_predict = nn_predict_numba
    _prefix_accuracy_sweep = prefix_accuracy_sweep_numba
else:
    _class_sums = class_sums_numpy
    _nn_predict = nn_predict_numpy
    _prefix_accuracy_sweep = prefix_accuracy_sweep_numpy


def _as_f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def _as_i64(a):
    return np.ascontiguousarray(a, dtype=np.int64)


def class_sums(x, labels, n_classes):
    """Column sums of ``x`` grouped by class: (m, n_classes)."""
    return _class_sums(_as_f64(x), _as_i64(labels), int(n_classes))


def nn_predict(train, train_labels, query):
    """Label of the Euclidean-nearest training column for each query column.

    Exact distance ties resolve to the lowest training index.
    """
    return _nn_predict(_as_f64(train), _as_i64(train_labels), _as_f64(query))


def prefix_accuracy_sweep(train, train_labels, query, query_labels):
    """NN accuracy using only the first d rows, for every d up to the full
    row count. Distances accumulate row by row, so the whole sweep costs one
    pass over the pairwise matrix."""
    return _prefix_accuracy_sweep(
        _as_f64(train), _as_i64(train_labels), _as_f64(query), _as_i64(query_labels)
    )
