"""Block correlation matrices over modalities and the ridge-regularized
symmetric-definite eigensolve that fits the fusion projections.

The coupled matrix stacks all pairwise cross-modal correlations (label-aware
or plain) with per-modality self-correlations on its diagonal; the solver
works on the difference between the coupled matrix and its block diagonal in
the inner product defined by the (possibly ridge-regularized) block diagonal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky, eigh, solve_triangular

from . import _kernels
from .dataset import ClassLabels, FeatureSet, MultimodalDataset
from .errors import AlignmentError, ConfigError, NumericError

# The block diagonal counts as singular when its smallest eigenvalue falls at
# or below SINGULAR_EIG_RTOL times its mean diagonal entry; the automatic
# ridge is RIDGE_RTOL times the mean diagonal. Relative thresholds keep the
# behavior invariant under feature scaling.
SINGULAR_EIG_RTOL = 1e-10
RIDGE_RTOL = 1e-6

# An eigenvalue counts as positive above POSITIVE_EIG_RTOL * max(1, largest).
POSITIVE_EIG_RTOL = 1e-10


def _sym(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def class_indicator_matrix(labels: ClassLabels) -> np.ndarray:
    """Dense n x n same-class indicator: 1 where two samples share a class.

    Symmetric, 0/1, rank equal to the number of distinct classes. This is
    the oracle/testing path; production code uses per-class column sums and
    never materializes it.
    """
    lab = labels.labels
    return (lab[:, None] == lab[None, :]).astype(np.float64)


def _check_pair(x_k: FeatureSet, x_m: FeatureSet, labels: ClassLabels) -> None:
    if x_k.n_samples != x_m.n_samples:
        raise AlignmentError(
            f"sample counts differ: {x_k.n_samples} vs {x_m.n_samples}"
        )
    if labels.n_samples != x_k.n_samples:
        raise AlignmentError(
            f"labels have {labels.n_samples} entries for {x_k.n_samples} samples"
        )


def within_class_corr(x_k: FeatureSet, x_m: FeatureSet, labels: ClassLabels) -> np.ndarray:
    """Cross-modal correlation accumulated over same-class sample pairs.

    Computed as the product of per-class column sums, which equals the
    indicator-matrix sandwich without building the n x n indicator.
    """
    _check_pair(x_k, x_m, labels)
    sums_k = _kernels.class_sums(x_k.data, labels.labels, labels.n_classes)
    sums_m = _kernels.class_sums(x_m.data, labels.labels, labels.n_classes)
    return sums_k @ sums_m.T


def between_class_corr(x_k: FeatureSet, x_m: FeatureSet, labels: ClassLabels) -> np.ndarray:
    """Cross-modal correlation over different-class pairs.

    For centered data this is exactly the negated within-class correlation,
    so it is computed on the same path and negated.
    """
    return -within_class_corr(x_k, x_m, labels)


@dataclass
class CorrelationBlocks:
    """Stacked-block correlation matrices for one multimodal dataset.

    ``full`` carries cross-modal blocks off the diagonal and per-modality
    self blocks on it; ``diag`` keeps only the self blocks; ``diag_reg`` is
    ``diag`` plus ``ridge`` times the identity when a ridge was applied (and
    is the same array as ``diag`` otherwise).
    """

    full: np.ndarray
    diag: np.ndarray
    diag_reg: np.ndarray
    ridge: float
    n_sets: int
    block_dims: tuple[int, ...]

    @property
    def total_dim(self) -> int:
        return self.full.shape[0]


def build_block_matrices(
    dataset: MultimodalDataset,
    ridge: float | None = None,
    class_coupling: bool = True,
) -> CorrelationBlocks:
    """Assemble the coupled and block-diagonal correlation matrices.

    With ``class_coupling`` the off-diagonal blocks sum only same-class
    sample pairs; without it they are plain cross-correlations (no label
    information), which is the mcca/cca path.

    ``ridge=None`` selects the automatic policy: declare the block diagonal
    singular when its smallest eigenvalue is at most ``SINGULAR_EIG_RTOL``
    times the mean diagonal entry, then add ``RIDGE_RTOL`` times the mean
    diagonal. An explicit value forces exactly that ridge (0 disables it).
    """
    xs = [fs.data for fs in dataset.modalities]
    labels = dataset.labels
    dims = tuple(x.shape[0] for x in xs)
    total = sum(dims)
    offsets = np.concatenate(([0], np.cumsum(dims)))
    grams = [_sym(x @ x.T) for x in xs]
    if class_coupling:
        sums = [
            _kernels.class_sums(x, labels.labels, labels.n_classes) for x in xs
        ]

    full = np.zeros((total, total))
    diag = np.zeros((total, total))
    for k in range(len(xs)):
        sk = slice(offsets[k], offsets[k + 1])
        full[sk, sk] = grams[k]
        diag[sk, sk] = grams[k]
        for m in range(k + 1, len(xs)):
            sm = slice(offsets[m], offsets[m + 1])
            if class_coupling:
                cross = sums[k] @ sums[m].T
            else:
                cross = xs[k] @ xs[m].T
            full[sk, sm] = cross
            full[sm, sk] = cross.T

    mean_diag = float(np.trace(diag)) / total
    if ridge is not None:
        if ridge < 0:
            raise ConfigError(f"ridge must be >= 0, got {ridge}")
        lam = float(ridge)
    else:
        min_eig = min(float(np.linalg.eigvalsh(g)[0]) for g in grams)
        if min_eig <= SINGULAR_EIG_RTOL * mean_diag:
            # mean_diag can only vanish for all-zero data; fall back to an
            # absolute ridge so the factorization still succeeds.
            lam = RIDGE_RTOL * (mean_diag if mean_diag > 0 else 1.0)
        else:
            lam = 0.0
    diag_reg = diag + lam * np.eye(total) if lam > 0 else diag
    return CorrelationBlocks(full, diag, diag_reg, lam, len(xs), dims)


@dataclass
class EigenSolution:
    """Leading eigenpairs of the regularized coupled-correlation problem.

    Eigenvalues are sorted descending; eigenvector columns are orthonormal in
    the ``diag_reg`` inner product and sign-fixed so each column's
    largest-magnitude entry is positive. ``residuals`` holds the 2-norm of
    the defining equation per pair; ``scale`` records the objective
    normalization in force.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    scale: str


def solve_generalized(blocks: CorrelationBlocks, k: int | None = None) -> EigenSolution:
    """Solve for the k largest eigenpairs of the coupled-minus-diagonal
    matrix, scaled by 1/(P-1), in the diag_reg inner product.

    Reduction: Cholesky-factor diag_reg = L L^T, eigendecompose the
    congruence-transformed matrix (symmetrized to scrub rounding-level
    asymmetry), and map eigenvectors back through the transposed factor.
    Requested counts beyond the spectrum are an error; the truncated solve
    currently shares the full decomposition and slices its leading pairs.
    """
    total = blocks.total_dim
    if k is None:
        k = total
    if not 1 <= k <= total:
        raise ConfigError(f"eigenpair count must be in [1, {total}], got {k}")

    scale = 1.0 / max(blocks.n_sets - 1, 1)
    coupled = scale * (blocks.full - blocks.diag)
    try:
        lower = cholesky(blocks.diag_reg, lower=True)
    except np.linalg.LinAlgError as exc:
        pivot = re.search(r"\d+", str(exc))
        where = f" at pivot {pivot.group()}" if pivot else ""
        raise NumericError(
            f"Cholesky factorization of the regularized block diagonal failed{where}: {exc}"
        ) from exc

    reduced = solve_triangular(lower, coupled, lower=True)
    reduced = solve_triangular(lower, reduced.T, lower=True).T
    reduced = _sym(reduced)
    evals, evecs = eigh(reduced)
    order = np.argsort(-evals, kind="stable")[:k]
    evals = evals[order]
    vecs = solve_triangular(lower, evecs[:, order], lower=True, trans="T")

    for j in range(vecs.shape[1]):
        i = int(np.argmax(np.abs(vecs[:, j])))
        if vecs[i, j] < 0:
            vecs[:, j] = -vecs[:, j]

    residuals = np.linalg.norm(
        coupled @ vecs - (blocks.diag_reg @ vecs) * evals, axis=0
    )
    return EigenSolution(evals, vecs, residuals, scale="1/(P-1)")


def positive_count(eigenvalues) -> int:
    """Number of eigenvalues above the positivity tolerance.

    Expects a descending spectrum; the tolerance is relative to the largest
    eigenvalue (floored at 1) so true zeros from rank deficiency are not
    mistaken for signal.
    """
    ev = np.asarray(eigenvalues, dtype=np.float64)
    if ev.size == 0:
        return 0
    tol = POSITIVE_EIG_RTOL * max(1.0, abs(float(ev[0])))
    return int(np.count_nonzero(ev > tol))


def count_positive(solution: EigenSolution) -> int:
    """Positive-eigenvalue count of a solved problem (never exceeds the
    class count for label-coupled problems; that bound is tested, not
    assumed)."""
    return positive_count(solution.eigenvalues)
