"""Trainable projection models sharing one solver path.

Methods:
  discriminative  label-aware correlation fusion over P >= 2 modalities
  mcca            the same machinery with no label coupling (identity
                  indicator): maximize summed pairwise correlations
  cca             mcca restricted to exactly two modalities
  dcca            the discriminative model restricted to exactly two
  serial          plain concatenation, identity projection

A fitted model carries everything needed to reproduce its projection on new
raw data: per-modality weight blocks, centering statistics, and the label
map. Models are plain data and never mutated after fit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .dataset import ClassLabels, MultimodalDataset, apply_centering
from .errors import ConfigError, DimensionError, LabelError, ValidationError
from .linalg import build_block_matrices, positive_count, solve_generalized

METHODS = ("cca", "dcca", "discriminative", "mcca", "serial")

_P_RULES = {
    "cca": (2, 2),
    "dcca": (2, 2),
    "discriminative": (2, None),
    "mcca": (2, None),
    "serial": (1, None),
}

MODEL_FORMAT_VERSION = 1


def validate_method(method: str, n_modalities: int) -> None:
    """Check the method tag and its modality-count constraint."""
    if method not in METHODS:
        raise ConfigError(
            f"unknown method {method!r}; choose from {', '.join(METHODS)}"
        )
    lo, hi = _P_RULES[method]
    if hi is not None and n_modalities != lo:
        raise ConfigError(
            f"method {method!r} requires exactly {lo} modalities, got {n_modalities}"
        )
    if n_modalities < lo:
        raise ConfigError(
            f"method {method!r} requires at least {lo} modalities, got {n_modalities}"
        )


@dataclass
class ProjectionModel:
    """Fitted per-modality projection weights plus reproduction metadata."""

    method: str
    weights: list[np.ndarray]  # per modality, shape (m_k, d)
    eigenvalues: np.ndarray  # (d,), descending; empty for serial
    d: int
    c: int
    feature_means: list[np.ndarray]
    feature_scales: list[np.ndarray]
    label_map: dict[int, int]
    modality_names: tuple[str, ...]
    normalization: str = "diag-reg-orthonormal"
    n_positive: int = 0
    unscaled_columns: tuple[int, ...] = ()

    @property
    def modality_dims(self) -> tuple[int, ...]:
        return tuple(w.shape[0] for w in self.weights)

    @property
    def total_features(self) -> int:
        return sum(self.modality_dims)

    @property
    def stacked_weights(self) -> np.ndarray:
        """Vertical concatenation of the per-modality blocks: (Q, d)."""
        return np.vstack(self.weights)


@dataclass
class ProjectedData:
    """Fused coordinates (d x n) with the samples' class labels."""

    y: np.ndarray
    labels: ClassLabels


def _split_rows(mat: np.ndarray, dims) -> list[np.ndarray]:
    blocks = []
    start = 0
    for m in dims:
        blocks.append(mat[start : start + m].copy())
        start += m
    return blocks


def fit(
    dataset: MultimodalDataset,
    method: str,
    d: int | None = None,
    ridge: float | None = None,
) -> ProjectionModel:
    """Fit a projection model on a centered multimodal dataset.

    ``d`` is the number of projection columns to keep. When omitted,
    discriminative/dcca keep one column per positive eigenvalue (capped at
    the class count, floor 1); mcca/cca/serial keep the full stacked
    dimension so downstream sweeps can cover the whole spectrum.
    """
    validate_method(method, dataset.n_modalities)
    if not dataset.is_centered():
        raise ValidationError(
            "dataset must be centered before fitting (see center())"
        )
    if method in ("discriminative", "dcca") and dataset.labels.n_classes < 2:
        raise LabelError(f"method {method!r} needs at least 2 classes")
    total = dataset.total_features
    if d is not None and not 1 <= d <= total:
        raise ConfigError(f"d must be in [1, {total}], got {d}")

    dims = dataset.dims
    names = tuple(fs.modality_name for fs in dataset.modalities)
    means = [fs.feature_means.copy() for fs in dataset.modalities]
    scales = [fs.feature_scales.copy() for fs in dataset.modalities]
    c = dataset.labels.n_classes

    if method == "serial":
        d_eff = total if d is None else d
        weights = _split_rows(np.eye(total)[:, :d_eff], dims)
        eigenvalues = np.zeros(0)
        n_positive = 0
    else:
        blocks = build_block_matrices(
            dataset,
            ridge=ridge,
            class_coupling=method in ("discriminative", "dcca"),
        )
        solution = solve_generalized(blocks, total)
        n_positive = positive_count(solution.eigenvalues)
        if d is None:
            if method in ("discriminative", "dcca"):
                d_eff = max(1, min(n_positive, c))
            else:
                d_eff = total
        else:
            d_eff = d
        weights = _split_rows(solution.eigenvectors[:, :d_eff], dims)
        eigenvalues = solution.eigenvalues[:d_eff].copy()

    return ProjectionModel(
        method=method,
        weights=weights,
        eigenvalues=eigenvalues,
        d=d_eff,
        c=c,
        feature_means=means,
        feature_scales=scales,
        label_map=dict(dataset.labels.label_map),
        modality_names=names,
        n_positive=n_positive,
    )


def project(model: ProjectionModel, raw: MultimodalDataset, d: int | None = None) -> ProjectedData:
    """Center raw data with the model's stored statistics and project it.

    ``d`` truncates to the leading columns (default: the model's own d); the
    d-dimensional output is always the first d rows of the full one.
    """
    if d is None:
        d = model.d
    if not 1 <= d <= model.d:
        raise ConfigError(f"d must be in [1, {model.d}], got {d}")
    got = tuple(fs.n_features for fs in raw.modalities)
    if got != model.modality_dims:
        raise DimensionError(
            f"modality dimensions {got} do not match the model's {model.modality_dims}"
        )
    centered = apply_centering(model.feature_means, raw, model.feature_scales)
    x = np.vstack([fs.data for fs in centered.modalities])
    y = model.stacked_weights[:, :d].T @ x
    return ProjectedData(y, raw.labels)


def rescale_to_constraint(model: ProjectionModel, dataset: MultimodalDataset) -> ProjectionModel:
    """Rescale each projection column so its per-modality self-correlation
    quadratic forms sum to the modality count.

    This is the alternative normalization to the solver's default; serial
    models pass through unchanged. Columns whose projected variance is
    numerically zero (possible under exact rank deficiency) are flagged in
    ``unscaled_columns`` and kept as they are.
    """
    if model.method == "serial":
        return model
    got = tuple(fs.n_features for fs in dataset.modalities)
    if got != model.modality_dims:
        raise DimensionError(
            f"modality dimensions {got} do not match the model's {model.modality_dims}"
        )
    grams = [fs.data @ fs.data.T for fs in dataset.modalities]
    n_sets = len(grams)
    mean_diag = sum(float(np.trace(g)) for g in grams) / max(model.total_features, 1)

    new_weights = [w.copy() for w in model.weights]
    flagged = []
    for j in range(model.d):
        quad = 0.0
        norm2 = 0.0
        for w, g in zip(model.weights, grams):
            col = w[:, j]
            quad += float(col @ g @ col)
            norm2 += float(col @ col)
        if quad <= 1e-12 * max(mean_diag, 1e-30) * norm2 or quad <= 0.0:
            flagged.append(j)
            continue
        factor = np.sqrt(n_sets / quad)
        for w in new_weights:
            w[:, j] *= factor
    return replace(
        model,
        weights=new_weights,
        normalization="modality-variance-sum",
        unscaled_columns=tuple(flagged),
    )


def save_model(model: ProjectionModel, path) -> None:
    """Persist a model as JSON (weights row-major, full float precision)."""
    payload = {
        "format_version": MODEL_FORMAT_VERSION,
        "method": model.method,
        "d": model.d,
        "c": model.c,
        "modality_dims": list(model.modality_dims),
        "modality_names": list(model.modality_names),
        "weights": [w.tolist() for w in model.weights],
        "eigenvalues": model.eigenvalues.tolist(),
        "feature_means": [m.tolist() for m in model.feature_means],
        "feature_scales": [s.tolist() for s in model.feature_scales],
        "label_map": sorted([int(k), int(v)] for k, v in model.label_map.items()),
        "normalization": model.normalization,
        "n_positive": model.n_positive,
        "unscaled_columns": list(model.unscaled_columns),
    }
    Path(path).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_model(path) -> ProjectionModel:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    version = payload.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ConfigError(
            f"unsupported model format version {version!r} (expected {MODEL_FORMAT_VERSION})"
        )
    return ProjectionModel(
        method=payload["method"],
        weights=[np.asarray(w, dtype=np.float64) for w in payload["weights"]],
        eigenvalues=np.asarray(payload["eigenvalues"], dtype=np.float64),
        d=int(payload["d"]),
        c=int(payload["c"]),
        feature_means=[np.asarray(m, dtype=np.float64) for m in payload["feature_means"]],
        feature_scales=[np.asarray(s, dtype=np.float64) for s in payload["feature_scales"]],
        label_map={int(k): int(v) for k, v in payload["label_map"]},
        modality_names=tuple(payload["modality_names"]),
        normalization=payload["normalization"],
        n_positive=int(payload["n_positive"]),
        unscaled_columns=tuple(payload["unscaled_columns"]),
    )
