"""Nearest-neighbour evaluation in the fused space.

Covers single-point classification, accuracy-versus-dimension sweeps over a
fitted spectrum, dimension selection from the cumulative eigenvalue curve,
and report generation (JSON plus two plot-ready CSVs).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .dataset import MultimodalDataset, center
from .errors import (
    ConfigError,
    DimensionError,
    LabelError,
    NumericError,
    ValidationError,
)
from .linalg import positive_count
from .models import ProjectedData, ProjectionModel, fit, project, validate_method


@dataclass
class EvalConfig:
    """Options for one evaluation run.

    ``dim`` fixes the projected dimension and skips the sweep; ``ridge``
    overrides the automatic regularization policy. Only the Euclidean metric
    is implemented, but the choice is explicit so it stays configurable.
    """

    dim: int | None = None
    metric: str = "euclidean"
    scale_variance: bool = False
    ridge: float | None = None


@dataclass
class EvalReport:
    """Results of one train/eval run for one method.

    ``accuracy_by_dim`` holds (dimension, accuracy) pairs; ``confusion`` is
    the c x c count matrix (rows true, columns predicted) at the optimal
    dimension; ``j_curve`` holds (q, cumulative eigenvalue sum) pairs whose
    consecutive differences recover the spectrum.
    """

    method: str
    accuracy_by_dim: list[tuple[int, float]]
    optimal_dim: int
    optimal_accuracy: float
    confusion: np.ndarray
    j_curve: list[tuple[int, float]]
    j_optimal_dim: int
    n_eval: int
    label_map: dict[int, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "optimal_dim": self.optimal_dim,
            "optimal_accuracy": self.optimal_accuracy,
            "n_eval": self.n_eval,
            "accuracy_by_dim": [[d, a] for d, a in self.accuracy_by_dim],
            "j_curve": [[q, j] for q, j in self.j_curve],
            "j_optimal_dim": self.j_optimal_dim,
            "confusion": self.confusion.tolist(),
            "label_map": sorted([int(k), int(v)] for k, v in self.label_map.items()),
        }


def nn_classify(train: ProjectedData, point) -> int:
    """Class of the Euclidean-nearest training column.

    Exact ties resolve to the lowest training column index.
    """
    pt = np.asarray(point, dtype=np.float64).reshape(-1)
    if pt.shape[0] != train.y.shape[0]:
        raise DimensionError(
            f"query has {pt.shape[0]} dimensions, training data has {train.y.shape[0]}"
        )
    if train.y.shape[1] == 0:
        raise ValidationError("training set is empty")
    pred = _kernels.nn_predict(train.y, train.labels.labels, pt[:, None])
    return int(pred[0])


def _accuracy(train: ProjectedData, query: ProjectedData, d: int) -> tuple[float, np.ndarray]:
    preds = _kernels.nn_predict(train.y[:d], train.labels.labels, query.y[:d])
    return float(np.mean(preds == query.labels.labels)), preds


def _sweep_projected(model: ProjectionModel, train: ProjectedData, query: ProjectedData):
    if model.method == "serial":
        acc, _ = _accuracy(train, query, model.d)
        return [(model.d, acc)]
    accs = _kernels.prefix_accuracy_sweep(
        train.y, train.labels.labels, query.y, query.labels.labels
    )
    return [(d + 1, float(a)) for d, a in enumerate(accs)]


def sweep_dimensions(model: ProjectionModel, train: MultimodalDataset, eval_ds: MultimodalDataset):
    """NN accuracy at every prefix dimension of the model's spectrum.

    Serial models have no spectrum to sweep and yield a single point at the
    full stacked dimension. Both datasets are raw; they are centered with
    the model's training statistics.
    """
    return _sweep_projected(model, project(model, train), project(model, eval_ds))


def j_criterion(eigenvalues):
    """Cumulative-sum curve of a descending spectrum and its maximizing
    dimension.

    Returns ``(curve, optimal_dim)`` where curve is a list of (q, sum of the
    first q eigenvalues). The curve rises exactly while eigenvalues stay
    positive, so the smallest maximizer (with an implicit 0 at q=0, judged
    within the positivity tolerance) equals the positive-eigenvalue count.
    """
    ev = np.asarray(eigenvalues, dtype=np.float64)
    if ev.size == 0:
        raise ValidationError("empty spectrum")
    tol = 1e-12 * max(1.0, abs(float(ev[0])))
    if np.any(np.diff(ev) > tol):
        raise ValidationError("eigenvalues must be sorted descending")
    sums = np.cumsum(ev)
    curve = [(q + 1, float(sums[q])) for q in range(ev.size)]
    return curve, positive_count(ev)


def evaluate(
    train: MultimodalDataset,
    eval_ds: MultimodalDataset,
    method: str,
    config: EvalConfig | None = None,
) -> EvalReport:
    """Fit on train, sweep projected dimensions, report the best.

    The training set is centered here (evaluation data is centered with the
    training statistics inside ``project``). Without a fixed ``config.dim``
    the model is fitted with its full spectrum so the sweep and the
    criterion curve cover every dimension. Deterministic given the datasets
    and config.
    """
    config = config or EvalConfig()
    if config.metric != "euclidean":
        raise ConfigError(f"unsupported metric {config.metric!r}")
    validate_method(method, train.n_modalities)
    if train.dims != eval_ds.dims:
        raise DimensionError(
            f"train/eval feature dimensions differ: {train.dims} vs {eval_ds.dims}"
        )
    if train.labels.label_map != eval_ds.labels.label_map:
        raise LabelError(
            "train and eval label sets differ; both files must use the same classes"
        )

    train_centered = center(train, scale_variance=config.scale_variance)
    fit_d = config.dim if config.dim is not None else train.total_features
    model = fit(train_centered, method, d=fit_d, ridge=config.ridge)

    projected_train = project(model, train)
    projected_eval = project(model, eval_ds)

    if config.dim is not None:
        acc, _ = _accuracy(projected_train, projected_eval, model.d)
        curve = [(model.d, acc)]
    else:
        curve = _sweep_projected(model, projected_train, projected_eval)

    accs = np.asarray([a for _, a in curve])
    best = int(np.argmax(accs))  # first occurrence -> smallest dimension
    optimal_dim, optimal_accuracy = curve[best]

    _, preds = _accuracy(projected_train, projected_eval, optimal_dim)
    c = model.c
    confusion = np.zeros((c, c), dtype=np.int64)
    np.add.at(confusion, (projected_eval.labels.labels, preds), 1)

    if model.eigenvalues.size:
        j_curve, j_optimal = j_criterion(model.eigenvalues)
    else:
        j_curve, j_optimal = [], 0

    return EvalReport(
        method=method,
        accuracy_by_dim=curve,
        optimal_dim=optimal_dim,
        optimal_accuracy=float(optimal_accuracy),
        confusion=confusion,
        j_curve=j_curve,
        j_optimal_dim=j_optimal,
        n_eval=eval_ds.n_samples,
        label_map=dict(train.labels.label_map),
    )


def write_report(report: EvalReport, out_dir) -> list[Path]:
    """Write report.json plus the two plot CSVs; returns the paths.

    CSV headers are exactly ``dim,accuracy`` and ``q,J``.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    json_path = out / "report.json"
    json_path.write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    acc_path = out / "accuracy_by_dim.csv"
    with open(acc_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("dim,accuracy\n")
        for d, a in report.accuracy_by_dim:
            fh.write(f"{d},{repr(float(a))}\n")
    j_path = out / "j_curve.csv"
    with open(j_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("q,J\n")
        for q, j in report.j_curve:
            fh.write(f"{q},{repr(float(j))}\n")
    return [json_path, acc_path, j_path]


def compare_methods(
    train: MultimodalDataset,
    eval_ds: MultimodalDataset,
    methods,
    config: EvalConfig | None = None,
) -> list[dict]:
    """Run ``evaluate`` once per method (deterministic tag order).

    Per-method failures are captured as rows rather than raised, so one bad
    method (say, cca on three modalities) does not sink the rest.
    """
    rows = []
    for method in sorted(dict.fromkeys(methods)):
        try:
            report = evaluate(train, eval_ds, method, config)
            rows.append({"method": method, "report": report, "error": None})
        except (ValidationError, NumericError) as exc:
            rows.append({"method": method, "report": None, "error": str(exc)})
    return rows
