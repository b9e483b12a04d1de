"""Loading, validation, and centering of multimodal feature tables.

In memory a modality is stored features-by-samples; CSV files on disk hold
one sample per row. Class labels are remapped to a dense 0..c-1 range at
load time, with the original values kept in a sidecar map.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import AlignmentError, DimensionError, LabelError, ParseError

# Row-sum tolerance for the zero-mean check: tol = RTOL * n * max|entry|.
ZERO_MEAN_RTOL = 1e-9


@dataclass
class FeatureSet:
    """One modality's feature matrix (features x samples) plus the centering
    statistics that produced it.

    ``feature_means``/``feature_scales`` record the affine transform already
    applied to the raw values: stored = (raw - means) / scales. Fresh, raw
    data carries zero means and unit scales.
    """

    data: np.ndarray
    feature_means: np.ndarray | None = None
    feature_scales: np.ndarray | None = None
    modality_name: str = ""

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 2:
            raise DimensionError(
                f"feature matrix must be 2-D (features x samples), got {self.data.ndim}-D"
            )
        m, n = self.data.shape
        if m < 1:
            raise DimensionError("a modality needs at least one feature row")
        if n < 2:
            raise DimensionError(f"a modality needs at least two samples, got {n}")
        if self.feature_means is None:
            self.feature_means = np.zeros(m)
        else:
            self.feature_means = np.asarray(self.feature_means, dtype=np.float64)
            if self.feature_means.shape != (m,):
                raise DimensionError(
                    f"feature_means has length {self.feature_means.shape}, expected ({m},)"
                )
        if self.feature_scales is None:
            self.feature_scales = np.ones(m)
        else:
            self.feature_scales = np.asarray(self.feature_scales, dtype=np.float64)
            if self.feature_scales.shape != (m,):
                raise DimensionError(
                    f"feature_scales has length {self.feature_scales.shape}, expected ({m},)"
                )

    @property
    def n_features(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]

    def is_centered(self) -> bool:
        """True when every feature row sums to zero within tolerance."""
        scale = float(np.abs(self.data).max(initial=0.0))
        tol = ZERO_MEAN_RTOL * self.n_samples * scale
        return bool(np.all(np.abs(self.data.sum(axis=1)) <= tol))


@dataclass
class ClassLabels:
    """Dense class ids (0..c-1) for n samples, with per-class counts.

    ``label_map`` maps original label values to the dense ids; it is the
    identity when the input was already dense.
    """

    labels: np.ndarray
    class_counts: np.ndarray
    label_map: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.class_counts = np.asarray(self.class_counts, dtype=np.int64)
        if self.labels.ndim != 1:
            raise LabelError("labels must be a 1-D vector")
        c = self.class_counts.shape[0]
        if c < 1:
            raise LabelError("need at least one class")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= c):
            raise LabelError(f"labels must lie in [0, {c}), got range "
                             f"[{self.labels.min()}, {self.labels.max()}]")
        counts = np.bincount(self.labels, minlength=c)
        if not np.array_equal(counts, self.class_counts):
            raise LabelError("class_counts do not match the label vector")
        if np.any(self.class_counts < 1):
            raise LabelError("every class must contain at least one sample")
        if not self.label_map:
            self.label_map = {int(i): int(i) for i in range(c)}

    @classmethod
    def from_values(cls, values, require_multiclass: bool = True) -> "ClassLabels":
        """Build dense labels from arbitrary integer values."""
        values = np.asarray(values, dtype=np.int64)
        uniq = np.unique(values)
        if require_multiclass and uniq.size < 2:
            raise LabelError(f"need at least 2 distinct labels, got {uniq.size}")
        mapping = {int(orig): int(dense) for dense, orig in enumerate(uniq)}
        dense = np.searchsorted(uniq, values)
        counts = np.bincount(dense, minlength=uniq.size)
        return cls(dense, counts, mapping)

    @property
    def n_samples(self) -> int:
        return self.labels.shape[0]

    @property
    def n_classes(self) -> int:
        return self.class_counts.shape[0]

    def original_values(self) -> np.ndarray:
        """Labels translated back to their original values."""
        inverse = {dense: orig for orig, dense in self.label_map.items()}
        return np.asarray([inverse[int(v)] for v in self.labels], dtype=np.int64)


@dataclass
class MultimodalDataset:
    """P aligned feature sets plus one label vector.

    Values are treated as immutable after construction; all operations
    return new objects.
    """

    modalities: list[FeatureSet]
    labels: ClassLabels

    def __post_init__(self):
        if not self.modalities:
            raise DimensionError("need at least one modality")
        n = self.modalities[0].n_samples
        for fs in self.modalities:
            if fs.n_samples != n:
                raise AlignmentError(
                    "modalities disagree on sample count: "
                    + ", ".join(f"{m.modality_name or '?'}={m.n_samples}" for m in self.modalities)
                )
        if self.labels.n_samples != n:
            raise AlignmentError(
                f"labels have {self.labels.n_samples} entries but modalities have {n} samples"
            )

    @property
    def n_modalities(self) -> int:
        return len(self.modalities)

    @property
    def n_samples(self) -> int:
        return self.modalities[0].n_samples

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(fs.n_features for fs in self.modalities)

    @property
    def total_features(self) -> int:
        return sum(self.dims)

    def is_centered(self) -> bool:
        return all(fs.is_centered() for fs in self.modalities)


def _read_matrix(path, header: bool) -> np.ndarray:
    """Read a samples-by-features CSV into an (n, m) float array."""
    path = Path(path)
    rows: list[list[float]] = []
    width = None
    with open(path, newline="", encoding="utf-8") as fh:
        for r, row in enumerate(csv.reader(fh)):
            if header and r == 0:
                continue
            if not row or (len(row) == 1 and not row[0].strip()):
                continue  # ignore blank lines
            vals = []
            for c, cell in enumerate(row):
                try:
                    v = float(cell)
                except ValueError:
                    raise ParseError(
                        f"{path}: row {r + 1}, column {c + 1}: not a number: {cell!r}"
                    ) from None
                if not np.isfinite(v):
                    raise ParseError(
                        f"{path}: row {r + 1}, column {c + 1}: non-finite value {cell!r}"
                    )
                vals.append(v)
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise ParseError(
                    f"{path}: row {r + 1} has {len(vals)} columns, expected {width}"
                )
            rows.append(vals)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return np.asarray(rows, dtype=np.float64)


def _read_labels(path) -> np.ndarray:
    path = Path(path)
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                values.append(int(text))
            except ValueError:
                raise ParseError(
                    f"{path}: line {lineno}: not an integer label: {text!r}"
                ) from None
    if not values:
        raise ParseError(f"{path}: no labels")
    return np.asarray(values, dtype=np.int64)


def load_dataset(modality_files, labels_file, header: bool = False) -> MultimodalDataset:
    """Load aligned modality CSVs plus a labels file into an uncentered dataset.

    Every modality file must have the same number of rows (samples), and the
    labels file one integer per sample. Labels are dense-remapped; at least
    two distinct values are required.
    """
    mats = []
    names = []
    for path in modality_files:
        mats.append(_read_matrix(path, header))
        names.append(Path(path).stem)
    n_rows = [m.shape[0] for m in mats]
    values = _read_labels(labels_file)
    if len(set(n_rows)) > 1 or values.shape[0] != n_rows[0]:
        detail = ", ".join(f"{name}={n}" for name, n in zip(names, n_rows))
        raise AlignmentError(
            f"row counts disagree: {detail}, labels={values.shape[0]}"
        )
    labels = ClassLabels.from_values(values)
    modalities = [
        FeatureSet(mat.T, modality_name=name) for mat, name in zip(mats, names)
    ]
    return MultimodalDataset(modalities, labels)


def center(dataset: MultimodalDataset, scale_variance: bool = False) -> MultimodalDataset:
    """Remove per-feature means (and optionally scale rows to unit variance).

    Statistics compose with whatever was already recorded on the dataset, so
    centering twice is a no-op up to rounding. Zero-variance rows are left
    unscaled when ``scale_variance`` is on.
    """
    out = []
    for fs in dataset.modalities:
        mu = fs.data.mean(axis=1)
        data = fs.data - mu[:, None]
        means = fs.feature_means + fs.feature_scales * mu
        scales = fs.feature_scales
        if scale_variance:
            sd = data.std(axis=1)
            divisor = np.where(sd > 0, sd, 1.0)
            data = data / divisor[:, None]
            scales = scales * divisor
        out.append(FeatureSet(data, means, scales.copy(), fs.modality_name))
    return MultimodalDataset(out, dataset.labels)


def apply_centering(means, raw: MultimodalDataset, scales=None) -> MultimodalDataset:
    """Apply stored (training) statistics to raw data.

    Means are subtracted and scales divided exactly as given; nothing is
    recomputed from ``raw``, and any statistics previously recorded on it
    are ignored.
    """
    if len(means) != raw.n_modalities:
        raise DimensionError(
            f"got {len(means)} mean vectors for {raw.n_modalities} modalities"
        )
    if scales is None:
        scales = [np.ones(fs.n_features) for fs in raw.modalities]
    elif len(scales) != raw.n_modalities:
        raise DimensionError(
            f"got {len(scales)} scale vectors for {raw.n_modalities} modalities"
        )
    out = []
    for fs, mu, s in zip(raw.modalities, means, scales):
        mu = np.asarray(mu, dtype=np.float64)
        s = np.asarray(s, dtype=np.float64)
        if mu.shape != (fs.n_features,):
            raise DimensionError(
                f"modality {fs.modality_name!r}: mean vector has shape {mu.shape}, "
                f"expected ({fs.n_features},)"
            )
        if s.shape != (fs.n_features,):
            raise DimensionError(
                f"modality {fs.modality_name!r}: scale vector has shape {s.shape}, "
                f"expected ({fs.n_features},)"
            )
        data = (fs.data - mu[:, None]) / s[:, None]
        out.append(FeatureSet(data, mu.copy(), s.copy(), fs.modality_name))
    return MultimodalDataset(out, raw.labels)


def _format_float(v: float) -> str:
    return repr(float(v))


def write_matrix_csv(path, data: np.ndarray) -> None:
    """Write a features-by-samples matrix as a samples-by-rows CSV.

    Floats are written with full round-trip precision.
    """
    data = np.asarray(data, dtype=np.float64)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for j in range(data.shape[1]):
            fh.write(",".join(_format_float(v) for v in data[:, j]) + "\n")


def write_labels_csv(path, values) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for v in values:
            fh.write(f"{int(v)}\n")


def save_dataset(dataset: MultimodalDataset, out_dir, prefix: str) -> list[Path]:
    """Write a dataset back to the CSV formats ``load_dataset`` reads.

    Labels are written with their original values so a save/load round trip
    reproduces both the dense labels and the label map.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, fs in enumerate(dataset.modalities):
        name = fs.modality_name or f"modality_{i + 1}"
        path = out_dir / f"{prefix}_{name}.csv"
        write_matrix_csv(path, fs.data)
        paths.append(path)
    labels_path = out_dir / f"{prefix}_labels.csv"
    write_labels_csv(labels_path, dataset.labels.original_values())
    paths.append(labels_path)
    return paths
