import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from corrfusion import ClassLabels, FeatureSet, MultimodalDataset, center

settings.register_profile(
    "ci",
    max_examples=50,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


def random_labels(rng, n, c):
    """Dense labels covering every class at least once."""
    base = np.concatenate([np.arange(c), rng.integers(0, c, size=n - c)])
    return rng.permutation(base).astype(np.int64)


def random_centered_dataset(rng, dims, n, c, class_signal=0.0):
    """Centered multimodal dataset with optional shared class-mean signal.

    ``class_signal`` adds the same per-class offsets (through per-modality
    random maps) to every modality, which is what makes the label-coupled
    eigenproblem have genuinely positive directions.
    """
    labels = random_labels(rng, n, c)
    offsets = rng.standard_normal((c, max(dims)))
    sets = []
    for i, m in enumerate(dims):
        data = rng.standard_normal((m, n))
        if class_signal:
            mix = rng.standard_normal((m, max(dims)))
            mix /= np.linalg.norm(mix, axis=1, keepdims=True)
            data = data + class_signal * (mix @ offsets[labels].T)
        sets.append(FeatureSet(data, modality_name=f"mod{i}"))
    ds = MultimodalDataset(sets, ClassLabels.from_values(labels))
    return center(ds)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
