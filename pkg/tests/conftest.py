import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from oblknn.core import LabeledDataset  # noqa: E402

DATA_DIR = os.environ.get("OBLKNN_DATA_DIR", os.path.join(os.path.dirname(__file__), "..", "data"))


def random_dataset(rng, n=None, d=None, n_classes=None, integer=False):
    """Random labelled data in which every class occurs at least once."""
    n_classes = n_classes or int(rng.integers(1, 6))
    n = n or int(rng.integers(n_classes, 101))
    d = d or int(rng.integers(1, 21))
    if integer:
        X = rng.integers(-3, 4, size=(n, d)).astype(float)
    else:
        X = rng.normal(size=(n, d)) * rng.uniform(0.1, 10.0, size=d) + rng.uniform(-5, 5, size=d)
    y = np.concatenate([np.arange(n_classes), rng.integers(0, n_classes, size=n - n_classes)])
    rng.shuffle(y)
    return LabeledDataset(X, y, tuple(f"c{i}" for i in range(n_classes)))


def blobs(rng, n_per_class=20, d=3, n_classes=2, separation=50.0, noise=0.5):
    X = np.vstack([rng.normal(loc=c * separation, scale=noise, size=(n_per_class, d)) for c in range(n_classes)])
    y = np.repeat(np.arange(n_classes), n_per_class)
    return LabeledDataset(X, y, tuple(f"c{i}" for i in range(n_classes)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
