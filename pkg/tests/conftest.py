import logging

import numpy as np
import pytest

from src.model.types import LabeledSample


@pytest.fixture(autouse=True)
def restore_root_logging():
    """Undo handlers installed by setup_logging during a test."""
    handlers = list(logging.root.handlers)
    level = logging.root.level
    yield
    for handler in logging.root.handlers:
        if handler not in handlers:
            stream = getattr(handler, 'stream', None)
            if stream is not None and str(getattr(stream, 'name', '')).endswith('.log'):
                stream.close()
    logging.root.handlers = handlers
    logging.root.setLevel(level)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def separated_blobs(rng):
    """Two tight 2-D blobs far apart; labels in order of first appearance."""
    first = rng.normal(0.0, 0.2, size=(30, 2))
    second = rng.normal(0.0, 0.2, size=(20, 2)) + np.array([6.0, 0.0])
    points = np.vstack([first, second])
    labels = np.array([1] * 30 + [2] * 20)
    return points, labels


@pytest.fixture
def labeled_sample(rng):
    """Two-component sample whose labels also split the covariate line."""
    labels = np.repeat([1, 2], [60, 40])
    y = np.where(labels == 1, -1.0, 1.0) + rng.normal(size=100)
    x = np.where(labels == 1, rng.uniform(0, 1, 100), rng.uniform(2, 3, 100))
    return LabeledSample(y, x, 2, labels)


@pytest.fixture
def write_csv(tmp_path):
    """Write a small CSV under tmp_path and return its path."""
    def _write(name, header, rows):
        path = tmp_path / name
        with open(path, 'w', newline='') as f:
            f.write(",".join(header) + "\n")
            for row in rows:
                f.write(",".join(str(v) for v in row) + "\n")
        return str(path)
    return _write
