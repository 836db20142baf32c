import numpy as np
import pytest

from core.config import build_config
from core.data import Dataset, serialize_libsvm
from core.streams import generator


@pytest.fixture
def blobs():
    """Two labelled Gaussian blobs (N=120, p=4) centred at +-1.5."""
    rng = generator(90)
    X = np.vstack([rng.normal(1.5, 0.5, size=(60, 4)), rng.normal(-1.5, 0.5, size=(60, 4))])
    labels = np.array([1.0] * 60 + [-1.0] * 60)
    return Dataset.from_dense(X, labels)


@pytest.fixture
def make_config():
    """Small, fast experiment settings; keyword arguments override them."""
    def factory(**overrides):
        settings = dict(gamma=0.2, j_plus=60, j="10,20", s_pairs=300, frob_m=50, timings=False)
        settings.update(overrides)
        return build_config(overrides=settings)
    return factory


@pytest.fixture
def libsvm_file(tmp_path, blobs):
    path = tmp_path / "blobs.libsvm"
    path.write_text(serialize_libsvm(blobs))
    return path
