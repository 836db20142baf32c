import numpy as np
import pytest

from core.config import build_config
from core.data import Dataset, serialize_libsvm
from core.harness import emit_csv, run_experiment, sweep_s
from core.models import Method
from core.streams import generator

pytestmark = pytest.mark.slow

METHODS = [Method.RFM, Method.RFM_JL, Method.RFM_GIGA]


@pytest.fixture(scope="module")
def synthetic():
    """N=2000 Gaussian points in p=10, scaled so RBF(gamma=1) values spread over (0, 1)."""
    return Dataset.from_dense(0.3 * generator(2020).normal(size=(2000, 10)))


def config(**overrides):
    settings = dict(gamma=1.0, j_plus=2000, j="200", s_pairs=10000, trials=20, frob_m=2000, timings=False,
                    n_jobs=2)
    settings.update(overrides)
    return build_config(overrides=settings)


def mean_error(rows, method):
    return float(np.mean([r.rel_frob_error for r in rows if r.method == method]))


class TestCompressionQuality:
    def test_giga_beats_fresh_and_projected_features(self, synthetic):
        rows = run_experiment(config(), synthetic, methods=METHODS)
        assert len(rows) == 3 * 20
        giga = mean_error(rows, Method.RFM_GIGA)
        assert giga < mean_error(rows, Method.RFM)
        assert giga < mean_error(rows, Method.RFM_JL)

    def test_ordering_holds_with_halton_frequencies(self, synthetic):
        rows = run_experiment(config(sampling="halton", scramble=True), synthetic, methods=METHODS)
        giga = mean_error(rows, Method.RFM_GIGA)
        assert giga < mean_error(rows, Method.RFM)
        assert giga < mean_error(rows, Method.RFM_JL)

    def test_error_saturates_in_s(self, synthetic):
        """Past the transition, ten times more pairs changes the error by less than 0.02."""
        s_values = [100, 1000, 10000, 100000]
        # R at S=10^5 takes 1.6 GB, so trials run one at a time
        rows = sweep_s(config(method="rfm-giga", n_jobs=1), s_values, synthetic)
        by_s = {s: float(np.mean([r.rel_frob_error for r in rows if r.s_pairs == s])) for s in s_values}
        assert by_s[100000] - by_s[10000] < 0.02

    def test_byte_identical_reruns(self, synthetic):
        settings = config(trials=2, j_plus=500, j="50", s_pairs=1000)
        assert emit_csv(run_experiment(settings, synthetic, methods=METHODS)) == \
            emit_csv(run_experiment(settings, synthetic, methods=METHODS))


class TestLibsvmClassification:
    @pytest.fixture
    def libsvm_path(self, tmp_path):
        """10000 labelled points in p=5: inside vs outside the median-radius sphere."""
        X = generator(2121).normal(size=(10000, 5))
        radius = np.einsum("ij,ij->i", X, X)
        labels = np.where(radius > np.median(radius), 1.0, -1.0)
        path = tmp_path / "spheres.libsvm"
        path.write_text(serialize_libsvm(Dataset.from_dense(X, labels)))
        return path

    def test_compressed_accuracy_close_to_full_features(self, libsvm_path):
        """rfm-giga at J=500 from J+=5000 stays within 0.05 of 5000 plain random features."""
        shared = dict(train=str(libsvm_path), task="classify", gamma=0.2, j_plus=5000, s_pairs=20000,
                      trials=1, n_jobs=1)
        full = run_experiment(config(**shared, method="rfm", j="5000"))
        compressed = run_experiment(config(**shared, method="rfm-giga", j="500"))

        assert [r.j_effective for r in full] == [5000]
        assert 1 <= compressed[0].j_effective <= 500
        assert abs(compressed[0].test_accuracy - full[0].test_accuracy) <= 0.05
