import itertools

import numpy as np
import pytest

from core.coreset import build_problem, sample_pairs
from core.features import FeatureMapParams, featurize
from core.methods import CoresetMethod, PlainRfm, RfmJl, build_method, get_solver
from core.models import KernelSpec, Method, SamplingStrategy
from core.solvers.frank_wolfe import FrankWolfeSolver
from core.solvers.giga import GigaSolver, giga
from core.streams import TrialSeeds


@pytest.fixture
def draw(blobs):
    """The shared J+ = 60 draw a trial would hand to every method."""
    return FeatureMapParams.draw(KernelSpec(gamma=0.2), SamplingStrategy(seed=3), 60, blobs.dim)


def ticking_clock():
    """A clock that advances one second per reading."""
    counter = itertools.count()
    return lambda: float(next(counter))


class TestGetSolver:
    @pytest.mark.parametrize("name", ["fw", "frank-wolfe", "FrankWolfe", "rfm-fw"])
    def test_frank_wolfe_names(self, name):
        assert isinstance(get_solver(name), FrankWolfeSolver)

    @pytest.mark.parametrize("name", ["giga", "GIGA", "rfm-giga"])
    def test_giga_names(self, name):
        assert isinstance(get_solver(name), GigaSolver)

    def test_unknown(self):
        with pytest.raises(ValueError):
            get_solver("lasso")


class TestBuildMethod:
    @pytest.mark.parametrize("method,cls", [
        (Method.RFM, PlainRfm),
        (Method.RFM_JL, RfmJl),
        (Method.RFM_FW, CoresetMethod),
        (Method.RFM_GIGA, CoresetMethod),
    ])
    def test_strategy_per_method(self, make_config, method, cls):
        assert isinstance(build_method(make_config(), method), cls)

    def test_coreset_solver_follows_method(self, make_config):
        assert isinstance(build_method(make_config(), Method.RFM_FW).solver, FrankWolfeSolver)

    def test_s_override(self, make_config):
        assert build_method(make_config(), Method.RFM_GIGA, s_pairs=77).s_pairs == 77


class TestPlainRfm:
    def test_uses_prefix_of_draw(self, make_config, blobs, draw):
        maps = PlainRfm(make_config()).fit(blobs, draw, TrialSeeds.for_trial(0), [10, 20])
        assert sorted(maps) == [10, 20]
        fm = maps[10]
        assert (fm.j_plus, fm.j_effective) == (10, 10)
        np.testing.assert_allclose(fm.transform(blobs.to_csr()),
                                   featurize(draw.restrict(np.arange(10)), blobs.to_csr()))


class TestRfmJl:
    def test_projects_full_draw(self, make_config, blobs, draw):
        maps = RfmJl(make_config(), clock=ticking_clock()).fit(blobs, draw, TrialSeeds.for_trial(0), [10])
        fm = maps[10]
        assert fm.j_plus == 60
        assert fm.transform(blobs.to_csr()).shape == (blobs.n_rows, 10)
        assert fm.t_compress_ms > 0


class TestCoresetMethod:
    def test_support_within_budget(self, make_config, blobs, draw):
        maps = CoresetMethod(make_config()).fit(blobs, draw, TrialSeeds.for_trial(0), [5, 10, 20])
        for j, fm in maps.items():
            assert fm.j_plus == 60
            assert 1 <= fm.j_effective <= j
            assert fm.weights.support_size == fm.j_effective
            assert fm.transform(blobs.to_csr()).shape == (blobs.n_rows, fm.j_effective)

    def test_checkpoints_match_dedicated_runs(self, make_config, blobs, draw):
        """One solver run serves every J: the J=5 map equals a separate 5-iteration solve."""
        config = make_config(method="rfm-giga")
        seeds = TrialSeeds.for_trial(4)
        maps = CoresetMethod(config).fit(blobs, draw, seeds, [5, 20])
        problem = build_problem(blobs, draw, sample_pairs(blobs.n_rows, config.s_pairs, seeds.pairs))
        assert maps[5].weights == giga(problem, 5)
        assert maps[20].weights == giga(problem, 20)

    def test_compression_time_grows_with_j(self, make_config, blobs, draw):
        maps = CoresetMethod(make_config(), clock=ticking_clock()).fit(blobs, draw, TrialSeeds.for_trial(0), [5, 20])
        assert 0 < maps[5].t_compress_ms <= maps[20].t_compress_ms

    def test_runs_through_solver_path(self, make_config, blobs, draw, monkeypatch):
        """Checkpoints come from one solve_path call; each J is timed at the iterate it reports."""
        method = CoresetMethod(make_config(method="rfm-giga"), clock=ticking_clock())
        calls = []
        solve_path = method.solver.solve_path

        def spy(problem, checkpoints, progress_callback=None):
            calls.append(list(checkpoints))
            return solve_path(problem, checkpoints, progress_callback=progress_callback)

        monkeypatch.setattr(method.solver, "solve_path", spy)
        maps = method.fit(blobs, draw, TrialSeeds.for_trial(0), [5, 3])
        assert calls == [[3, 5]]
        assert maps[3].t_compress_ms == pytest.approx(3000.0)
        assert maps[5].t_compress_ms == pytest.approx(5000.0)
