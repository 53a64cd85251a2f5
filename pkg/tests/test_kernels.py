import os
import subprocess
import sys

import numpy as np
import pytest

from polarscore import kernels
from polarscore.kernels import numpy_impl

try:
    from polarscore.kernels import numba_impl
except ImportError:  # pragma: no cover - numba is a hard dependency
    numba_impl = None

IMPLS = [numpy_impl] + ([numba_impl] if numba_impl else [])


def impl_ids():
    return ["numpy", "numba"][: len(IMPLS)]


# path graph 0-1-2-3 in CSR form; anchor at vertex 0
PATH_INDPTR = np.array([0, 1, 3, 5, 6], dtype=np.int64)
PATH_INDICES = np.array([1, 0, 2, 1, 3, 2], dtype=np.int64)
# exact expected steps to vertex 0, solved by hand from the linear system
PATH_HITTING = {1: 5.0, 2: 8.0, 3: 9.0}


def test_backend_exported():
    assert kernels.BACKEND in ("numba", "numpy")
    for name in ("sgns_train_epoch", "walk_hitting_times",
                 "mutual_reachability_mst", "layout_optimize"):
        assert callable(getattr(kernels, name))


@pytest.mark.parametrize("value,expect", [("numpy", "numpy"), ("numba", "numba"),
                                          ("auto", "numba")])
def test_backend_env_selection(value, expect):
    env = dict(os.environ, POLARSCORE_KERNELS=value)
    out = subprocess.run(
        [sys.executable, "-c", "from polarscore.kernels import BACKEND; print(BACKEND)"],
        env=env, capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
    assert out.stdout.strip() == expect


def test_backend_env_rejects_unknown():
    env = dict(os.environ, POLARSCORE_KERNELS="cuda")
    out = subprocess.run(
        [sys.executable, "-c", "import polarscore.kernels"],
        env=env, capture_output=True, text=True)
    assert out.returncode != 0
    assert "POLARSCORE_KERNELS" in out.stderr


class TestSgns:
    def planted_batch(self):
        rng = np.random.default_rng(5)
        W = (rng.random((12, 4)) - 0.5) / 4
        C = (rng.random((12, 4)) - 0.5) / 4
        centers = np.array([0, 1, 2], dtype=np.int32)
        contexts = np.array([3, 4, 5], dtype=np.int32)
        negatives = np.array([[6], [7], [8]], dtype=np.int32)
        lrs = np.full(3, 0.5)
        return W, C, centers, contexts, negatives, lrs

    @pytest.mark.parametrize("impl", IMPLS, ids=impl_ids())
    def test_moves_context_up_negative_down(self, impl):
        W, C, centers, contexts, negatives, lrs = self.planted_batch()
        before_pos = float(W[0] @ C[3])
        before_neg = float(W[0] @ C[6])
        impl.sgns_train_epoch(W, C, centers, contexts, negatives, lrs)
        assert float(W[0] @ C[3]) > before_pos
        assert float(W[0] @ C[6]) < before_neg

    @pytest.mark.parametrize("impl", IMPLS, ids=impl_ids())
    def test_negative_equal_to_context_skipped(self, impl):
        W, C, centers, contexts, negatives, lrs = self.planted_batch()
        negatives = contexts[:, None].copy()
        c_before = C.copy()
        impl.sgns_train_epoch(W, C, centers, contexts, negatives, lrs)
        # only the positive update may touch the context rows
        moved = np.nonzero((C != c_before).any(axis=1))[0]
        assert set(moved.tolist()) <= {3, 4, 5}

    @pytest.mark.skipif(numba_impl is None, reason="numba unavailable")
    def test_impls_agree_without_collisions(self):
        W1, C1, centers, contexts, negatives, lrs = self.planted_batch()
        W2, C2 = W1.copy(), C1.copy()
        numpy_impl.sgns_train_epoch(W1, C1, centers, contexts, negatives, lrs)
        numba_impl.sgns_train_epoch(W2, C2, centers, contexts, negatives, lrs)
        np.testing.assert_allclose(W1, W2, atol=1e-12)
        np.testing.assert_allclose(C1, C2, atol=1e-12)


class TestWalks:
    @pytest.mark.parametrize("impl", IMPLS, ids=impl_ids())
    def test_path_graph_matches_linear_solve(self, impl):
        anchor_mask = np.array([True, False, False, False])
        starts = np.array([1, 2, 3], dtype=np.int64)
        walks = 40_000
        sums, truncated = impl.walk_hitting_times(
            PATH_INDPTR, PATH_INDICES, anchor_mask, starts, walks, 4000, seed=9)
        means = sums / walks
        assert truncated.sum() == 0
        for pos, start in enumerate(starts):
            assert means[pos] == pytest.approx(PATH_HITTING[int(start)], rel=0.05)

    @pytest.mark.parametrize("impl", IMPLS, ids=impl_ids())
    def test_truncation_counted(self, impl):
        anchor_mask = np.array([True, False, False, False])
        starts = np.array([1, 3], dtype=np.int64)
        walks = 500
        sums, truncated = impl.walk_hitting_times(
            PATH_INDPTR, PATH_INDICES, anchor_mask, starts, walks, 1, seed=2)
        # vertex 3 cannot reach the anchor in one step: every walk truncates
        assert truncated[1] == walks
        assert sums[1] == walks  # each contributes max_steps = 1
        assert 0 < truncated[0] < walks

    @pytest.mark.parametrize("impl", IMPLS, ids=impl_ids())
    def test_deterministic_per_seed(self, impl):
        anchor_mask = np.array([True, False, False, False])
        starts = np.array([1, 2, 3], dtype=np.int64)
        a = impl.walk_hitting_times(PATH_INDPTR, PATH_INDICES, anchor_mask,
                                    starts, 200, 100, seed=4)
        b = impl.walk_hitting_times(PATH_INDPTR, PATH_INDICES, anchor_mask,
                                    starts, 200, 100, seed=4)
        c = impl.walk_hitting_times(PATH_INDPTR, PATH_INDICES, anchor_mask,
                                    starts, 200, 100, seed=5)
        assert np.array_equal(a[0], b[0])
        assert not np.array_equal(a[0], c[0])


class TestMst:
    @pytest.mark.parametrize("impl", IMPLS, ids=impl_ids())
    def test_line_points_plain_distance(self, impl):
        x = np.array([0.0, 1.0, 2.0, 10.0])
        dist = np.abs(x[:, None] - x[None, :])
        core = np.zeros(4)
        edges = impl.mutual_reachability_mst(dist, core)
        assert edges.shape == (3, 3)
        assert edges[:, 2].sum() == pytest.approx(10.0)

    @pytest.mark.parametrize("impl", IMPLS, ids=impl_ids())
    def test_core_distance_dominates(self, impl):
        x = np.array([0.0, 1.0, 2.0, 3.0])
        dist = np.abs(x[:, None] - x[None, :])
        core = np.array([0.0, 0.0, 0.0, 2.5])
        edges = impl.mutual_reachability_mst(dist, core)
        assert edges[:, 2].sum() == pytest.approx(1.0 + 1.0 + 2.5)

    @pytest.mark.skipif(numba_impl is None, reason="numba unavailable")
    def test_impls_agree_on_total_weight(self, rng):
        pts = rng.random((40, 3))
        diff = pts[:, None, :] - pts[None, :, :]
        dist = np.sqrt((diff**2).sum(axis=2))
        core = np.sort(dist, axis=1)[:, 4]
        e1 = numpy_impl.mutual_reachability_mst(dist, core)
        e2 = numba_impl.mutual_reachability_mst(dist, core)
        assert e1[:, 2].sum() == pytest.approx(e2[:, 2].sum(), rel=1e-12)


class TestLayout:
    @pytest.mark.parametrize("impl", IMPLS, ids=impl_ids())
    def test_edge_pulls_points_together(self, impl):
        pos = np.array([[0.0, 0.0], [3.0, 0.0]])
        heads = np.array([0], dtype=np.int64)
        tails = np.array([1], dtype=np.int64)
        weights = np.array([1.0])
        impl.layout_optimize(pos, heads, tails, weights, 50, 0, 0.1, seed=0)
        assert np.isfinite(pos).all()
        assert np.linalg.norm(pos[0] - pos[1]) < 3.0

    @pytest.mark.parametrize("impl", IMPLS, ids=impl_ids())
    def test_deterministic_per_seed(self, impl, rng):
        base = rng.random((10, 2))
        heads = np.arange(9, dtype=np.int64)
        tails = heads + 1
        weights = np.ones(9)
        a, b = base.copy(), base.copy()
        impl.layout_optimize(a, heads, tails, weights, 20, 3, 1.0, seed=7)
        impl.layout_optimize(b, heads, tails, weights, 20, 3, 1.0, seed=7)
        assert np.array_equal(a, b)
