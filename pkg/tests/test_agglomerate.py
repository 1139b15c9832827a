import numpy as np
import pytest

from conftest import random_image
from graphseg.agglomerate import (
    SegParams,
    extract_result,
    minsize_pass,
    threshold_pass,
)
from graphseg.engine import run_sequential
from graphseg.errors import ContractViolation, ParameterError
from graphseg.forest import ComponentForest
from graphseg.graph import EdgeList, build_edges, sort_edges
from graphseg.imaging import RasterImage, gaussian_smooth
from oracles import mst_max_weight, naive_segment, partition_of


def _segment(img, k, min_size=1, sigma=0.0):
    smoothed = gaussian_smooth(img, sigma)
    edges = sort_edges(build_edges(smoothed))
    forest = ComponentForest(img.width * img.height, k)
    threshold_pass(forest, edges, k)
    minsize_pass(forest, edges, min_size)
    return extract_result(forest, img.width, img.height), smoothed


class TestParams:
    def test_defaults(self):
        p = SegParams()
        assert (p.k, p.min_size, p.sigma) == (300.0, 50, 0.8)

    @pytest.mark.parametrize("kw", [{"k": -1}, {"min_size": 0}, {"sigma": -0.5}, {"k": float("inf")}])
    def test_invalid(self, kw):
        with pytest.raises(ParameterError):
            SegParams(**kw)


class TestThreshold:
    def test_uniform_single_component(self, backend):
        img = RasterImage(np.full((5, 7, 3), 40, np.uint8))
        res, _ = _segment(img, 1.0)
        assert res.component_count == 1

    def test_k_zero_distinct_colors_all_singletons(self, backend):
        px = np.arange(4 * 5 * 3, dtype=np.uint8).reshape(4, 5, 3) * 3
        res, _ = _segment(RasterImage(px), 0.0)
        assert res.component_count == 20

    @pytest.mark.parametrize("k, count", [(4.9, 2), (5.0, 1)])
    def test_two_pixel_boundary(self, backend, k, count):
        img = RasterImage(np.array([[[0, 0, 0], [3, 4, 0]]], np.uint8))
        res, _ = _segment(img, k)
        assert res.component_count == count

    def test_threshold_after_merge(self):
        f = ComponentForest(2, 10.0)
        threshold_pass(f, EdgeList.from_edges([(0, 1, 4.0)]), 10.0)
        root = f.find(0)
        assert f.threshold[root] == 4.0 + 10.0 / 2

    def test_unsorted_rejected(self, backend):
        edges = EdgeList.from_edges([(0, 1, 3.0), (1, 2, 1.0)])
        with pytest.raises(ContractViolation):
            threshold_pass(ComponentForest(3, 1.0), edges)
        with pytest.raises(ContractViolation):
            minsize_pass(ComponentForest(3, 1.0), edges, 2)

    @pytest.mark.parametrize("k", [10, 100, 1000])
    @pytest.mark.parametrize("min_size", [1, 3])
    def test_matches_naive_reference(self, backend, rng, k, min_size):
        for _ in range(4):
            w, h = int(rng.integers(1, 5)), int(rng.integers(1, 5))
            img = random_image(rng, w, h, levels=int(rng.choice([4, 256])))
            res, smoothed = _segment(img, k, min_size, sigma=0.8)
            assert partition_of(res.labels) == naive_segment(smoothed.data, k, min_size)

    def test_merge_weights_monotone(self, rng):
        img = gaussian_smooth(random_image(rng, 10, 8), 0.8)
        edges = sort_edges(build_edges(img))
        trace = []
        threshold_pass(ComponentForest(80, 200.0), edges, 200.0, trace=trace)
        weights = [w for w, _, _ in trace]
        assert trace and weights == sorted(weights)
        assert all(size >= 2 for _, _, size in trace)

    def test_threshold_tracks_mst_maximum(self, rng):
        for _ in range(10):
            img = gaussian_smooth(random_image(rng, 6, 5), 0.8)
            edges = sort_edges(build_edges(img))
            k = 150.0
            f = ComponentForest(30, k)
            threshold_pass(f, edges, k)
            labels = extract_result(f.copy(), 6, 5).labels
            triples = [(e.w, e.a, e.b) for e in edges]
            for root in f.roots():
                members = set(np.flatnonzero(labels == root).tolist())
                if len(members) == 1:
                    assert f.threshold[root] == k
                    continue
                internal = f.threshold[root] - k / len(members)
                assert internal == pytest.approx(mst_max_weight(members, triples), abs=1e-9)

    def test_trace_matches_untraced(self, backend, rng):
        img = gaussian_smooth(random_image(rng, 9, 9), 0.8)
        edges = sort_edges(build_edges(img))
        a, b = ComponentForest(81, 120.0), ComponentForest(81, 120.0)
        threshold_pass(a, edges)
        threshold_pass(b, edges, trace=[])
        assert np.array_equal(a.parent, b.parent)


class TestMinSize:
    def test_checkerboard_pairs_up(self, backend):
        px = np.zeros((4, 4, 3), np.uint8)
        px[(np.indices((4, 4)).sum(axis=0) % 2) == 1] = 255
        res, _ = _segment(RasterImage(px), 0.0, min_size=2)
        sizes = np.bincount(res.labels)
        assert np.all(sizes[sizes > 0] >= 2)

    def test_noop_when_min_size_one(self, backend, rng):
        img = random_image(rng, 6, 6)
        a, _ = _segment(img, 50.0, 1)
        smoothed = gaussian_smooth(img, 0.0)
        edges = sort_edges(build_edges(smoothed))
        f = ComponentForest(36, 50.0)
        threshold_pass(f, edges)
        assert extract_result(f, 6, 6).component_count == a.component_count

    @pytest.mark.parametrize("min_size", [2, 5, 20, 100])
    def test_all_components_reach_floor(self, backend, rng, min_size):
        img = random_image(rng, 8, 7)
        res, _ = _segment(img, 0.0, min_size)
        sizes = np.bincount(res.labels)
        assert sizes[sizes > 0].min() >= min(min_size, 56)

    def test_keeps_survivor_threshold(self):
        f = ComponentForest(2, 7.0)
        minsize_pass(f, EdgeList.from_edges([(0, 1, 100.0)]), 2)
        assert f.component_count() == 1 and f.threshold[f.find(0)] == 7.0


class TestExtract:
    def test_labels_are_roots(self):
        f = ComponentForest(4, 1.0)
        f.join(2, 3)
        res = extract_result(f, 2, 2, {"smooth": 1.0})
        assert res.labels.tolist() == [0, 1, 2, 2]
        assert res.component_count == 3
        assert res.label_grid().shape == (2, 2)
        assert res.stage_timings == {"smooth": 1.0}

    def test_fully_compressed(self):
        f = ComponentForest(4, 1.0)
        f.parent[:] = [0, 0, 1, 2]
        res = extract_result(f, 4, 1)
        assert res.labels.tolist() == [0, 0, 0, 0]


def test_sequential_pipeline_matches_manual(rng):
    img = random_image(rng, 12, 9)
    params = SegParams(k=200.0, min_size=4, sigma=0.8)
    manual, _ = _segment(img, 200.0, 4, sigma=0.8)
    assert np.array_equal(run_sequential(img, params).labels, manual.labels)
