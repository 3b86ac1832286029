import math

import numpy as np
import pytest
from scipy import ndimage

from lsrdet.core import PI, HeatmapField, UndefinedMeanError, angle_distance
from lsrdet.encode import AnnotationSet, encode_ground_truth
from lsrdet.group import (
    GroupingParams,
    LineSupportRegion,
    grow_regions,
    region_stats,
    similarity,
    similarity_from_stats,
)
from lsrdet.group import _grow_kernel

from oracles import naive_grow


def as_sets(regions):
    return [set(map(tuple, r.pixels.tolist())) for r in regions]


def random_case(rng, h=16, w=16, p_fg=0.5, n_angles=None):
    mask = rng.uniform(0.3, 1.0, (h, w)).astype(np.float32)
    if n_angles:
        field = rng.integers(0, n_angles, (h, w)) * (PI / n_angles) + rng.normal(0, 0.05, (h, w))
    else:
        field = rng.uniform(0, PI, (h, w))
    hf = HeatmapField(mask, field)
    return hf, rng.random((h, w)) < p_fg


class TestSimilarity:
    def region(self, m=0.5, f=0.3, n=4):
        hf = HeatmapField(np.full((1, n), m), np.full((1, n), f))
        return LineSupportRegion.from_pixels([(i, 0) for i in range(n)], hf)

    def test_zero(self):
        r = self.region()
        hf = HeatmapField(np.full((1, 1), 0.5), np.full((1, 1), 0.3))
        assert similarity((0, 0), hf, r, 1.0) == pytest.approx(0.0, abs=1e-12)

    def test_perpendicular(self):
        r = self.region()
        hf = HeatmapField(np.full((1, 1), 0.5), np.full((1, 1), 0.3 + PI / 2))
        assert similarity((0, 0), hf, r, 1.0) == pytest.approx(4.0, abs=1e-12)

    def test_combined_terms(self):
        r = self.region()
        hf = HeatmapField(np.full((1, 1), 0.6), np.full((1, 1), 0.3 + math.radians(10)))
        expect = 4 * math.sin(math.radians(10)) ** 2 + 0.01
        assert similarity((0, 0), hf, r, 1.0) == pytest.approx(expect, abs=1e-6)
        assert expect == pytest.approx(0.13061, abs=1e-5)

    def test_undefined(self):
        with pytest.raises(UndefinedMeanError):
            similarity_from_stats(0.5, 0.0, 2, 1.0, 0.0, 0.0, 1.0)


class TestRegionStats:
    def test_single_pixel(self):
        hf = HeatmapField(np.full((3, 3), 0.7), np.full((3, 3), 1.1))
        i, phi = region_stats(LineSupportRegion.from_pixels([(1, 2)], hf))
        assert i == pytest.approx(0.7, abs=1e-7)
        assert phi == pytest.approx(1.1, abs=1e-6)

    def test_axial_mean(self):
        hf = HeatmapField(np.ones((1, 2)), np.radians([[10, 170]]))
        _, phi = region_stats(LineSupportRegion.from_pixels([(0, 0), (1, 0)], hf))
        assert angle_distance(phi, 0.0) < 1e-6

    def test_mean_mask(self):
        hf = HeatmapField(np.full((2, 5), 0.8), np.zeros((2, 5)))
        i, _ = region_stats(LineSupportRegion.from_pixels([(x, 1) for x in range(5)], hf))
        assert i == pytest.approx(0.8, abs=1e-7)

    def test_incremental_add(self):
        rng = np.random.default_rng(0)
        hf = HeatmapField(rng.random((6, 6)), rng.uniform(0, PI, (6, 6)))
        pts = [(int(x), int(y)) for x, y in rng.integers(0, 6, (12, 2))]
        pts = list(dict.fromkeys(pts))
        r = LineSupportRegion.from_pixels(pts[:1], hf)
        for k, (x, y) in enumerate(pts[1:], 2):
            r.add(x, y, hf)
            batch = LineSupportRegion.from_pixels(pts[:k], hf)
            assert r.sum_mask == pytest.approx(batch.sum_mask, abs=1e-9)
            assert np.allclose(r.resultant, batch.resultant, atol=1e-9)


class TestGrowRegions:
    def test_empty(self):
        hf = HeatmapField.zeros(8, 8)
        assert grow_regions(hf, np.zeros((8, 8), bool)) == []

    def test_single_strip(self):
        m = np.zeros((5, 40), np.float32)
        m[2, 5:35] = 1.0
        hf = HeatmapField(m, np.zeros_like(m))
        regions = grow_regions(hf, m > 0, GroupingParams(0.5, 5, 1.0))
        assert len(regions) == 1
        assert regions[0].size == 30

    def test_l_shape_splits_at_corner(self):
        ann = AnnotationSet.from_rows(15, 15, [[2, 7, 12, 7], [12, 7, 12, 14]])
        hf = encode_ground_truth(ann)
        fg = hf.mask > 0
        regions = grow_regions(hf, fg, GroupingParams(0.5, 1, 1.0))
        expect = [{(x, 7) for x in range(2, 13)}, {(12, y) for y in range(8, 15)}]
        assert as_sets(regions) == expect
        naive = naive_grow(hf.mask, hf.field, fg, 0.5, 1.0, 1)
        assert [set(r) for r in naive] == expect

    def test_min_size(self):
        m = np.zeros((6, 20), np.float32)
        m[1, 2:12] = 1
        m[4, 2:5] = 1
        hf = HeatmapField(m, np.zeros_like(m))
        assert [r.size for r in grow_regions(hf, m > 0, GroupingParams(0.5, 4))] == [10]
        assert [r.size for r in grow_regions(hf, m > 0, GroupingParams(0.5, 1))] == [10, 3]

    @pytest.mark.parametrize("seed", range(30))
    def test_matches_naive(self, seed):
        rng = np.random.default_rng(seed)
        hf, fg = random_case(rng, 14, 14, p_fg=0.6, n_angles=3)
        tau = float(rng.choice([0.1, 0.5, 1.0, 2.5]))
        alpha = float(rng.choice([0.0, 1.0, 3.0]))
        n = int(rng.integers(1, 4))
        fast = grow_regions(hf, fg, GroupingParams(tau, n, alpha))
        slow = naive_grow(hf.mask, hf.field, fg, tau, alpha, n)
        assert [r.pixels.tolist() for r in fast] == [[list(p) for p in r] for r in slow]

    @pytest.mark.parametrize("seed", range(10))
    def test_invariants(self, seed):
        rng = np.random.default_rng(100 + seed)
        hf, fg = random_case(rng, 24, 24, p_fg=0.55, n_angles=4)
        p = GroupingParams(0.6, 1, 1.0)
        regions = grow_regions(hf, fg, p)
        seen = set()
        for r in regions:
            pts = list(map(tuple, r.pixels.tolist()))
            assert len(pts) == len(set(pts))
            assert all(fg[y, x] for x, y in pts)
            assert not seen & set(pts)
            seen |= set(pts)
            batch = LineSupportRegion.from_pixels(r.pixels, hf)
            assert r.sum_mask == pytest.approx(batch.sum_mask, abs=1e-9)
            assert np.allclose(r.resultant, batch.resultant, atol=1e-9)
            # replay admissions against each prefix
            for k in range(1, len(pts)):
                prefix = LineSupportRegion.from_pixels(r.pixels[:k], hf)
                assert similarity(pts[k], hf, prefix, p.alpha) < p.distance_tau
        assert len(seen) <= fg.sum()

    def test_deterministic(self):
        rng = np.random.default_rng(7)
        hf, fg = random_case(rng, 32, 32, n_angles=4)
        a = grow_regions(hf, fg)
        b = grow_regions(hf, fg)
        assert [r.pixels.tolist() for r in a] == [r.pixels.tolist() for r in b]

    def test_seed_order_by_mask(self):
        m = np.zeros((3, 9), np.float32)
        m[1, 0:3] = 0.5
        m[1, 6:9] = 0.9
        hf = HeatmapField(m, np.zeros_like(m))
        regions = grow_regions(hf, m > 0, GroupingParams(0.5, 1))
        assert regions[0].pixels[0].tolist() == [6, 1]
        assert regions[1].pixels[0].tolist() == [0, 1]

    @pytest.mark.parametrize("seed", range(10))
    def test_huge_tau_gives_components(self, seed):
        rng = np.random.default_rng(seed)
        hf, fg = random_case(rng, 20, 20, p_fg=0.45)
        regions = grow_regions(hf, fg, GroupingParams(1e6, 1))
        lab, n = ndimage.label(fg, np.ones((3, 3)))
        comps = {frozenset((int(x), int(y)) for y, x in np.argwhere(lab == k)) for k in range(1, n + 1)}
        assert {frozenset(s) for s in as_sets(regions)} == comps

    def test_undefined_orientation_flagged(self):
        # float32 storage never cancels exactly; drive the kernel in float64
        m = np.ones((1, 3))
        field = np.array([[0.0, PI / 2, 0.0]])
        fg = np.ones((1, 3), bool)
        order = np.arange(3, dtype=np.int64)
        *_, status = _grow_kernel(m, field, fg, order, 10.0, 0.0)
        assert status == -1

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            grow_regions(HeatmapField.zeros(4, 4), np.zeros((3, 4), bool))
