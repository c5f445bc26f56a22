import numpy as np
import pytest

from sgf.errors import GeometryError
from sgf.snn_spatial import (
    Region,
    SpatialSNNParams,
    accumulate,
    spatial_response,
)


def test_accumulate_identity():
    grid = np.eye(5, dtype=np.uint8)
    assert np.array_equal(accumulate([grid]), grid)


def test_accumulate_linearity():
    grid = np.ones((4, 4), dtype=np.uint8)
    assert np.array_equal(accumulate([grid] * 7), 7 * grid)


def test_accumulate_matches_exhaustive_sum():
    rng = np.random.Generator(np.random.Philox(key=2))
    stack = rng.integers(0, 2, (5, 6, 6))
    got = accumulate(list(stack))
    want = np.zeros((6, 6), dtype=int)
    for t in range(5):
        for y in range(6):
            for x in range(6):
                want[y, x] += stack[t, y, x]
    assert np.array_equal(got, want)


def test_accumulate_empty_errors():
    with pytest.raises(ValueError):
        accumulate([])


def _params(region, theta_i, theta_a, archetype="plateau-mild"):
    if archetype == "constrained-intensive" and theta_i <= theta_a:
        theta_i = theta_a + 1
    return SpatialSNNParams("T1", region, theta_i, theta_a, archetype)


def test_response_zero_accumulation():
    counts = np.zeros((10, 10), dtype=int)
    assert spatial_response(counts, _params(Region(0, 0, 10, 10), 1, 2)) == 0


def test_response_archetypes_dwell_vs_spread():
    # concentrated repeated activity: high per-pixel counts, few pixels
    dwell = np.zeros((20, 20), dtype=int)
    dwell[8:11, 8:11] = 30
    # mild wide sweep: low counts over many pixels
    sweep = np.zeros((20, 20), dtype=int)
    sweep[5:15, 2:18] = 2
    region = Region(0, 0, 20, 20)
    constrained = SpatialSNNParams("A1", region, 25, 5, "constrained-intensive")
    plateau = SpatialSNNParams("B1", region, 2, 50, "plateau-mild")
    assert spatial_response(dwell, constrained) == 1
    assert spatial_response(dwell, plateau) == 0
    assert spatial_response(sweep, constrained) == 0
    assert spatial_response(sweep, plateau) == 1


def test_response_monotone_in_activity():
    rng = np.random.Generator(np.random.Philox(key=5))
    counts = rng.integers(0, 4, (12, 12))
    params = _params(Region(2, 2, 8, 8), 2, 10)
    before = spatial_response(counts, params)
    bumped = counts.copy()
    bumped[5, 5] += 3
    after = spatial_response(bumped, params)
    assert after >= before


def test_response_ignores_outside_region():
    counts = np.zeros((12, 12), dtype=int)
    params = _params(Region(0, 0, 4, 4), 2, 3)
    counts[8:, 8:] = 99  # outside the region
    assert spatial_response(counts, params) == 0


def test_response_threshold_duality():
    counts = np.zeros((8, 8), dtype=int)
    counts[1, 1] = 7
    params = _params(Region(0, 0, 8, 8), 7, 1, "constrained-intensive")
    assert spatial_response(counts, params) == 1
    counts[1, 1] = 6
    assert spatial_response(counts, params) == 0


def test_region_validation():
    with pytest.raises(GeometryError):
        Region(0, 0, 0, 4).validate((8, 8))
    with pytest.raises(GeometryError):
        Region(5, 5, 4, 4).validate((8, 8))
    Region(4, 4, 4, 4).validate((8, 8))


def test_archetype_invariants():
    region = Region(0, 0, 4, 4)
    with pytest.raises(ValueError):
        SpatialSNNParams("A9", region, 3, 5, "constrained-intensive").validate((8, 8))
    with pytest.raises(ValueError):
        SpatialSNNParams("B9", region, 5, 3, "plateau-mild").validate((8, 8))
    with pytest.raises(ValueError):
        SpatialSNNParams("Z1", region, 2, 2, "mystery").validate((8, 8))
