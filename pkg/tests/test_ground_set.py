import math
from collections import Counter
from itertools import combinations, product

import numpy as np
import pytest

from sworlab.errors import ConfigurationError, OracleScaleError
from sworlab.ground_set import (
    GroundSet,
    RngStream,
    SampleMode,
    SampleScheme,
    batch_sample_without_replacement,
    draw_sample,
    enumerate_with_replacement,
    enumerate_without_replacement,
)

WITHOUT = SampleMode.WITHOUT_REPLACEMENT
WITH = SampleMode.WITH_REPLACEMENT


def test_singleton_population_both_modes():
    gs = GroundSet(1)
    for mode in (WITH, WITHOUT):
        assert list(draw_sample(gs, SampleScheme(mode, 1), RngStream(7))) == [0]


def test_exhaustive_sample_is_permutation():
    out = draw_sample(GroundSet(4), SampleScheme(WITHOUT, 4), RngStream(3))
    assert sorted(out) == [0, 1, 2, 3]


def test_determinism_same_stream_same_draw():
    gs, scheme = GroundSet(50), SampleScheme(WITHOUT, 20)
    a = draw_sample(gs, scheme, RngStream(11, 4))
    b = draw_sample(gs, scheme, RngStream(11, 4))
    assert np.array_equal(a, b)
    c = draw_sample(gs, scheme, RngStream(11, 5))
    assert not np.array_equal(a, c)


def test_invalid_schemes_rejected():
    gs = GroundSet(3)
    with pytest.raises(ConfigurationError):
        draw_sample(gs, SampleScheme(WITHOUT, 4), RngStream(0))
    with pytest.raises(ConfigurationError):
        draw_sample(gs, SampleScheme(WITH, 0), RngStream(0))
    with pytest.raises(ConfigurationError):
        GroundSet(0)


def test_pair_frequencies_uniform():
    # N=4, m=2: each of the 6 unordered pairs should appear with freq 1/6 +- 0.01
    gs, scheme = GroundSet(4), SampleScheme(WITHOUT, 2)
    counts = Counter()
    draws = 60_000
    for i in range(draws):
        counts[frozenset(draw_sample(gs, scheme, RngStream(2024, i)))] += 1
    assert len(counts) == 6
    for pair, c in counts.items():
        assert abs(c / draws - 1 / 6) < 0.01, (pair, c)


@pytest.mark.parametrize("n,m", [(4, 2), (5, 3), (6, 3)])
def test_subset_uniformity_four_sigma(n, m):
    draws = 50_000
    p = 1 / math.comb(n, m)
    tol = 4 * math.sqrt(p * (1 - p) / draws)
    counts = Counter()
    gs, scheme = GroundSet(n), SampleScheme(WITHOUT, m)
    for i in range(draws):
        counts[frozenset(draw_sample(gs, scheme, RngStream(99, i)))] += 1
    assert len(counts) == math.comb(n, m)
    for c in counts.values():
        assert abs(c / draws - p) <= tol


def test_batch_sampler_uniform_and_shaped():
    gen = np.random.default_rng(5)
    idx = batch_sample_without_replacement(4, 2, 60_000, gen)
    assert idx.shape == (60_000, 2)
    counts = Counter(frozenset(row) for row in idx.tolist())
    assert len(counts) == 6
    for c in counts.values():
        assert abs(c / 60_000 - 1 / 6) < 0.01


def test_enumerate_without_replacement_counts_and_order():
    gs = GroundSet(6)
    subsets = list(enumerate_without_replacement(gs, 3))
    expected = list(combinations(range(6), 3))
    assert subsets == expected
    assert len(subsets) == 20
    assert list(enumerate_without_replacement(GroundSet(3), 3)) == [(0, 1, 2)]
    assert len(list(enumerate_without_replacement(GroundSet(4), 2))) == 6


def test_enumerate_with_replacement_counts():
    assert len(list(enumerate_with_replacement(GroundSet(2), 2))) == 4
    assert len(list(enumerate_with_replacement(GroundSet(1), 5))) == 1
    seqs = list(enumerate_with_replacement(GroundSet(3), 3))
    assert seqs == list(product(range(3), repeat=3))
    assert len(seqs) == 27


def test_enumeration_budget():
    with pytest.raises(OracleScaleError):
        enumerate_without_replacement(GroundSet(40), 20)
    with pytest.raises(OracleScaleError):
        enumerate_with_replacement(GroundSet(10), 7)
    # budget is overridable
    assert sum(1 for _ in enumerate_with_replacement(GroundSet(10), 7, budget=10**7))


def test_no_duplicate_subsets():
    subsets = list(enumerate_without_replacement(GroundSet(6), 2))
    assert len(subsets) == len(set(subsets)) == 15


def test_substreams_are_reproducible():
    s = RngStream(123, 9)
    a = s.substream(3).generator().random(4)
    b = s.substream(3).generator().random(4)
    assert np.array_equal(a, b)
    c = s.substream(4).generator().random(4)
    assert not np.array_equal(a, c)
