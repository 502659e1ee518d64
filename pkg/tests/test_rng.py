"""Seeded stream determinism and basic distributional sanity."""

import numpy as np

from ttm.rng import Stream


class TestDeterminism:
    def test_same_tags_same_stream(self):
        a = Stream(7, "weights", 3).normal(100)
        b = Stream(7, "weights", 3).normal(100)
        assert np.array_equal(a, b)

    def test_different_tags_differ(self):
        a = Stream(7, "weights", 0).normal(50)
        b = Stream(7, "weights", 1).normal(50)
        assert not np.array_equal(a, b)

    def test_different_seeds_differ(self):
        assert not np.array_equal(Stream(1, "x").uniform(50), Stream(2, "x").uniform(50))


class TestDistributions:
    def test_uniform_in_half_open_unit(self):
        u = Stream(0, "u").uniform(10000)
        assert np.all(u > 0.0) and np.all(u <= 1.0)
        assert abs(u.mean() - 0.5) < 0.02

    def test_normal_moments(self):
        z = Stream(0, "z").normal(50000)
        assert abs(z.mean()) < 0.02
        assert abs(z.std() - 1.0) < 0.02

    def test_normal_shape(self):
        z = Stream(0, "z").normal((3, 5))
        assert z.shape == (3, 5)

    def test_bernoulli_rate(self):
        y = Stream(0, "y").bernoulli(np.full(20000, 0.3))
        assert set(np.unique(y)) <= {0.0, 1.0}
        assert abs(y.mean() - 0.3) < 0.02

    def test_permutation_is_permutation(self):
        p = Stream(0, "perm").permutation(257)
        assert sorted(p.tolist()) == list(range(257))

    def test_uniform_range_bounds(self):
        x = Stream(0, "r").uniform_range(-2.0, 3.0, (1000,))
        assert np.all(x >= -2.0) and np.all(x <= 3.0)
