"""Yeo-Johnson transform: pinned values, derivatives, branch behavior."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ttm.nn import InputError, ShapeError
from ttm.power import yj_batch, yj_dlambda, yj_dx, yj_forward
from ttm.rng import Stream


class TestForward:
    def test_origin_fixed_point(self):
        assert yj_forward(0.0, 0.7) == 0.0

    def test_identity_at_lambda_one(self):
        assert yj_forward(-1.0, 1.0) == pytest.approx(-1.0, abs=1e-12)
        assert yj_forward(5.0, 1.0) == pytest.approx(5.0, abs=1e-12)

    def test_positive_branch_hand_value(self):
        # ((3+1)^2 - 1) / 2 = 7.5
        assert yj_forward(3.0, 2.0) == pytest.approx(7.5, rel=1e-12)

    def test_negative_branch_hand_value(self):
        # -((2)^2 - 1) / 2 = -1.5
        assert yj_forward(-1.0, 0.0) == pytest.approx(-1.5, rel=1e-12)

    def test_series_branch_near_zero_lambda(self):
        assert yj_forward(3.0, 1e-9) == pytest.approx(math.log1p(3.0), abs=1e-8)

    def test_rejects_non_finite(self):
        with pytest.raises(InputError):
            yj_forward(float("nan"), 1.0)
        with pytest.raises(InputError):
            yj_forward(1.0, float("inf"))


class TestDx:
    def test_value_one_at_origin(self):
        for lam in (-2.0, 0.0, 1.0, 3.5):
            assert yj_dx(0.0, lam) == pytest.approx(1.0, rel=1e-12)

    def test_hand_value(self):
        # (3+1)^(2-1) = 4
        assert yj_dx(3.0, 2.0) == pytest.approx(4.0, rel=1e-12)

    def test_identity_lambda(self):
        for x in (-7.0, -0.3, 0.0, 2.0, 50.0):
            assert yj_dx(x, 1.0) == pytest.approx(1.0, rel=1e-12)


class TestDlambda:
    def test_zero_at_origin(self):
        for lam in (-1.0, 0.0, 1.0, 2.0):
            assert yj_dlambda(0.0, lam) == 0.0

    def test_series_limit_at_u_equal_one(self):
        # x = e-1 gives u = 1; at lambda=0 the series limit is u^2/2 = 0.5
        assert yj_dlambda(math.e - 1.0, 0.0) == pytest.approx(0.5, rel=1e-9)

    def test_hand_value(self):
        # (exp(2 ln 4)(2 ln 4 - 1) + 1) / 4 = (32 ln 4 - 15) / 4
        expected = (32.0 * math.log(4.0) - 15.0) / 4.0
        assert yj_dlambda(3.0, 2.0) == pytest.approx(expected, rel=1e-12)

    def test_matches_central_difference(self):
        h = 1e-6
        for x, lam in [(2.5, 0.4), (-3.0, 1.7), (10.0, -0.8), (-0.2, 2.9)]:
            numeric = (yj_forward(x, lam + h) - yj_forward(x, lam - h)) / (2 * h)
            assert yj_dlambda(x, lam) == pytest.approx(numeric, rel=1e-6)


class TestBatch:
    def test_identity_column(self):
        x = Stream(0, "x").normal((4, 3)) * 5.0
        vals, dx, _ = yj_batch(x, np.ones(3))
        assert np.allclose(vals, x, atol=1e-12)
        assert np.allclose(dx, 1.0, atol=1e-12)

    def test_single_column_scalar_case(self):
        vals, _, _ = yj_batch(np.array([[3.0]]), np.array([2.0]))
        assert vals[0, 0] == yj_forward(3.0, 2.0)

    def test_matches_scalar_loop_exactly(self):
        x = Stream(1, "x").normal((4, 3)) * 3.0
        lam = np.array([0.0, 1.3, 2.0])
        vals, dx, dlam = yj_batch(x, lam)
        for i in range(4):
            for j in range(3):
                assert vals[i, j] == yj_forward(x[i, j], lam[j])
                assert dx[i, j] == yj_dx(x[i, j], lam[j])
                assert dlam[i, j] == yj_dlambda(x[i, j], lam[j])

    def test_per_row_lambda(self):
        x = Stream(2, "x").normal((5, 2))
        lam = Stream(3, "lam").normal((5, 2))
        vals, _, _ = yj_batch(x, lam)
        for i in range(5):
            for j in range(2):
                assert vals[i, j] == yj_forward(x[i, j], lam[i, j])

    def test_length_mismatch(self):
        with pytest.raises(ShapeError):
            yj_batch(np.zeros((2, 3)), np.ones(2))


class TestProperties:
    @given(st.floats(-100.0, 100.0, allow_nan=False))
    @settings(max_examples=200, deadline=None)
    def test_identity_property(self, x):
        assert abs(yj_forward(x, 1.0) - x) < 1e-12

    @given(st.floats(-5.0, 5.0, allow_nan=False))
    @settings(max_examples=100, deadline=None)
    def test_origin_properties(self, lam):
        assert yj_forward(0.0, lam) == 0.0
        assert yj_dlambda(0.0, lam) == 0.0

    @given(
        st.floats(-50.0, 50.0, allow_nan=False),
        st.floats(-3.0, 3.0, allow_nan=False),
    )
    @settings(max_examples=200, deadline=None)
    def test_dx_strictly_positive(self, x, lam):
        assert yj_dx(x, lam) > 0.0

    @given(st.floats(-20.0, 20.0), st.floats(-2.0, 3.0), st.floats(1e-4, 1.0))
    @settings(max_examples=200, deadline=None)
    def test_strictly_increasing_in_x(self, x, lam, step):
        assert yj_forward(x + step, lam) > yj_forward(x, lam)

    def test_branch_agreement_at_eps(self):
        # direct vs series evaluation at the switch threshold |lambda| = 1e-6
        for x in np.linspace(0.0, 100.0, 101):
            direct = yj_forward(x, 1e-6, eps=0.5e-6)   # forces direct branch
            series = yj_forward(x, 1e-6, eps=2e-6)     # forces series branch
            assert abs(direct - series) < 1e-10
        for x in np.linspace(-100.0, 0.0, 101):
            direct = yj_forward(x, 2.0 - 1e-6, eps=0.5e-6)
            series = yj_forward(x, 2.0 - 1e-6, eps=2e-6)
            assert abs(direct - series) < 1e-10

    def test_continuity_at_removable_singularities(self):
        # The lambda->0 limit is log1p(x); the O(lambda) offset at finite
        # lambda is lambda*u^2/2, so the limit is approached at that modulus.
        for x in np.linspace(0.0, 100.0, 51):
            u = math.log1p(x)
            for lam in (1e-7, -1e-7):
                offset = yj_forward(x, lam) - u
                assert abs(offset) <= abs(lam) * u**2 / 2.0 + 1e-12
        # deep in the series branch the offset is negligible
        for x in np.linspace(0.0, 100.0, 51):
            assert abs(yj_forward(x, 1e-12) - math.log1p(x)) < 1e-8
        # mirror branch at lambda = 2 for negative x
        for x in np.linspace(-100.0, 0.0, 51):
            v = math.log1p(-x)
            for lam in (2.0 + 1e-7, 2.0 - 1e-7):
                offset = yj_forward(x, lam) - (-v)
                assert abs(offset) <= abs(2.0 - lam) * v**2 / 2.0 + 1e-12
            assert abs(yj_forward(x, 2.0 + 1e-12) - (-v)) < 1e-8

    def test_partials_match_finite_differences_off_band(self):
        # grid bounds keep the derivatives far enough from 0 that central
        # differences at h=1e-6 stay above float rounding noise
        xs = np.linspace(-20.0, 20.0, 50)
        lams = np.linspace(-1.5, 3.0, 50)
        lams = lams[(np.abs(lams) > 0.05) & (np.abs(2.0 - lams) > 0.05)]
        h = 1e-6
        for x in xs[::7]:
            for lam in lams[::7]:
                fd_x = (yj_forward(x + h, lam) - yj_forward(x - h, lam)) / (2 * h)
                fd_l = (yj_forward(x, lam + h) - yj_forward(x, lam - h)) / (2 * h)
                assert yj_dx(x, lam) == pytest.approx(fd_x, rel=1e-6)
                assert yj_dlambda(x, lam) == pytest.approx(fd_l, rel=1e-6)
