"""Layers, losses, AdamW and the finite-difference harness."""

import math

import numpy as np
import pytest

from ttm.gradcheck import finite_diff_check
from ttm.nn import (
    InputError,
    LinearLayer,
    Parameter,
    ShapeError,
    bce_with_logits,
    check_matrix,
    linear_backward,
    linear_forward,
    mse_loss,
    relu_backward,
    relu_forward,
)
from ttm.optim import AdamW, AdamWConfig, AdamWState, adamw_step
from ttm.rng import Stream


class TestMatrixValidation:
    def test_rejects_nan(self):
        with pytest.raises(InputError):
            check_matrix(np.array([[1.0, float("nan")]]))

    def test_rejects_inf(self):
        with pytest.raises(InputError):
            check_matrix(np.array([[float("inf")]]))

    def test_rejects_wrong_ndim(self):
        with pytest.raises(ShapeError):
            check_matrix(np.zeros(3))


class TestLinear:
    def test_identity_weight(self):
        layer = LinearLayer(np.eye(2), np.zeros(2))
        out = linear_forward(layer, np.array([[1.0, 2.0]]))
        assert np.array_equal(out, np.array([[1.0, 2.0]]))

    def test_bias_addition(self):
        layer = LinearLayer(np.eye(2), np.array([0.5, -0.5]))
        out = linear_forward(layer, np.array([[1.0, 2.0]]))
        assert np.allclose(out, [[1.5, 1.5]])

    def test_hand_matrix_arithmetic(self):
        layer = LinearLayer(np.array([[2.0, 3.0]]), np.array([1.0]))
        out = linear_forward(layer, np.array([[1.0, 1.0]]))
        assert np.allclose(out, [[6.0]])

    def test_shape_mismatch(self):
        layer = LinearLayer.zeros(3, 2)
        with pytest.raises(ShapeError):
            linear_forward(layer, np.zeros((1, 4)))

    def test_backward_zero_upstream(self):
        layer = LinearLayer.seeded(3, 2, Stream(0, "w"))
        x = Stream(1, "x").normal((4, 3))
        dx = linear_backward(layer, x, np.zeros((4, 2)))
        assert np.all(dx == 0)
        assert np.all(layer.weight.grad == 0) and np.all(layer.bias.grad == 0)

    def test_backward_identity_jacobian(self):
        layer = LinearLayer(np.eye(3), np.zeros(3))
        g = Stream(2, "g").normal((5, 3))
        dx = linear_backward(layer, np.zeros((5, 3)), g)
        assert np.array_equal(dx, g)

    def test_backward_accumulates(self):
        layer = LinearLayer.seeded(3, 2, Stream(3, "w"))
        x = Stream(4, "x").normal((2, 3))
        up = Stream(5, "u").normal((2, 2))
        linear_backward(layer, x, up)
        once = layer.weight.grad.copy(), layer.bias.grad.copy()
        linear_backward(layer, x, up)
        assert np.array_equal(layer.weight.grad, 2 * once[0])
        assert np.array_equal(layer.bias.grad, 2 * once[1])

    def test_backward_matches_finite_differences(self):
        layer = LinearLayer.seeded(4, 3, Stream(6, "w"))
        x = Stream(7, "x").normal((2, 4))
        target = Stream(8, "t").normal((2, 3))

        def loss():
            return mse_loss(linear_forward(layer, x), target)[0]

        layer.zero_grad()
        _, dpred = mse_loss(linear_forward(layer, x), target)
        linear_backward(layer, x, dpred)
        report = finite_diff_check(loss, layer.parameters())
        assert report.max_rel_err < 1e-6


class TestRelu:
    def test_sign_cases(self):
        out = relu_forward(np.array([[-1.0, 0.0, 2.0]]))
        assert np.array_equal(out, [[0.0, 0.0, 2.0]])

    def test_backward_zero_at_kink(self):
        up = np.ones((1, 3))
        grad = relu_backward(np.array([[-1.0, 0.0, 2.0]]), up)
        assert np.array_equal(grad, [[0.0, 0.0, 1.0]])

    def test_matches_finite_differences_away_from_zero(self):
        x = Stream(9, "x").normal((3, 4))
        x[np.abs(x) < 1e-2] = 0.5  # keep clear of the kink
        up = Stream(10, "u").normal((3, 4))
        grad = relu_backward(x, up)
        h = 1e-5
        for i in range(3):
            for j in range(4):
                xp, xm = x.copy(), x.copy()
                xp[i, j] += h
                xm[i, j] -= h
                fd = np.sum(up * (relu_forward(xp) - relu_forward(xm))) / (2 * h)
                assert grad[i, j] == pytest.approx(fd, rel=1e-6, abs=1e-9)


class TestBce:
    def test_hand_value_at_zero_logit(self):
        loss, grad = bce_with_logits(np.array([[0.0]]), np.array([1.0]))
        assert loss == pytest.approx(math.log(2.0), rel=1e-12)
        assert grad[0, 0] == pytest.approx(-0.5, rel=1e-12)

    def test_saturated_logit_no_overflow(self):
        loss, _ = bce_with_logits(np.array([[50.0]]), np.array([1.0]))
        assert 0.0 <= loss < 1e-20

    def test_rejects_non_binary_labels(self):
        with pytest.raises(InputError):
            bce_with_logits(np.array([[0.0]]), np.array([0.5]))

    def test_grad_matches_finite_differences(self):
        z = Stream(11, "z").normal((2, 1))
        y = np.array([0.0, 1.0])
        _, grad = bce_with_logits(z, y)
        h = 1e-6
        for i in range(2):
            zp, zm = z.copy(), z.copy()
            zp[i, 0] += h
            zm[i, 0] -= h
            fd = (bce_with_logits(zp, y)[0] - bce_with_logits(zm, y)[0]) / (2 * h)
            assert grad[i, 0] == pytest.approx(fd, rel=1e-8)


class TestMse:
    def test_perfect_prediction(self):
        loss, grad = mse_loss(np.array([[1.0], [2.0]]), np.array([[1.0], [2.0]]))
        assert loss == 0.0 and np.all(grad == 0)

    def test_hand_value(self):
        loss, grad = mse_loss(np.array([[2.0]]), np.array([[0.0]]))
        assert loss == 4.0
        assert grad[0, 0] == 4.0

    def test_grad_matches_finite_differences(self):
        pred = Stream(12, "p").normal((3, 1))
        target = Stream(13, "t").normal((3, 1))
        _, grad = mse_loss(pred, target)
        h = 1e-6
        for i in range(3):
            pp, pm = pred.copy(), pred.copy()
            pp[i, 0] += h
            pm[i, 0] -= h
            fd = (mse_loss(pp, target)[0] - mse_loss(pm, target)[0]) / (2 * h)
            assert grad[i, 0] == pytest.approx(fd, rel=1e-7)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            mse_loss(np.zeros((2, 1)), np.zeros((3, 1)))


def hand_adamw(theta, grads, lr=0.1, b1=0.9, b2=0.999, eps=1e-8, wd=0.0):
    """Independent scalar AdamW recursion, written out step by step."""
    m = v = 0.0
    for k, g in enumerate(grads, start=1):
        theta = theta - lr * wd * theta
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        m_hat = m / (1 - b1**k)
        v_hat = v / (1 - b2**k)
        theta = theta - lr * m_hat / (math.sqrt(v_hat) + eps)
    return theta


class TestAdamW:
    def test_first_step_matches_hand_recursion(self):
        p = Parameter(np.array([[1.0]]))
        p.grad[...] = 1.0
        state = AdamWState.for_param(p)
        adamw_step(p, state, AdamWConfig(lr=0.1))
        expected = hand_adamw(1.0, [1.0], lr=0.1)
        assert p.value[0, 0] == pytest.approx(expected, abs=1e-15)
        assert p.value[0, 0] == pytest.approx(0.9, abs=2e-9)

    def test_decoupled_weight_decay(self):
        p = Parameter(np.array([[1.0]]))
        p.grad[...] = 1.0
        state = AdamWState.for_param(p)
        adamw_step(p, state, AdamWConfig(lr=0.1, weight_decay=0.01))
        expected = hand_adamw(1.0, [1.0], lr=0.1, wd=0.01)
        assert p.value[0, 0] == pytest.approx(expected, abs=1e-15)
        assert p.value[0, 0] == pytest.approx(0.899, abs=2e-9)

    def test_zero_gradient_is_noop(self):
        p = Parameter(np.array([[3.0, -2.0]]))
        state = AdamWState.for_param(p)
        before = p.value.copy()
        adamw_step(p, state, AdamWConfig(lr=0.1, weight_decay=0.0))
        assert np.array_equal(p.value, before)
        assert state.step == 1

    def test_multi_step_matches_hand_recursion(self):
        grads = [0.5, -1.2, 0.3, 0.0, 2.0]
        p = Parameter(np.array([[1.5]]))
        state = AdamWState.for_param(p)
        cfg = AdamWConfig(lr=0.01, weight_decay=0.004)
        for g in grads:
            p.grad[...] = g
            adamw_step(p, state, cfg)
        expected = hand_adamw(1.5, grads, lr=0.01, wd=0.004)
        assert p.value[0, 0] == pytest.approx(expected, abs=1e-14)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            AdamWConfig(lr=0.0)
        with pytest.raises(ValueError):
            AdamWConfig(beta1=1.0)
        with pytest.raises(ValueError):
            AdamWConfig(weight_decay=-0.1)

    def test_optimizer_wrapper_steps_all_params(self):
        params = [Parameter(np.ones((2, 2))), Parameter(np.zeros(3))]
        for p in params:
            p.grad[...] = 1.0
        opt = AdamW(params, AdamWConfig(lr=0.1))
        opt.step()
        assert params[0].value[0, 0] != 1.0
        assert params[1].value[0] != 0.0


class TestFiniteDiffCheck:
    def test_quadratic_loss_exact(self):
        p = Parameter(np.array([[0.7, -1.3]]))

        def loss():
            return 0.5 * float(np.sum(p.value**2))

        p.grad[...] = p.value
        report = finite_diff_check(loss, [p])
        assert report.max_rel_err < 1e-9

    def test_constant_loss(self):
        p = Parameter(np.array([[2.0]]))
        report = finite_diff_check(lambda: 1.0, [p])
        assert report.max_rel_err == 0.0

    def test_reports_worst_coordinate(self):
        p = Parameter(np.array([[1.0, 2.0]]))

        def loss():
            return float(np.sum(p.value**2))

        p.grad[...] = [[2.0, 0.0]]  # second coordinate wrong on purpose
        report = finite_diff_check(loss, [p], tol=1e-6)
        assert not report.passed
        assert report.worst.flat_index == 1
