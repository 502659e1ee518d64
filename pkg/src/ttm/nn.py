"""Dense layers, activations and losses with hand-written backward passes.

Conventions used throughout the package:
  * matrices are C-contiguous float64 numpy arrays, batch-first (rows are
    samples, columns are features);
  * gradients accumulate into ``Parameter.grad`` (call ``zero_grad`` between
    steps), which lets several modulation sites share one embedding;
  * everything is single-threaded and bit-deterministic for fixed inputs.
"""

from __future__ import annotations

import numpy as np

from .rng import Stream


class ShapeError(ValueError):
    """Operand shapes are inconsistent with the operation."""


class InputError(ValueError):
    """Input values violate the operation's contract."""


def check_matrix(arr, name: str = "matrix") -> np.ndarray:
    """Validate external numeric input: 2-D, float64, all entries finite."""
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"{name}: expected a 2-D array, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name}: contains NaN or Inf")
    return np.ascontiguousarray(arr)


class Parameter:
    """A trainable array paired with an accumulated gradient of equal shape."""

    __slots__ = ("value", "grad")

    def __init__(self, value: np.ndarray):
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = np.zeros_like(self.value)

    def zero_grad(self) -> None:
        self.grad[...] = 0.0

    @property
    def shape(self):
        return self.value.shape

    @property
    def size(self) -> int:
        return self.value.size


class LinearLayer:
    """Affine map x -> x @ W.T + b with weight (out, in) and bias (out,)."""

    def __init__(self, weight: np.ndarray, bias: np.ndarray):
        weight = np.asarray(weight, dtype=np.float64)
        bias = np.asarray(bias, dtype=np.float64).reshape(-1)
        if weight.ndim != 2 or bias.shape[0] != weight.shape[0]:
            raise ShapeError(
                f"linear layer: weight {weight.shape} and bias {bias.shape} disagree"
            )
        self.weight = Parameter(weight)
        self.bias = Parameter(bias)

    @classmethod
    def zeros(cls, in_dim: int, out_dim: int) -> "LinearLayer":
        return cls(np.zeros((out_dim, in_dim)), np.zeros(out_dim))

    @classmethod
    def seeded(
        cls, in_dim: int, out_dim: int, stream: Stream, gain: float = 1.0
    ) -> "LinearLayer":
        """Uniform(-gain/sqrt(in), gain/sqrt(in)) weights, zero bias."""
        bound = gain / np.sqrt(max(in_dim, 1))
        w = stream.uniform_range(-bound, bound, (out_dim, in_dim))
        return cls(w, np.zeros(out_dim))

    @property
    def in_dim(self) -> int:
        return self.weight.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weight.shape[0]

    def parameters(self) -> list[Parameter]:
        return [self.weight, self.bias]

    def zero_grad(self) -> None:
        self.weight.zero_grad()
        self.bias.zero_grad()


def linear_forward(layer: LinearLayer, x: np.ndarray) -> np.ndarray:
    if x.ndim != 2 or x.shape[1] != layer.in_dim:
        raise ShapeError(
            f"linear_forward: input {x.shape} incompatible with weight "
            f"{layer.weight.shape}"
        )
    return x @ layer.weight.value.T + layer.bias.value


def linear_backward(
    layer: LinearLayer, x: np.ndarray, upstream: np.ndarray
) -> np.ndarray:
    """Accumulate weight/bias grads; return the gradient w.r.t. x."""
    if upstream.shape != (x.shape[0], layer.out_dim):
        raise ShapeError(
            f"linear_backward: upstream {upstream.shape} does not match "
            f"batch {x.shape[0]} x out {layer.out_dim}"
        )
    layer.weight.grad += upstream.T @ x
    layer.bias.grad += upstream.sum(axis=0)
    return upstream @ layer.weight.value


def relu_forward(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def relu_backward(x: np.ndarray, upstream: np.ndarray) -> np.ndarray:
    # gate on x > 0: subgradient at the kink is 0
    return np.where(x > 0.0, upstream, 0.0)


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def bce_with_logits(logits: np.ndarray, labels: np.ndarray):
    """Mean binary cross-entropy over the batch, from raw logits.

    Uses the overflow-free form log(1+exp(-s·z)) = max(-s·z, 0) + log1p(exp(-|s·z|))
    with s = 2y-1.  Returns (loss, grad wrt logits).
    """
    z = logits.reshape(-1)
    y = np.asarray(labels, dtype=np.float64).reshape(-1)
    if z.shape != y.shape:
        raise ShapeError(f"bce: logits {logits.shape} vs labels {labels.shape}")
    if not np.all((y == 0.0) | (y == 1.0)):
        raise InputError("bce: labels must be 0 or 1")
    s = 2.0 * y - 1.0
    m = -s * z
    loss = float(np.mean(np.maximum(m, 0.0) + np.log1p(np.exp(-np.abs(m)))))
    grad = ((sigmoid(z) - y) / z.shape[0]).reshape(logits.shape)
    return loss, grad


def mse_loss(pred: np.ndarray, target: np.ndarray):
    """Mean squared error over the batch; grad = 2(pred-target)/batch."""
    if pred.shape != target.shape:
        raise ShapeError(f"mse: pred {pred.shape} vs target {target.shape}")
    diff = pred - target
    n = pred.shape[0]
    loss = float(np.sum(diff * diff) / n)
    return loss, 2.0 * diff / n
