"""Time-conditioned feature modulation.

A small two-layer network (the modulator) maps the temporal embedding
psi(t) to per-feature scale gamma, bias beta and a power-transform
coefficient lambda; the modulation op then computes

    x_tilde = gamma * YJ(x; lambda) + beta

columnwise.  The head layer is zero-initialized so a fresh modulator is an
exact identity: gamma = 1, beta = 0, lambda = 1.  Lambda is parameterized
as 1 + 3*tanh(raw/3) to keep early-training powers bounded while leaving
the log-like regime (lambda near 0) reachable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .nn import (
    LinearLayer,
    ShapeError,
    linear_backward,
    linear_forward,
    relu_backward,
    relu_forward,
)
from .power import yj_batch
from .rng import Stream

LAMBDA_CLAMP = 3.0


@dataclass(frozen=True, order=True)
class Placement:
    """Where modulation is applied in the network.

    kind is one of "input", "representation", "output"; representation
    placements carry the hidden-layer index they modulate (pre-activation).
    """

    kind: str
    layer: int = -1

    def __post_init__(self):
        if self.kind not in ("input", "representation", "output"):
            raise ValueError(f"invalid placement kind {self.kind!r}")
        if self.kind == "representation" and self.layer < 0:
            raise ValueError("representation placement needs a layer index")
        if self.kind != "representation" and self.layer != -1:
            raise ValueError(f"{self.kind} placement takes no layer index")

    @classmethod
    def input(cls) -> "Placement":
        return cls("input")

    @classmethod
    def representation(cls, layer: int) -> "Placement":
        return cls("representation", layer)

    @classmethod
    def output(cls) -> "Placement":
        return cls("output")

    def label(self) -> str:
        if self.kind == "representation":
            return f"representation{self.layer}"
        return self.kind


@dataclass
class ModulationParams:
    """Per-feature (gamma, beta, lambda); arrays of shape (m,) or (n, m)."""

    gamma: np.ndarray
    beta: np.ndarray
    lam: np.ndarray

    @classmethod
    def identity(cls, width: int) -> "ModulationParams":
        return cls(np.ones(width), np.zeros(width), np.ones(width))


@dataclass
class ModulatorCache:
    psi: np.ndarray
    pre_hidden: np.ndarray
    hidden: np.ndarray
    lam_raw: np.ndarray


class Modulator:
    """psi(t) -> ModulationParams for one modulation site of width m."""

    def __init__(self, hidden: LinearLayer, head: LinearLayer, width: int):
        if head.out_dim != 3 * width:
            raise ShapeError(
                f"modulator head out {head.out_dim} != 3 * width {3 * width}"
            )
        if head.in_dim != hidden.out_dim:
            raise ShapeError("modulator head input does not match hidden output")
        self.hidden = hidden
        self.head = head
        self.width = width

    @classmethod
    def seeded(cls, d_embedding: int, h_mod: int, width: int, stream: Stream):
        """Random hidden layer, zero head: exact identity at initialization.

        The hidden gain sqrt(3) gives unit-variance pre-activations for a
        unit-variance psi, so head updates move the modulation parameters at
        a rate comparable to backbone weight updates.
        """
        hidden = LinearLayer.seeded(d_embedding, h_mod, stream, gain=np.sqrt(3.0))
        head = LinearLayer.zeros(h_mod, 3 * width)
        return cls(hidden, head, width)

    def forward(self, psi: np.ndarray):
        if psi.ndim != 2 or psi.shape[1] != self.hidden.in_dim:
            raise ShapeError(
                f"modulator_forward: psi {psi.shape} incompatible with input "
                f"width {self.hidden.in_dim}"
            )
        pre = linear_forward(self.hidden, psi)
        act = relu_forward(pre)
        raw = linear_forward(self.head, act)
        m = self.width
        gamma_raw, beta_raw, lam_raw = raw[:, :m], raw[:, m : 2 * m], raw[:, 2 * m :]
        params = ModulationParams(
            gamma=1.0 + gamma_raw,
            beta=beta_raw,
            lam=1.0 + LAMBDA_CLAMP * np.tanh(lam_raw / LAMBDA_CLAMP),
        )
        return params, ModulatorCache(psi=psi, pre_hidden=pre, hidden=act, lam_raw=lam_raw)

    def backward(
        self,
        cache: ModulatorCache,
        d_gamma: np.ndarray,
        d_beta: np.ndarray,
        d_lam: np.ndarray,
    ) -> np.ndarray:
        """Accumulate modulator grads; return gradient w.r.t. psi."""
        if cache is None:
            raise ValueError("modulator backward called without a forward cache")
        th = np.tanh(cache.lam_raw / LAMBDA_CLAMP)
        d_lam_raw = d_lam * (1.0 - th * th)
        d_raw = np.concatenate([d_gamma, d_beta, d_lam_raw], axis=1)
        d_act = linear_backward(self.head, cache.hidden, d_raw)
        d_pre = relu_backward(cache.pre_hidden, d_act)
        return linear_backward(self.hidden, cache.psi, d_pre)

    def parameters(self):
        return self.hidden.parameters() + self.head.parameters()


def modulator_forward(psi: np.ndarray, modulator: Modulator) -> ModulationParams:
    params, _ = modulator.forward(psi)
    return params


@dataclass
class ModulateCache:
    x: np.ndarray
    params: ModulationParams
    yj_vals: np.ndarray
    yj_dx: np.ndarray
    yj_dlam: np.ndarray


def modulate(x: np.ndarray, params: ModulationParams):
    """Apply x_tilde = gamma * YJ(x; lambda) + beta; returns (out, cache)."""
    m = x.shape[1]
    for name, arr in (("gamma", params.gamma), ("beta", params.beta), ("lambda", params.lam)):
        if arr.shape not in ((m,), x.shape):
            raise ShapeError(f"modulate: {name} shape {arr.shape} does not fit x {x.shape}")
    vals, dx, dlam = yj_batch(x, params.lam)
    out = params.gamma * vals + params.beta
    return out, ModulateCache(x=x, params=params, yj_vals=vals, yj_dx=dx, yj_dlam=dlam)


def modulate_backward(cache: ModulateCache, upstream: np.ndarray):
    """Gradients of the modulation op.

    Returns (grad_x, grad_gamma, grad_beta, grad_lambda).  When the params
    were per-feature vectors the parameter grads are summed over the batch;
    when per-row (one timestamp per sample) they stay per-row and the batch
    reduction happens inside the modulator's linear backward.
    """
    if cache is None:
        raise ValueError("modulate_backward called without a forward cache")
    if upstream.shape != cache.x.shape:
        raise ShapeError(
            f"modulate_backward: upstream {upstream.shape} != x {cache.x.shape}"
        )
    p = cache.params
    grad_x = upstream * p.gamma * cache.yj_dx
    grad_gamma = upstream * cache.yj_vals
    grad_beta = upstream.copy()
    grad_lam = upstream * p.gamma * cache.yj_dlam
    if p.gamma.ndim == 1:
        grad_gamma = grad_gamma.sum(axis=0)
        grad_beta = grad_beta.sum(axis=0)
        grad_lam = grad_lam.sum(axis=0)
    return grad_x, grad_gamma, grad_beta, grad_lam
