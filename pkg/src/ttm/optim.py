"""AdamW with decoupled weight decay, operating on Parameter objects."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .nn import Parameter


@dataclass
class AdamWConfig:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.0

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError(f"lr must be positive, got {self.lr}")
        if not (0.0 < self.beta1 < 1.0 and 0.0 < self.beta2 < 1.0):
            raise ValueError("beta1/beta2 must lie in (0, 1)")
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.weight_decay < 0:
            raise ValueError("weight_decay must be non-negative")


@dataclass
class AdamWState:
    m: np.ndarray
    v: np.ndarray
    step: int = 0

    @classmethod
    def for_param(cls, param: Parameter) -> "AdamWState":
        return cls(m=np.zeros_like(param.value), v=np.zeros_like(param.value))


def adamw_step(param: Parameter, state: AdamWState, config: AdamWConfig) -> None:
    """One AdamW update.

    Weight decay is decoupled: theta <- theta - lr*wd*theta happens before
    the bias-corrected adaptive step, so decay never enters the moments.
    """
    if state.m.shape != param.value.shape:
        raise ValueError("optimizer state shape does not match parameter")
    g = param.grad
    state.step += 1
    if config.weight_decay != 0.0:
        param.value -= config.lr * config.weight_decay * param.value
    state.m = config.beta1 * state.m + (1.0 - config.beta1) * g
    state.v = config.beta2 * state.v + (1.0 - config.beta2) * (g * g)
    m_hat = state.m / (1.0 - config.beta1 ** state.step)
    v_hat = state.v / (1.0 - config.beta2 ** state.step)
    param.value -= config.lr * m_hat / (np.sqrt(v_hat) + config.eps)


class AdamW:
    """Keeps one AdamWState per parameter; steps all of them together."""

    def __init__(self, params: list[Parameter], config: AdamWConfig):
        self.params = list(params)
        self.config = config
        self.states = [AdamWState.for_param(p) for p in self.params]

    def step(self) -> None:
        for p, s in zip(self.params, self.states):
            adamw_step(p, s, self.config)

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()
