"""AdamW with decoupled weight decay and a linear warmup/decay schedule."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import InputError, ShapeError
from .tensor import Tensor


@dataclass(frozen=True)
class LinearSchedule:
    """Linear ramp 0 -> base_lr over warmup_steps, then linear decay to 0."""

    base_lr: float
    warmup_steps: int
    total_steps: int

    def __post_init__(self):
        if not 0 <= self.warmup_steps <= self.total_steps:
            raise InputError(
                f"need 0 <= warmup_steps <= total_steps, got {self.warmup_steps}, {self.total_steps}"
            )


def lr_at(schedule: LinearSchedule, step: int) -> float:
    if step < 0:
        raise InputError(f"step must be non-negative, got {step}")
    if step > schedule.total_steps:
        return 0.0
    if step < schedule.warmup_steps:
        return schedule.base_lr * step / schedule.warmup_steps
    tail = schedule.total_steps - schedule.warmup_steps
    if tail == 0:
        return 0.0
    return schedule.base_lr * (schedule.total_steps - step) / tail


class AdamW:
    """Decoupled-decay Adam over a named parameter map.

    Weight decay applies only to matrices (ndim >= 2): biases and layer-norm
    gains/shifts are 1-D and excluded.  Parameters whose grad is None are
    skipped for the step, which is what lets the MLM objective leave the
    classification head untouched.
    """

    def __init__(
        self,
        params: Mapping[str, Tensor],
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
        weight_decay: float = 0.01,
        bias_correction: bool = True,
    ):
        self.params = dict(params)
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.weight_decay = weight_decay
        self.bias_correction = bias_correction
        self.m = {name: np.zeros_like(p.data) for name, p in self.params.items()}
        self.v = {name: np.zeros_like(p.data) for name, p in self.params.items()}
        self.t = 0

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.zero_grad()

    def step(self, lr: float) -> None:
        self.t += 1
        for name, p in self.params.items():
            g = p.grad
            if g is None:
                continue
            if g.shape != p.data.shape:
                raise ShapeError(f"grad shape {g.shape} != param shape {p.data.shape} for {name!r}")
            m = self.m[name]
            v = self.v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            if self.bias_correction:
                m_hat = m / (1.0 - self.beta1 ** self.t)
                v_hat = v / (1.0 - self.beta2 ** self.t)
            else:
                m_hat, v_hat = m, v
            update = m_hat / (np.sqrt(v_hat) + self.eps)
            if self.weight_decay and p.data.ndim >= 2:
                update = update + self.weight_decay * p.data
            p.data -= lr * update


def global_grad_norm(params: Mapping[str, Tensor]) -> float:
    total = 0.0
    for p in params.values():
        if p.grad is not None:
            total += float((p.grad * p.grad).sum())
    return math.sqrt(total)


def clip_grad_norm(params: Mapping[str, Tensor], max_norm: float) -> float:
    """Scale all grads so their global norm is at most max_norm; off by default."""
    norm = global_grad_norm(params)
    if norm > max_norm and norm > 0.0:
        factor = max_norm / norm
        for p in params.values():
            if p.grad is not None:
                p.grad *= factor
    return norm
