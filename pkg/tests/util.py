"""Shared test helpers: finite-difference gradient checking."""

from __future__ import annotations

from typing import Callable, Iterable

import numpy as np

from minibert.tensor import Tensor


def randomize_for_gradcheck(model, seed: int) -> None:
    """Redraw weights at magnitudes that keep true gradients well above the
    finite-difference noise floor (~5e-12 for h=1e-5 on an O(1) loss)."""
    rng = np.random.default_rng(seed)
    for name in sorted(model.params):
        p = model.params[name]
        if name.endswith("ln.gamma"):
            p.data[...] = 1.0 + rng.normal(0.0, 0.1, p.data.shape)
        elif p.data.ndim == 1:
            p.data[...] = rng.normal(0.0, 0.1, p.data.shape)
        else:
            p.data[...] = rng.normal(0.0, 0.3, p.data.shape)


def finite_difference_grads(
    loss_fn: Callable[[], float],
    param: Tensor,
    h: float = 1e-5,
) -> np.ndarray:
    """Central finite differences of a scalar loss w.r.t. every param element."""
    grads = np.zeros_like(param.data)
    flat = param.data.reshape(-1)
    out = grads.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        up = loss_fn()
        flat[i] = orig - h
        down = loss_fn()
        flat[i] = orig
        out[i] = (up - down) / (2.0 * h)
    return grads


def max_relative_grad_error(
    loss_fn: Callable[[], float],
    params: Iterable[tuple[str, Tensor]],
    h: float = 1e-5,
    floor: float = 1e-8,
) -> tuple[float, str]:
    """Worst relative error |analytic - fd| / max(floor, |analytic|) over params.

    Analytic gradients must already be populated on each param.
    """
    worst = 0.0
    worst_name = ""
    for name, p in params:
        assert p.grad is not None, f"no gradient populated for {name}"
        fd = finite_difference_grads(loss_fn, p, h=h)
        denom = np.maximum(floor, np.abs(p.grad))
        rel = np.abs(p.grad - fd) / denom
        m = float(rel.max()) if rel.size else 0.0
        if m > worst:
            worst = m
            worst_name = name
    return worst, worst_name
