"""Dense tensors with reverse-mode automatic differentiation.

Everything is float64: the gradient checks in the test suite compare analytic
gradients against central finite differences at relative error 1e-4, which
single precision cannot sustain.  Each forward pass records a fresh tape;
``backward()`` consumes and frees it, so double-backward is unsupported by
construction.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np
from scipy.special import erf

from .errors import ShapeError, StateError

DTYPE = np.float64

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_INV_SQRT2PI = 1.0 / math.sqrt(2.0 * math.pi)


class Tensor:
    """A dense array plus an optional gradient buffer.

    ``requires_grad`` marks trainable leaves; tensors produced by operations
    on such leaves carry closures that propagate gradients back through the
    recorded graph.
    """

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward", "_consumed")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=DTYPE)
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._parents: tuple[Tensor, ...] = ()
        self._backward: Callable[[np.ndarray], None] | None = None
        self._consumed = False

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def __repr__(self) -> str:
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    def _accumulate(self, g: np.ndarray) -> None:
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += g

    def zero_grad(self) -> None:
        self.grad = None

    # -- graph -------------------------------------------------------------

    def backward(self) -> None:
        """Populate ``grad`` on every reachable leaf, then free the tape.

        Only defined for scalar (size-1) tensors.  Calling it a second time
        on the same recorded forward pass raises ``StateError``.
        """
        if self.data.size != 1:
            raise ShapeError(f"backward() requires a scalar, got shape {self.data.shape}")
        if self._consumed:
            raise StateError("backward() called twice on the same forward pass")

        order: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if id(parent) not in seen:
                    stack.append((parent, False))

        self.grad = np.ones_like(self.data)
        for node in reversed(order):
            if node._consumed and node is not self:
                raise StateError("graph reuses a node whose tape was already freed")
            if node._backward is not None:
                node._backward(node.grad)
        # Free the tape: intermediate buffers are dropped and the pass is
        # marked consumed so a stale re-run cannot silently produce zeros.
        for node in order:
            if node._backward is not None or node is self:
                node._consumed = True
                node._parents = ()
                node._backward = None
                if node is not self:
                    node.grad = None

    # -- operator sugar ------------------------------------------------------

    def __add__(self, other: "Tensor") -> "Tensor":
        return add(self, other)

    def __sub__(self, other: "Tensor") -> "Tensor":
        return add(self, neg(other))

    def __neg__(self) -> "Tensor":
        return neg(self)

    def __mul__(self, other: "Tensor") -> "Tensor":
        return mul(self, other)

    def __matmul__(self, other: "Tensor") -> "Tensor":
        return matmul(self, other)


def parameter(data) -> Tensor:
    """A trainable leaf tensor."""
    return Tensor(data, requires_grad=True)


def _make(data: np.ndarray, parents: Sequence[Tensor], backward: Callable[[np.ndarray], None]) -> Tensor:
    out = Tensor(data)
    if any(p.requires_grad or p._backward is not None for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward = backward
    return out


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to the operand's shape."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, dim in enumerate(shape):
        if dim == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


# -- elementwise ops ---------------------------------------------------------


def add(a: Tensor, b: Tensor) -> Tensor:
    data = a.data + b.data

    def backward(g: np.ndarray) -> None:
        if a.requires_grad or a._parents:
            a._accumulate(_unbroadcast(g, a.data.shape))
        if b.requires_grad or b._parents:
            b._accumulate(_unbroadcast(g, b.data.shape))

    return _make(data, (a, b), backward)


def neg(a: Tensor) -> Tensor:
    def backward(g: np.ndarray) -> None:
        a._accumulate(-g)

    return _make(-a.data, (a,), backward)


def mul(a: Tensor, b: Tensor) -> Tensor:
    data = a.data * b.data

    def backward(g: np.ndarray) -> None:
        if a.requires_grad or a._parents:
            a._accumulate(_unbroadcast(g * b.data, a.data.shape))
        if b.requires_grad or b._parents:
            b._accumulate(_unbroadcast(g * a.data, b.data.shape))

    return _make(data, (a, b), backward)


def scale(a: Tensor, factor: float) -> Tensor:
    def backward(g: np.ndarray) -> None:
        a._accumulate(g * factor)

    return _make(a.data * factor, (a,), backward)


# -- linear algebra -----------------------------------------------------------


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.ndim < 2 or b.data.ndim < 2:
        raise ShapeError(f"matmul requires 2-D or higher operands, got {a.data.shape} and {b.data.shape}")
    if a.data.shape[-1] != b.data.shape[-2]:
        raise ShapeError(f"matmul inner dimensions differ: {a.data.shape} vs {b.data.shape}")
    data = a.data @ b.data

    def backward(g: np.ndarray) -> None:
        if a.requires_grad or a._parents:
            a._accumulate(_unbroadcast(g @ np.swapaxes(b.data, -1, -2), a.data.shape))
        if b.requires_grad or b._parents:
            b._accumulate(_unbroadcast(np.swapaxes(a.data, -1, -2) @ g, b.data.shape))

    return _make(data, (a, b), backward)


def swapaxes(a: Tensor, axis1: int, axis2: int) -> Tensor:
    def backward(g: np.ndarray) -> None:
        a._accumulate(np.swapaxes(g, axis1, axis2))

    return _make(np.swapaxes(a.data, axis1, axis2), (a,), backward)


def reshape(a: Tensor, shape: tuple[int, ...]) -> Tensor:
    original = a.data.shape

    def backward(g: np.ndarray) -> None:
        a._accumulate(g.reshape(original))

    return _make(a.data.reshape(shape), (a,), backward)


def narrow(a: Tensor, axis: int, start: int, length: int) -> Tensor:
    """Contiguous slice along one axis."""
    sl: list[slice] = [slice(None)] * a.data.ndim
    sl[axis] = slice(start, start + length)
    key = tuple(sl)
    data = a.data[key]

    def backward(g: np.ndarray) -> None:
        full = np.zeros_like(a.data)
        full[key] = g
        a._accumulate(full)

    return _make(data, (a,), backward)


def select(a: Tensor, axis: int, index: int) -> Tensor:
    """Take one slice along an axis, e.g. the [CLS] position of a batch."""
    data = np.take(a.data, index, axis=axis)

    def backward(g: np.ndarray) -> None:
        full = np.zeros_like(a.data)
        sl: list[slice | int] = [slice(None)] * a.data.ndim
        sl[axis] = index
        full[tuple(sl)] = g
        a._accumulate(full)

    return _make(data, (a,), backward)


def gather_rows(a: Tensor, rows: np.ndarray) -> Tensor:
    """Pick rows of a 2-D tensor; used to pull masked positions for MLM loss."""
    rows = np.asarray(rows, dtype=np.int64)
    data = a.data[rows]

    def backward(g: np.ndarray) -> None:
        full = np.zeros_like(a.data)
        np.add.at(full, rows, g)
        a._accumulate(full)

    return _make(data, (a,), backward)


def embedding(weight: Tensor, ids: np.ndarray) -> Tensor:
    """Row lookup into an embedding table; ids is an integer array."""
    ids = np.asarray(ids, dtype=np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= weight.data.shape[0]):
        raise IndexError(f"embedding id out of range [0, {weight.data.shape[0]})")
    data = weight.data[ids]

    def backward(g: np.ndarray) -> None:
        full = np.zeros_like(weight.data)
        np.add.at(full, ids.reshape(-1), g.reshape(-1, weight.data.shape[1]))
        weight._accumulate(full)

    return _make(data, (weight,), backward)


# -- reductions ----------------------------------------------------------------


def sum_all(a: Tensor) -> Tensor:
    def backward(g: np.ndarray) -> None:
        a._accumulate(np.full_like(a.data, float(g)))

    return _make(np.asarray(a.data.sum()), (a,), backward)


def mean_all(a: Tensor) -> Tensor:
    n = a.data.size

    def backward(g: np.ndarray) -> None:
        a._accumulate(np.full_like(a.data, float(g) / n))

    return _make(np.asarray(a.data.mean()), (a,), backward)


# -- neural-net primitives ------------------------------------------------------


def softmax_rows(x: Tensor) -> Tensor:
    """Numerically stabilized softmax over the last axis.

    Rows containing -inf entries (attention padding masks) get exact zeros at
    those positions; at least one finite entry per row is required.
    """
    m = np.max(x.data, axis=-1, keepdims=True)
    e = np.exp(x.data - m)
    s = e / e.sum(axis=-1, keepdims=True)

    def backward(g: np.ndarray) -> None:
        inner = (g * s).sum(axis=-1, keepdims=True)
        x._accumulate((g - inner) * s)

    return _make(s, (x,), backward)


def layer_norm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float) -> Tensor:
    """Normalize over the last axis with population variance, then scale/shift."""
    mean = x.data.mean(axis=-1, keepdims=True)
    centered = x.data - mean
    var = (centered * centered).mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = centered * inv_std
    data = gamma.data * xhat + beta.data
    n = x.data.shape[-1]

    def backward(g: np.ndarray) -> None:
        gy = g * gamma.data
        if x.requires_grad or x._parents:
            term = gy - gy.mean(axis=-1, keepdims=True) - xhat * (gy * xhat).mean(axis=-1, keepdims=True)
            x._accumulate(term * inv_std)
        if gamma.requires_grad:
            gamma._accumulate(_unbroadcast(g * xhat, gamma.data.shape))
        if beta.requires_grad:
            beta._accumulate(_unbroadcast(g, beta.data.shape))

    return _make(data, (x, gamma, beta), backward)


def gelu(x: Tensor) -> Tensor:
    """Exact erf-based GELU: x * Phi(x)."""
    phi_cdf = 0.5 * (1.0 + erf(x.data * _INV_SQRT2))
    data = x.data * phi_cdf

    def backward(g: np.ndarray) -> None:
        pdf = np.exp(-0.5 * x.data * x.data) * _INV_SQRT2PI
        x._accumulate(g * (phi_cdf + x.data * pdf))

    return _make(data, (x,), backward)


def tanh(x: Tensor) -> Tensor:
    t = np.tanh(x.data)

    def backward(g: np.ndarray) -> None:
        x._accumulate(g * (1.0 - t * t))

    return _make(t, (x,), backward)


def cross_entropy(logits: Tensor, labels: Sequence[int]) -> Tensor:
    """Mean negative log softmax probability of the labeled class.

    ``logits`` is (batch, classes); each label must lie in [0, classes).
    """
    if logits.data.ndim != 2:
        raise ShapeError(f"cross_entropy expects 2-D logits, got shape {logits.data.shape}")
    idx = np.asarray(labels, dtype=np.int64)
    n, c = logits.data.shape
    if idx.shape != (n,):
        raise ShapeError(f"labels length {idx.shape} does not match batch size {n}")
    if idx.size and (idx.min() < 0 or idx.max() >= c):
        raise IndexError(f"label out of range [0, {c})")

    z = logits.data
    m = z.max(axis=1, keepdims=True)
    lse = m + np.log(np.exp(z - m).sum(axis=1, keepdims=True))
    nll = lse[:, 0] - z[np.arange(n), idx]
    data = np.asarray(nll.mean())

    def backward(g: np.ndarray) -> None:
        p = np.exp(z - lse)
        p[np.arange(n), idx] -= 1.0
        logits._accumulate(float(g) * p / n)

    return _make(data, (logits,), backward)
