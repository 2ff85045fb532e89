import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minibert import tensor as T
from minibert.errors import ShapeError, StateError
from util import finite_difference_grads


def test_matmul_identity():
    a = T.Tensor(np.eye(2))
    b = T.Tensor([[1.0, 2.0], [3.0, 4.0]])
    assert np.array_equal(T.matmul(a, b).data, b.data)


def test_matmul_hand_product():
    a = T.Tensor([[1.0, 2.0], [3.0, 4.0]])
    b = T.Tensor([[5.0], [6.0]])
    assert np.array_equal(T.matmul(a, b).data, [[17.0], [39.0]])


def test_matmul_shape_error_names_both_shapes():
    a = T.Tensor(np.zeros((2, 3)))
    b = T.Tensor(np.zeros((2, 3)))
    with pytest.raises(ShapeError, match=r"2, 3.*2, 3"):
        T.matmul(a, b)


def test_matmul_associativity():
    rng = np.random.default_rng(0)
    a = T.Tensor(rng.normal(size=(3, 4)))
    b = T.Tensor(rng.normal(size=(4, 5)))
    c = T.Tensor(rng.normal(size=(5, 2)))
    left = T.matmul(T.matmul(a, b), c).data
    right = T.matmul(a, T.matmul(b, c)).data
    assert np.abs(left - right).max() < 1e-10


def test_softmax_symmetry():
    out = T.softmax_rows(T.Tensor([[1.0, 1.0, 1.0]])).data
    assert np.allclose(out, 1.0 / 3.0, atol=1e-15)


def test_softmax_hand_values():
    out = T.softmax_rows(T.Tensor([[0.0, math.log(2.0)]])).data
    assert np.allclose(out, [[1.0 / 3.0, 2.0 / 3.0]], atol=1e-15)


def test_softmax_stabilized_no_overflow():
    out = T.softmax_rows(T.Tensor([[1000.0, 0.0]])).data
    assert np.all(np.isfinite(out))
    assert out[0, 0] == pytest.approx(1.0)
    assert out[0, 1] == pytest.approx(0.0, abs=1e-300)


@given(
    st.lists(
        st.lists(st.floats(-50, 50), min_size=2, max_size=6),
        min_size=1,
        max_size=5,
    ).filter(lambda rows: len({len(r) for r in rows}) == 1)
)
@settings(max_examples=60, deadline=None)
def test_softmax_rows_sum_to_one(rows):
    out = T.softmax_rows(T.Tensor(rows)).data
    assert np.all(out >= 0)
    assert np.abs(out.sum(axis=-1) - 1.0).max() < 1e-12


def test_softmax_with_masked_entries():
    # attention-style additive mask: -inf keys get exactly zero weight and the
    # remaining entries still sum to 1
    x = T.Tensor([[1.0, 2.0, -np.inf, 0.5], [0.0, -np.inf, -np.inf, 3.0]])
    out = T.softmax_rows(x).data
    assert out[0, 2] == 0.0
    assert out[1, 1] == 0.0 and out[1, 2] == 0.0
    assert np.abs(out.sum(axis=-1) - 1.0).max() < 1e-12


def test_layer_norm_constant_input_is_zero():
    x = T.Tensor([5.0, 5.0, 5.0, 5.0])
    gamma = T.Tensor(np.ones(4))
    beta = T.Tensor(np.zeros(4))
    out = T.layer_norm(x, gamma, beta, eps=1e-12).data
    assert np.abs(out).max() < 1e-6


def test_layer_norm_hand_values():
    x = T.Tensor([1.0, -1.0])
    out = T.layer_norm(x, T.Tensor(np.ones(2)), T.Tensor(np.zeros(2)), eps=0.0).data
    assert np.allclose(out, [1.0, -1.0], atol=1e-15)


def test_layer_norm_beta_shift():
    x = T.Tensor([3.0, 3.0])
    out = T.layer_norm(x, T.Tensor(np.ones(2)), T.Tensor(np.full(2, 7.0)), eps=1e-12).data
    assert np.allclose(out, 7.0, atol=1e-6)


def test_gelu_values():
    x = T.Tensor([0.0, 1.0, -10.0])
    out = T.gelu(x).data
    assert out[0] == 0.0
    assert out[1] == pytest.approx(0.8413447460685429, abs=1e-12)
    assert abs(out[2]) < 1e-12


def test_cross_entropy_uniform_logits():
    loss = T.cross_entropy(T.Tensor([[0.0, 0.0]]), [0])
    assert float(loss.data) == pytest.approx(math.log(2.0), abs=1e-12)


def test_cross_entropy_confident_correct():
    loss = T.cross_entropy(T.Tensor([[100.0, 0.0]]), [0])
    assert float(loss.data) == pytest.approx(0.0, abs=1e-12)


def test_cross_entropy_batch_mean():
    loss = T.cross_entropy(T.Tensor([[0.0, 0.0], [0.0, 0.0]]), [0, 1])
    assert float(loss.data) == pytest.approx(math.log(2.0), abs=1e-12)


def test_cross_entropy_label_out_of_range():
    with pytest.raises(IndexError):
        T.cross_entropy(T.Tensor([[0.0, 0.0]]), [2])


def test_backward_sum_gives_ones():
    p = T.parameter(np.array([1.0, 2.0, 3.0]))
    T.sum_all(p).backward()
    assert np.array_equal(p.grad, np.ones(3))


def test_backward_sum_of_squares():
    p = T.parameter(np.array([1.0, 2.0]))
    T.sum_all(T.mul(p, p)).backward()
    assert np.allclose(p.grad, [2.0, 4.0], atol=1e-15)


def test_backward_twice_raises_state_error():
    p = T.parameter(np.array([1.0, 2.0]))
    loss = T.sum_all(T.mul(p, p))
    loss.backward()
    with pytest.raises(StateError):
        loss.backward()


def test_backward_requires_scalar():
    p = T.parameter(np.array([1.0, 2.0]))
    with pytest.raises(ShapeError):
        T.mul(p, p).backward()


def _composite_loss(w1: T.Tensor, b1: T.Tensor, w2: T.Tensor, x: np.ndarray, labels):
    h = T.gelu(T.add(T.matmul(T.Tensor(x), w1), b1))
    h = T.layer_norm(h, T.Tensor(np.ones(h.shape[-1])), T.Tensor(np.zeros(h.shape[-1])), eps=1e-5)
    logits = T.matmul(h, w2)
    return T.cross_entropy(logits, labels)


def test_gradcheck_composite_graph():
    rng = np.random.default_rng(7)
    x = rng.normal(size=(3, 4))
    labels = [0, 1, 0]
    w1 = T.parameter(rng.normal(size=(4, 6)) * 0.3)
    b1 = T.parameter(rng.normal(size=(6,)) * 0.3)
    w2 = T.parameter(rng.normal(size=(6, 2)) * 0.3)

    loss = _composite_loss(w1, b1, w2, x, labels)
    loss.backward()

    def loss_value():
        return float(_composite_loss(w1, b1, w2, x, labels).data)

    for p in (w1, b1, w2):
        fd = finite_difference_grads(loss_value, p)
        rel = np.abs(p.grad - fd) / np.maximum(1e-8, np.abs(p.grad))
        assert rel.max() < 1e-4


def test_gradcheck_softmax_and_attention_style_ops():
    rng = np.random.default_rng(3)
    q = T.parameter(rng.normal(size=(2, 5, 4)))
    k = T.parameter(rng.normal(size=(2, 5, 4)))
    v = T.parameter(rng.normal(size=(2, 5, 4)))
    mask = np.zeros((2, 1, 5))
    mask[:, :, -1] = -np.inf

    def forward():
        scores = T.scale(T.matmul(q, T.swapaxes(k, -1, -2)), 0.5)
        weights = T.softmax_rows(T.add(scores, T.Tensor(mask)))
        ctx = T.matmul(weights, v)
        return T.mean_all(T.tanh(ctx))

    loss = forward()
    loss.backward()
    for p in (q, k, v):
        fd = finite_difference_grads(lambda: float(forward().data), p)
        rel = np.abs(p.grad - fd) / np.maximum(1e-8, np.abs(p.grad))
        assert rel.max() < 1e-4


def test_embedding_and_gather_gradients():
    rng = np.random.default_rng(11)
    table = T.parameter(rng.normal(size=(7, 3)))
    ids = np.array([[1, 1, 4], [2, 0, 4]])

    def forward():
        emb = T.embedding(table, ids)
        flat = T.reshape(emb, (6, 3))
        picked = T.gather_rows(flat, np.array([0, 1, 5]))
        return T.sum_all(T.mul(picked, picked))

    loss = forward()
    loss.backward()
    fd = finite_difference_grads(lambda: float(forward().data), table)
    rel = np.abs(table.grad - fd) / np.maximum(1e-8, np.abs(table.grad))
    assert rel.max() < 1e-4


def test_embedding_id_out_of_range():
    table = T.parameter(np.zeros((4, 2)))
    with pytest.raises(IndexError):
        T.embedding(table, np.array([[0, 4]]))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_ops_stay_finite_on_bounded_inputs(seed):
    rng = np.random.default_rng(seed)
    x = T.Tensor(rng.uniform(-100, 100, size=(3, 5)))
    y = T.Tensor(rng.uniform(-100, 100, size=(5, 3)))
    outs = [
        T.softmax_rows(x).data,
        T.gelu(x).data,
        T.tanh(x).data,
        T.matmul(x, y).data,
        T.layer_norm(x, T.Tensor(np.ones(5)), T.Tensor(np.zeros(5)), 1e-12).data,
    ]
    for out in outs:
        assert np.all(np.isfinite(out))
