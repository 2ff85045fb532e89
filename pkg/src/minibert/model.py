"""Mini BERT-style encoder classifier with attention-head pruning.

Architecture: token + position + segment embeddings with layer norm, then
``num_layers`` transformer blocks (multi-head self-attention with an additive
-inf padding mask, residual + layer norm, GELU feed-forward, residual + layer
norm), a tanh pooler over the [CLS] position, and a linear classification
head.  The masked-language-model head ties the output projection to the token
embedding table, so it adds no parameters.

Attention is computed head by head and the head outputs are summed into the
output projection.  That makes physical head removal exactly equivalent to
zeroing the removed head's output-projection rows in the unpruned model, a
property the test suite checks bitwise.

Checkpoint file layout (little-endian, documented for external readers):

    bytes 0..3   magic ``MBCK``
    u32          format version (currently 1)
    u32          header length in bytes
    header       UTF-8 JSON: {"config": {...}, "pruned_heads": {"layer": [heads]},
                 "tensors": [{"name": str, "shape": [int, ...]}, ...]}
    payload      for each entry of "tensors", in order: row-major float64
                 little-endian raw data, 8 * prod(shape) bytes
"""

from __future__ import annotations

import io
import json
import math
import struct
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import tensor as T
from .errors import ConfigError, FormatError, InputError, StateError
from .rng import derive_rng
from .tokenizer import TokenizedBatch

CHECKPOINT_MAGIC = b"MBCK"
CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class ModelConfig:
    """Encoder architecture description."""

    vocab_size: int
    num_layers: int = 2
    hidden_size: int = 64
    num_heads: int = 4
    ff_size: int = 256
    max_positions: int = 64
    type_vocab_size: int = 2
    num_labels: int = 2
    layer_norm_eps: float = 1e-12
    dropout_rate: float = 0.1

    def __post_init__(self):
        sizes = {
            "vocab_size": self.vocab_size,
            "num_layers": self.num_layers,
            "hidden_size": self.hidden_size,
            "num_heads": self.num_heads,
            "ff_size": self.ff_size,
            "max_positions": self.max_positions,
            "type_vocab_size": self.type_vocab_size,
            "num_labels": self.num_labels,
        }
        for name, value in sizes.items():
            if not isinstance(value, int) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if self.hidden_size % self.num_heads != 0:
            raise ConfigError(
                f"hidden_size {self.hidden_size} not divisible by num_heads {self.num_heads}"
            )

    @property
    def head_size(self) -> int:
        return self.hidden_size // self.num_heads


def expected_shapes(
    config: ModelConfig, remaining_heads: Sequence[Sequence[int]]
) -> dict[str, tuple[int, ...]]:
    """Shape of every named weight, given the heads still present per layer."""
    h, f, d = config.hidden_size, config.ff_size, config.head_size
    shapes: dict[str, tuple[int, ...]] = {
        "embeddings.token": (config.vocab_size, h),
        "embeddings.position": (config.max_positions, h),
        "embeddings.segment": (config.type_vocab_size, h),
        "embeddings.ln.gamma": (h,),
        "embeddings.ln.beta": (h,),
    }
    for i in range(config.num_layers):
        nh = len(remaining_heads[i])
        p = f"layer{i}."
        shapes[p + "attn.wq"] = (h, nh * d)
        shapes[p + "attn.bq"] = (nh * d,)
        shapes[p + "attn.wk"] = (h, nh * d)
        shapes[p + "attn.bk"] = (nh * d,)
        shapes[p + "attn.wv"] = (h, nh * d)
        shapes[p + "attn.bv"] = (nh * d,)
        shapes[p + "attn.wo"] = (nh * d, h)
        shapes[p + "attn.bo"] = (h,)
        shapes[p + "attn.ln.gamma"] = (h,)
        shapes[p + "attn.ln.beta"] = (h,)
        shapes[p + "ffn.w1"] = (h, f)
        shapes[p + "ffn.b1"] = (f,)
        shapes[p + "ffn.w2"] = (f, h)
        shapes[p + "ffn.b2"] = (h,)
        shapes[p + "ffn.ln.gamma"] = (h,)
        shapes[p + "ffn.ln.beta"] = (h,)
    shapes["pooler.w"] = (h, h)
    shapes["pooler.b"] = (h,)
    shapes["classifier.w"] = (h, config.num_labels)
    shapes["classifier.b"] = (config.num_labels,)
    return shapes


def _truncated_normal(rng: np.random.Generator, shape: tuple[int, ...], std: float) -> np.ndarray:
    out = rng.normal(0.0, std, size=shape)
    bad = np.abs(out) > 2.0 * std
    while bad.any():
        out[bad] = rng.normal(0.0, std, size=int(bad.sum()))
        bad = np.abs(out) > 2.0 * std
    return out


@dataclass
class Checkpoint:
    """Serializable model snapshot: config, weights, and the pruning record."""

    config: ModelConfig
    weights: dict[str, np.ndarray]
    pruned_heads: dict[int, tuple[int, ...]] = field(default_factory=dict)
    format_version: int = CHECKPOINT_VERSION

    def save(self, path) -> None:
        header = {
            "format_version": self.format_version,
            "config": asdict(self.config),
            "pruned_heads": {str(k): sorted(v) for k, v in self.pruned_heads.items()},
            "tensors": [
                {"name": name, "shape": list(self.weights[name].shape)}
                for name in sorted(self.weights)
            ],
        }
        blob = json.dumps(header, sort_keys=True).encode("utf-8")
        with open(path, "wb") as fh:
            fh.write(CHECKPOINT_MAGIC)
            fh.write(struct.pack("<II", self.format_version, len(blob)))
            fh.write(blob)
            for name in sorted(self.weights):
                arr = np.ascontiguousarray(self.weights[name], dtype="<f8")
                fh.write(arr.tobytes())

    @classmethod
    def load(cls, path) -> "Checkpoint":
        with open(path, "rb") as fh:
            data = fh.read()
        buf = io.BytesIO(data)
        magic = buf.read(4)
        if magic != CHECKPOINT_MAGIC:
            raise FormatError(f"not a checkpoint file (magic {magic!r})")
        head = buf.read(8)
        if len(head) != 8:
            raise FormatError("truncated checkpoint header")
        version, header_len = struct.unpack("<II", head)
        if version != CHECKPOINT_VERSION:
            raise FormatError(f"unsupported checkpoint version {version}")
        blob = buf.read(header_len)
        if len(blob) != header_len:
            raise FormatError("truncated checkpoint header")
        try:
            header = json.loads(blob.decode("utf-8"))
            config = ModelConfig(**header["config"])
            pruned = {int(k): tuple(sorted(v)) for k, v in header["pruned_heads"].items()}
            entries = header["tensors"]
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise FormatError(f"malformed checkpoint header: {exc}") from exc

        remaining = _remaining_from_pruned(config, pruned)
        expected = expected_shapes(config, remaining)
        weights: dict[str, np.ndarray] = {}
        for entry in entries:
            name, shape = entry["name"], tuple(entry["shape"])
            if name not in expected or expected[name] != shape:
                raise FormatError(f"tensor {name!r} has shape {shape}, expected {expected.get(name)}")
            nbytes = 8 * int(np.prod(shape, dtype=np.int64)) if shape else 8
            raw = buf.read(nbytes)
            if len(raw) != nbytes:
                raise FormatError(f"truncated checkpoint payload at tensor {name!r}")
            weights[name] = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
        missing = set(expected) - set(weights)
        if missing:
            raise FormatError(f"checkpoint missing tensors: {sorted(missing)}")
        if buf.read(1):
            raise FormatError("checkpoint has trailing data after the last tensor")
        return cls(config=config, weights=weights, pruned_heads=pruned)


def _remaining_from_pruned(
    config: ModelConfig, pruned: Mapping[int, Sequence[int]]
) -> list[list[int]]:
    remaining = []
    for i in range(config.num_layers):
        gone = set(pruned.get(i, ()))
        remaining.append([h for h in range(config.num_heads) if h not in gone])
    return remaining


class MiniBert:
    """The encoder classifier; holds named parameter tensors and the pruning state."""

    def __init__(
        self,
        config: ModelConfig,
        weights: Mapping[str, np.ndarray],
        pruned_heads: Mapping[int, Sequence[int]] | None = None,
    ):
        self.config = config
        self.pruned_heads: dict[int, tuple[int, ...]] = {
            int(k): tuple(sorted(v)) for k, v in (pruned_heads or {}).items() if v
        }
        self.remaining_heads = _remaining_from_pruned(config, self.pruned_heads)
        expected = expected_shapes(config, self.remaining_heads)
        if set(weights) != set(expected):
            raise ConfigError("weight names do not match the configuration")
        self.params: dict[str, T.Tensor] = {}
        for name in expected:
            arr = np.asarray(weights[name], dtype=T.DTYPE)
            if arr.shape != expected[name]:
                raise ConfigError(f"weight {name!r} has shape {arr.shape}, expected {expected[name]}")
            self.params[name] = T.parameter(arr.copy())

    # -- construction --------------------------------------------------------

    @classmethod
    def init(cls, config: ModelConfig, seed: int) -> "MiniBert":
        """Fresh model: truncated-normal weights (std 0.02), unit gains, zero biases."""
        rng = derive_rng(seed, "init")
        shapes = expected_shapes(config, _remaining_from_pruned(config, {}))
        weights: dict[str, np.ndarray] = {}
        for name in sorted(shapes):
            shape = shapes[name]
            if name.endswith("ln.gamma"):
                weights[name] = np.ones(shape)
            elif name.endswith(("ln.beta", ".bq", ".bk", ".bv", ".bo", ".b1", ".b2", "pooler.b", "classifier.b")):
                weights[name] = np.zeros(shape)
            else:
                weights[name] = _truncated_normal(rng, shape, std=0.02)
        return cls(config, weights)

    @classmethod
    def from_checkpoint(cls, ckpt: Checkpoint) -> "MiniBert":
        return cls(ckpt.config, ckpt.weights, ckpt.pruned_heads)

    def to_checkpoint(self) -> Checkpoint:
        return Checkpoint(
            config=self.config,
            weights={name: p.data.copy() for name, p in self.params.items()},
            pruned_heads=dict(self.pruned_heads),
        )

    # -- forward -------------------------------------------------------------

    def _dropout(self, x: T.Tensor, train: bool, rng: np.random.Generator | None) -> T.Tensor:
        rate = self.config.dropout_rate
        if not train or rate <= 0.0:
            return x
        if rng is None:
            raise StateError("training-mode forward needs a dropout generator")
        keep = 1.0 - rate
        mask = (rng.random(x.shape) < keep).astype(T.DTYPE) / keep
        return T.mul(x, T.Tensor(mask))

    def _encode(self, batch: TokenizedBatch, train: bool, rng: np.random.Generator | None) -> T.Tensor:
        cfg = self.config
        ids = np.asarray(batch.input_ids, dtype=np.int64)
        seq_len = ids.shape[1]
        if seq_len > cfg.max_positions:
            raise InputError(f"sequence length {seq_len} exceeds max_positions {cfg.max_positions}")

        tok = T.embedding(self.params["embeddings.token"], ids)
        pos = T.embedding(self.params["embeddings.position"], np.arange(seq_len))
        seg = T.embedding(self.params["embeddings.segment"], np.asarray(batch.token_type_ids, dtype=np.int64))
        x = T.add(T.add(tok, pos), seg)
        x = T.layer_norm(
            x, self.params["embeddings.ln.gamma"], self.params["embeddings.ln.beta"], cfg.layer_norm_eps
        )
        x = self._dropout(x, train, rng)

        mask = np.asarray(batch.attention_mask)
        additive = np.where(mask == 1, 0.0, -np.inf)[:, None, :]
        mask_t = T.Tensor(additive)

        d = cfg.head_size
        inv_sqrt_d = 1.0 / math.sqrt(d)
        batch_size = ids.shape[0]
        for i in range(cfg.num_layers):
            p = f"layer{i}."
            wq, bq = self.params[p + "attn.wq"], self.params[p + "attn.bq"]
            wk, bk = self.params[p + "attn.wk"], self.params[p + "attn.bk"]
            wv, bv = self.params[p + "attn.wv"], self.params[p + "attn.bv"]
            wo, bo = self.params[p + "attn.wo"], self.params[p + "attn.bo"]

            head_sum: T.Tensor | None = None
            for slot in range(len(self.remaining_heads[i])):
                lo = slot * d
                q = T.add(T.matmul(x, T.narrow(wq, 1, lo, d)), T.narrow(bq, 0, lo, d))
                k = T.add(T.matmul(x, T.narrow(wk, 1, lo, d)), T.narrow(bk, 0, lo, d))
                v = T.add(T.matmul(x, T.narrow(wv, 1, lo, d)), T.narrow(bv, 0, lo, d))
                scores = T.add(T.scale(T.matmul(q, T.swapaxes(k, -1, -2)), inv_sqrt_d), mask_t)
                weights = self._dropout(T.softmax_rows(scores), train, rng)
                ctx = T.matmul(weights, v)
                head_out = T.matmul(ctx, T.narrow(wo, 0, lo, d))
                head_sum = head_out if head_sum is None else T.add(head_sum, head_out)

            if head_sum is None:
                zeros = T.Tensor(np.zeros((batch_size, seq_len, cfg.hidden_size)))
                attn_out = T.add(zeros, bo)
            else:
                attn_out = T.add(head_sum, bo)
            attn_out = self._dropout(attn_out, train, rng)
            x = T.layer_norm(
                T.add(x, attn_out), self.params[p + "attn.ln.gamma"], self.params[p + "attn.ln.beta"],
                cfg.layer_norm_eps,
            )

            hidden = T.gelu(T.add(T.matmul(x, self.params[p + "ffn.w1"]), self.params[p + "ffn.b1"]))
            ffn_out = T.add(T.matmul(hidden, self.params[p + "ffn.w2"]), self.params[p + "ffn.b2"])
            ffn_out = self._dropout(ffn_out, train, rng)
            x = T.layer_norm(
                T.add(x, ffn_out), self.params[p + "ffn.ln.gamma"], self.params[p + "ffn.ln.beta"],
                cfg.layer_norm_eps,
            )
        return x

    def forward(
        self, batch: TokenizedBatch, train: bool = False, rng: np.random.Generator | None = None
    ) -> T.Tensor:
        """Classification logits, shape (batch, num_labels)."""
        x = self._encode(batch, train, rng)
        cls = T.select(x, 1, 0)
        pooled = T.tanh(T.add(T.matmul(cls, self.params["pooler.w"]), self.params["pooler.b"]))
        pooled = self._dropout(pooled, train, rng)
        return T.add(T.matmul(pooled, self.params["classifier.w"]), self.params["classifier.b"])

    def forward_mlm(
        self, batch: TokenizedBatch, train: bool = False, rng: np.random.Generator | None = None
    ) -> T.Tensor:
        """Per-position vocabulary logits (batch, seq, vocab), tied to token embeddings."""
        x = self._encode(batch, train, rng)
        return T.matmul(x, T.swapaxes(self.params["embeddings.token"], 0, 1))

    # -- pruning ---------------------------------------------------------------

    def prune_heads(self, layer_index: int, heads: Sequence[int], mode: str = "remove",
                    rng: np.random.Generator | None = None) -> "MiniBert":
        """Remove (or reinitialize) attention heads of one layer, in place.

        ``remove`` physically drops the heads' Q/K/V columns, biases, and
        output-projection rows and records them in ``pruned_heads``.
        ``reinit`` redraws those slices from the init distribution instead,
        leaving shapes and the pruning record untouched.
        """
        if not 0 <= layer_index < self.config.num_layers:
            raise IndexError(f"layer index {layer_index} out of range [0, {self.config.num_layers})")
        heads = sorted(set(int(h) for h in heads))
        if not heads:
            return self
        for h in heads:
            if not 0 <= h < self.config.num_heads:
                raise IndexError(f"head index {h} out of range [0, {self.config.num_heads})")
        already = set(self.pruned_heads.get(layer_index, ()))
        clash = already.intersection(heads)
        if clash:
            raise StateError(f"heads {sorted(clash)} of layer {layer_index} are already pruned")
        if mode not in ("remove", "reinit"):
            raise ConfigError(f"prune mode must be 'remove' or 'reinit', got {mode!r}")

        d = self.config.head_size
        remaining = self.remaining_heads[layer_index]
        slots = [remaining.index(h) for h in heads]
        p = f"layer{layer_index}."

        if mode == "reinit":
            if rng is None:
                raise StateError("reinit pruning needs a generator for the fresh weights")
            for slot in slots:
                cols = slice(slot * d, (slot + 1) * d)
                for w_name in ("attn.wq", "attn.wk", "attn.wv"):
                    self.params[p + w_name].data[:, cols] = _truncated_normal(
                        rng, (self.config.hidden_size, d), std=0.02
                    )
                for b_name in ("attn.bq", "attn.bk", "attn.bv"):
                    self.params[p + b_name].data[cols] = 0.0
                self.params[p + "attn.wo"].data[cols, :] = _truncated_normal(
                    rng, (d, self.config.hidden_size), std=0.02
                )
            return self

        keep_slots = [s for s in range(len(remaining)) if s not in set(slots)]
        if keep_slots:
            keep_cols = np.concatenate([np.arange(s * d, (s + 1) * d) for s in keep_slots])
        else:
            keep_cols = np.array([], dtype=np.int64)
        for w_name in ("attn.wq", "attn.wk", "attn.wv"):
            old = self.params[p + w_name].data
            self.params[p + w_name] = T.parameter(old[:, keep_cols].copy())
        for b_name in ("attn.bq", "attn.bk", "attn.bv"):
            old = self.params[p + b_name].data
            self.params[p + b_name] = T.parameter(old[keep_cols].copy())
        old_wo = self.params[p + "attn.wo"].data
        self.params[p + "attn.wo"] = T.parameter(old_wo[keep_cols, :].copy())

        self.pruned_heads[layer_index] = tuple(sorted(already.union(heads)))
        self.remaining_heads[layer_index] = [h for h in remaining if h not in set(heads)]
        return self

    # -- introspection -----------------------------------------------------------

    def parameter_count(self) -> int:
        return sum(p.data.size for p in self.params.values())

    def zero_grads(self) -> None:
        for p in self.params.values():
            p.zero_grad()


def init_model(config: ModelConfig, seed: int) -> MiniBert:
    return MiniBert.init(config, seed)


def prune_heads(model: MiniBert, layer_index: int, heads: Sequence[int], **kwargs) -> MiniBert:
    return model.prune_heads(layer_index, heads, **kwargs)


def parameter_count(model: MiniBert) -> int:
    return model.parameter_count()


def save_checkpoint(model: MiniBert, path) -> None:
    model.to_checkpoint().save(path)


def load_checkpoint(path) -> MiniBert:
    return MiniBert.from_checkpoint(Checkpoint.load(path))
