"""WordPiece tokenization: vocabulary building, encoding, decoding.

Sentences are lowercased, whitespace-split, and punctuation characters are
split into their own words before greedy longest-match WordPiece.  Encoded
examples are fixed-length: ``[CLS] pieces [SEP]`` truncated/padded to
``max_len``, with an attention mask whose ones form a prefix.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError
from .validation import check_is_fitted, check_text_sequence

PAD_TOKEN = "[PAD]"
UNK_TOKEN = "[UNK]"
CLS_TOKEN = "[CLS]"
SEP_TOKEN = "[SEP]"
MASK_TOKEN = "[MASK]"
SPECIAL_TOKENS = (PAD_TOKEN, UNK_TOKEN, CLS_TOKEN, SEP_TOKEN, MASK_TOKEN)
PAD_ID, UNK_ID, CLS_ID, SEP_ID, MASK_ID = range(5)


class Vocabulary:
    """Immutable token-to-id map; ids are contiguous and specials occupy 0-4."""

    def __init__(self, tokens: Sequence[str]):
        tokens = list(tokens)
        if tuple(tokens[:5]) != SPECIAL_TOKENS:
            raise InputError(f"vocabulary must start with the special tokens {SPECIAL_TOKENS}")
        self._id_to_token = tokens
        self._token_to_id = {tok: i for i, tok in enumerate(tokens)}
        if len(self._token_to_id) != len(tokens):
            raise InputError("vocabulary contains duplicate token strings")

    def __len__(self) -> int:
        return len(self._id_to_token)

    def __contains__(self, token: str) -> bool:
        return token in self._token_to_id

    def id(self, token: str) -> int:
        return self._token_to_id[token]

    def token(self, token_id: int) -> str:
        return self._id_to_token[token_id]

    def tokens(self) -> list[str]:
        return list(self._id_to_token)

    def save(self, path) -> None:
        """One token per line; the line number is the id."""
        with open(path, "w", encoding="utf-8") as fh:
            for tok in self._id_to_token:
                fh.write(tok + "\n")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        with open(path, encoding="utf-8") as fh:
            tokens = [line.rstrip("\n") for line in fh]
        while tokens and tokens[-1] == "":
            tokens.pop()
        return cls(tokens)


@dataclass
class TokenizedExample:
    """Fixed-length encoded sentence: ids, mask, segment ids, optional label."""

    input_ids: np.ndarray
    attention_mask: np.ndarray
    token_type_ids: np.ndarray
    label: int | None = None


@dataclass
class TokenizedBatch:
    input_ids: np.ndarray
    attention_mask: np.ndarray
    token_type_ids: np.ndarray
    labels: np.ndarray | None = None

    @classmethod
    def from_examples(cls, examples: Sequence[TokenizedExample]) -> "TokenizedBatch":
        labels = None
        if examples and examples[0].label is not None:
            labels = np.array([ex.label for ex in examples], dtype=np.int64)
        return cls(
            input_ids=np.stack([ex.input_ids for ex in examples]),
            attention_mask=np.stack([ex.attention_mask for ex in examples]),
            token_type_ids=np.stack([ex.token_type_ids for ex in examples]),
            labels=labels,
        )

    def __len__(self) -> int:
        return self.input_ids.shape[0]


def normalize_words(text: str) -> list[str]:
    """Lowercase, split on whitespace, then split punctuation into own words."""
    words: list[str] = []
    for chunk in text.lower().split():
        buf = ""
        for ch in chunk:
            if ch.isalnum():
                buf += ch
            else:
                if buf:
                    words.append(buf)
                    buf = ""
                words.append(ch)
        if buf:
            words.append(buf)
    return words


def build_vocab(corpus: Iterable[str], max_size: int) -> Vocabulary:
    """Frequency-ordered whole words plus subword pieces, capped at max_size.

    Layout: specials, whole words by descending frequency (ties alphabetical),
    then single characters and their "##" twins (the coverage kit that keeps
    every corpus word encodable), then longer "##" suffix pieces by weight.
    Space for the coverage kit is reserved up front so truncation can never
    reintroduce [UNK] on the corpus itself.
    """
    freqs: Counter[str] = Counter()
    for sentence in corpus:
        freqs.update(normalize_words(sentence))
    if not freqs:
        raise InputError("empty corpus")

    alphabet = sorted({ch for word in freqs for ch in word})
    if max_size < len(SPECIAL_TOKENS) + len(alphabet):
        raise InputError(
            f"max_size {max_size} below specials + alphabet = {len(SPECIAL_TOKENS) + len(alphabet)}"
        )

    kit = list(alphabet) + ["##" + ch for ch in alphabet]
    if max_size < len(SPECIAL_TOKENS) + len(kit):
        raise InputError(
            f"max_size {max_size} cannot hold the single-character pieces "
            f"({len(SPECIAL_TOKENS) + len(kit)} required)"
        )

    tokens = list(SPECIAL_TOKENS)
    seen = set(tokens)
    kit_set = set(kit)

    def kit_remaining() -> int:
        return sum(1 for t in kit if t not in seen)

    for word, _ in sorted(freqs.items(), key=lambda kv: (-kv[1], kv[0])):
        if word in seen:
            continue
        covers_kit = 1 if word in kit_set else 0
        if len(tokens) + 1 + kit_remaining() - covers_kit <= max_size:
            tokens.append(word)
            seen.add(word)

    for piece in kit:
        if piece not in seen:
            tokens.append(piece)
            seen.add(piece)

    suffix_weight: Counter[str] = Counter()
    for word, count in freqs.items():
        for i in range(1, len(word)):
            suffix_weight["##" + word[i:]] += count
    for piece, _ in sorted(suffix_weight.items(), key=lambda kv: (-kv[1], kv[0])):
        if len(tokens) >= max_size:
            break
        if piece not in seen:
            tokens.append(piece)
            seen.add(piece)

    return Vocabulary(tokens)


def wordpiece(vocab: Vocabulary, word: str) -> list[str] | None:
    """Greedy longest-match segmentation; None when the word cannot be covered."""
    pieces: list[str] = []
    start = 0
    while start < len(word):
        end = len(word)
        match = None
        while end > start:
            sub = word[start:end]
            if start > 0:
                sub = "##" + sub
            if sub in vocab:
                match = sub
                break
            end -= 1
        if match is None:
            return None
        pieces.append(match)
        start = end
    return pieces


def encode(vocab: Vocabulary, text: str, max_len: int, label: int | None = None) -> TokenizedExample:
    """Encode one sentence to the fixed-length id/mask/segment triple."""
    if max_len < 2:
        raise InputError(f"max_len must be >= 2, got {max_len}")
    piece_ids: list[int] = []
    for word in normalize_words(text):
        pieces = wordpiece(vocab, word)
        if pieces is None:
            piece_ids.append(UNK_ID)
        else:
            piece_ids.extend(vocab.id(p) for p in pieces)

    piece_ids = piece_ids[: max_len - 2]
    ids = [CLS_ID] + piece_ids + [SEP_ID]
    n = len(ids)
    input_ids = np.full(max_len, PAD_ID, dtype=np.int64)
    input_ids[:n] = ids
    attention_mask = np.zeros(max_len, dtype=np.int64)
    attention_mask[:n] = 1
    token_type_ids = np.zeros(max_len, dtype=np.int64)
    return TokenizedExample(input_ids, attention_mask, token_type_ids, label)


def decode(vocab: Vocabulary, example: TokenizedExample) -> str:
    """Join unmasked non-special pieces back into whitespace-separated words."""
    words: list[str] = []
    for token_id, mask in zip(example.input_ids, example.attention_mask):
        if not mask or token_id < len(SPECIAL_TOKENS):
            continue
        tok = vocab.token(int(token_id))
        if tok.startswith("##") and words:
            words[-1] += tok[2:]
        else:
            words.append(tok)
    return " ".join(words)


class WordPieceTokenizer:
    """Estimator-style wrapper: fit builds the vocabulary, transform encodes.

    Follows scikit-learn conventions (get_params/set_params, trailing
    underscore on fitted attributes) so it drops into sklearn pipelines.
    """

    def __init__(self, max_vocab_size: int = 8192, max_len: int = 64):
        self.max_vocab_size = max_vocab_size
        self.max_len = max_len

    def get_params(self, deep: bool = True) -> dict:
        return {"max_vocab_size": self.max_vocab_size, "max_len": self.max_len}

    def set_params(self, **params) -> "WordPieceTokenizer":
        for key, value in params.items():
            if key not in self.get_params():
                raise InputError(f"unknown parameter {key!r}")
            setattr(self, key, value)
        return self

    def fit(self, X: Sequence[str], y=None) -> "WordPieceTokenizer":
        X = check_text_sequence(X)
        self.vocab_ = build_vocab(X, self.max_vocab_size)
        return self

    def transform(self, X: Sequence[str]) -> TokenizedBatch:
        check_is_fitted(self, "vocab_")
        X = check_text_sequence(X)
        return TokenizedBatch.from_examples([encode(self.vocab_, text, self.max_len) for text in X])

    def fit_transform(self, X: Sequence[str], y=None) -> TokenizedBatch:
        return self.fit(X, y).transform(X)
