"""CoLA-format ingestion, train/validation splitting, permutation, batching."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, TypeVar

from .errors import InputError, ParseError
from .rng import derive_rng

Item = TypeVar("Item")


@dataclass(frozen=True)
class LabeledSentence:
    """One acceptability-judgment record: source code, 0/1 label, optional
    author annotation, and the sentence itself."""

    source_code: str
    label: int
    author_annotation: str
    text: str


@dataclass(frozen=True)
class SplitDataset:
    train: tuple[LabeledSentence, ...]
    validation: tuple[LabeledSentence, ...]
    split_seed: int


def _parse_line(line: str, line_number: int, n_columns: int) -> LabeledSentence:
    parts = line.split("\t")
    if len(parts) != n_columns:
        raise ParseError(
            f"line {line_number}: expected {n_columns} tab-separated columns, got {len(parts)}",
            line_number,
        )
    if n_columns == 4:
        source, raw_label, annotation, text = parts
    else:
        raw_label, text = parts
        source, annotation = "", ""
    try:
        label = int(raw_label)
    except ValueError:
        raise ParseError(f"line {line_number}: label {raw_label!r} is not an integer", line_number)
    if label not in (0, 1):
        raise ParseError(f"line {line_number}: label must be 0 or 1, got {label}", line_number)
    if not text:
        raise ParseError(f"line {line_number}: empty sentence", line_number)
    return LabeledSentence(source, label, annotation, text)


def load_cola_tsv(path) -> list[LabeledSentence]:
    """Four tab-separated columns, no header: source, label, annotation, text."""
    return _load(path, n_columns=4)


def load_simple_tsv(path) -> list[LabeledSentence]:
    """Two-column variant for synthetic datasets: label, text."""
    return _load(path, n_columns=2)


def _load(path, n_columns: int) -> list[LabeledSentence]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_number, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line:
                continue
            records.append(_parse_line(line, line_number, n_columns))
    return records


def load_dataset(path, fmt: str = "cola") -> list[LabeledSentence]:
    if fmt == "cola":
        return load_cola_tsv(path)
    if fmt == "simple":
        return load_simple_tsv(path)
    raise InputError(f"unknown dataset format {fmt!r} (expected 'cola' or 'simple')")


def split(data: Sequence[LabeledSentence], ratio: float, seed: int) -> SplitDataset:
    """Seeded uniform shuffle, then round(N * ratio) records to train (ties up)."""
    if not 0.0 < ratio < 1.0:
        raise InputError(f"split ratio must be in (0, 1), got {ratio}")
    n = len(data)
    if n < 2:
        raise InputError(f"need at least 2 records to split, got {n}")
    order = derive_rng(seed, "split").permutation(n)
    n_train = int(n * ratio + 0.5)
    train = tuple(data[i] for i in order[:n_train])
    validation = tuple(data[i] for i in order[n_train:])
    return SplitDataset(train=train, validation=validation, split_seed=seed)


def permute(data: Sequence[Item], seed: int) -> list[Item]:
    """Uniform seeded permutation; the multiset of items is preserved."""
    order = derive_rng(seed, "permute").permutation(len(data))
    return [data[i] for i in order]


def batches(data: Sequence[Item], batch_size: int) -> list[list[Item]]:
    """Consecutive chunks in order; the last batch may be smaller."""
    if batch_size < 1:
        raise InputError(f"batch_size must be >= 1, got {batch_size}")
    return [list(data[i : i + batch_size]) for i in range(0, len(data), batch_size)]


def steps_per_epoch(n_examples: int, batch_size: int) -> int:
    if batch_size < 1:
        raise InputError(f"batch_size must be >= 1, got {batch_size}")
    return -(-n_examples // batch_size)
