"""File-backed knowledgebase: classify documents and store them as
append-only line-delimited JSON records, queryable by label and keyword."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from typing import Iterable

from .data import LabeledSentence
from .errors import FormatError, InputError, ParseError
from .model import MiniBert
from .tokenizer import TokenizedBatch, Vocabulary, encode
from .trainer import predict

DEFAULT_LABEL_NAMES = {0: "unacceptable", 1: "acceptable"}


@dataclass(frozen=True)
class KnowledgeRecord:
    id: int
    text: str
    predicted_label: int
    label_name: str
    confidence: float
    source: str
    created_at: str
    feedback: str | None = None  # reserved; no feedback loop yet

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "KnowledgeRecord":
        return cls(
            id=int(d["id"]),
            text=d["text"],
            predicted_label=int(d["predicted_label"]),
            label_name=d["label_name"],
            confidence=float(d["confidence"]),
            source=d["source"],
            created_at=d["created_at"],
            feedback=d.get("feedback"),
        )


class KnowledgeBase:
    """Single-writer, multi-reader store; one JSON record per line."""

    def __init__(self, path):
        self.path = path

    def records(self) -> list[KnowledgeRecord]:
        out: list[KnowledgeRecord] = []
        try:
            fh = open(self.path, encoding="utf-8")
        except FileNotFoundError:
            return out
        with fh:
            for line_number, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    out.append(KnowledgeRecord.from_dict(json.loads(line)))
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    raise FormatError(f"store line {line_number} is corrupt: {exc}") from exc
        return out

    def next_id(self) -> int:
        existing = self.records()
        return (max(r.id for r in existing) + 1) if existing else 1

    def append(self, records: Iterable[KnowledgeRecord]) -> int:
        count = 0
        with open(self.path, "a", encoding="utf-8") as fh:
            for record in records:
                fh.write(record.to_json() + "\n")
                fh.flush()
                count += 1
        return count

    def query(
        self,
        label: int | None = None,
        keyword: str | None = None,
        limit: int | None = None,
    ) -> list[KnowledgeRecord]:
        """Newest first; all supplied filters must match."""
        out = self.records()
        if label is not None:
            out = [r for r in out if r.predicted_label == label]
        if keyword is not None:
            needle = keyword.lower()
            out = [r for r in out if needle in r.text.lower()]
        out.sort(key=lambda r: r.id, reverse=True)
        if limit is not None:
            if limit < 0:
                raise InputError(f"limit must be non-negative, got {limit}")
            out = out[:limit]
        return out


def read_input_texts(path, fmt: str, error_log: list[str] | None = None) -> list[str]:
    """Sentences from a CoLA TSV, a 2-column TSV, or plain text (one per line).

    Malformed TSV lines are reported into ``error_log`` and skipped; valid
    lines still come through.
    """
    if fmt == "text":
        with open(path, encoding="utf-8") as fh:
            return [line.strip() for line in fh if line.strip()]
    if fmt not in ("cola", "simple"):
        raise InputError(f"unknown input format {fmt!r} (expected 'cola', 'simple', or 'text')")
    texts: list[str] = []
    with open(path, encoding="utf-8") as fh:
        lines = fh.readlines()
    for line_number, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line:
            continue
        try:
            record = _parse_one(line, line_number, fmt)
        except ParseError as exc:
            if error_log is not None:
                error_log.append(str(exc))
            continue
        texts.append(record.text)
    return texts


def _parse_one(line: str, line_number: int, fmt: str) -> LabeledSentence:
    from .data import _parse_line

    return _parse_line(line, line_number, 4 if fmt == "cola" else 2)


def ingest_and_classify(
    model: MiniBert,
    vocab: Vocabulary,
    input_path,
    store: KnowledgeBase,
    fmt: str = "cola",
    label_names: dict[int, str] | None = None,
    max_len: int = 64,
    batch_size: int = 32,
    source: str | None = None,
    error_log: list[str] | None = None,
) -> int:
    """Classify every sentence of the input and append it to the store.

    Returns the number of records appended.  Ids continue from the store's
    current maximum; confidence is the argmax softmax probability.
    """
    names = DEFAULT_LABEL_NAMES if label_names is None else label_names
    texts = read_input_texts(input_path, fmt, error_log=error_log)
    if not texts:
        return 0
    batch = TokenizedBatch.from_examples([encode(vocab, t, max_len) for t in texts])
    preds, probs = predict(model, batch, batch_size)
    start_id = store.next_id()
    created = datetime.now(timezone.utc).isoformat()
    origin = str(source) if source is not None else str(input_path)
    records = [
        KnowledgeRecord(
            id=start_id + i,
            text=text,
            predicted_label=int(pred),
            label_name=names.get(int(pred), str(int(pred))),
            confidence=float(probs[i, int(pred)]),
            source=origin,
            created_at=created,
        )
        for i, (text, pred) in enumerate(zip(texts, preds))
    ]
    return store.append(records)
