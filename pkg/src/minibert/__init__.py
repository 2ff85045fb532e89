"""Mini BERT-style text classification with multi-model fine-tuning.

Public surface:

- :mod:`minibert.tokenizer` -- WordPiece vocabulary building and encoding
- :mod:`minibert.model` -- the encoder classifier, pruning, checkpoints
- :mod:`minibert.trainer` -- fine-tuning, multi-model selection, MLM, sweeps
- :mod:`minibert.metrics` -- confusion-matrix metrics and ROC-AUC
- :mod:`minibert.kb` -- the file-backed knowledgebase
- :class:`minibert.TransferTextClassifier` -- estimator-style wrapper
"""

from .data import LabeledSentence, SplitDataset, batches, load_cola_tsv, load_dataset, permute, split
from .errors import (
    ConfigError,
    FormatError,
    InputError,
    MiniBertError,
    NotFittedError,
    ParseError,
    ShapeError,
    StateError,
)
from .estimator import TransferTextClassifier
from .metrics import ConfusionMatrix, MetricsReport, confusion, derive_metrics, roc_auc
from .model import Checkpoint, MiniBert, ModelConfig, init_model, load_checkpoint, save_checkpoint
from .optim import AdamW, LinearSchedule, lr_at
from .tokenizer import TokenizedBatch, TokenizedExample, Vocabulary, WordPieceTokenizer, build_vocab, encode
from .trainer import (
    MultiTrainConfig,
    RunLog,
    TrainConfig,
    evaluate_model,
    finetune_multi,
    finetune_single,
    pretrain_mlm,
    sweep,
    validation_steps,
)

__version__ = "0.1.0"

__all__ = [
    "AdamW",
    "Checkpoint",
    "ConfigError",
    "ConfusionMatrix",
    "FormatError",
    "InputError",
    "LabeledSentence",
    "LinearSchedule",
    "MetricsReport",
    "MiniBert",
    "MiniBertError",
    "ModelConfig",
    "MultiTrainConfig",
    "NotFittedError",
    "ParseError",
    "RunLog",
    "ShapeError",
    "SplitDataset",
    "StateError",
    "TokenizedBatch",
    "TokenizedExample",
    "TrainConfig",
    "TransferTextClassifier",
    "Vocabulary",
    "WordPieceTokenizer",
    "batches",
    "build_vocab",
    "confusion",
    "derive_metrics",
    "encode",
    "evaluate_model",
    "finetune_multi",
    "finetune_single",
    "init_model",
    "load_checkpoint",
    "load_cola_tsv",
    "load_dataset",
    "lr_at",
    "permute",
    "pretrain_mlm",
    "roc_auc",
    "save_checkpoint",
    "split",
    "sweep",
    "validation_steps",
]
