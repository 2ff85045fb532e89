"""Input validation helpers shared by the estimator-style interfaces."""

from __future__ import annotations

import numpy as np

from .errors import InputError, NotFittedError


def check_text_sequence(X) -> list[str]:
    """Require a non-string iterable of strings; return it as a list."""
    if isinstance(X, (str, bytes)):
        raise InputError("expected a sequence of sentences, got a single string")
    out = list(X)
    for i, item in enumerate(out):
        if not isinstance(item, str):
            raise InputError(f"element {i} is not a string (got {type(item).__name__})")
    return out


def check_binary_labels(y, n: int | None = None) -> np.ndarray:
    """Require integer labels in {0, 1}; return an int64 array."""
    arr = np.asarray(y)
    if arr.ndim != 1:
        raise InputError(f"labels must be 1-D, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise InputError(f"got {arr.shape[0]} labels for {n} sentences")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise InputError("labels must be 0 or 1")
    return arr.astype(np.int64)


def check_is_fitted(estimator, *attributes: str) -> None:
    for attr in attributes:
        if not hasattr(estimator, attr):
            raise NotFittedError(
                f"{type(estimator).__name__} is not fitted yet; call fit() before this method"
            )
