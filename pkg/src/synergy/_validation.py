"""Input validation helpers shared by the functional API and the estimators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class UndefinedMetricError(ArithmeticError):
    """A statistic has no defined value for the given data (zero median, constant series...)."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True)
class Undefined:
    """Placeholder stored in result containers where a metric could not be computed."""

    reason: str

    def __bool__(self) -> bool:
        return False

    def __str__(self) -> str:
        return f"undefined:{self.reason}"


def evaluate(func, *args, **kwargs):
    """Call ``func`` and turn an :class:`UndefinedMetricError` into an :class:`Undefined` cell."""
    try:
        return func(*args, **kwargs)
    except UndefinedMetricError as exc:
        return Undefined(exc.reason)


def as_1d_float(values, name: str = "values", *, nonnegative: bool = False,
                min_length: int = 1) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_length:
        if min_length == 1:
            raise ValueError(f"{name} is empty")
        raise ValueError(f"{name} needs at least {min_length} values, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    if nonnegative and np.any(arr < 0):
        idx = int(np.flatnonzero(arr < 0)[0])
        raise ValueError(f"{name} must be non-negative (index {idx} is {arr[idx]!r})")
    return arr


def check_paired(x, y, min_length: int = 3) -> tuple[np.ndarray, np.ndarray]:
    x = as_1d_float(x, "x", min_length=min_length)
    y = as_1d_float(y, "y", min_length=min_length)
    if x.shape != y.shape:
        raise ValueError(f"x and y differ in length ({x.size} vs {y.size})")
    return x, y
