"""Input validation helpers.

Thin wrappers over :func:`sklearn.utils.check_array` plus scalar range
checks, so every public entry point rejects bad input the same way.
"""

import math
import numbers

import numpy as np
from sklearn.utils import check_array

from .exceptions import InvalidInputError, InvalidParameterError


def check_probability(value, name, *, low_open=False, high_open=False):
    """Return ``value`` as float after checking it lies in [0, 1]."""
    if not isinstance(value, numbers.Real) or math.isnan(value):
        raise InvalidParameterError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    lo_ok = value > 0 if low_open else value >= 0
    hi_ok = value < 1 if high_open else value <= 1
    if not (lo_ok and hi_ok):
        lb = "(" if low_open else "["
        rb = ")" if high_open else "]"
        raise InvalidParameterError(f"{name} must lie in {lb}0, 1{rb}, got {value}")
    return value


def check_positive(value, name, *, strict=True):
    if not isinstance(value, numbers.Real) or not math.isfinite(value):
        raise InvalidParameterError(f"{name} must be a finite real number, got {value!r}")
    value = float(value)
    if strict and value <= 0:
        raise InvalidParameterError(f"{name} must be > 0, got {value}")
    if not strict and value < 0:
        raise InvalidParameterError(f"{name} must be >= 0, got {value}")
    return value


def check_count(value, name, *, minimum=0):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise InvalidParameterError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise InvalidParameterError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_bits(bits, name="bits"):
    """Return ``bits`` as a 1-D uint8 array of zeros and ones."""
    try:
        arr = check_array(bits, ensure_2d=False, ensure_min_samples=0, dtype=None)
    except ValueError as exc:
        raise InvalidInputError(f"{name}: {exc}") from exc
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be one-dimensional")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise InvalidInputError(f"{name} must contain only 0 and 1")
    return arr.astype(np.uint8, copy=False)


def check_transcript(y, name="y", *, allow_empty=False):
    """Return ``y`` as a 1-D float64 array with finite entries."""
    try:
        arr = check_array(
            y, ensure_2d=False, dtype=np.float64,
            ensure_min_samples=0 if allow_empty else 1,
        )
    except ValueError as exc:
        raise InvalidInputError(f"{name}: {exc}") from exc
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be one-dimensional")
    return arr
