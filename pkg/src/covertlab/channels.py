"""Memoryless channel models: AWGN, BSC and a generic DMC.

Channels are stateless.  Every call takes the stream that supplies its
noise, so trials never share randomness by accident.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._validation import check_bits, check_positive, check_probability, check_transcript
from .exceptions import InvalidInputError, InvalidParameterError
from .rngstat import as_stream


@dataclass(frozen=True)
class AwgnParams:
    """Additive white Gaussian noise with variance ``sigma2`` per channel use."""

    sigma2: float

    def __post_init__(self):
        # sigma2 = 0 is rejected on both links: a noiseless warden makes
        # covertness impossible, a noiseless receiver is degenerate.
        object.__setattr__(self, "sigma2", check_positive(self.sigma2, "sigma2"))


@dataclass(frozen=True)
class BscParams:
    """Binary symmetric channel with crossover probability ``p``.

    Plain application accepts any ``p`` in [0, 1]; covert coding calls
    :meth:`require_coding` which insists on ``0 < p < 1/2``.
    """

    p: float

    def __post_init__(self):
        object.__setattr__(self, "p", check_probability(self.p, "p"))

    def require_coding(self):
        if not 0 < self.p < 0.5:
            raise InvalidParameterError(
                f"covert coding needs a crossover probability in (0, 1/2), got {self.p}"
            )
        return self


@dataclass(frozen=True, eq=False)
class Dmc:
    """Discrete memoryless channel with a designated "no transmission" input."""

    transition: np.ndarray
    no_tx_input: int = 0

    def __post_init__(self):
        t = np.array(self.transition, dtype=np.float64)
        if t.ndim != 2 or t.shape[0] < 1 or t.shape[1] < 1:
            raise InvalidParameterError("transition must be a non-empty 2-D matrix")
        if (t < 0).any() or not np.isfinite(t).all():
            raise InvalidParameterError("transition probabilities must be finite and >= 0")
        if np.abs(t.sum(axis=1) - 1.0).max() > 1e-12:
            raise InvalidParameterError("every transition row must sum to 1")
        if not 0 <= int(self.no_tx_input) < t.shape[0]:
            raise InvalidParameterError("no_tx_input must index an input symbol")
        t.setflags(write=False)
        object.__setattr__(self, "transition", t)
        object.__setattr__(self, "no_tx_input", int(self.no_tx_input))

    @property
    def input_alphabet_size(self):
        return self.transition.shape[0]

    @property
    def output_alphabet_size(self):
        return self.transition.shape[1]

    @classmethod
    def bsc(cls, p):
        return cls(np.array([[1 - p, p], [p, 1 - p]]), no_tx_input=0)


def awgn_apply(x, params, stream):
    x = check_transcript(x, "x", allow_empty=True)
    stream = as_stream(stream)
    stream.position += x.size
    return x + math.sqrt(params.sigma2) * stream.generator.standard_normal(x.size)


def bsc_apply(bits, params, stream):
    bits = check_bits(bits)
    stream = as_stream(stream)
    stream.position += bits.size
    flips = (stream.generator.random(bits.size) < params.p).astype(np.uint8)
    return bits ^ flips


def dmc_apply(symbols, dmc, stream):
    """Pass input indices through ``dmc``; each output drawn from its input's row."""
    symbols = np.asarray(symbols)
    if symbols.ndim != 1 or (symbols.size and not np.issubdtype(symbols.dtype, np.integer)):
        raise InvalidInputError("symbols must be a 1-D sequence of integer input indices")
    if symbols.size and (symbols.min() < 0 or symbols.max() >= dmc.input_alphabet_size):
        raise InvalidInputError("symbol outside the input alphabet")
    stream = as_stream(stream)
    stream.position += symbols.size
    cdf = np.cumsum(dmc.transition, axis=1)
    cdf[:, -1] = 1.0
    u = stream.generator.random(symbols.size)
    rows = cdf[symbols]
    return (u[:, None] >= rows).sum(axis=1).astype(np.int64)


def load_dmc(path):
    """Read a DMC from text: ``I O no_tx_index`` then I rows of O probabilities."""
    tokens = Path(path).read_text().split()
    if len(tokens) < 3:
        raise InvalidInputError(f"{path}: missing 'I O no_tx_index' header")
    try:
        n_in, n_out, no_tx = (int(t) for t in tokens[:3])
        values = [float(t) for t in tokens[3:]]
    except ValueError as exc:
        raise InvalidInputError(f"{path}: {exc}") from exc
    if n_in < 1 or n_out < 1 or len(values) != n_in * n_out:
        raise InvalidInputError(
            f"{path}: expected {n_in}x{n_out} probabilities, found {len(values)}"
        )
    return Dmc(np.array(values).reshape(n_in, n_out), no_tx_input=no_tx)


def save_dmc(dmc, path):
    lines = [f"{dmc.input_alphabet_size} {dmc.output_alphabet_size} {dmc.no_tx_input}"]
    lines += [" ".join(repr(float(v)) for v in row) for row in dmc.transition]
    Path(path).write_text("\n".join(lines) + "\n")
