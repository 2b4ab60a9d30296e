"""Low-weight random codebooks for covert signalling over binary symmetric channels.

Codewords are sparse: each position is 1 with probability ``q_c``
(about ``tau_c / sqrt(n)``), and silence is the all-zero word.  Rows are
kept in CSR form (``indices``/``indptr``), so decoding costs ``2**k`` times
the row weight rather than ``2**k * n``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._validation import check_bits, check_count, check_probability
from .exceptions import InvalidInputError, InvalidParameterError, ResourceError
from .rngstat import make_rng

MAX_K = 16


@dataclass(frozen=True, eq=False)
class LowWeightCodebook:
    n: int
    k: int
    q_c: float
    public_seed: int
    indices: np.ndarray = field(repr=False)
    indptr: np.ndarray = field(repr=False)
    collision_bound: float = 0.0
    distinct: bool = True

    @property
    def size(self):
        return 2**self.k

    @property
    def degenerate(self):
        """All rows are silent; decoding cannot tell messages apart."""
        return self.indices.size == 0

    @property
    def weights(self):
        return np.diff(self.indptr)

    def support(self, message):
        return self.indices[self.indptr[message]:self.indptr[message + 1]]

    def row(self, message):
        out = np.zeros(self.n, dtype=np.uint8)
        out[self.support(message)] = 1
        return out

    @property
    def rows(self):
        """Dense ``(2**k, n)`` matrix; only sensible for small codebooks."""
        out = np.zeros((self.size, self.n), dtype=np.uint8)
        rows = np.repeat(np.arange(self.size), self.weights)
        out[rows, self.indices] = 1
        return out

    def overlaps(self, received):
        """``|received AND row|`` for every row."""
        if self.indices.size == 0:
            return np.zeros(self.size, dtype=np.int64)
        hits = received[self.indices].astype(np.int64)
        # reduceat misbehaves on empty segments, so go through a cumulative sum
        csum = np.concatenate([[0], np.cumsum(hits)])
        return csum[self.indptr[1:]] - csum[self.indptr[:-1]]

    def to_params(self):
        return (self.n, self.k, self.q_c, self.public_seed)


def gen_codebook(n, k, q_c, public_seed=0):
    """Draw ``2**k`` rows of length ``n`` with iid Bernoulli(``q_c``) entries.

    Reproducible from ``(n, k, q_c, public_seed)``.  The all-pairs collision
    probability bound is recorded and the rows are scanned for duplicates.
    """
    n = check_count(n, "n", minimum=1)
    k = check_count(k, "k", minimum=0)
    if k > MAX_K:
        raise ResourceError(f"codebooks are limited to k <= {MAX_K} (2**k rows)")
    q_c = check_probability(q_c, "q_c")
    if q_c > 0.5:
        raise InvalidParameterError(f"q_c must lie in [0, 1/2], got {q_c}")
    g = make_rng(public_seed, ("bsc_codebook", n, k, repr(q_c))).generator
    size = 2**k
    weights = g.binomial(n, q_c, size=size)
    supports = [np.sort(g.choice(n, size=int(w), replace=False)) for w in weights]
    indptr = np.concatenate([[0], np.cumsum(weights)]).astype(np.int64)
    indices = (np.concatenate(supports) if supports else np.zeros(0)).astype(np.int64)

    pairs = size * (size - 1) / 2
    log_equal = n * math.log(q_c * q_c + (1 - q_c) ** 2) if 0 < q_c < 1 else 0.0
    bound = min(1.0, pairs * math.exp(log_equal))
    distinct = len({s.tobytes() for s in supports}) == size
    return LowWeightCodebook(n, k, q_c, int(public_seed), indices, indptr, bound, distinct)


def bsc_encode(message, codebook):
    if isinstance(message, bool) or not isinstance(message, (int, np.integer)):
        raise InvalidInputError(f"message must be an integer index, got {message!r}")
    if not 0 <= message < codebook.size:
        raise InvalidInputError(f"message {message} outside [0, {codebook.size})")
    return codebook.row(int(message))


def bsc_decode(received, codebook, p_b):
    """Maximum-likelihood decoding, i.e. minimum Hamming distance for ``p_b < 1/2``.

    Ties go to the lowest message index.
    """
    p_b = check_probability(p_b, "p_b")
    if p_b >= 0.5:
        raise InvalidParameterError("ML decoding needs p_b < 1/2")
    received = check_bits(received, "received")
    if received.size != codebook.n:
        raise InvalidInputError(f"received length {received.size} != n={codebook.n}")
    # d(r, c) = |r| + |c| - 2|r & c|; |r| is common to all rows
    score = codebook.weights - 2 * codebook.overlaps(received)
    return int(np.argmin(score))


def bhattacharyya(p):
    return 2.0 * math.sqrt(p * (1.0 - p))


def bsc_plan_capacity(n, q_c, p_b, target_error=0.1, k_max=None):
    """Message bits a random low-weight code supports at ``target_error``.

    Union-Bhattacharyya bound with the expected pairwise distance
    ``d = 2 n q_c (1 - q_c)``: the largest ``k`` with
    ``(2**k - 1) * z**d <= target_error``, ``z = 2 sqrt(p_b (1 - p_b))``.
    """
    p_b = check_probability(p_b, "p_b", low_open=True)
    if p_b >= 0.5:
        raise InvalidParameterError("p_b must be < 1/2")
    d = 2.0 * n * q_c * (1.0 - q_c)
    log2_z = math.log2(bhattacharyya(p_b))
    # log2(1 + target * z**-d), overflow-safe
    x = math.log2(target_error) - d * log2_z
    k = int(math.floor(x + math.log2(1.0 + 2.0 ** (-x)) if x > -50 else 0.0))
    k = max(0, k)
    if k_max is not None:
        k = min(k, k_max)
    return k


def save_codebook(codebook, path):
    n, k, q_c, seed = codebook.to_params()
    Path(path).write_text(f"n={n} k={k} q_c={q_c!r} public_seed={seed}\n")


def load_codebook(path):
    text = Path(path).read_text().strip()
    match = re.fullmatch(r"n=(\d+) k=(\d+) q_c=(\S+) public_seed=(\d+)", text)
    if not match:
        raise InvalidInputError(f"{path}: malformed codebook file")
    n, k, q_c, seed = match.groups()
    return gen_codebook(int(n), int(k), float(q_c), int(seed))
