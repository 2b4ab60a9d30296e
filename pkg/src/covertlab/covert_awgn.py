"""Keyed covert signalling over AWGN.

Alice and Bob share a secret slot subset and a one-time pad.  Each channel
use joins the subset independently with probability ``q``; selected slots
carry antipodal symbols ``+a`` (coded bit 0) or ``-a`` (coded bit 1) after the
coded bits are XORed with the pad, and every other use stays silent.  Any
public error-correcting code can sit underneath.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._validation import check_bits, check_count, check_positive, check_transcript
from .exceptions import CapacityError, InvalidInputError, InvalidParameterError
from .rngstat import as_stream, make_rng, sample_uniform_bits

MAX_CODEBOOK_BITS = 20
FILLER_SEED = 0x5EED


@dataclass(frozen=True)
class Repetition:
    """Soft-combined repetition code: every message bit fills ``m`` slots."""

    m: int

    def __post_init__(self):
        check_count(self.m, "m", minimum=1)

    def __str__(self):
        return f"repetition:{self.m}"


@dataclass(frozen=True)
class MLCodebook:
    """Public random codebook of ``2**k`` rows decoded by maximum likelihood."""

    k: int
    public_seed: int = 0

    def __post_init__(self):
        check_count(self.k, "k", minimum=0)
        if self.k > MAX_CODEBOOK_BITS:
            raise InvalidParameterError(f"ml_codebook supports k <= {MAX_CODEBOOK_BITS}")

    def __str__(self):
        return f"ml_codebook:{self.k}"


def parse_ecc_mode(text):
    """Parse ``repetition:<m>`` or ``ml_codebook:<k>``; ``auto`` returns None."""
    text = text.strip()
    if text == "auto":
        return None
    match = re.fullmatch(r"(repetition|ml_codebook):(\d+)", text)
    if not match:
        raise InvalidParameterError(f"unknown ecc mode {text!r}")
    kind, value = match.group(1), int(match.group(2))
    return Repetition(value) if kind == "repetition" else MLCodebook(value)


def default_repetition_factor(expected_slots, sigma_b2, a):
    """Smallest ``m >= 5`` with ``m >= ceil(2 (sigma_b2/a^2) ln(10 k))``, ``k = floor(slots/m)``.

    The right-hand side shrinks as ``m`` grows, so the search terminates.
    Keeps the union-bounded block error near 0.1 as ``k`` grows.
    """
    ratio = sigma_b2 / (a * a)
    m = 5
    while True:
        k = int(expected_slots // m)
        need = math.ceil(2 * ratio * math.log(10 * k)) if k >= 1 else 0
        if m >= need:
            return m
        m += 1


@dataclass(frozen=True)
class SchemeParams:
    n: int
    q: float
    a: float
    ecc: Repetition | MLCodebook
    tau: float | None = None

    def __post_init__(self):
        check_count(self.n, "n", minimum=1)
        if not 0 < self.q <= 1:
            # q = 0 is tolerated only so degenerate keys can be exercised
            if self.q != 0:
                raise InvalidParameterError(f"q must lie in (0, 1], got {self.q}")
        check_positive(self.a, "a")
        if not isinstance(self.ecc, (Repetition, MLCodebook)):
            raise InvalidParameterError(f"unsupported ecc mode {self.ecc!r}")

    @classmethod
    def sqrt_law(cls, n, tau=1.0, a=1.0, ecc=None, sigma_b2=1.0):
        """Parameters with ``q = tau / sqrt(n)`` (capped at 1).

        ``ecc=None`` picks repetition with :func:`default_repetition_factor`
        for the expected slot count.
        """
        check_positive(tau, "tau")
        q = min(1.0, tau / math.sqrt(n))
        if ecc is None:
            ecc = Repetition(default_repetition_factor(n * q, sigma_b2, a))
        return cls(n=n, q=q, a=a, ecc=ecc, tau=tau)

    @property
    def power_budget(self):
        """Expected emitted power ``n q a^2`` (equals ``tau a^2 sqrt(n)`` on the sqrt law)."""
        return self.n * self.q * self.a**2


@dataclass(frozen=True, eq=False)
class SecretKey:
    """Pre-shared secret: sorted slot indices and one pad bit per slot."""

    n: int
    slots: np.ndarray
    pad: np.ndarray = field(repr=False)

    def __post_init__(self):
        slots = np.asarray(self.slots, dtype=np.int64)
        pad = check_bits(self.pad, "pad")
        if slots.ndim != 1:
            raise InvalidInputError("slots must be one-dimensional")
        if slots.size and (slots[0] < 0 or slots[-1] >= self.n or (np.diff(slots) <= 0).any()):
            raise InvalidInputError("slots must be strictly increasing indices below n")
        if pad.size != slots.size:
            raise InvalidInputError("pad length must equal the number of slots")
        slots.setflags(write=False)
        pad = pad.copy()
        pad.setflags(write=False)
        object.__setattr__(self, "slots", slots)
        object.__setattr__(self, "pad", pad)

    def __len__(self):
        return self.slots.size

    def __eq__(self, other):
        if not isinstance(other, SecretKey):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self.slots, other.slots)
                and np.array_equal(self.pad, other.pad))

    __hash__ = None


def gen_key(params, stream):
    """Draw the slot subset and its pad.

    Equivalent in law to flipping ``n`` coins of bias ``q``: the head count is
    binomial and, given the count, the head positions form a uniform subset.
    """
    stream = as_stream(stream)
    g = stream.generator
    count = int(g.binomial(params.n, params.q))
    if count == params.n:
        slots = np.arange(params.n, dtype=np.int64)
    else:
        slots = np.sort(g.choice(params.n, size=count, replace=False)).astype(np.int64)
    stream.position += count
    pad = sample_uniform_bits(stream, count)
    return SecretKey(params.n, slots, pad)


@functools.lru_cache(maxsize=32)
def _public_codebook(k, length, public_seed):
    g = make_rng(public_seed, ("ml_codebook", k, length)).generator
    book = g.integers(0, 2, size=(2**k, length), dtype=np.uint8)
    book.setflags(write=False)
    return book


def public_codebook(mode, length):
    """The ``2**k x length`` public random codebook of an :class:`MLCodebook` mode."""
    return _public_codebook(mode.k, int(length), int(mode.public_seed))


def bits_to_index(bits):
    index = 0
    for b in bits:
        index = (index << 1) | int(b)
    return index


def index_to_bits(index, k):
    return np.array([(index >> (k - 1 - j)) & 1 for j in range(k)], dtype=np.uint8)


def ecc_encode(message, mode, target_len, filler_stream=None):
    """Map ``message`` bits to exactly ``target_len`` coded bits."""
    message = check_bits(message, "message")
    target_len = check_count(target_len, "target_len")
    k = message.size
    if isinstance(mode, Repetition):
        used = k * mode.m
        if used > target_len:
            raise CapacityError(
                f"repetition:{mode.m} needs {used} slots for {k} bits, only {target_len} available",
                max_k=target_len // mode.m,
            )
        if filler_stream is None:
            filler_stream = make_rng(FILLER_SEED, "ecc-filler")
        filler = sample_uniform_bits(filler_stream, target_len - used)
        return np.concatenate([np.repeat(message, mode.m), filler])
    # the codebook is sized by the actual message length, which plan_capacity
    # may have cut below mode.k
    if k > min(mode.k, target_len):
        raise CapacityError(
            f"{k} message bits exceed ml_codebook capacity", max_k=min(mode.k, target_len)
        )
    book = public_codebook(MLCodebook(k, mode.public_seed), target_len)
    return book[bits_to_index(message)].copy()


def plan_capacity(params, key):
    """Number of message bits the key's slots can carry under ``params.ecc``."""
    slots = len(key)
    if isinstance(params.ecc, Repetition):
        return slots // params.ecc.m
    return min(params.ecc.k, slots)


def slot_symbols(message, key, params, filler_stream=None):
    """Antipodal symbols for the key's slots, in slot order."""
    message = check_bits(message, "message")
    capacity = plan_capacity(params, key)
    if message.size > capacity:
        raise CapacityError(
            f"message of {message.size} bits exceeds capacity {capacity}", max_k=capacity
        )
    if len(key) == 0:
        return np.zeros(0)
    coded = ecc_encode(message, params.ecc, len(key), filler_stream) ^ key.pad
    return params.a * (1.0 - 2.0 * coded)


def encode(message, key, params, filler_stream=None):
    """Produce the length-``n`` transmitted sequence (zeros outside the slots)."""
    if key.n != params.n:
        raise InvalidInputError(f"key is for n={key.n}, params for n={params.n}")
    x = np.zeros(params.n)
    x[key.slots] = slot_symbols(message, key, params, filler_stream)
    return x


def decode_slots(y_slots, key, params, k=None):
    """Decode from the observations at the key's slots only.

    Bob discards everything outside the slots, so this is the whole
    decoder; :func:`decode` just slices first.
    """
    if k is None:
        k = plan_capacity(params, key)
    if k == 0:
        return np.zeros(0, dtype=np.uint8)
    # undo the pad: positive now means coded bit 0
    z = np.asarray(y_slots, dtype=np.float64) * (1.0 - 2.0 * key.pad)
    if isinstance(params.ecc, Repetition):
        m = params.ecc.m
        sums = z[: k * m].reshape(k, m).sum(axis=1)
        return (sums < 0).astype(np.uint8)
    book = public_codebook(MLCodebook(k, params.ecc.public_seed), len(key))
    corr = (1.0 - 2.0 * book.astype(np.float64)) @ z
    return index_to_bits(int(np.argmax(corr)), k)


def decode(y, key, params, k=None):
    y = check_transcript(y)
    if y.size != params.n or key.n != params.n:
        raise InvalidInputError(f"expected a transcript of length {params.n}, got {y.size}")
    return decode_slots(y[key.slots], key, params, k)


def save_key(key, path):
    """Write ``key`` as text: header, delta-encoded slots, pad bits in hex."""
    deltas = np.diff(key.slots, prepend=0) if len(key) else np.zeros(0, dtype=np.int64)
    pad_hex = np.packbits(key.pad).tobytes().hex() if len(key) else ""
    text = (
        f"n={key.n} slots={len(key)} pad={key.pad.size}\n"
        + " ".join(str(int(d)) for d in deltas) + "\n"
        + pad_hex + "\n"
    )
    Path(path).write_text(text)


def load_key(path):
    lines = Path(path).read_text().split("\n")
    header = re.fullmatch(r"n=(\d+) slots=(\d+) pad=(\d+)", lines[0].strip())
    if not header or len(lines) < 3:
        raise InvalidInputError(f"{path}: malformed key file")
    n, count, pad_count = (int(g) for g in header.groups())
    deltas = np.array([int(t) for t in lines[1].split()], dtype=np.int64)
    if deltas.size != count:
        raise InvalidInputError(f"{path}: header announces {count} slots, found {deltas.size}")
    slots = np.cumsum(deltas)
    pad_bytes = bytes.fromhex(lines[2].strip())
    pad = np.unpackbits(np.frombuffer(pad_bytes, dtype=np.uint8))[:pad_count]
    if pad.size != pad_count:
        raise InvalidInputError(f"{path}: pad shorter than announced")
    return SecretKey(n, slots, pad)
