"""Seedable random streams and the small statistics toolbox used everywhere.

Streams are numpy ``Generator`` objects keyed by a 64-bit master seed and a
substream label.  Labels are hashed into a :class:`numpy.random.SeedSequence`
spawn key, so a trial stream ``(seed, ("sqrt_awgn", n, i))`` is the same no
matter which worker process builds it.
"""

from __future__ import annotations

import hashlib
import math
import numbers
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special, stats

from ._validation import check_count, check_positive, check_probability
from .exceptions import InvalidParameterError, NumericFailureError

_SEED_LIMIT = 2**64

DEFAULT_KL_TOL = 1e-9
MAX_SUBDIVISIONS = 10**6
_F0_FLOOR = 1e-300


def _label_words(substream):
    if substream is None:
        return ()
    if isinstance(substream, (str, numbers.Integral)):
        substream = (substream,)
    words = []
    for part in substream:
        if isinstance(part, bool):
            part = int(part)
        if isinstance(part, numbers.Integral):
            if part < 0 or part >= _SEED_LIMIT:
                raise InvalidParameterError(f"integer substream label out of range: {part}")
            # tag integers so that 5 and "5" give different streams
            words.extend((0, int(part)))
        elif isinstance(part, str):
            digest = hashlib.blake2b(part.encode("utf-8"), digest_size=8).digest()
            words.extend((1, int.from_bytes(digest, "little")))
        else:
            raise InvalidParameterError(f"substream labels must be str or int, got {part!r}")
    return tuple(words)


class RandomStream:
    """A single-owner random stream.

    ``position`` counts the variates drawn through the module-level sampling
    helpers; direct use of :attr:`generator` does not advance it.
    """

    __slots__ = ("seed", "substream", "generator", "position")

    def __init__(self, seed, substream=()):
        if isinstance(seed, bool) or not isinstance(seed, numbers.Integral):
            raise InvalidParameterError(f"seed must be an integer, got {seed!r}")
        if not 0 <= seed < _SEED_LIMIT:
            raise InvalidParameterError("seed must be a 64-bit unsigned integer")
        if isinstance(substream, (str, numbers.Integral)):
            substream = (substream,)
        self.seed = int(seed)
        self.substream = tuple(substream)
        ss = np.random.SeedSequence(self.seed, spawn_key=_label_words(self.substream))
        self.generator = np.random.Generator(np.random.SFC64(ss))
        self.position = 0

    def child(self, *labels):
        """Derive an independent stream by appending ``labels``."""
        return RandomStream(self.seed, self.substream + labels)

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, substream={self.substream!r}, position={self.position})"


def make_rng(seed, substream=()):
    """Create the stream for ``(seed, substream)``; equal inputs give equal sequences."""
    return RandomStream(seed, substream)


def as_stream(stream):
    if isinstance(stream, RandomStream):
        return stream
    raise InvalidParameterError(f"expected a RandomStream, got {type(stream).__name__}")


def sample_gaussian(stream, mean, variance, count):
    variance = check_positive(variance, "variance", strict=False)
    count = check_count(count, "count", minimum=1)
    stream = as_stream(stream)
    stream.position += count
    if variance == 0:
        return np.full(count, float(mean))
    return mean + math.sqrt(variance) * stream.generator.standard_normal(count)


def sample_bernoulli(stream, p, count):
    p = check_probability(p, "p")
    count = check_count(count, "count", minimum=1)
    stream = as_stream(stream)
    stream.position += count
    return (stream.generator.random(count) < p).astype(np.uint8)


def sample_uniform_bits(stream, count):
    count = check_count(count, "count", minimum=0)
    stream = as_stream(stream)
    stream.position += count
    return stream.generator.integers(0, 2, size=count, dtype=np.uint8)


@dataclass(frozen=True)
class MixtureSpec:
    """A finite Gaussian mixture given as ``(weight, mean, variance)`` triples."""

    components: tuple

    def __post_init__(self):
        comps = tuple((float(w), float(m), float(v)) for w, m, v in self.components)
        if not comps:
            raise InvalidParameterError("mixture needs at least one component")
        weights = np.array([c[0] for c in comps])
        if (weights < 0).any() or abs(weights.sum() - 1.0) > 1e-12:
            raise InvalidParameterError("mixture weights must be nonnegative and sum to 1")
        if any(not v > 0 for _, _, v in comps):
            raise InvalidParameterError("mixture variances must be > 0")
        object.__setattr__(self, "components", comps)

    @classmethod
    def gaussian(cls, mean, variance):
        return cls(((1.0, mean, variance),))

    def logpdf(self, y):
        y = np.asarray(y, dtype=np.float64)
        terms = []
        for w, m, v in self.components:
            if w == 0:
                continue
            terms.append(math.log(w) - 0.5 * math.log(2 * math.pi * v) - (y - m) ** 2 / (2 * v))
        return special.logsumexp(np.stack(terms), axis=0)

    def pdf(self, y):
        return np.exp(self.logpdf(y))

    def support(self, width=12.0):
        """Integration range ``[min mean - width*sd, max mean + width*sd]``."""
        means = [m for _, m, _ in self.components]
        sd = math.sqrt(max(v for _, _, v in self.components))
        return min(means) - width * sd, max(means) + width * sd


def _kl_integrand(pdf0, pdf1):
    def f(y):
        l0 = pdf0.logpdf(y)
        l1 = pdf1.logpdf(y)
        f0 = np.exp(l0)
        out = f0 * (l0 - l1)
        out[f0 < _F0_FLOOR] = 0.0
        return out
    return f


def adaptive_simpson(f, lo, hi, tol, *, initial_panels=64, max_subdivisions=MAX_SUBDIVISIONS):
    """Integrate a vectorised ``f`` over ``[lo, hi]`` with adaptive Simpson.

    All unconverged panels are refined together, one generation at a time.
    Raises :class:`NumericFailureError` once ``max_subdivisions`` panel splits
    have been spent without meeting ``tol``.
    """
    edges = np.linspace(lo, hi, initial_panels + 1)
    a, b = edges[:-1], edges[1:]
    m = 0.5 * (a + b)
    fa, fm, fb = f(a), f(m), f(b)
    whole = (b - a) / 6.0 * (fa + 4 * fm + fb)
    tols = np.full(a.shape, tol / initial_panels)
    total = 0.0
    splits = 0
    while a.size:
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4 * frm + fb)
        delta = left + right - whole
        done = (np.abs(delta) <= 15.0 * tols) | ((b - a) < 1e-12 * max(1.0, abs(hi - lo)))
        total += float(np.sum((left + right + delta / 15.0)[done]))
        keep = ~done
        if not keep.any():
            break
        splits += int(keep.sum())
        if splits > max_subdivisions:
            best = total + float(np.sum((left + right)[keep]))
            raise NumericFailureError(
                f"adaptive Simpson did not reach tol={tol} within {max_subdivisions} subdivisions",
                best_estimate=best,
            )
        a_k, m_k, b_k = a[keep], m[keep], b[keep]
        a = np.concatenate([a_k, m_k])
        b = np.concatenate([m_k, b_k])
        m = np.concatenate([lm[keep], rm[keep]])
        fa = np.concatenate([fa[keep], fm[keep]])
        fb = np.concatenate([fm[keep], fb[keep]])
        fm = np.concatenate([flm[keep], frm[keep]])
        whole = np.concatenate([left[keep], right[keep]])
        half = 0.5 * tols[keep]
        tols = np.concatenate([half, half])
    return total


def kl_divergence_numeric(pdf0, pdf1, tol=DEFAULT_KL_TOL):
    """Relative entropy D(pdf0 || pdf1) in nats by adaptive quadrature."""
    tol = check_positive(tol, "tol")
    lo0, hi0 = pdf0.support()
    lo1, hi1 = pdf1.support()
    return adaptive_simpson(_kl_integrand(pdf0, pdf1), min(lo0, lo1), max(hi0, hi1), tol)


def binomial_cdf(n, p, k):
    """P[Bin(n, p) <= k]."""
    n = check_count(n, "n", minimum=1)
    p = check_probability(p, "p")
    if k < 0:
        return 0.0
    if k >= n:
        return 1.0
    return float(stats.binom.cdf(int(k), n, p))


def wilson_interval(successes, trials, confidence=0.95):
    """Wilson score interval for a binomial proportion."""
    trials = check_count(trials, "trials", minimum=1)
    successes = check_count(successes, "successes", minimum=0)
    if successes > trials:
        raise InvalidParameterError("successes cannot exceed trials")
    confidence = check_probability(confidence, "confidence", low_open=True, high_open=True)
    z = stats.norm.ppf(0.5 + confidence / 2)
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Spearman rank correlation, used by the trend checks."""
    return float(stats.spearmanr(x, y).statistic)
