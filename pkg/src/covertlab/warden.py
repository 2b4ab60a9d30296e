"""The warden's side: test statistics, min-error estimation and detectability floors.

The covertness figure of merit is the smallest achievable ``P_FA + P_MD``
over thresholds (equal priors).  A warden who cannot do better than a coin
scores 1.

Detector names record what the warden is assumed to know, e.g.
``lrt[n+q+a+sigma_w2]`` knows the scheme parameters but not the key.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from ._validation import check_bits, check_count, check_positive, check_probability, check_transcript
from .exceptions import InvalidInputError, InvalidParameterError
from .rngstat import MixtureSpec, as_stream, wilson_interval

RADIOMETER = "radiometer[sigma_w2]"
LRT = "lrt[n+q+a+sigma_w2]"
COUNT = "count[p_w]"
MIXTURE_LRT = "mixture_lrt[codebook+p_w]"
MARGINAL_LRT = "marginal_lrt[q_c+p_w]"
MAX_LRT = "max_lrt[T+q+a+sigma_w2]"
POOLED_RADIOMETER = "radiometer_pooled[sigma_w2]"
WORST_CASE_RADIOMETER = "radiometer_worstcase[sigma_band]"


def radiometer_stat(y):
    """Average received power ``(1/n) sum y_i^2``."""
    y = check_transcript(y)
    return float(np.dot(y, y) / y.size)


def lrt_terms_awgn(y, q, a, sigma_w2):
    """Per-sample log-likelihood ratio of the sparse antipodal mixture against noise.

    H1 marginal: ``(1-q) N(0,s) + (q/2) N(+a,s) + (q/2) N(-a,s)``, H0: ``N(0,s)``,
    so the ratio is ``1 - q + q exp(-a^2/2s) cosh(a y / s)``.
    """
    y = np.asarray(y, dtype=np.float64)
    if q == 0:
        return np.zeros_like(y)
    c = a * a / (2.0 * sigma_w2)
    t = (a / sigma_w2) * y
    tmax = float(np.abs(t).max()) if t.size else 0.0
    if q <= 0.5 and c < 300 and tmax < 300:
        return np.log1p(q * (math.exp(-c) * np.cosh(t) - 1.0))
    at = np.abs(t)
    log_cosh = at + np.log1p(np.exp(-2.0 * at)) - math.log(2.0)
    return np.logaddexp(math.log1p(-q) if q < 1 else -np.inf, math.log(q) - c + log_cosh)


def lrt_stat_awgn(y, q, a, sigma_w2):
    y = check_transcript(y)
    q = check_probability(q, "q")
    check_positive(a, "a")
    check_positive(sigma_w2, "sigma_w2")
    return float(lrt_terms_awgn(y, q, a, sigma_w2).sum())


def count_stat(bits):
    return int(check_bits(bits).sum(dtype=np.int64))


def mixture_lrt_stat_bsc(bits, codebook, p_w):
    """Log-likelihood ratio of "some uniformly chosen codeword was sent" against silence.

    For a BSC, a codeword with support ``c`` scales the likelihood by
    ``rho**(2|r & c| - |c|)`` with ``rho = (1-p_w)/p_w``.
    """
    return _mixture_lrt(np.asarray(bits, dtype=np.uint8), codebook, p_w)


def _mixture_lrt(bits, codebook, p_w):
    log_rho = math.log((1.0 - p_w) / p_w)
    exponents = (2 * codebook.overlaps(bits) - codebook.weights) * log_rho
    return float(special.logsumexp(exponents) - codebook.k * math.log(2.0))


def sparse_scheme_mixtures(q, a, sigma_w2):
    """Per-sample (H0, H1) laws of the warden's observation under the keyed scheme."""
    h0 = MixtureSpec.gaussian(0.0, sigma_w2)
    if q == 0:
        return h0, h0
    h1 = MixtureSpec(((1.0 - q, 0.0, sigma_w2), (q / 2, a, sigma_w2), (q / 2, -a, sigma_w2)))
    return h0, h1


def pinsker_floor(n, per_sample_kl):
    """Lower bound ``max(0, 1 - sqrt(n D / 2))`` on the warden's ``P_FA + P_MD``."""
    check_count(n, "n", minimum=1)
    if per_sample_kl < 0:
        raise InvalidParameterError(f"per_sample_kl must be >= 0, got {per_sample_kl}")
    return max(0.0, 1.0 - math.sqrt(n * per_sample_kl / 2.0))


@dataclass(frozen=True)
class DetectorReport:
    pfa: float
    pmd: float
    sum_error: float
    threshold: float
    ci_halfwidth: float
    trials: int
    detector_name: str
    # "greater": decide H1 when stat > threshold; "less": when stat < threshold
    direction: str = "greater"
    pfa_ci: float = 0.0
    pmd_ci: float = 0.0
    failures: int = 0


def _halfwidth(count, total, confidence):
    lo, hi = wilson_interval(int(count), int(total), confidence)
    return (hi - lo) / 2


def min_error_from_stats(s0, s1, detector_name="detector", confidence=0.95, trials=None):
    """Best ``P_FA + P_MD`` over all thresholds on the pooled sample values.

    Both decision orientations are tried.  Non-finite statistics are
    dropped and counted in ``failures``.
    """
    s0 = np.asarray(s0, dtype=np.float64)
    s1 = np.asarray(s1, dtype=np.float64)
    if trials is None:
        trials = max(s0.size, s1.size)
    ok0, ok1 = np.isfinite(s0), np.isfinite(s1)
    failures = int((~ok0).sum() + (~ok1).sum())
    s0 = np.sort(s0[ok0])
    s1 = np.sort(s1[ok1])
    n0, n1 = s0.size, s1.size
    if n0 == 0 or n1 == 0:
        raise InvalidInputError("both hypotheses need at least one finite statistic")
    cand = np.unique(np.concatenate([s0, s1]))

    # H1 when stat > t; t = -inf flags everything
    fa_g = np.concatenate([[n0], n0 - np.searchsorted(s0, cand, side="right")])
    md_g = np.concatenate([[0], np.searchsorted(s1, cand, side="right")])
    thr_g = np.concatenate([[-np.inf], cand])
    # H1 when stat < t; t = +inf flags everything
    fa_l = np.concatenate([np.searchsorted(s0, cand, side="left"), [n0]])
    md_l = np.concatenate([n1 - np.searchsorted(s1, cand, side="left"), [0]])
    thr_l = np.concatenate([cand, [np.inf]])

    err_g = fa_g / n0 + md_g / n1
    err_l = fa_l / n0 + md_l / n1
    ig, il = int(np.argmin(err_g)), int(np.argmin(err_l))
    if err_l[il] < err_g[ig]:
        fa, md, thr, direction = fa_l[il], md_l[il], thr_l[il], "less"
    else:
        fa, md, thr, direction = fa_g[ig], md_g[ig], thr_g[ig], "greater"
    pfa, pmd = fa / n0, md / n1
    h0 = _halfwidth(fa, n0, confidence)
    h1 = _halfwidth(md, n1, confidence)
    return DetectorReport(
        pfa=float(pfa), pmd=float(pmd), sum_error=float(pfa + pmd), threshold=float(thr),
        ci_halfwidth=float(math.hypot(h0, h1)),
        trials=int(trials),
        detector_name=detector_name, direction=direction,
        pfa_ci=float(h0), pmd_ci=float(h1), failures=failures,
    )


def min_error_estimate(stat, h0_sampler, h1_sampler, trials, stream, detector_name=None):
    """Monte Carlo estimate of the warden's minimum ``P_FA + P_MD``.

    ``h0_sampler`` and ``h1_sampler`` take a stream and return one
    observation; trial ``i`` of each hypothesis gets its own child stream,
    so the result does not depend on evaluation order.
    """
    trials = check_count(trials, "trials", minimum=100)
    stream = as_stream(stream)
    s0 = np.array([stat(h0_sampler(stream.child("h0", i))) for i in range(trials)], dtype=float)
    s1 = np.array([stat(h1_sampler(stream.child("h1", i))) for i in range(trials)], dtype=float)
    name = detector_name or getattr(stat, "__name__", "detector")
    return min_error_from_stats(s0, s1, name, trials=trials)


def roc_points(s0, s1):
    """ROC curve (false-alarm rate, detection rate) for the rule "H1 if stat > t"."""
    s0 = np.sort(np.asarray(s0, dtype=float))
    s1 = np.sort(np.asarray(s1, dtype=float))
    cand = np.concatenate([[-np.inf], np.unique(np.concatenate([s0, s1]))])
    pfa = 1.0 - np.searchsorted(s0, cand, side="right") / s0.size
    pd = 1.0 - np.searchsorted(s1, cand, side="right") / s1.size
    return cand, pfa, pd


def count_test_min_error(n, p0, p1):
    """Exact minimum ``P_FA + P_MD`` of a threshold test on ``Bin(n,p0)`` vs ``Bin(n,p1)``."""
    ks = np.arange(-1, n + 1)
    c0 = stats.binom.cdf(ks, n, p0)
    c1 = stats.binom.cdf(ks, n, p1)
    greater = (1.0 - c0) + c1
    less = c0 + (1.0 - c1)
    return float(min(greater.min(), less.min(), 1.0))


class ThresholdDetector(ClassifierMixin, BaseEstimator):
    """Base class for detectors that threshold a scalar statistic.

    ``fit`` takes labelled observations (rows of ``X``; ``y`` is 0 for
    silence and 1 for transmission) and keeps the threshold that minimises
    ``P_FA + P_MD`` on them.  ``report_`` holds the resulting
    :class:`DetectorReport`.
    """

    name = "detector"

    def statistic(self, X):
        raise NotImplementedError

    def fit(self, X, y):
        X, y = validate_data(self, X, y, dtype=np.float64)
        labels = np.unique(y)
        if not np.array_equal(labels, [0, 1]):
            raise InvalidInputError("y must contain both labels 0 (silence) and 1 (transmission)")
        self.classes_ = labels
        s = self.statistic(X)
        self.report_ = min_error_from_stats(s[y == 0], s[y == 1], self.name)
        self.threshold_ = self.report_.threshold
        self.direction_ = self.report_.direction
        return self

    def decision_function(self, X):
        check_is_fitted(self, "threshold_")
        X = validate_data(self, X, dtype=np.float64, reset=False)
        s = self.statistic(X)
        return s - self.threshold_ if self.direction_ == "greater" else self.threshold_ - s

    def predict(self, X):
        return (self.decision_function(X) > 0).astype(int)


class RadiometerDetector(ThresholdDetector):
    """Energy detector on the average received power."""

    name = RADIOMETER

    def statistic(self, X):
        X = np.asarray(X, dtype=np.float64)
        return np.einsum("ij,ij->i", X, X) / X.shape[1]


class AwgnLRTDetector(ThresholdDetector):
    """Likelihood-ratio test against the keyed scheme's per-sample mixture."""

    name = LRT

    def __init__(self, q=0.01, a=1.0, sigma_w2=1.0):
        self.q = q
        self.a = a
        self.sigma_w2 = sigma_w2

    def statistic(self, X):
        check_probability(self.q, "q")
        check_positive(self.a, "a")
        check_positive(self.sigma_w2, "sigma_w2")
        return lrt_terms_awgn(np.asarray(X, dtype=np.float64), self.q, self.a, self.sigma_w2).sum(axis=1)


class MaxSlotLRTDetector(ThresholdDetector):
    """LRT maximised over ``slots`` equal windows, for a warden unsure of timing."""

    name = MAX_LRT

    def __init__(self, slots=1, q=0.01, a=1.0, sigma_w2=1.0):
        self.slots = slots
        self.q = q
        self.a = a
        self.sigma_w2 = sigma_w2

    def statistic(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.shape[1] % self.slots:
            raise InvalidInputError("observation length must be a multiple of slots")
        terms = lrt_terms_awgn(X, self.q, self.a, self.sigma_w2)
        return terms.reshape(X.shape[0], self.slots, -1).sum(axis=2).max(axis=1)


class CountDetector(ThresholdDetector):
    """Number of ones in a BSC observation."""

    name = COUNT

    def statistic(self, X):
        return np.asarray(X).sum(axis=1).astype(np.float64)


class MixtureLRTDetector(ThresholdDetector):
    """Optimal test for a warden who knows the public low-weight codebook."""

    name = MIXTURE_LRT

    def __init__(self, codebook=None, p_w=0.1):
        self.codebook = codebook
        self.p_w = p_w

    def statistic(self, X):
        if self.codebook is None:
            raise InvalidParameterError("MixtureLRTDetector needs a codebook")
        X = np.asarray(X).astype(np.uint8)
        return np.array([_mixture_lrt(row, self.codebook, self.p_w) for row in X])
