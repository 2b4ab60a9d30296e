"""Experiment sweeps: configuration, per-trial simulation and row assembly.

Every trial draws from its own stream ``make_rng(master_seed, (label, n, i))``,
so splitting the trials across worker processes changes wall time only.

Cost-saving reductions used by the trial workers, all exact in law:

* Bob only looks at the key's slots, so only those observations get noise.
* The warden's H0 and H1 transcripts in a trial share the same noise draw
  (H1 adds the slot symbols).  Each hypothesis keeps its exact marginal
  law, which is all the threshold sweep uses.
* When the radiometer is the only AWGN detector, its statistic is drawn
  directly: ``sigma^2 * chi2(n - |S|) + sigma^2 * ncx2(|S|, |S| a^2 / sigma^2)``.
* Soft-combined repetition with all uses active reduces to one Gaussian
  per message bit (noise-uncertainty experiment).
"""

from __future__ import annotations

import dataclasses
import functools
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import warden
from .covert_awgn import (
    SchemeParams,
    decode_slots,
    gen_key,
    parse_ecc_mode,
    plan_capacity,
    slot_symbols,
)
from .covert_bsc import bsc_plan_capacity, gen_codebook
from .exceptions import ConfigError, InvalidParameterError
from .rngstat import (
    MixtureSpec,
    kl_divergence_numeric,
    make_rng,
    sample_uniform_bits,
    wilson_interval,
)

log = logging.getLogger(__name__)

EXPERIMENTS = ("sqrt_awgn", "exponent_awgn", "sqrt_bsc", "timing", "noise_uncertainty")

DETECTOR_LABELS = {
    "radiometer": warden.RADIOMETER,
    "lrt": warden.LRT,
    "count": warden.COUNT,
    "mixture_lrt": warden.MIXTURE_LRT,
    "max_lrt": warden.MAX_LRT,
    "radiometer_pooled": warden.POOLED_RADIOMETER,
    "radiometer_worstcase": warden.WORST_CASE_RADIOMETER,
}

_ALLOWED_DETECTORS = {
    "sqrt_awgn": ("radiometer", "lrt"),
    "exponent_awgn": ("radiometer", "lrt"),
    "sqrt_bsc": ("count", "mixture_lrt"),
    "timing": ("max_lrt", "radiometer_pooled"),
    "noise_uncertainty": ("radiometer_worstcase",),
}

_COMMON_KEYS = {"experiment", "n_grid", "trials", "master_seed", "detectors"}
_SCHEMA = {
    "sqrt_awgn": {"tau", "a", "sigma_b2", "sigma_w2", "ecc_mode"},
    "exponent_awgn": {"tau", "sigma_b2", "sigma_w2", "ecc_mode", "exponents", "power_scale"},
    "sqrt_bsc": {"p_b", "p_w", "tau_c", "k", "k_max", "mode", "public_seed", "target_error"},
    "timing": {"tau", "a", "sigma_b2", "sigma_w2", "ecc_mode", "slot_counts"},
    "noise_uncertainty": {"sigma2", "rho", "power", "rate", "sigma_b2"},
}

MIXTURE_LRT_MAX_K = 10


@dataclass(frozen=True)
class SweepConfig:
    experiment: str
    n_grid: tuple = (10**3, 10**4, 10**5, 10**6)
    trials: int = 10_000
    master_seed: int = 1
    detectors: tuple = ()
    # AWGN scheme
    tau: float = 1.0
    a: float = 1.0
    sigma_b2: float = 1.0
    sigma_w2: float = 1.0
    ecc_mode: str = "auto"
    # power-exponent sweep: total power = power_scale * sigma_w2 * n**s
    exponents: tuple = (0.7,)
    power_scale: float = 0.4
    # BSC
    p_b: float = 0.05
    p_w: float = 0.2
    tau_c: float = 1.0
    k: int | None = None
    k_max: int = 8
    mode: str = "keyless"
    public_seed: int = 0
    target_error: float = 0.1
    # timing: number of candidate windows the warden must watch
    slot_counts: tuple = (1, 4, 16, 64)
    # noise uncertainty: sigma_w2 ~ U[sigma2/rho, sigma2*rho], per-use power P
    sigma2: float = 1.0
    rho: float = 2.0
    power: float = 0.2
    rate: float = 0.01

    def __post_init__(self):
        if not self.detectors and self.experiment in _ALLOWED_DETECTORS:
            object.__setattr__(self, "detectors", _ALLOWED_DETECTORS[self.experiment])
        validate_config(self)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


def _need(cond, message, name):
    if not cond:
        raise ConfigError(message, field=name)


def validate_config(cfg):
    _need(cfg.experiment in EXPERIMENTS, f"must be one of {', '.join(EXPERIMENTS)}", "experiment")
    grid = cfg.n_grid
    _need(len(grid) >= 1 and all(isinstance(n, int) and n >= 1 for n in grid),
          "must be a non-empty list of positive integers", "n_grid")
    _need(all(b > a for a, b in zip(grid, grid[1:])), "must be strictly increasing", "n_grid")
    _need(isinstance(cfg.trials, int) and cfg.trials >= 100, "must be an integer >= 100", "trials")
    _need(isinstance(cfg.master_seed, int) and 0 <= cfg.master_seed < 2**64,
          "must be a 64-bit unsigned integer", "master_seed")
    allowed = _ALLOWED_DETECTORS[cfg.experiment]
    for d in cfg.detectors:
        _need(d in allowed, f"detector {d!r} not available for {cfg.experiment} "
              f"(choose from {', '.join(allowed)})", "detectors")
    _need(len(set(cfg.detectors)) == len(cfg.detectors), "duplicate detector", "detectors")

    exp = cfg.experiment
    if exp in ("sqrt_awgn", "exponent_awgn", "timing"):
        for name in ("tau", "sigma_b2", "sigma_w2"):
            _need(getattr(cfg, name) > 0, "must be > 0", name)
        try:
            parse_ecc_mode(cfg.ecc_mode)
        except InvalidParameterError as exc:
            raise ConfigError(str(exc), field="ecc_mode") from exc
    if exp in ("sqrt_awgn", "timing"):
        _need(cfg.a > 0, "must be > 0", "a")
    if exp == "exponent_awgn":
        _need(len(cfg.exponents) >= 1 and all(s > 0 for s in cfg.exponents),
              "must be a non-empty list of positive exponents", "exponents")
        _need(cfg.power_scale > 0, "must be > 0", "power_scale")
    if exp == "sqrt_bsc":
        _need(0 < cfg.p_b < 0.5, "must lie in (0, 1/2)", "p_b")
        _need(0 < cfg.p_w < 0.5, "must lie in (0, 1/2)", "p_w")
        _need(cfg.tau_c > 0, "must be > 0", "tau_c")
        _need(cfg.mode in ("keyless", "keyed"), "must be 'keyless' or 'keyed'", "mode")
        if cfg.mode == "keyless":
            _need(cfg.p_w > cfg.p_b,
                  f"keyless covert coding requires p_w > p_b (got p_w={cfg.p_w}, p_b={cfg.p_b}); "
                  "use mode = keyed", "mode")
        else:
            _need("mixture_lrt" not in cfg.detectors,
                  "a keyed codebook is secret; the warden is limited to count statistics",
                  "detectors")
        _need(cfg.k is None or 0 <= cfg.k <= 16, "must lie in [0, 16]", "k")
        _need(0 <= cfg.k_max <= 16, "must lie in [0, 16]", "k_max")
        _need(0 < cfg.target_error < 1, "must lie in (0, 1)", "target_error")
    if exp == "timing":
        _need(len(grid) == 1, "timing uses a single per-window blocklength", "n_grid")
        sc = cfg.slot_counts
        _need(len(sc) >= 1 and all(isinstance(t, int) and t >= 1 for t in sc)
              and all(b > a for a, b in zip(sc, sc[1:])),
              "must be a strictly increasing list of positive integers", "slot_counts")
    if exp == "noise_uncertainty":
        _need(cfg.rho > 1, "must be > 1 (rho = 1 means the warden knows sigma_w2)", "rho")
        _need(cfg.sigma2 > 0, "must be > 0", "sigma2")
        _need(cfg.power > 0, "must be > 0", "power")
        _need(cfg.sigma_b2 > 0, "must be > 0", "sigma_b2")
        _need(0 < cfg.rate <= 1, "must lie in (0, 1]", "rate")
        _need(all(int(cfg.rate * n) >= 1 for n in grid), "rate * n must give at least one bit",
              "rate")


def _int_list(text):
    return tuple(int(float(t)) if "e" in t.lower() else int(t) for t in _split(text))


def _float_list(text):
    return tuple(float(t) for t in _split(text))


def _split(text):
    return [t for t in text.replace(",", " ").split() if t]


def _opt_int(text):
    return None if text.strip().lower() in ("", "none", "auto") else int(text)


_PARSERS = {
    "experiment": str.strip,
    "n_grid": _int_list,
    "trials": int,
    "master_seed": int,
    "detectors": lambda t: tuple(_split(t)),
    "tau": float, "a": float, "sigma_b2": float, "sigma_w2": float,
    "ecc_mode": str.strip,
    "exponents": _float_list, "power_scale": float,
    "p_b": float, "p_w": float, "tau_c": float,
    "k": _opt_int, "k_max": int, "mode": str.strip, "public_seed": int, "target_error": float,
    "slot_counts": _int_list,
    "sigma2": float, "rho": float, "power": float, "rate": float,
}


def parse_config_text(text, source="<config>"):
    """Parse flat ``key = value`` text into a :class:`SweepConfig`."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"{source}:{lineno}: unknown key", field=key)
        if key in values:
            raise ConfigError(f"{source}:{lineno}: given twice", field=key)
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}", field=key) from exc
    if "experiment" not in values:
        raise ConfigError(f"{source}: missing", field="experiment")
    exp = values["experiment"]
    if exp not in _SCHEMA:
        raise ConfigError(f"must be one of {', '.join(EXPERIMENTS)}", field="experiment")
    for key in values:
        if key not in _COMMON_KEYS | _SCHEMA[exp]:
            raise ConfigError(f"not used by experiment {exp}", field=key)
    return SweepConfig(**values)


def load_config(path):
    return parse_config_text(Path(path).read_text(), source=str(path))


@dataclass
class SweepRow:
    experiment: str
    n: int
    total_power: float
    bits_k: float
    bob_err: float
    bob_ci: float
    detectors: list
    pinsker_floor: float
    seed: int
    trials: int
    wall_s: float = 0.0
    bob_failures: int = 0
    samples: dict = field(default_factory=dict, repr=False)

    def detector(self, short_or_label):
        label = DETECTOR_LABELS.get(short_or_label, short_or_label)
        for rep in self.detectors:
            if rep.detector_name == label:
                return rep
        raise KeyError(short_or_label)


# ---------------------------------------------------------------- trial engine

def _chunks(trials, jobs):
    pieces = 1 if jobs <= 1 else jobs * 4
    bounds = np.linspace(0, trials, min(pieces, trials) + 1).astype(int)
    return list(zip(bounds[:-1], bounds[1:]))


@contextmanager
def _executor(jobs):
    if jobs <= 1:
        yield None
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            yield ex


def _map_trials(worker, payload, trials, jobs, ex):
    chunks = _chunks(trials, jobs)
    if ex is None:
        parts = [worker(payload, lo, hi) for lo, hi in chunks]
    else:
        futures = [ex.submit(worker, payload, lo, hi) for lo, hi in chunks]
        parts = [f.result() for f in futures]
    return {key: np.concatenate([p[key] for p in parts]) for key in parts[0]}


def _sqrt_n_trials(payload, lo, hi):
    """Trials of the keyed AWGN scheme with the warden watching all ``n`` uses."""
    params = payload["params"]
    n, a = params.n, params.a
    sb, sw = math.sqrt(payload["sigma_b2"]), payload["sigma_w2"]
    full = payload["lrt"]
    q = params.q
    size = hi - lo
    out = {name: np.zeros(size) for name in ("k", "err", "power", "rad0", "rad1", "lrt0", "lrt1")}
    for j, i in enumerate(range(lo, hi)):
        stream = make_rng(payload["seed"], (payload["label"], n, i))
        g = stream.generator
        key = gen_key(params, stream)
        k = plan_capacity(params, key)
        message = sample_uniform_bits(stream, k)
        xs = slot_symbols(message, key, params, stream)
        yb = xs + sb * g.standard_normal(xs.size)
        if k:
            out["err"][j] = not np.array_equal(decode_slots(yb, key, params, k), message)
        out["k"][j] = k
        out["power"][j] = float(np.dot(xs, xs))
        if full:
            z = g.standard_normal(n)
            z *= math.sqrt(sw)
            zs = z[key.slots]
            ys = zs + xs
            r0 = float(np.dot(z, z))
            out["rad0"][j] = r0 / n
            out["rad1"][j] = (r0 + float(np.dot(ys, ys) - np.dot(zs, zs))) / n
            l0 = float(warden.lrt_terms_awgn(z, q, a, sw).sum())
            out["lrt0"][j] = l0
            out["lrt1"][j] = l0 + float(warden.lrt_terms_awgn(ys, q, a, sw).sum()
                                        - warden.lrt_terms_awgn(zs, q, a, sw).sum())
        else:
            s = len(key)
            out["rad0"][j] = sw * g.chisquare(n) / n
            rest = sw * g.chisquare(n - s) if s < n else 0.0
            hot = sw * g.noncentral_chisquare(s, s * a * a / sw) if s else 0.0
            out["rad1"][j] = (rest + hot) / n
    return out


def _timing_trials(payload, lo, hi):
    """Trials where Alice uses one of ``T`` windows and the warden watches them all."""
    params = payload["params"]
    n, a, q = params.n, params.a, params.q
    T = payload["T"]
    sb, sw = math.sqrt(payload["sigma_b2"]), payload["sigma_w2"]
    size = hi - lo
    out = {name: np.zeros(size) for name in ("k", "err", "power", "rad0", "rad1", "max0", "max1")}
    for j, i in enumerate(range(lo, hi)):
        stream = make_rng(payload["seed"], (payload["label"], n, i))
        g = stream.generator
        key = gen_key(params, stream)
        k = plan_capacity(params, key)
        message = sample_uniform_bits(stream, k)
        xs = slot_symbols(message, key, params, stream)
        yb = xs + sb * g.standard_normal(xs.size)
        if k:
            out["err"][j] = not np.array_equal(decode_slots(yb, key, params, k), message)
        out["k"][j] = k
        out["power"][j] = float(np.dot(xs, xs))
        z = g.standard_normal((T, n))
        z *= math.sqrt(sw)
        window = int(g.integers(T))
        per_window = warden.lrt_terms_awgn(z, q, a, sw).sum(axis=1)
        zs = z[window, key.slots]
        ys = zs + xs
        r0 = float(np.einsum("ij,ij->", z, z))
        out["rad0"][j] = r0 / (T * n)
        out["rad1"][j] = (r0 + float(np.dot(ys, ys) - np.dot(zs, zs))) / (T * n)
        out["max0"][j] = per_window.max()
        per_window[window] += float(warden.lrt_terms_awgn(ys, q, a, sw).sum()
                                    - warden.lrt_terms_awgn(zs, q, a, sw).sum())
        out["max1"][j] = per_window.max()
    return out


@functools.lru_cache(maxsize=8)
def _cached_codebook(n, k, q_c, seed):
    return gen_codebook(n, k, q_c, seed)


def _bsc_trials(payload, lo, hi):
    """Trials of the low-weight BSC code with both Bob and the warden decoding."""
    n, k = payload["n"], payload["k"]
    book = _cached_codebook(n, k, payload["q_c"], payload["public_seed"])
    p_b, p_w = payload["p_b"], payload["p_w"]
    silent = k == 0
    mixture = payload["mixture"]
    size = hi - lo
    out = {name: np.zeros(size) for name in ("err", "power", "count0", "count1", "mix0", "mix1")}
    for j, i in enumerate(range(lo, hi)):
        stream = make_rng(payload["seed"], (payload["label"], n, i))
        g = stream.generator
        message = int(g.integers(book.size))
        support = np.zeros(0, dtype=np.int64) if silent else book.support(message)
        rb = (g.random(n) < p_b).astype(np.uint8)
        rb[support] ^= 1
        if not silent:
            decoded = int(np.argmin(book.weights - 2 * book.overlaps(rb)))
            out["err"][j] = decoded != message
        out["power"][j] = support.size
        e = (g.random(n) < p_w).astype(np.uint8)
        c0 = int(e.sum())
        out["count0"][j] = c0
        out["count1"][j] = c0 + support.size - 2 * int(e[support].sum())
        if mixture:
            out["mix0"][j] = warden._mixture_lrt(e, book, p_w)
            if silent:
                out["mix1"][j] = out["mix0"][j]
            else:
                r = e.copy()
                r[support] ^= 1
                out["mix1"][j] = warden._mixture_lrt(r, book, p_w)
    return out


def _noise_uncertainty_trials(payload, lo, hi):
    """Constant-power signalling against a warden with an unknown noise level."""
    n, k, m = payload["n"], payload["k"], payload["m"]
    lo_s2, hi_s2 = payload["band"]
    P, sb2 = payload["power"], payload["sigma_b2"]
    size = hi - lo
    out = {name: np.zeros(size) for name in ("err", "rad0", "rad1")}
    bit_mean = m * math.sqrt(P)
    bit_sd = math.sqrt(m * sb2)
    for j, i in enumerate(range(lo, hi)):
        g = make_rng(payload["seed"], (payload["label"], n, i)).generator
        s0 = g.uniform(lo_s2, hi_s2)
        s1 = g.uniform(lo_s2, hi_s2)
        out["rad0"][j] = s0 * g.chisquare(n) / n
        out["rad1"][j] = s1 * g.noncentral_chisquare(n, n * P / s1) / n
        # pad-corrected soft sums per message bit; by symmetry every bit looks like a 0
        sums = bit_mean + bit_sd * g.standard_normal(k)
        out["err"][j] = bool((sums <= 0).any())
    return out


# ---------------------------------------------------------------- row assembly

def _bob_summary(err, sent):
    """Block error rate over the trials that carried a message."""
    trials = int(sent.sum())
    if trials == 0:
        return 0.0, 0.0
    errors = int(err[sent].sum())
    lo, hi = wilson_interval(errors, trials)
    return errors / trials, (hi - lo) / 2


def _report(samples, name, s0, s1, trials):
    samples[name] = (s0, s1)
    return warden.min_error_from_stats(s0, s1, name, trials=trials)


@functools.lru_cache(maxsize=256)
def _sparse_floor(n, q, a, sigma_w2):
    h0, h1 = warden.sparse_scheme_mixtures(q, a, sigma_w2)
    return warden.pinsker_floor(n, max(0.0, kl_divergence_numeric(h0, h1)))


def _scheme(cfg, n, a):
    ecc = parse_ecc_mode(cfg.ecc_mode)
    return SchemeParams.sqrt_law(n, tau=cfg.tau, a=a, ecc=ecc, sigma_b2=cfg.sigma_b2)


def _awgn_rows(cfg, label, n, a, jobs, ex):
    start = time.perf_counter()
    params = _scheme(cfg, n, a)
    payload = dict(seed=cfg.master_seed, label=label, params=params,
                   sigma_b2=cfg.sigma_b2, sigma_w2=cfg.sigma_w2, lrt="lrt" in cfg.detectors)
    res = _map_trials(_sqrt_n_trials, payload, cfg.trials, jobs, ex)
    samples = {}
    reports = []
    for d in cfg.detectors:
        key = "rad" if d == "radiometer" else "lrt"
        reports.append(_report(samples, DETECTOR_LABELS[d], res[key + "0"], res[key + "1"], cfg.trials))
    bob, bob_ci = _bob_summary(res["err"], res["k"] > 0)
    return SweepRow(
        experiment=label, n=n, total_power=float(res["power"].mean()),
        bits_k=float(res["k"].mean()), bob_err=bob, bob_ci=bob_ci, detectors=reports,
        pinsker_floor=_sparse_floor(n, params.q, params.a, cfg.sigma_w2),
        seed=cfg.master_seed, trials=cfg.trials, wall_s=time.perf_counter() - start,
        samples=samples,
    )


def _log_row(row):
    dets = " ".join(f"{r.detector_name}={r.sum_error:.4f}" for r in row.detectors)
    log.info("%s n=%d k=%.1f bob_err=%.4f %s floor=%.4f (%.1fs)", row.experiment, row.n,
             row.bits_k, row.bob_err, dets, row.pinsker_floor, row.wall_s)


def run_sqrt_sweep(config, jobs=1):
    """Square-root-law sweep: ``q = tau/sqrt(n)`` with fixed amplitude."""
    if config.experiment != "sqrt_awgn":
        raise ConfigError("run_sqrt_sweep needs experiment = sqrt_awgn", field="experiment")
    rows = []
    with _executor(jobs) as ex:
        for n in config.n_grid:
            rows.append(_awgn_rows(config, "sqrt_awgn", n, config.a, jobs, ex))
            _log_row(rows[-1])
    return rows


def exponent_amplitude(n, s, tau, power_scale, sigma_w2):
    """Slot amplitude giving expected total power ``power_scale * sigma_w2 * n**s``."""
    return math.sqrt(power_scale * sigma_w2 * n ** (s - 0.5) / tau)


def run_exponent_sweep(config, jobs=1):
    """Total power ``power_scale * sigma_w2 * n**s`` spread over ``tau sqrt(n)`` slots."""
    if config.experiment != "exponent_awgn":
        raise ConfigError("run_exponent_sweep needs experiment = exponent_awgn", field="experiment")
    rows = []
    with _executor(jobs) as ex:
        for s in config.exponents:
            label = f"exponent_awgn:s={s:g}"
            for n in config.n_grid:
                a = exponent_amplitude(n, s, config.tau, config.power_scale, config.sigma_w2)
                rows.append(_awgn_rows(config, label, n, a, jobs, ex))
                _log_row(rows[-1])
    return rows


def classify_trend(ns, errors, falling=-0.9, flat=-0.3, ci=None):
    """Label an error curve ``decreasing``, ``flat`` or ``mixed``.

    A curve whose spread is within ``2 * ci`` is flat; otherwise the
    Spearman correlation between ``ns`` and ``errors`` decides.
    """
    from .rngstat import spearman

    errors = np.asarray(errors, dtype=float)
    if len(ns) < 2 or np.ptp(errors) == 0:
        return "flat"
    if ci is not None and np.ptp(errors) <= 2 * float(np.max(ci)):
        return "flat"
    rho = spearman(ns, errors)
    if rho <= falling:
        return "decreasing"
    if rho >= flat:
        return "flat"
    return "mixed"


def _bernoulli_kl(p, r):
    return p * math.log(p / r) + (1 - p) * math.log((1 - p) / (1 - r))


def run_bsc_sweep(config, jobs=1):
    """Low-weight codes over BSCs, keyless (public codebook) or keyed."""
    if config.experiment != "sqrt_bsc":
        raise ConfigError("run_bsc_sweep needs experiment = sqrt_bsc", field="experiment")
    rows = []
    with _executor(jobs) as ex:
        for n in config.n_grid:
            start = time.perf_counter()
            q_c = min(0.5, config.tau_c / math.sqrt(n))
            k = config.k if config.k is not None else bsc_plan_capacity(
                n, q_c, config.p_b, config.target_error, config.k_max)
            mixture = "mixture_lrt" in config.detectors
            exact_mixture = mixture and k <= MIXTURE_LRT_MAX_K
            payload = dict(seed=config.master_seed, label=f"sqrt_bsc:{config.mode}", n=n, k=k,
                           q_c=q_c, public_seed=config.public_seed, p_b=config.p_b,
                           p_w=config.p_w, mixture=exact_mixture)
            res = _map_trials(_bsc_trials, payload, config.trials, jobs, ex)
            samples, reports = {}, []
            for d in config.detectors:
                if d == "count":
                    reports.append(_report(samples, warden.COUNT, res["count0"], res["count1"],
                                           config.trials))
                elif exact_mixture:
                    reports.append(_report(samples, warden.MIXTURE_LRT, res["mix0"], res["mix1"],
                                           config.trials))
                else:
                    # exponential in k: fall back to the per-position marginal test,
                    # which is monotone in the count
                    reports.append(_report(samples, warden.MARGINAL_LRT, res["count0"],
                                           res["count1"], config.trials))
            bob, bob_ci = _bob_summary(res["err"], np.full(config.trials, k > 0))
            p1 = config.p_w + q_c * (1 - 2 * config.p_w)
            rows.append(SweepRow(
                experiment=f"sqrt_bsc:{config.mode}", n=n, total_power=float(res["power"].mean()),
                bits_k=float(k), bob_err=bob, bob_ci=bob_ci, detectors=reports,
                pinsker_floor=warden.pinsker_floor(n, _bernoulli_kl(config.p_w, p1)),
                seed=config.master_seed, trials=config.trials,
                wall_s=time.perf_counter() - start, samples=samples,
            ))
            _log_row(rows[-1])
    return rows


def run_timing_experiment(config, jobs=1):
    """Alice picks one of ``T`` windows of ``n`` uses; the warden watches all of them."""
    if config.experiment != "timing":
        raise ConfigError("run_timing_experiment needs experiment = timing", field="experiment")
    n = config.n_grid[0]
    params = _scheme(config, n, config.a)
    rows = []
    with _executor(jobs) as ex:
        for T in config.slot_counts:
            start = time.perf_counter()
            label = f"timing:T={T}"
            payload = dict(seed=config.master_seed, label=label, params=params, T=T,
                           sigma_b2=config.sigma_b2, sigma_w2=config.sigma_w2)
            res = _map_trials(_timing_trials, payload, config.trials, jobs, ex)
            samples, reports = {}, []
            for d in config.detectors:
                key = "max" if d == "max_lrt" else "rad"
                reports.append(_report(samples, DETECTOR_LABELS[d], res[key + "0"], res[key + "1"],
                                       config.trials))
            bob, bob_ci = _bob_summary(res["err"], res["k"] > 0)
            rows.append(SweepRow(
                experiment=label, n=n, total_power=float(res["power"].mean()),
                bits_k=float(res["k"].mean()), bob_err=bob, bob_ci=bob_ci, detectors=reports,
                # a warden who knows the window does at least as well
                pinsker_floor=_sparse_floor(n, params.q, params.a, config.sigma_w2),
                seed=config.master_seed, trials=config.trials,
                wall_s=time.perf_counter() - start, samples=samples,
            ))
            _log_row(rows[-1])
    return rows


def noise_band(sigma2, rho):
    return sigma2 / rho, sigma2 * rho


@functools.lru_cache(maxsize=64)
def _antipodal_kl(power, s2):
    h0 = MixtureSpec.gaussian(0.0, s2)
    rp = math.sqrt(power)
    h1 = MixtureSpec(((0.5, rp, s2), (0.5, -rp, s2)))
    return max(0.0, kl_divergence_numeric(h0, h1))


def genie_floor(n, power, sigma2, rho, nodes=16):
    """Pinsker floor for a warden told the noise level, averaged over the band.

    Knowing ``sigma_w2`` can only help the warden, so this lower-bounds the
    error of the worst-case-calibrated radiometer too.
    """
    lo, hi = noise_band(sigma2, rho)
    mids = lo + (np.arange(nodes) + 0.5) * (hi - lo) / nodes
    return float(np.mean([warden.pinsker_floor(n, _antipodal_kl(power, float(s))) for s in mids]))


def run_noise_uncertainty(config, jobs=1):
    """Positive-rate signalling when the warden's noise power is uncertain."""
    if config.experiment != "noise_uncertainty":
        raise ConfigError("run_noise_uncertainty needs experiment = noise_uncertainty",
                          field="experiment")
    rows = []
    band = noise_band(config.sigma2, config.rho)
    with _executor(jobs) as ex:
        for n in config.n_grid:
            start = time.perf_counter()
            k = int(config.rate * n)
            m = n // k
            payload = dict(seed=config.master_seed, label="noise_uncertainty", n=n, k=k, m=m,
                           band=band, power=config.power, sigma_b2=config.sigma_b2)
            res = _map_trials(_noise_uncertainty_trials, payload, config.trials, jobs, ex)
            samples = {}
            reports = [_report(samples, warden.WORST_CASE_RADIOMETER, res["rad0"], res["rad1"],
                               config.trials)]
            bob, bob_ci = _bob_summary(res["err"], np.ones(config.trials, dtype=bool))
            rows.append(SweepRow(
                experiment="noise_uncertainty", n=n, total_power=n * config.power,
                bits_k=float(k), bob_err=bob, bob_ci=bob_ci, detectors=reports,
                pinsker_floor=genie_floor(n, config.power, config.sigma2, config.rho),
                seed=config.master_seed, trials=config.trials,
                wall_s=time.perf_counter() - start, samples=samples,
            ))
            _log_row(rows[-1])
    return rows


RUNNERS = {
    "sqrt_awgn": run_sqrt_sweep,
    "exponent_awgn": run_exponent_sweep,
    "sqrt_bsc": run_bsc_sweep,
    "timing": run_timing_experiment,
    "noise_uncertainty": run_noise_uncertainty,
}


def run_experiment(config, jobs=1):
    return RUNNERS[config.experiment](config, jobs=jobs)
