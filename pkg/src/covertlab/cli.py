"""``covertlab`` command line: run sweeps, test a transcript, or trace one round trip."""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np
from scipy import stats

from . import warden
from .channels import AwgnParams, awgn_apply
from .covert_awgn import SchemeParams, decode, encode, gen_key, plan_capacity
from .exceptions import CovertLabError
from .experiments import load_config, run_experiment
from .io import emit_csv, emit_diagnostics, emit_roc, load_transcript
from .rngstat import binomial_cdf, make_rng, sample_uniform_bits


def _cmd_run(args):
    cfg = load_config(args.config)
    changes = {}
    if args.seed is not None:
        changes["master_seed"] = args.seed
    if args.trials is not None:
        changes["trials"] = args.trials
    if changes:
        cfg = cfg.replace(**changes)
    rows = run_experiment(cfg, jobs=args.jobs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(args.config).stem
    csv_path = emit_csv(rows, out / f"{stem}.csv", wall_time=args.wall_time)
    emit_diagnostics(rows, out / f"{stem}_diagnostics.csv")
    if args.roc:
        emit_roc(rows, out / f"{stem}_roc.csv")
    for row in rows:
        dets = "  ".join(f"{r.detector_name}={r.sum_error:.4f}±{r.ci_halfwidth:.4f}"
                         for r in row.detectors)
        print(f"{row.experiment:<24} n={row.n:<8} k={row.bits_k:<8.1f} "
              f"bob_err={row.bob_err:.4f}  {dets}  floor={row.pinsker_floor:.4f}")
    print(f"wrote {csv_path}")
    return 0


def _cmd_detect(args):
    kind, values = load_transcript(args.transcript)
    n = values.size
    if kind == "awgn":
        power = warden.radiometer_stat(values)
        print(f"radiometer: {power:.6g}")
        if args.sigma_w2 is not None:
            # n * power / sigma_w2 is chi-square with n degrees of freedom under H0
            pval = stats.chi2.sf(n * power / args.sigma_w2, n)
            print(f"radiometer p-value (H0, sigma_w2={args.sigma_w2:g}): {pval:.6g}")
        stat, label = power, warden.RADIOMETER
        if args.q is not None and args.a is not None:
            sw = args.sigma_w2 if args.sigma_w2 is not None else 1.0
            stat = warden.lrt_stat_awgn(values, args.q, args.a, sw)
            label = warden.LRT
            print(f"lrt: {stat:.6g}")
    else:
        count = warden.count_stat(values)
        print(f"count: {count}")
        stat, label = count, warden.COUNT
        if args.p_w is not None:
            pval = 1.0 - binomial_cdf(n, args.p_w, count - 1)
            print(f"count p-value (H0, p_w={args.p_w:g}): {pval:.6g}")
    if args.threshold is not None:
        verdict = "transmission" if stat > args.threshold else "silence"
        print(f"decision ({label} > {args.threshold:g}): {verdict}")
    return 0


def _cmd_demo(args):
    stream = make_rng(args.seed, "demo")
    params = SchemeParams.sqrt_law(args.n, tau=args.tau, a=args.a, sigma_b2=args.sigma_b2)
    key = gen_key(params, stream)
    k = plan_capacity(params, key)
    print(f"n={params.n} q={params.q:.6g} a={params.a:g} ecc={params.ecc}")
    print(f"key: {len(key)} slots (expected {params.n * params.q:.1f}), pad {key.pad.size} bits")
    message = sample_uniform_bits(stream, k)
    print(f"message ({k} bits): {''.join(map(str, message))}")
    x = encode(message, key, params, stream)
    print(f"emitted power {float(np.dot(x, x)):.4g} "
          f"(budget tau*a^2*sqrt(n) = {params.power_budget:.4g})")
    yb = awgn_apply(x, AwgnParams(args.sigma_b2), stream.child("bob"))
    decoded = decode(yb, key, params)
    errors = int((decoded != message).sum())
    print(f"bob decoded: {''.join(map(str, decoded))}  ({errors} bit errors)")
    yw = awgn_apply(x, AwgnParams(args.sigma_w2), stream.child("willie"))
    power = warden.radiometer_stat(yw)
    print(f"willie radiometer: {power:.6f} (noise alone averages {args.sigma_w2:g}, "
          f"sd {args.sigma_w2 * math.sqrt(2 / args.n):.2g})")
    print(f"willie lrt: {warden.lrt_stat_awgn(yw, params.q, params.a, args.sigma_w2):.4f}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="covertlab", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress per row")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment sweep from a config file")
    run.add_argument("config")
    run.add_argument("--seed", type=int, help="override master_seed")
    run.add_argument("--out", default="results", help="output directory (default: results)")
    run.add_argument("--trials", type=int, help="override trials")
    run.add_argument("--jobs", type=int, default=1, help="worker processes; never changes results")
    run.add_argument("--roc", action="store_true", help="also write ROC points")
    run.add_argument("--wall-time", action="store_true",
                     help="fill the wall_s column (output then differs between reruns)")
    run.set_defaults(func=_cmd_run)

    det = sub.add_parser("detect", help="apply the warden's statistics to a transcript file")
    det.add_argument("transcript")
    det.add_argument("--sigma-w2", type=float, help="known noise variance (AWGN)")
    det.add_argument("--q", type=float, help="slot probability for the LRT (AWGN)")
    det.add_argument("--a", type=float, help="amplitude for the LRT (AWGN)")
    det.add_argument("--p-w", type=float, help="warden crossover probability (BSC)")
    det.add_argument("--threshold", type=float, help="decide transmission when stat > threshold")
    det.set_defaults(func=_cmd_detect)

    demo = sub.add_parser("demo", help="one encode/channel/decode round trip with a trace")
    demo.add_argument("--n", type=int, default=10_000)
    demo.add_argument("--tau", type=float, default=1.0)
    demo.add_argument("--a", type=float, default=1.0)
    demo.add_argument("--sigma-b2", type=float, default=1.0)
    demo.add_argument("--sigma-w2", type=float, default=1.0)
    demo.add_argument("--seed", type=int, default=1)
    demo.set_defaults(func=_cmd_demo)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(message)s")
    try:
        return args.func(args)
    except (CovertLabError, OSError) as exc:
        print(f"covertlab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
