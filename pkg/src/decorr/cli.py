"""Command-line interface.

Exit codes: 0 success, 2 usage or input error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import backend as _backend
from .analyze import calibrate_floor, compare
from .bench import BenchRecord, MIN_REPS, exponents, run_bench
from .errors import InputError, NumericError
from .ioutil import (DNA_TABLE, read_alphabet_config, read_fasta, render_plot,
                     write_fasta, write_report, write_rows_csv, write_signal_csv)
from .seqcore import AlphabetSpec
from .smooth import SMOOTH_MODES
from .synth import gen_planted, random_planted_spec
from .xcorr import ENGINES

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _name_list(choices):
    def parse(text):
        names = [x.strip() for x in text.split(",") if x.strip()]
        bad = [n for n in names if n not in choices]
        if bad or not names:
            raise argparse.ArgumentTypeError(f"choose from {', '.join(choices)}")
        return names
    return parse


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def cmd_compare(args):
    table = read_alphabet_config(args.alphabet) if args.alphabet else DNA_TABLE
    ra = read_fasta(args.a, table, args.on_unknown)[0]
    rb = read_fasta(args.b, table, args.on_unknown)[0]
    report = compare(ra.sequence(), rb.sequence(), engine=args.engine,
                     alphabet=AlphabetSpec(symbol_table=table), w=args.smooth,
                     smooth_mode=args.smooth_mode, baseline=args.baseline,
                     z_min=args.z_min, threads=args.threads)

    print(f"# a={ra.header!r} Ns={report.Ns}  b={rb.header!r} Nq={report.Nq}  M={report.M}  "
          f"engine={report.engine}  time={report.timing_ms:.2f} ms")
    print("# E[p] counts i with a[i] == b[i+p]")
    for name, ratio in sorted(report.ratios.items()):
        print(f"# peak_to_background[{name}] = "
              + ("undefined" if ratio is None else f"{ratio:.4f}"))
    if not report.peaks:
        print("no peaks above the noise floor")
    for p in report.peaks:
        height = int(p.height) if float(p.height).is_integer() else f"{p.height:.4f}"
        print(f"p={p.displacement} height={height} excess={p.excess:.2f} z={p.z:.2f}")

    if args.csv:
        write_signal_csv(report.signal, args.csv, report.smoothed)
    if args.plot:
        signals = [report.signal]
        labels = ["coincidence"]
        if report.baseline is not None:
            signals.append((report.signal.displacements, report.baseline))
            labels.append("numeric cross-correlation")
        if report.smoothed is not None:
            signals.append(report.smoothed)
            labels.append(f"coincidence, w={args.smooth:g} ({args.smooth_mode})")
        render_plot(signals, args.plot, labels)
    if args.report:
        write_report(report, args.report, include_timing=args.report_timing)
    return EXIT_OK


def cmd_gen(args):
    spec = random_planted_spec(args.n, args.m, args.block, args.deletions, args.seed,
                               args.min_deletion, args.max_deletion)
    s, q, truth = gen_planted(spec)
    table = read_alphabet_config(args.alphabet) if args.alphabet else None
    # without deletions both files come out byte-identical
    header = f"planted seed={args.seed} M={args.m}"
    cuts = f" deletions={list(spec.deletions)}" if spec.deletions else ""
    write_fasta(args.out_a, [(f"{header} N={s.length}", s.values)], table, M=args.m)
    write_fasta(args.out_b, [(f"{header} N={q.length}{cuts}", q.values)], table, M=args.m)
    if args.truth:
        write_rows_csv(args.truth, ["displacement", "length"], truth)
    print(f"wrote {args.out_a} (N={s.length}) and {args.out_b} (N={q.length})")
    for d, length in truth:
        print(f"shared run: displacement={d} length={length}")
    return EXIT_OK


def cmd_bench(args):
    if args.reps < MIN_REPS:
        raise InputError(f"--reps must be >= {MIN_REPS}")
    backends = _backend.available() if args.backends == ["all"] else args.backends
    records = run_bench(args.sizes, args.m, args.engines, args.reps, backends, args.seed)
    print(f"{'backend':>9} {'engine':>6} {'N':>7} {'median_ms':>11} {'mean_ms':>11}")
    for r in records:
        print(f"{r.backend:>9} {r.engine:>6} {r.N:>7} {r.median_ms:>11.3f} {r.mean_ms:>11.3f}")
    for (engine, name), slope in exponents(records).items():
        print(f"growth exponent {name}/{engine}: {slope:.3f}")
    if args.csv:
        write_rows_csv(args.csv, BenchRecord.header(), [r.row() for r in records])
    return EXIT_OK


def cmd_noise(args):
    cal = calibrate_floor(args.n, args.m, args.trials, args.seed, args.engine)
    p = np.arange(-(args.n - 1), args.n)
    se = cal.standard_error
    empirical_std = np.sqrt(cal.var)
    for d in args.at:
        i = d + args.n - 1
        if not 0 <= i < p.size:
            raise InputError(f"displacement {d} outside the signal range")
        within = abs(cal.mean[i] - cal.model.mean[i]) <= 3 * se[i]
        print(f"p={d} expected={cal.model.mean[i]:.4f} empirical={cal.mean[i]:.4f} "
              f"se={se[i]:.4f} expected_std={cal.model.std[i]:.4f} "
              f"empirical_std={empirical_std[i]:.4f} within_3se={'yes' if within else 'no'}")
    if args.csv:
        rows = zip(p, cal.model.mean, cal.mean, cal.model.std, empirical_std, se)
        write_rows_csv(args.csv, ["displacement", "expected_mean", "empirical_mean",
                                  "expected_std", "empirical_std", "standard_error"], rows)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="decorr", description="Sequence comparison by correlation over decomposed signals.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compare", help="compare the first records of two FASTA files")
    c.add_argument("--a", required=True, help="first FASTA file")
    c.add_argument("--b", required=True, help="second FASTA file")
    c.add_argument("--engine", choices=ENGINES, default="fft")
    c.add_argument("--smooth", type=_positive_float, metavar="W",
                   help="rectangular low-pass width")
    c.add_argument("--smooth-mode", choices=SMOOTH_MODES, default="channels")
    c.add_argument("--baseline", action="store_true",
                   help="also compute the plain numeric cross-correlation")
    c.add_argument("--csv")
    c.add_argument("--plot", help="SVG output path")
    c.add_argument("--report", help="JSON report path")
    c.add_argument("--report-timing", action="store_true",
                   help="include timing in the report (makes it run-dependent)")
    c.add_argument("--alphabet", help="TOKEN=CODE config file (default C=1 A=2 T=3 G=4)")
    c.add_argument("--on-unknown", choices=("error", "drop"), default="error")
    c.add_argument("--z-min", type=float, default=5.0)
    c.add_argument("--threads", type=int, default=1)
    c.set_defaults(func=cmd_compare)

    g = sub.add_parser("gen", help="generate a planted-block pair")
    g.add_argument("--n", type=int, default=512)
    g.add_argument("--m", type=int, default=4)
    g.add_argument("--block", type=int, default=130)
    g.add_argument("--deletions", type=int, default=4, help="number of pieces removed")
    g.add_argument("--min-deletion", type=int, default=2)
    g.add_argument("--max-deletion", type=int, default=16)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out-a", required=True)
    g.add_argument("--out-b", required=True)
    g.add_argument("--truth", help="CSV of ground-truth (displacement, length)")
    g.add_argument("--alphabet", help="TOKEN=CODE config used to write symbols")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="time the pipeline over a size sweep")
    b.add_argument("--sizes", type=_int_list, default=[512, 1024, 2048, 4096, 8192])
    b.add_argument("--m", type=int, default=4)
    b.add_argument("--engines", type=_name_list(ENGINES), default=list(ENGINES))
    b.add_argument("--backends", type=_name_list(("compiled", "python", "all")),
                   default=[_backend.active.NAME], help="compiled, python or all")
    b.add_argument("--reps", type=int, default=9)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--csv")
    b.set_defaults(func=cmd_bench)

    n = sub.add_parser("noise", help="Monte Carlo noise-floor calibration")
    n.add_argument("--n", type=int, default=512)
    n.add_argument("--m", type=int, default=4)
    n.add_argument("--trials", type=int, default=1000)
    n.add_argument("--seed", type=int, default=0)
    n.add_argument("--engine", choices=ENGINES, default="fft")
    n.add_argument("--at", type=_int_list, default=[0], help="displacements to summarize")
    n.add_argument("--csv")
    n.set_defaults(func=cmd_noise)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
