#!/usr/bin/env python3
"""Trace the causal predictor across the downward jump of the built-in
discontinuous signal.  The overshoot next to the jump does not shrink as
W grows; this script writes the traces so the effect can be plotted."""

import argparse
import csv
import sys

import numpy as np

from pnspredict import (
    BSplineGenerator,
    SamplingScheme,
    approx_operator,
    build_kernels,
    build_polyphase,
    builtin_signal,
    invert_polyphase,
    modify_kernels,
)


def get_args():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--W", type=float, nargs="+", default=[20.0, 30.0])
    parser.add_argument("--window", type=float, nargs=2, default=[2.8, 3.2],
                        metavar=("LO", "HI"), help="t interval around the jump")
    parser.add_argument("--grid", type=int, default=400, help="trace intervals")
    parser.add_argument("--output", default="-", help="CSV path, - for stdout")
    return parser.parse_args()


def main():
    args = get_args()
    gen = BSplineGenerator(4)
    scheme = SamplingScheme.equally_spaced(4)
    ks = build_kernels(gen, scheme, invert_polyphase(build_polyphase(gen, scheme)))
    pred = modify_kernels(ks, tuple(4.0 + 0.25 * p for p in range(4)))
    g = builtin_signal("g")

    lo, hi = args.window
    ts = np.linspace(lo, hi, args.grid + 1)
    traces = {W: np.asarray(approx_operator(pred, g, W, ts), dtype=float)
              for W in args.W}

    out = sys.stdout if args.output == "-" else open(args.output, "w", newline="")
    writer = csv.writer(out)
    writer.writerow(["t", "g"] + [f"pred_W{W:g}" for W in args.W])
    gs = np.asarray(g.eval(ts), dtype=float)
    for k, t in enumerate(ts):
        writer.writerow([repr(float(t)), repr(float(gs[k]))]
                        + [repr(float(traces[W][k])) for W in args.W])
    if out is not sys.stdout:
        out.close()
    for W, tr in traces.items():
        print(f"W={W:g}: peak |prediction| = {np.abs(tr).max():.3f}", file=sys.stderr)


if __name__ == "__main__":
    main()
