#!/usr/bin/env python3
"""Prediction errors of the causal operator over a ladder of sampling
rates, for equally spaced and Chebyshev offset families under the
quartic B-spline.  Writes one CSV row per W."""

import argparse
import csv
import sys

from pnspredict import (
    BSplineGenerator,
    SamplingScheme,
    build_kernels,
    build_polyphase,
    builtin_signal,
    invert_polyphase,
    lp_error,
    modify_kernels,
)

DEFAULT_W = (5.0, 7.0, 10.0, 15.0, 20.0, 25.0, 30.0)


def causal_operator(scheme):
    gen = BSplineGenerator(4)
    ks = build_kernels(gen, scheme, invert_polyphase(build_polyphase(gen, scheme)))
    return modify_kernels(ks, tuple(4.0 + 0.25 * p for p in range(4)))


def get_args():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--W", type=float, nargs="+", default=list(DEFAULT_W))
    parser.add_argument("--p", type=float, default=2.0)
    parser.add_argument("--signal", default="f")
    parser.add_argument("--output", default="-", help="CSV path, - for stdout")
    return parser.parse_args()


def main():
    args = get_args()
    signal = builtin_signal(args.signal)
    operators = {
        "equally_spaced": causal_operator(SamplingScheme.equally_spaced(4)),
        "chebyshev": causal_operator(SamplingScheme.chebyshev(4)),
    }
    out = sys.stdout if args.output == "-" else open(args.output, "w", newline="")
    writer = csv.writer(out)
    writer.writerow(["W"] + list(operators))
    for W in args.W:
        errs = [lp_error(ps, signal, W, args.p) for ps in operators.values()]
        writer.writerow([f"{W:g}"] + [f"{e:.6g}" for e in errs])
        out.flush()
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main()
