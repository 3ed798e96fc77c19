#!/usr/bin/env python3
"""Sample the interpolating kernels of one of the worked setups on a
regular grid and write the curves as CSV, one column per kernel."""

import argparse
import csv
import sys

import numpy as np

from pnspredict import (
    BSplineGenerator,
    DaubechiesGenerator,
    SamplingScheme,
    build_kernels,
    build_polyphase,
    evaluate_kernel,
    invert_polyphase,
)

SETUPS = {
    "quartic_r1": (lambda: BSplineGenerator(4), lambda: SamplingScheme.equally_spaced(4)),
    "hermite": (lambda: BSplineGenerator(4), lambda: SamplingScheme((0.5, 0.75), r=2)),
    "db3_cheb": (lambda: DaubechiesGenerator(3), lambda: SamplingScheme.chebyshev(5)),
}


def get_args():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("setup", choices=sorted(SETUPS), nargs="?", default="quartic_r1")
    parser.add_argument("--grid", type=int, default=512, help="number of sample intervals")
    parser.add_argument("--output", default="-", help="CSV path, - for stdout")
    return parser.parse_args()


def main():
    args = get_args()
    make_gen, make_scheme = SETUPS[args.setup]
    gen, scheme = make_gen(), make_scheme()
    ks = build_kernels(gen, scheme, invert_polyphase(build_polyphase(gen, scheme)))
    lo, hi = ks.support
    ts = np.linspace(lo, hi, args.grid + 1)

    pairs = [(n, i) for n in range(scheme.L) for i in range(scheme.r)]
    out = sys.stdout if args.output == "-" else open(args.output, "w", newline="")
    writer = csv.writer(out)
    writer.writerow(["t"] + [f"theta_{n}_{i}" for n, i in pairs])
    curves = [np.asarray(evaluate_kernel(ks, n, i, ts), dtype=float) for n, i in pairs]
    for k, t in enumerate(ts):
        writer.writerow([repr(float(t))] + [repr(float(c[k])) for c in curves])
    if out is not sys.stdout:
        out.close()
    print(f"support [{lo:g}, {hi:g}], {len(pairs)} kernels, "
          f"{len(ts)} rows", file=sys.stderr)


if __name__ == "__main__":
    main()
