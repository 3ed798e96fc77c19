#!/usr/bin/env python3
"""Fit error decay rates of the causal predictor against the sampling
rate W.  The smooth signal should show a slope near -4 under the quartic
setup; the jump signal saturates early."""

import argparse

from pnspredict import (
    BSplineGenerator,
    SamplingScheme,
    build_kernels,
    build_polyphase,
    builtin_signal,
    convergence_study,
    invert_polyphase,
    modify_kernels,
)


def get_args():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--signals", nargs="+", default=["f", "g"])
    parser.add_argument("--W", type=float, nargs="+",
                        default=[10.0, 15.0, 20.0, 25.0, 30.0])
    parser.add_argument("--p", type=float, default=2.0)
    return parser.parse_args()


def main():
    args = get_args()
    gen = BSplineGenerator(4)
    scheme = SamplingScheme.equally_spaced(4)
    ks = build_kernels(gen, scheme, invert_polyphase(build_polyphase(gen, scheme)))
    pred = modify_kernels(ks, tuple(4.0 + 0.25 * p for p in range(4)))
    for name in args.signals:
        report = convergence_study(pred, builtin_signal(name), args.W, args.p)
        print(f"signal {name!r}:")
        for line in str(report).splitlines():
            print(f"  {line}")


if __name__ == "__main__":
    main()
