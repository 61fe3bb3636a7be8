#!/usr/bin/env python3
"""Polarization experiment for an erasure channel and its dual.

Runs the exact scalar recursion over random convolution sequences and prints
the split of near-perfect and near-useless synthesized channels, together
with the complementary-sequence run on the dual channel.
"""

import argparse

from cqdual import channels, polar


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--erasure", type=float, default=0.3)
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--beta", type=float, default=0.4)
    ap.add_argument("--seed", type=int, default=20240811)
    args = ap.parse_args()

    w = channels.make_bec(args.erasure)
    rep = polar.polarization_experiment(
        w, args.n, args.trials, beta=args.beta, seed=args.seed
    )
    dual_rep = polar.polarization_experiment(
        channels.make_bec(1 - args.erasure),
        args.n,
        args.trials,
        beta=args.beta,
        seed=args.seed,
        complement=True,
    )
    print(f"channel capacity: {rep.capacity:.4f}, threshold f = {rep.threshold:.3e}")
    print(f"fraction with B <= f:          {rep.frac_b_small:.4f}")
    print(f"fraction with B >= 1-f:        {rep.frac_b_large:.4f}")
    print(f"fraction with Hmin <= f:       {rep.frac_hmin_small:.4f}")
    print(f"fraction with Hmax >= 1-f:     {rep.frac_hmax_large:.4f}")
    print(f"dual channel, complemented sequences, B <= f: {dual_rep.frac_b_small:.4f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
