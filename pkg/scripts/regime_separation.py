#!/usr/bin/env python3
"""Compare the generic (3/2 log|z|) and resonant (2 log|z|) regimes at one point.

Both sweeps use the same z; only the direction of approach of the poles differs.
"""
import argparse
import math

from lemlab.core import PoleConfig
from lemlab.experiments import eval_point
from lemlab.green import BidiskPoint
from lemlab.optimizer import OptimizerOptions


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--r", type=float, default=0.05)
    ap.add_argument("--starts", type=int, default=64)
    args = ap.parse_args()
    z = BidiskPoint(args.r, -args.r)
    opts = OptimizerOptions(starts=args.starts)
    print(f"{'t':>8} {'generic-3/2log':>16} {'resonant-2log':>14}")
    for k in range(3, 7):
        t = 10.0 ** -k
        gen = eval_point(z, PoleConfig(t, 1j * t), opts, c0=1.0)
        res = eval_point(z, PoleConfig(t, (1 - t) * t), opts, c0=1.0)
        print(f"{t:8.0e} {gen.optimizer_value - 1.5 * math.log(args.r):16.4f} "
              f"{res.optimizer_value - 2 * math.log(args.r):14.4f}")


if __name__ == "__main__":
    main()
