"""Variance of the "+" skeleton increment and of the boundary term against the cutoff.

Prints the raw variances, the log-log slope over the requested window and
the slope of successive differences, which strips the cutoff-independent
part that dominates at moderate cutoffs.
"""
import argparse

import numpy as np

from fbmarea.levy_area import boundary_variance_limit, variance_vs_cutoff


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--alphas", default="0.15,0.2")
    ap.add_argument("--k-min", type=int, default=4)
    ap.add_argument("--k-max", type=int, default=16)
    ap.add_argument("--lag", type=float, default=1.0)
    args = ap.parse_args()

    cutoffs = 2.0 ** np.arange(args.k_min, args.k_max + 1)
    print("alpha,piece,lambda_cutoff,variance")
    summary = []
    for a in map(float, args.alphas.split(",")):
        for piece in ("plus", "boundary"):
            res = variance_vs_cutoff(a, cutoffs, args.lag, piece)
            for L, v in zip(res.cutoffs, res.variances):
                print(f"{a},{piece},{L:.0f},{v:.10g}")
            summary.append((a, piece, res.slope, res.difference_slope))
        summary.append((a, "boundary_limit", boundary_variance_limit(a, args.lag), float("nan")))
    print()
    print("alpha,piece,slope,difference_slope")
    for row in summary:
        print(",".join(f"{x:.6g}" if isinstance(x, float) else str(x) for x in row))


if __name__ == "__main__":
    main()
