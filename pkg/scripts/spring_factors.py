"""Renormalized sigma-sigma bubble: actual ratio and first-order Taylor bound against height."""
import argparse

from fbmarea.power_counting import spring_factors


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--alpha", type=float, default=0.2)
    ap.add_argument("--j", type=int, default=1)
    ap.add_argument("--heights", default="1,2,3,4,5,6")
    args = ap.parse_args()
    rows = spring_factors(args.j, [int(h) for h in args.heights.split(",")], args.alpha)
    print("height,ratio,taylor_bound_ratio,ratio_step,bound_step")
    prev = None
    for r in rows:
        steps = ("", "") if prev is None else (f"{r.ratio / prev.ratio:.4f}",
                                               f"{r.taylor_bound_ratio / prev.taylor_bound_ratio:.4f}")
        print(f"{r.k - r.j},{r.ratio:.6g},{r.taylor_bound_ratio:.6g},{steps[0]},{steps[1]}")
        prev = r


if __name__ == "__main__":
    main()
