"""Normalised bubble bubble/(lam^2 (L/|xi|)^(1-4 alpha)) over cutoff ratios, and the resummed propagator."""
import argparse

from fbmarea.interacting import bubble, bubble_fit_constant, resummed_propagator


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--alpha", type=float, default=0.2)
    ap.add_argument("--lam", type=float, default=0.1)
    ap.add_argument("--k-max", type=int, default=24)
    args = ap.parse_args()
    a, lam = args.alpha, args.lam
    e = 1.0 - 4.0 * a
    Kp = bubble_fit_constant(a)
    print(f"# K_prime = {Kp:.10g}")
    print("ratio_exponent,collapse_ratio,resummed,limit,relative_deviation")
    for k in range(4, args.k_max + 1, 2):
        L = 2.0 ** k
        c = bubble(1.0, L, lam, a) / (lam ** 2 * L ** e)
        r = resummed_propagator(1.0, L, lam, a, Kp)
        lim = 1.0 / lam ** 2
        print(f"{k},{c:.10g},{r:.10g},{lim:.10g},{abs(r - lim) / lim:.4g}")


if __name__ == "__main__":
    main()
