"""Verdict table for gamma_r, SV_r, nq_r and the integral condition on Gevrey sequences.

The analytic answer is "holds iff s > r" for all four columns.

    python3 scripts/gevrey_threshold_scan.py [--horizon 100000]
"""
import argparse

from ultraborel import check_gamma_r, check_SV_r, gevrey, nq_sum
from ultraborel.assoc import check_integral_condition


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--horizon", type=int, default=100_000)
    args = ap.parse_args()
    H = args.horizon
    print(f"{'s':>4} {'r':>3} {'nq_r':>12} {'gamma_r':>12} {'sv_r':>12} {'integral':>12} {'gamma sup':>11}")
    for s in (0.5, 1, 1.5, 2, 3):
        M = gevrey(s)
        for r in (1, 2, 3):
            nq = nq_sum(M, r, H).converges.value
            g = check_gamma_r(M, M, r, H)
            sv = check_SV_r(M, M, r, horizon=H).verdict.value
            ic = check_integral_condition(M, M, r).report.verdict.value if s >= 1 else "-"
            print(f"{s:>4} {r:>3} {nq:>12} {g.verdict.value:>12} {sv:>12} {ic:>12} {g.sup_value:>11.5g}")


if __name__ == "__main__":
    main()
