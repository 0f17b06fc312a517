"""Build the box bump for a sequence and print its derivative ledger.

    python3 scripts/bump_demo.py [spec] [--K 50] [--grid-m 18] [--orders 8] [--csv phi.csv]
"""
import argparse

import numpy as np

from ultraborel import make_sequence
from ultraborel.synth import build_bump


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("spec", nargs="?", default="gevrey:s=2")
    ap.add_argument("--K", type=int, default=50)
    ap.add_argument("--grid-m", type=int, default=18)
    ap.add_argument("--orders", type=int, default=8)
    ap.add_argument("--csv", help="write x,phi samples (every 64th point)")
    args = ap.parse_args()
    rep = build_bump(make_sequence(args.spec), K=args.K, grid_m=args.grid_m, orders=args.orders)
    print(f"{args.spec}: phi(0) = {rep.value_at_zero:.15f}, range [{rep.min_value:.3g}, {rep.max_value:.15f}]")
    print(f"support radius {rep.support_radius:.6f} (mass identity {rep.support_from_mass:.6f}), "
          f"int u = {rep.mass_u:.12f}")
    print(f"{'j':>3} {'sup|phi^(j)|':>14} {'2^j prod tau':>14} {'ratio':>8} {'cross':>10}")
    for e in rep.ledger:
        cross = "-" if e["cross_discrepancy"] is None else f"{e['cross_discrepancy']:.1e}"
        print(f"{e['order']:>3} {e['sup']:>14.6g} {e['bound']:>14.6g} {e['ratio']:>8.4f} {cross:>10}")
    if args.csv:
        f = rep.f
        np.savetxt(args.csv, np.c_[f.grid.x, f.samples.real][::64], delimiter=",", header="x,phi",
                   comments="")


if __name__ == "__main__":
    main()
