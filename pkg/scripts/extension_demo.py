"""Extend a finite jet to a compactly supported function and report the diagnostics.

    python3 scripts/extension_demo.py [--M gevrey:s=3] [--r 2] [--jet 1 0.5 -0.25]
"""
import argparse
import json

from ultraborel import make_sequence
from ultraborel.cli import dumps
from ultraborel.jets import JetSpec
from ultraborel.synth import ExtensionOperator


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--M", default="gevrey:s=3")
    ap.add_argument("--r", type=int, default=2)
    ap.add_argument("--c", type=int, default=1)
    ap.add_argument("--jet", type=float, nargs="+", default=[1.0, 0.5, -0.25])
    ap.add_argument("--grid-m", type=int, default=18)
    args = ap.parse_args()
    M = make_sequence(args.M)
    op = ExtensionOperator(M, M, r=args.r, c=args.c, grid_m=args.grid_m, order=max(len(args.jet) - 1, 4))
    res = op.apply(JetSpec(args.jet, r=args.r))
    prm = res.parameters
    print(f"A = {prm.A:.4g}, s = {prm.s}, l = {prm.l}, d = {prm.d:.4g}, h = {prm.h}")
    for e in res.jet_errors:
        print(f"f^({e['order']})(0): target {e['target'][0]:+.4g}, error {e['error']:.2e}, "
              f"spectral error {e['spectral_error']:.2e}")
    for e in res.intermediate:
        print(f"f^({e['order']})(0) = {e['value']:.2e} (intermediate order)")
    for e in res.bound_ledger:
        print(f"sup|f^({e['order']})| = {e['sup']:.4g} <= {e['bound']:.4g} (ratio {e['ratio']:.3g})")
    print("support:", json.loads(dumps(res.support)))


if __name__ == "__main__":
    main()
