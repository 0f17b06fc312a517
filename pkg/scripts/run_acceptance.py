"""Run acceptance criteria 1-11 and write a JSON summary.

    python3 scripts/run_acceptance.py [--quick] [--only 3 8] [--out summary.json]
"""
import argparse
import json
import sys

from ultraborel.acceptance import run_acceptance
from ultraborel.cli import dumps


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true")
    ap.add_argument("--only", type=int, nargs="*", help="criterion numbers to run")
    ap.add_argument("--out", help="write the JSON summary here")
    args = ap.parse_args()
    results = run_acceptance(quick=args.quick, numbers=args.only, echo=print)
    ok = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(dumps({"quick": args.quick, "passed": ok, "criteria": [r.to_dict() for r in results]}))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
