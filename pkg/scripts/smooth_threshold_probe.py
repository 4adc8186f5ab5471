#!/usr/bin/env python3
"""
Print how many invertible classes mod 6q and mod 9q have a q-smooth least
residue, for each prime q given (default: 10007 and 100003).

  python3 scripts/smooth_threshold_probe.py
  python3 scripts/smooth_threshold_probe.py 11 101 1009 --mult 6
"""

import argparse
import sys


def main() -> int:
    parser = argparse.ArgumentParser(description="Smooth residue-class counts near the majority threshold")
    parser.add_argument("primes", type=int, nargs="*", default=[10007, 100003], help="Primes q > 3")
    parser.add_argument("--mult", type=int, choices=[6, 9], action="append", help="Multiplier (default: both)")
    args = parser.parse_args()

    try:
        from wooley.smooth import smooth_residue_report  # type: ignore
    except ImportError:
        print("Install: pip install -e .", file=sys.stderr)
        return 1

    mults = args.mult or [6, 9]
    print("%10s %4s %10s %10s %10s %8s" % ("q", "mult", "phi", "smooth", "share", "majority"))
    failures = 0
    for q in args.primes:
        for mult in mults:
            try:
                r = smooth_residue_report(q, mult)
            except ValueError as e:
                print("  q=%s: %s" % (q, e), file=sys.stderr)
                failures += 1
                continue
            print(
                "%10d %4d %10d %10d %10.4f %8s"
                % (q, mult, r.phi_N, r.smooth_count, r.smooth_count / r.phi_N, "yes" if r.majority else "no")
            )
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
