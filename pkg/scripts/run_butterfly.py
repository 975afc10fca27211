#!/usr/bin/env python3
"""Emit the band spectrum of h = u + u* + v + v* for every reduced flux p/q
with q <= QMAX as CSV rows (p, q, band_index, a, b).

Usage: python scripts/run_butterfly.py [QMAX] [RESOLUTION] [OUT.csv]
"""
import sys

from ncspaces.cli import main

if __name__ == "__main__":
    qmax = sys.argv[1] if len(sys.argv) > 1 else "10"
    res = sys.argv[2] if len(sys.argv) > 2 else "64"
    argv = ["butterfly", "--qmax", qmax, "--resolution", res]
    if len(sys.argv) > 3:
        argv += ["--out", sys.argv[3]]
    sys.exit(main(argv))
