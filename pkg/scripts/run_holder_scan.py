#!/usr/bin/env python3
"""Spectral continuity scan: Hausdorff distance between the band spectra at a
base flux and at base + delta for a dyadic ladder of offsets, with the fitted
exponent of D(delta) against delta.

From base 0 the distance is dominated by band-edge erosion, which is linear
in delta, so the fitted exponent sits near 1.  From base 1/2 the spectrum
opens square-root gap ladders and the local exponent approaches 1/2 for the
smallest offsets: that regime saturates the Lip-1/2 continuity bound.

Usage: python scripts/run_holder_scan.py [BASE] [KMIN] [KMAX] [RESOLUTION]
"""
import json
import sys
from fractions import Fraction

from ncspaces.spectra import holder_scan

if __name__ == "__main__":
    base = Fraction(sys.argv[1]) if len(sys.argv) > 1 else Fraction(0)
    kmin = int(sys.argv[2]) if len(sys.argv) > 2 else 3
    kmax = int(sys.argv[3]) if len(sys.argv) > 3 else 7
    res = int(sys.argv[4]) if len(sys.argv) > 4 else 128
    offsets = [Fraction(1, 2**k) for k in range(kmin, kmax + 1)]
    out = holder_scan(base, offsets, res, q_cap=max(512, res), jobs=2)
    print(json.dumps(
        {
            "base": str(base),
            "offsets": [str(x) for x in out.offsets],
            "distances": out.distances,
            "fitted_exponent": out.slope,
            "c_fit": out.c_fit,
            "lip_half_pointwise": out.lip_half_ok,
        },
        indent=2,
    ))
