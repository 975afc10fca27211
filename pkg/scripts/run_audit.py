#!/usr/bin/env python3
"""Audit the refinement-constant recursion: one k-division step maps a
normalized bound B to 1224 + 45 B / sqrt(k); at k = 8100 the budget 2500
closes with slack 26 and the level bounds decrease toward the fixed point
1224 / (1 - 45/90) = 2448.

Usage: python scripts/run_audit.py [K] [TARGET] [LEVELS]
"""
import sys

from ncspaces.weyl_dynamics import audit_interpolation_constants

if __name__ == "__main__":
    k = int(sys.argv[1]) if len(sys.argv) > 1 else 8100
    target = int(sys.argv[2]) if len(sys.argv) > 2 else 2500
    levels = int(sys.argv[3]) if len(sys.argv) > 3 else 6
    rep = audit_interpolation_constants(k, target, levels)
    print(f"k = {rep.k}, target = {rep.target:g}")
    print(f"one-step value {rep.one_step_value:g}, slack {rep.slack:g}")
    for i, b in enumerate(rep.level_bounds):
        print(f"  level {i}: {b:.6g}")
    print("holds" if rep.holds else "FAILS")
    sys.exit(0 if rep.holds else 3)
