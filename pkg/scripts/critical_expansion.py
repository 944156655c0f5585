#!/usr/bin/env python3
"""Best-constant table and the small-eps expansion of the strip quotient at
the critical exponent.

Evaluates the concentrated test function (the standard bubble cut to the
strip) at a ladder of concentration scales eps, fits the leading corrections
to the quotient, and compares the fitted coefficients with the closed-form
constants.  The fitted gradient deficit runs at (N-2) * B0 — B0 being the
boundary moment int_{R^{N-1}} |y|^{2-2N} dy restricted to |y| >= 1 — and the
mass term follows eps^2 (N >= 5) or eps^2 log(1/eps) (N = 4).

The quotient crosses the half-space constant S_half at
eps* ~ L^2 C0 / ((N-2) B0): below eps* the mass term keeps the quotient above
S_half, past it the gradient deficit wins.  The table prints the signed gap so
the crossover is visible directly.

Usage:
    python3 scripts/critical_expansion.py [--L 0.1] [--N 4 5]
"""

import argparse
import sys

from stripmin import fit_expansion, sobolev_constants
from stripmin.critical import test_function_quotient


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--L", type=float, default=0.1)
    ap.add_argument("--N", type=int, nargs="+", default=[4, 5])
    ap.add_argument("--eps", type=float, nargs="+",
                    default=[0.05, 0.02, 0.01, 0.005])
    args = ap.parse_args()

    for N in args.N:
        cc = sobolev_constants(N)
        print(f"N = {N}:  S = {cc.S:.9f}   S_half = {cc.S_half:.9f}   "
              f"cN = {cc.cN:.9f}")
        print(f"        A0 = {cc.A0:.6f}   B0 = {cc.B0:.6f}   "
              f"C0 = {'divergent' if cc.mass_integral is None else f'{cc.mass_integral:.6f}'}   "
              f"D0 = {cc.D0:.6f}")

        fit = fit_expansion(sorted(args.eps), args.L, N)
        print(f"  fit over eps = {sorted(args.eps)} at L = {args.L}:")
        print(f"    fitted A0 = {fit['fitted_A0']:.6f} "
              f"(reference {fit['A0_reference']:.6f})")
        print(f"    fitted gradient deficit = {fit['fitted_B0']:.4f} "
              f"~ (N-2) B0 = {(N - 2) * cc.B0:.4f}")
        print(f"    mass law {fit['mass_law']}, fitted coefficient "
              f"{fit['fitted_mass_coefficient']:.4f}")

        print(f"    {'eps':>8} {'(q - S_half)/S_half':>22}")
        for eps in sorted(args.eps):
            q, _ = test_function_quotient(eps, args.L, N)
            print(f"    {eps:>8.4f} {(q - cc.S_half) / cc.S_half:>+22.3e}")
        if N >= 5:
            crossover = (args.L ** 2 * cc.mass_integral
                         / ((N - 2) * cc.B0)) ** (1.0 / (N - 4))
            print(f"    predicted sign change near eps* ~ {crossover:.4f}")
        print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
