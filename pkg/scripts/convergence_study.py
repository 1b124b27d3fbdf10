"""Step-halving study of the RK4 potential solver on warped products.

For each warping function the midpoint defect of the linear potential
equation and the error in f' against a fine reference are tabulated as the
step count doubles.  Fourth-order convergence shows up as ratios near 16.

    python3 scripts/convergence_study.py [--df0 X] [--max-steps N]
"""
import argparse

import numpy as np

from almostsoliton import ode
from almostsoliton.geom import WarpedProductSpec

PROFILES = (
    ("cosh(t)", 1, 1.0, (0.0, 2.0)),
    ("cosh(t)", 1, -1.0, (0.0, 2.0)),
    ("exp(t)", -1, 0.0, (0.0, 1.0)),
    ("1 + t^2/4", 1, 1.0, (0.0, 1.5)),
)


def study(spec, df0, steps):
    ref = ode.solve_potential(spec, 0.0, df0, steps=steps[-1] * 8, estimate_error=False)
    rows = []
    for n in steps:
        sol = ode.solve_potential(spec, 0.0, df0, steps=n, estimate_error=False)
        defect = float(np.abs(sol.defect()).max())
        err = float(np.abs(sol.df - ref.df[:: (steps[-1] * 8) // n]).max())
        rows.append((n, defect, err))
    return rows


def main(argv=None):
    parser = argparse.ArgumentParser(description="RK4 convergence table")
    parser.add_argument("--df0", type=float, default=0.3)
    parser.add_argument("--max-steps", type=int, default=256)
    args = parser.parse_args(argv)
    steps = [n for n in (16, 32, 64, 128, 256, 512, 1024) if n <= args.max_steps]

    for phi, eps, c, interval in PROFILES:
        spec = WarpedProductSpec.create(phi, eps, c, interval)
        print(f"\nphi = {phi}, eps = {eps}, c_N = {c}, t in {list(interval)}")
        print(f"{'steps':>6} {'defect':>10} {'ratio':>6} {'err df':>10} {'ratio':>6}")
        prev = None
        for n, defect, err in study(spec, args.df0, steps):
            if prev is None:
                print(f"{n:>6} {defect:>10.3e} {'':>6} {err:>10.3e}")
            else:
                print(f"{n:>6} {defect:>10.3e} {prev[0] / defect:>6.1f} {err:>10.3e} {prev[1] / err:>6.1f}")
            prev = (defect, err)


if __name__ == "__main__":
    main()
