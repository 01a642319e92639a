#!/usr/bin/env python3
"""Scan absorbing-layer parameters on a transparent reference problem.

With no potential the driven steady state must transmit perfectly, so any
deviation of the measured downstream transmission from 1 is boundary
artifact: reflection from (or leakage through) the absorbing layers.  The
scan reports |T2 - 1| over a grid of layer widths and strengths, which is
how the layer parameters used by the test suite were chosen.

Usage:
    python scripts/tune_absorber.py
    python scripts/tune_absorber.py --mu 0.8 --widths 10 20 --strengths 1 2.5 5
"""

from __future__ import annotations

import argparse
import time

from gpscatter.errors import GPScatterError
from gpscatter.model import PhysicalParams, Zero
from gpscatter.scatter import source_strength
from gpscatter.tdse import Absorber, Grid, steady_state_transmission


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mu", type=float, default=1.0)
    ap.add_argument("--widths", type=float, nargs="+",
                    default=[5.0, 10.0, 20.0, 25.0])
    ap.add_argument("--strengths", type=float, nargs="+",
                    default=[0.5, 1.0, 2.5, 5.0, 10.0])
    ap.add_argument("--n", type=int, default=2048)
    ap.add_argument("--dt", type=float, default=0.01)
    ap.add_argument("--t-max", type=float, default=300.0)
    args = ap.parse_args()

    params = PhysicalParams(mu=args.mu, g=0.0)
    grid = Grid(x_lo=-100.0, x_hi=90.0, n=args.n, dt=args.dt)
    f0 = source_strength(1.0 + 0.0j, params)

    print(f"free-space transmission error |T2 - 1| at mu = {args.mu} "
          f"(grid n = {args.n}, dt = {args.dt})")
    header = "width\\strength" + "".join(f"{s:>12g}" for s in args.strengths)
    print(header)
    for width in args.widths:
        cells = [f"{width:>14g}"]
        for strength in args.strengths:
            try:
                t2 = steady_state_transmission(
                    Zero(), params, args.mu, f0, grid,
                    Absorber(width=width, strength=strength),
                    0.005, t_max=args.t_max, window=30.0,
                    probe=(20.0, 45.0), x0=-17.0,
                )
                cells.append(f"{abs(t2 - 1.0):>12.2e}")
            except GPScatterError as exc:
                cells.append(f"{type(exc).__name__:>12}")
        print("".join(cells))


if __name__ == "__main__":
    main()
