#!/usr/bin/env python3
"""Richardson convergence study of the Lax-Wendroff solver.

Runs a smooth bump through the closed-loop pipe on a sequence of grids
and reports the estimated order of accuracy for u, u_t and u_x in the
discrete L2 norm.

Usage: python scripts/convergence_study.py [--t-end 1.0] [--levels 4]
"""

import argparse
import math
import sys

import numpy as np

from pipestab.disturbance import DisturbanceSpec
from pipestab.dynamics import SolverConfig, bump_profile, simulate
from pipestab.stationary import PipeParams, build_stationary


def run(nx, params, t_end):
    xs = np.linspace(0.0, params.L, nx + 1)
    profile = build_stationary(params, 0.3, xs)
    phi, dphi = bump_profile(xs, 1e-3, 0.5, 0.2)
    traj = simulate(params, profile, DisturbanceSpec(family="zero"),
                    SolverConfig(nx=nx, cfl=0.45, t_end=t_end, snapshot_dt=t_end),
                    initial_u=phi, initial_v=np.zeros_like(xs), initial_w=dphi)
    return traj.states[-1]


def l2(diff, dx):
    return math.sqrt(float(np.sum(diff ** 2)) * dx)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--t-end", type=float, default=1.0)
    parser.add_argument("--levels", type=int, default=4,
                        help="number of grids, starting at nx = 200")
    args = parser.parse_args()

    params = PipeParams(L=1.0, a=2.0, theta=0.1, k=4.0)
    grids = [200 * 2 ** j for j in range(args.levels)]
    finals = {nx: run(nx, params, args.t_end) for nx in grids}

    print(f"{'field':>6} {'grids':>12} {'error':>12} {'order':>8}")
    for field in ("u", "v", "w"):
        for coarse, fine in zip(grids[:-2], grids[1:-1]):
            finer = fine * 2
            e1 = l2(getattr(finals[coarse], field)
                    - getattr(finals[fine], field)[::2], 1.0 / coarse)
            e2 = l2(getattr(finals[fine], field)
                    - getattr(finals[finer], field)[::2], 1.0 / fine)
            order = math.log2(e1 / e2)
            print(f"{field:>6} {coarse:>5}/{fine:<6} {e1:>12.4e} {order:>8.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
