#!/usr/bin/env python3
"""Front profiles across quench speeds and ramp rates.

Produces two CSV tables: profiles u(zeta) for several speeds c at fixed
eps = 0.0025, and profiles against the rescaled coordinate eps*zeta for
several eps at fixed c = 1.2 (each with sqrt(mu) for comparison).
"""

import argparse
import os

import numpy as np

from quenchfront.travelingwave import QuenchParams, front_branch, solve_front


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results/front_profiles")
    ap.add_argument("--eps", type=float, default=0.0025)
    ap.add_argument("--speeds", default="0.4,0.8,1.2,1.6")
    ap.add_argument("--eps-list", default="0.01,0.005,0.0025,0.001")
    args = ap.parse_args()
    os.makedirs(args.outdir, exist_ok=True)

    speeds = [float(s) for s in args.speeds.split(",")]
    for c in speeds:
        sol = (
            solve_front(QuenchParams(c, args.eps), 5.0 / args.eps, 4001)
            if args.eps >= 1e-3
            else front_branch(c, [args.eps]).fronts[0]
        )
        path = os.path.join(args.outdir, f"profile_c{c:g}_eps{args.eps:g}.csv")
        np.savetxt(
            path,
            np.column_stack([sol.zeta, sol.mu, sol.u, np.sqrt(np.maximum(sol.mu, 0.0))]),
            delimiter=",",
            header="zeta,mu,u,sqrt_mu",
            comments="# ",
        )
        tag = f"mu_fr = {sol.mu_fr:.6f}" if sol.mu_fr else f"u(0) = {sol.u_at_origin:.6f}"
        print(f"c = {c:4.2f}: {tag} -> {path}")

    eps_list = sorted(float(s) for s in args.eps_list.split(","))
    branch = front_branch(1.2, eps_list)
    for sol in branch.fronts:
        e = sol.params.epsilon
        path = os.path.join(args.outdir, f"profile_scaled_c1.2_eps{e:g}.csv")
        np.savetxt(
            path,
            np.column_stack([e * sol.zeta, sol.mu, sol.u]),
            delimiter=",",
            header="eps_zeta,mu,u",
            comments="# ",
        )
        print(f"eps = {e:g}: mu_fr = {sol.mu_fr:.6f} -> {path}")


if __name__ == "__main__":
    main()
