#!/usr/bin/env python3
"""Connection problem of w'' = eta w + 2 w^3: profile, certificates, and
the stationary-front comparison.

Solves the positive monotone connection profile, certifies the potential
positivity / lower bound / negative ground state, classifies tails around
the separatrix, and overlays the rescaled profile on a stationary (c = 0)
front.
"""

import argparse
import os

import numpy as np

from quenchfront.painleve import (
    certify_lower_bound,
    certify_potential_positive,
    classify_airy_tail,
    linearization_ground_state,
    solve_hastings_mcleod,
)
from quenchfront.travelingwave import QuenchParams, compare_with_rescaled_profile, solve_front


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results/connection_problem")
    ap.add_argument("--eps", type=float, default=9.81e-3)
    args = ap.parse_args()
    os.makedirs(args.outdir, exist_ok=True)

    sol = solve_hastings_mcleod(12.0, 8.0, 8001)
    w0 = float(np.interp(0.0, sol.eta, sol.w))
    path = os.path.join(args.outdir, "connection_profile.csv")
    np.savetxt(
        path,
        np.column_stack([sol.eta, sol.w, sol.wprime, sol.eta + 6 * sol.w**2]),
        delimiter=",",
        header="eta,w,wprime,V",
        comments="# ",
    )
    print(f"w(0) = {w0:.9f} (>= Ai(0) = 0.355028) -> {path}")
    cert = certify_potential_positive(sol)
    certify_lower_bound(sol)
    spec = linearization_ground_state(sol)
    print(
        f"certificates: min V = {cert.min_value:.4f} (margin {cert.margin_bound:.4f}), "
        f"w > sqrt(-eta/6) holds, ground state = {spec.eigenvalues[0]:.4f} < 0"
    )
    for k in (0.5, 1.5, -1.0):
        tc = classify_airy_tail(k)
        extra = f" at eta = {tc.pole_position:.3f}" if tc.pole_position else ""
        print(f"tail k = {k:+.1f}: {tc.kind}{extra}")

    front = solve_front(QuenchParams(0.0, args.eps), 5.0 / args.eps + 1.0, 4001)
    dev, e23 = compare_with_rescaled_profile(front, sol.eta, sol.w)
    print(
        f"stationary front at eps = {args.eps:g}: sup |u - sqrt(2) eps^(1/3) "
        f"w(eps^(1/3) xi)| = {dev:.2e} (bound 2 eps^(2/3) = {2*e23:.2e})"
    )
    scale = args.eps ** (1.0 / 3.0)
    xi = front.xi[::-1]
    u = front.u[::-1]
    inner = np.sqrt(2.0) * scale * np.interp(scale * xi, sol.eta, sol.w)
    path = os.path.join(args.outdir, "stationary_vs_inner.csv")
    np.savetxt(
        path,
        np.column_stack([xi, u, inner]),
        delimiter=",",
        header="xi,u,u_inner",
        comments="# ",
    )
    print(f"overlay table -> {path}")


if __name__ == "__main__":
    main()
