"""Traveling-wave fronts behind a slowly varying quench.

The quenched Allen-Cahn front u(x - ct) solves, in the reversed comoving
variable zeta = -(x - ct),

    u'' - c u' + mu(zeta) u - u^3 = 0,
    u(-inf) = 0,   u(+inf) = 1,

with the ramp mu(zeta) = tanh(eps * zeta) (or its clipped-linear variant).
The stationary quench c = 0 is the mirror image of the same problem, so a
single discretization covers both; xi-based diagnostics for c = 0 use
xi = -zeta.

The truncated problem closes with projection boundary conditions: at the
left end (u, u') must lie in the unstable eigendirection of the
linearization about u = 0, at the right end (u - sqrt(mu), u') in the
stable eigendirection about the nontrivial state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .solvercore import (
    ContinuationBranch,
    Mesh,
    NewtonReport,
    ParameterizedBVP,
    continue_branch,
    solve_bvp,
)
from .specfun import omega0

__all__ = [
    "QuenchParams",
    "DispersionPoint",
    "EquilibriumEigenpairs",
    "FrontSolution",
    "FrontBranch",
    "FrontSolveError",
    "NoInterfaceError",
    "dispersion_branch_point",
    "equilibrium_eigenpairs",
    "solve_front",
    "front_location",
    "predicted_delay",
    "front_branch",
    "stationary_amplitude_at_pitchfork",
    "compare_with_rescaled_profile",
]


class FrontSolveError(RuntimeError):
    """Newton failed on the front BVP; carries the report."""

    def __init__(self, message: str, report: NewtonReport | None = None):
        super().__init__(message)
        self.report = report


class NoInterfaceError(RuntimeError):
    pass


@dataclass(frozen=True)
class QuenchParams:
    """Quench speed/steepness pair plus the ramp shape.

    In the original frame xi = x - ct the ramp is mu(xi) = -tanh(eps*xi)
    (or clamp(-eps*xi, -1, 1)); in the solve variable zeta = -xi it is
    tanh(eps*zeta).
    """

    c: float
    epsilon: float
    ramp: str = "tanh"

    def __post_init__(self):
        if not (0.0 <= self.c < 2.0):
            raise ValueError("quench speed must lie in [0, 2)")
        if not (0.0 < self.epsilon <= 0.1):
            raise ValueError("ramp rate must lie in (0, 0.1]")
        if self.ramp not in ("tanh", "linear-clipped"):
            raise ValueError(f"unknown ramp shape {self.ramp!r}")

    def mu_of_zeta(self, zeta):
        if self.ramp == "tanh":
            return np.tanh(self.epsilon * np.asarray(zeta, dtype=float))
        return np.clip(self.epsilon * np.asarray(zeta, dtype=float), -1.0, 1.0)

    def zeta_of_mu(self, mu: float) -> float:
        if self.ramp == "tanh":
            return math.atanh(mu) / self.epsilon
        return mu / self.epsilon


@dataclass(frozen=True)
class DispersionPoint:
    """Marginal branch point of nu^2 + c nu + mu - lambda = 0."""

    lambda_br: float
    nu_br: float
    mu_c: float


@dataclass(frozen=True)
class EquilibriumEigenpairs:
    """Spatial eigenvalues at the two end states of the (u, v, mu) system,
    with the eigenvectors used for the projection boundary conditions."""

    nu_left: tuple[float, float, float]  # (slow 2eps, c/2 +- sqrt(c^2/4 + 1))
    nu_right: tuple[float, float, float]  # (slow -2eps, c/2 +- sqrt(c^2/4 + 2))
    unstable_vector_left: tuple[float, float, float]
    stable_vector_right: tuple[float, float, float]
    slow_vector: tuple[float, float, float] = (0.0, 0.0, 1.0)


@dataclass
class FrontSolution:
    """Discrete heteroclinic front on a zeta-mesh with interface diagnostics.

    mu is the closed-form ramp evaluated on the mesh (a coefficient, not an
    unknown); v = u_zeta is reconstructed from the solved profile.  For
    c = 0 the interface threshold degenerates, so mu_fr/zeta_fr are None and
    u_at_origin (the amplitude at xi = 0) is reported instead.
    """

    mesh: Mesh
    u: np.ndarray
    v: np.ndarray
    mu: np.ndarray
    params: QuenchParams
    report: NewtonReport
    mu_fr: float | None = None
    zeta_fr: float | None = None
    u_at_origin: float | None = None

    @property
    def zeta(self) -> np.ndarray:
        return self.mesh.nodes

    @property
    def xi(self) -> np.ndarray:
        """Original-frame coordinate xi = -zeta (same node order)."""
        return -self.mesh.nodes


@dataclass
class FrontBranch:
    """Continuation results over a list of ramp rates at fixed speed.

    ``branch`` holds the raw log-variable continuation entries; ``system``
    is the discretization they satisfy (used to re-verify residuals).
    """

    fronts: list[FrontSolution]
    branch: ContinuationBranch
    mesh: Mesh
    system: object = None


def dispersion_branch_point(c: float, mu: float) -> DispersionPoint:
    """Closed-form double root of the comoving dispersion relation."""
    return DispersionPoint(lambda_br=-c * c / 4.0 + mu, nu_br=-c / 2.0, mu_c=c * c / 4.0)


def equilibrium_eigenpairs(c: float, epsilon: float) -> EquilibriumEigenpairs:
    """Eigenvalues of the linearization at (u, v, mu) = (0, 0, -1) and
    (1, 0, 1), plus the fast eigenvectors (1, nu, 0) used by the projection
    boundary conditions."""
    s1 = math.sqrt(c * c / 4.0 + 1.0)
    s2 = math.sqrt(c * c / 4.0 + 2.0)
    nu_left = (2.0 * epsilon, c / 2.0 + s1, c / 2.0 - s1)
    nu_right = (-2.0 * epsilon, c / 2.0 + s2, c / 2.0 - s2)
    return EquilibriumEigenpairs(
        nu_left=nu_left,
        nu_right=nu_right,
        unstable_vector_left=(1.0, nu_left[1], 0.0),
        stable_vector_right=(1.0, nu_right[2], 0.0),
    )


def predicted_delay(c: float, epsilon: float) -> float:
    """Interface location law mu_fr = c^2/4 + Omega0 (1 - c^4/16)^{2/3} eps^{2/3}."""
    if not (0.0 <= c < 2.0):
        raise ValueError("speed must lie in [0, 2)")
    return c * c / 4.0 + omega0().value * (1.0 - c**4 / 16.0) ** (2.0 / 3.0) * epsilon ** (
        2.0 / 3.0
    )


# ---------------------------------------------------------------------------
# Discretization
# ---------------------------------------------------------------------------

class _FrontSystem:
    """Stencils and ramp coefficients for the second-order nonuniform
    finite-difference discretization of the front equation (the solve itself
    runs in the log-amplitude form below).

    ``phase_fn(eps)`` optionally shifts the ramp argument: the ramp becomes
    tanh(eps*z + phase) on the stored mesh, i.e. the mesh lives in a frame
    translated by phase/eps.  Continuation uses the predicted interface
    position as the phase so the front stays pinned near z = 0 while eps
    varies; the unshifted problem has phase 0.
    """

    def __init__(self, mesh: Mesh, c: float, ramp: str, phase_fn=None):
        self.mesh = mesh
        self.c = c
        self.ramp = ramp
        self.phase_fn = phase_fn
        z = mesh.nodes
        h = np.diff(z)
        hm, hp = h[:-1], h[1:]
        self.d2m = 2.0 / (hm * (hm + hp))
        self.d2c = -2.0 / (hm * hp)
        self.d2p = 2.0 / (hp * (hm + hp))
        self.d1m = -hp / (hm * (hm + hp))
        self.d1c = (hp - hm) / (hm * hp)
        self.d1p = hm / (hp * (hm + hp))
        # one-sided second-order first-derivative stencils at the two ends
        h0, h1 = h[0], h[1]
        self.left_stencil = (
            -(2.0 * h0 + h1) / (h0 * (h0 + h1)),
            (h0 + h1) / (h0 * h1),
            -h0 / (h1 * (h0 + h1)),
        )
        g0, g1 = h[-1], h[-2]
        self.right_stencil = (
            g0 / (g1 * (g0 + g1)),
            -(g0 + g1) / (g0 * g1),
            (2.0 * g0 + g1) / (g0 * (g0 + g1)),
        )

    def phase(self, epsilon: float) -> float:
        return self.phase_fn(epsilon) if self.phase_fn is not None else 0.0

    def mu_values(self, epsilon: float) -> np.ndarray:
        arg = epsilon * self.mesh.nodes + self.phase(epsilon)
        if self.ramp == "tanh":
            return np.tanh(arg)
        return np.clip(arg, -1.0, 1.0)

    def true_zeta(self, epsilon: float) -> np.ndarray:
        return self.mesh.nodes + self.phase(epsilon) / epsilon

    def coefficients(self, epsilon: float):
        mu = self.mu_values(epsilon)
        mu_l, mu_r = mu[0], mu[-1]
        nu_u = 0.5 * (self.c + math.sqrt(self.c**2 - 4.0 * mu_l))
        nu_s = 0.5 * (self.c - math.sqrt(self.c**2 + 8.0 * mu_r))
        u_plus = math.sqrt(mu_r)
        return mu, nu_u, nu_s, u_plus

    def derivative(self, u: np.ndarray) -> np.ndarray:
        v = np.empty_like(u)
        v[1:-1] = self.d1m * u[:-2] + self.d1c * u[1:-1] + self.d1p * u[2:]
        a0, b0, c0 = self.left_stencil
        v[0] = a0 * u[0] + b0 * u[1] + c0 * u[2]
        a1, b1, c1 = self.right_stencil
        v[-1] = a1 * u[-3] + b1 * u[-2] + c1 * u[-1]
        return v


def _default_mesh(params: QuenchParams, domain_halflength: float, n: int) -> Mesh:
    """Grade the mesh toward the interface region; roughly n nodes."""
    c, eps = params.c, params.epsilon
    scale = eps ** (-1.0 / 3.0)
    if c > 0.0:
        zeta_c = params.zeta_of_mu(c * c / 4.0)
        delay = omega0().value * (1 - c**4 / 16.0) ** (2 / 3) * scale / (1.0 - c**4 / 16.0)
        lo = zeta_c - max(30.0, 2.0 * scale)
        hi = zeta_c + 3.0 * delay + max(30.0, 2.0 * scale)
    else:
        lo, hi = -4.0 * scale - 20.0, 4.0 * scale + 20.0
    lo = max(lo, -0.5 * domain_halflength)
    hi = min(hi, 0.5 * domain_halflength)
    h_min = (hi - lo) / (0.75 * n)
    h_max = max(domain_halflength / (0.12 * n), 4.0 * h_min)
    return Mesh.graded(
        -domain_halflength, domain_halflength, lo, hi, h_min=h_min, factor=1.05, h_max=h_max
    )


def solve_front(
    params: QuenchParams,
    domain_halflength: float,
    n: int = 4001,
    guess: FrontSolution | None = None,
    mesh: Mesh | None = None,
    tol: float = 1e-10,
) -> FrontSolution:
    """Solve the truncated front BVP with projection boundary conditions.

    The domain must satisfy L >= 5/eps so that the ramp sits within 1e-4 of
    its limits at the truncation points.  Without a ``guess`` the solve is
    seeded with sqrt(max(mu,0)) * (1 + tanh(zeta - zeta_c))/2.  The discrete
    system is posed in the log-amplitude w = log(u) (the front's plateau
    passes exponentially close to u = 0, which an additive solve cannot
    resolve); the residual tolerance applies to that system.
    """
    if domain_halflength < 5.0 / params.epsilon - 1e-9:
        raise ValueError("domain too short: need halflength >= 5/epsilon")
    if mesh is None:
        if n < 2001:
            raise ValueError("front discretization needs n >= 2001")
        mesh = _default_mesh(params, domain_halflength, n)
    system = _LogFrontSystem(mesh, params.c, params.ramp)
    if guess is not None:
        w0 = _log_profile(
            np.interp(mesh.nodes, guess.mesh.nodes, guess.u), system, params.epsilon
        )
    else:
        w0 = system.seed(params.epsilon)
    w, report = solve_bvp(
        residual=lambda w: system.residual(w, params.epsilon),
        jacobian=lambda w: system.jacobian(w, params.epsilon),
        initial_guess=w0,
        tol=tol,
        bandwidth=(2, 2),
        max_iter=80,
    )
    if not report.converged:
        raise FrontSolveError(
            f"front solve failed at c={params.c}, eps={params.epsilon} "
            f"(residual {report.final_residual_norm:.3e})",
            report,
        )
    return system.front_solution(w, params, report)


def _log_profile(u: np.ndarray, system: _LogFrontSystem, eps: float) -> np.ndarray:
    """log of a sampled profile; the unresolvable left tail (underflow in u)
    is continued affinely with the left projection slope."""
    _, nu_u, _, _ = system.base.coefficients(eps)
    z = system.mesh.nodes
    floor = max(float(np.max(u)), 1e-30) * 1e-290
    w = np.log(np.maximum(u, floor))
    ok = u > floor
    if not ok.all() and ok.any():
        i0 = int(np.argmax(ok))
        w[:i0] = w[i0] + nu_u * (z[:i0] - z[i0])
    return w


def front_location(sol: FrontSolution) -> tuple[float, float]:
    """Interface diagnostics (mu_fr, zeta_fr) for a moving front.

    mu_fr is the first crossing of u through sqrt(mu_c)/2 = c/4 (linear
    interpolation in mu between the bracketing nodes; a node exactly on the
    threshold is taken as the crossing), and zeta_fr = ramp^{-1}(mu_fr).
    """
    c = sol.params.c
    if c <= 0.0:
        raise ValueError("interface threshold degenerates at c = 0; use u_at_origin")
    if not sol.report.converged:
        raise ValueError("front_location requires a converged solution")
    thr = c / 4.0
    above = np.nonzero(sol.u >= thr)[0]
    if above.size == 0:
        raise NoInterfaceError(f"profile never crosses the threshold {thr}")
    j = int(above[0])
    if sol.u[j] == thr or j == 0:
        mu_fr = float(sol.mu[j])
    else:
        t = (thr - sol.u[j - 1]) / (sol.u[j] - sol.u[j - 1])
        mu_fr = float(sol.mu[j - 1] + t * (sol.mu[j] - sol.mu[j - 1]))
    return mu_fr, sol.params.zeta_of_mu(mu_fr)


# ---------------------------------------------------------------------------
# Continuation in the ramp rate
# ---------------------------------------------------------------------------

def front_branch(
    c: float,
    eps_targets: Sequence[float],
    eps_start: float = 0.05,
    ramp: str = "tanh",
    h_min: float = 0.05,
    tol: float = 1e-10,
    step0: float = 0.4,
    strict: bool = True,
) -> FrontBranch:
    """Continue the front family downward in eps from ``eps_start`` through
    each target (direct Newton from the tanh seed fails below eps ~ 0.01).

    Continuation runs in log(eps) on a single mesh, with two changes of
    variables that keep the correctors quadratic all the way down: the frame
    is shifted by the predicted interface position (so the jump stays pinned
    near the mesh origin while the physical interface travels O(1/eps)), and
    the unknown is the log-amplitude w = log(u) (so the exponentially small
    plateau is resolved relatively, not additively).  Every target is landed
    on exactly and returned as a FrontSolution in the unshifted u-variables.
    """
    targets = sorted(set(float(e) for e in eps_targets), reverse=True)
    if not targets:
        raise ValueError("no ramp-rate targets given")
    eps_min = targets[-1]
    if eps_min <= 0.0 or max(targets) > eps_start:
        raise ValueError("targets must lie in (0, eps_start]")
    if c > 0.0:
        if ramp == "tanh":
            phase_fn = lambda e: math.atanh(predicted_delay(c, e))
        else:
            phase_fn = lambda e: predicted_delay(c, e)
    else:
        phase_fn = None
    mesh = _branch_mesh(c, eps_start, eps_min, ramp, h_min)
    system = _LogFrontSystem(mesh, c, ramp, phase_fn)
    problem = ParameterizedBVP(
        residual=lambda w, s: system.residual(w, math.exp(s)),
        jacobian=lambda w, s: system.jacobian(w, math.exp(s)),
        bandwidth=(2, 2),
        tol=tol,
        max_iter=80,
    )
    w_start, rep = solve_bvp(
        lambda w: system.residual(w, eps_start),
        lambda w: system.jacobian(w, eps_start),
        system.seed(eps_start),
        tol,
        (2, 2),
        max_iter=80,
    )
    if not rep.converged:
        raise FrontSolveError(f"branch seed failed at eps={eps_start}", rep)

    fronts: list[FrontSolution] = []
    entries = []
    steps: list[float] = []
    status = "completed"
    s_cur, w_cur = math.log(eps_start), w_start
    for eps_t in targets:
        s_t = math.log(eps_t)
        if s_t < s_cur:
            seg = continue_branch(problem, w_cur, (s_cur, s_t), step0=step0)
            # drop the duplicated join point between consecutive segments
            entries.extend(seg.entries[1:] if entries else seg.entries)
            steps.extend(seg.step_history)
            if seg.status != "completed":
                status = "stalled"
                break
            s_cur, w_cur = seg.entries[-1].param, seg.entries[-1].solution
        params_t = QuenchParams(c, eps_t, ramp)
        w_t, rep_t = solve_bvp(
            lambda w: system.residual(w, eps_t),
            lambda w: system.jacobian(w, eps_t),
            w_cur,
            tol,
            (2, 2),
            max_iter=80,
        )
        if not rep_t.converged:
            status = "stalled"
            break
        w_cur = w_t
        fronts.append(system.front_solution(w_t, params_t, rep_t))
    branch = ContinuationBranch(entries, direction=-1, step_history=steps, status=status)
    if status != "completed" and strict:
        raise FrontSolveError(
            f"continuation stalled before eps={targets[len(fronts)]}; "
            f"{len(fronts)} of {len(targets)} targets reached"
        )
    return FrontBranch(fronts=fronts, branch=branch, mesh=mesh, system=system)


class _LogFrontSystem:
    """The same front BVP posed for w = log(u).

    Fronts are strictly positive and monotone, and the plateau behind the
    instability point passes exponentially close to u = 0 (far below the
    additive rounding floor of a linear solve in u).  In w the tail is an
    affine profile, every error is relative to the local amplitude, and the
    continuation stays quadratically convergent down to the smallest ramp
    rates.  The equation becomes

        w'' + (w')^2 - c w' + mu - e^{2w} = 0,

    with projection closures w'(-L) = nu_u and w'(L) = nu_s (1 - u_+ e^{-w}).
    """

    def __init__(self, mesh: Mesh, c: float, ramp: str, phase_fn=None):
        base = _FrontSystem(mesh, c, ramp, phase_fn)
        self.base = base
        self.mesh = mesh
        self.c = c

    def residual(self, w: np.ndarray, epsilon: float) -> np.ndarray:
        b = self.base
        mu, nu_u, nu_s, u_plus = b.coefficients(epsilon)
        c = self.c
        r = np.empty_like(w)
        wm, wc, wp = w[:-2], w[1:-1], w[2:]
        d1 = b.d1m * wm + b.d1c * wc + b.d1p * wp
        r[1:-1] = (
            b.d2m * wm + b.d2c * wc + b.d2p * wp + d1 * d1 - c * d1 + mu[1:-1]
            - np.exp(2.0 * wc)
        )
        a0, b0, c0 = b.left_stencil
        r[0] = a0 * w[0] + b0 * w[1] + c0 * w[2] - nu_u
        a1, b1, c1 = b.right_stencil
        r[-1] = a1 * w[-3] + b1 * w[-2] + c1 * w[-1] - nu_s * (1.0 - u_plus * np.exp(-w[-1]))
        return r

    def jacobian(self, w: np.ndarray, epsilon: float) -> np.ndarray:
        b = self.base
        mu, nu_u, nu_s, u_plus = b.coefficients(epsilon)
        c = self.c
        n = w.size
        ab = np.zeros((5, n))
        wm, wc, wp = w[:-2], w[1:-1], w[2:]
        d1 = b.d1m * wm + b.d1c * wc + b.d1p * wp
        idx = np.arange(1, n - 1)
        ab[1, idx + 1] = b.d2p + (2.0 * d1 - c) * b.d1p
        ab[2, idx] = b.d2c + (2.0 * d1 - c) * b.d1c - 2.0 * np.exp(2.0 * wc)
        ab[3, idx - 1] = b.d2m + (2.0 * d1 - c) * b.d1m
        a0, b0, c0 = b.left_stencil
        ab[2, 0], ab[1, 1], ab[0, 2] = a0, b0, c0
        a1, b1, c1 = b.right_stencil
        ab[4, n - 3], ab[3, n - 2] = a1, b1
        ab[2, n - 1] = c1 - nu_s * u_plus * np.exp(-w[-1])
        return ab

    def seed(self, eps: float) -> np.ndarray:
        """log of the tanh seed: affine tail left of the instability point,
        log(sqrt(mu)) plateau to the right."""
        b = self.base
        mu = b.mu_values(eps)
        c = self.c
        if c > 0.0:
            arg_c = math.atanh(c * c / 4.0) if b.ramp == "tanh" else c * c / 4.0
            level = math.log(c / 4.0)
        else:
            arg_c = 0.0
            level = math.log(0.25)
        z_c = (arg_c - b.phase(eps)) / eps
        z = self.mesh.nodes
        slope = 0.5 + 0.5 * c
        return np.where(
            z < z_c,
            level + slope * (z - z_c),
            0.5 * np.log(np.maximum(mu, math.exp(2.0 * level))),
        )

    def front_solution(self, w: np.ndarray, params: QuenchParams, report) -> FrontSolution:
        b = self.base
        u = np.exp(w)
        v = u * b.derivative(w)  # u_zeta = u w_zeta
        nodes = b.true_zeta(params.epsilon)
        mesh = self.mesh if b.phase_fn is None else Mesh(nodes)
        sol = FrontSolution(
            mesh=mesh,
            u=u,
            v=v,
            mu=np.asarray(params.mu_of_zeta(mesh.nodes)),
            params=params,
            report=report,
        )
        if params.c > 0.0:
            try:
                sol.mu_fr, sol.zeta_fr = front_location(sol)
            except NoInterfaceError:
                pass
        else:
            sol.u_at_origin = float(np.interp(0.0, mesh.nodes, u))
        return sol


def _branch_mesh(c: float, eps_start: float, eps_min: float, ramp: str, h_min: float) -> Mesh:
    """One mesh serving the whole eps-continuation, in the shifted frame
    where the interface sits near the origin.  Fine spacing covers the
    take-off zone between the instability point and the interface; the ends
    keep the ramp within 1e-4 of its limits for every eps in range."""
    scale = eps_min ** (-1.0 / 3.0)
    if c > 0.0:
        p_min = QuenchParams(c, eps_min, ramp)
        zfp = p_min.zeta_of_mu(predicted_delay(c, eps_min))
        span = zfp - p_min.zeta_of_mu(c * c / 4.0)
        lo = -span - max(40.0, 2.0 * scale)
        hi = max(40.0, 2.0 * scale)
        left = 5.0 / eps_min + zfp + 10.0
        right = 5.0 / eps_min + 10.0
    else:
        lo, hi = -4.0 * scale - 20.0, 4.0 * scale + 20.0
        left = right = 5.0 / eps_min + 10.0
    h_max = max((left + right) / 1000.0, 4.0 * h_min)
    return Mesh.graded(-left, right, lo, hi, h_min=h_min, factor=1.05, h_max=h_max)


def stationary_amplitude_at_pitchfork(fronts: Sequence[FrontSolution]) -> float:
    """Log-log least-squares exponent of u(xi = 0) against eps for a c = 0
    branch.  Requires at least six converged entries spanning a decade; at
    least four usable points after exclusions."""
    usable = [
        f
        for f in fronts
        if f.report.converged and f.u_at_origin is not None and f.u_at_origin > 0.0
    ]
    if len(fronts) < 6:
        raise ValueError("need at least six branch entries")
    eps = np.array([f.params.epsilon for f in usable])
    if len(usable) < 4:
        raise ValueError("fewer than four usable (converged) entries")
    if eps.max() / eps.min() < 10.0 * (1.0 - 1e-9):
        raise ValueError("entries must span at least a decade in eps")
    amp = np.array([f.u_at_origin for f in usable])
    slope = np.polyfit(np.log(eps), np.log(amp), 1)[0]
    return float(slope)


def compare_with_rescaled_profile(
    sol: FrontSolution, eta: np.ndarray, w: np.ndarray
) -> tuple[float, float]:
    """Sup-norm deviation of a c = 0 front from the rescaled connection
    profile sqrt(2) eps^{1/3} w(eps^{1/3} xi) over |xi| <= eps^{-1/3}.

    Returns (sup_deviation, eps^{2/3}) so callers can form the bounded
    ratio deviation / eps^{2/3}.
    """
    eps = sol.params.epsilon
    scale = eps ** (1.0 / 3.0)
    xi = sol.xi[::-1]  # increasing xi
    u_xi = sol.u[::-1]
    mask = np.abs(xi) <= 1.0 / scale
    inner = np.sqrt(2.0) * scale * np.interp(scale * xi[mask], eta, w)
    dev = float(np.max(np.abs(u_xi[mask] - inner)))
    return dev, eps ** (2.0 / 3.0)
