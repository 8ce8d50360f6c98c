"""Constrained minimization of the action on the Nehari manifold.

Along a ray ``lam psi`` the Nehari functional is a polynomial in ``m = lam^2``::

    K(lam psi) = m (A + B m + C m^2),   S(lam psi) = m A / 2 + m^2 B / 4 + m^3 C / 6

with ``A = |psi'|^2 + omega |psi|^2 - c Im int conj(psi) psi'``,
``B = Im int |psi|^2 conj(psi) psi'`` and ``C = -b |psi|_6^6``, so projecting
onto ``K = 0`` is a quadratic (or, for ``b = 0``, linear) root solve.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .functionals import action_gradient, conserved, parts_of
from .grid import SpectralGrid
from .modulation import fit_orbit, lambda0
from .soliton import DegenerateInfo, SolitonParams, build_soliton

log = logging.getLogger(__name__)


class NehariError(ValueError):
    """The ray through a field never meets the Nehari manifold."""


def ray_coefficients(grid: SpectralGrid, psi, omega: float, c: float, b: float) -> tuple[float, float, float]:
    p = parts_of(grid, psi)
    return p.hdot1_sq + omega * p.mass - c * p.twist, p.quartic, -b * p.l6_6


def nehari_rescale(grid: SpectralGrid, psi, omega: float, c: float, b: float) -> tuple[float, np.ndarray]:
    """Scale ``psi`` along its ray onto ``K_{omega,c} = 0``.

    Returns ``(lam, lam * psi)``.  When two positive roots exist the one with
    the smaller action along the ray is chosen.
    """
    psi = grid.check(psi)
    A, B, C = ray_coefficients(grid, psi, omega, c, b)
    if C != 0.0:
        roots = np.roots([C, B, A])
        cand = [r.real for r in roots if abs(r.imag) <= 1e-12 * abs(r) and r.real > 0]
    elif B != 0.0:
        cand = [-A / B] if -A / B > 0 else []
    else:
        cand = []
    if not cand:
        raise NehariError(f"not Nehari-reachable along the ray (A={A:.3e}, B={B:.3e}, C={C:.3e})")

    def ray_action(m):
        return m * A / 2 + m * m * B / 4 + m**3 * C / 6

    m = min(cand, key=ray_action)
    # one Newton polish on the cubic removes rounding from np.roots
    if C != 0.0:
        m = m - (A + B * m + C * m * m) / (B + 2 * C * m)
    lam = math.sqrt(m)
    return lam, lam * psi


@dataclass
class MinimizationResult:
    minimizer: np.ndarray = field(repr=False)
    mu: float
    iterations: int
    converged: bool
    orbit_distance: float
    nehari_residual: float
    history: list[float] = field(default_factory=list, repr=False)
    message: str = ""


def minimize_action(
    grid: SpectralGrid,
    omega: float,
    c: float,
    b: float,
    init,
    steps: int = 20000,
    lr: float | None = None,
    tol: float = 1e-10,
    preconditioner: str = "h1",
) -> MinimizationResult:
    """Projected gradient descent for ``inf {S : K = 0}``.

    Each iteration takes a gradient step on the action and rescales the
    result back onto the Nehari manifold.  Steps that raise the action are
    rejected and the step size halved, so the recorded action never
    increases.  The default ``preconditioner="h1"`` divides the gradient by
    ``1 + k^2`` (a Sobolev gradient); ``"l2"`` uses the plain gradient, whose
    stable step shrinks like ``1 / k_max^2`` and which is correspondingly
    slow.  The default step size is the explicit stability limit of the
    chosen metric.
    """
    params = SolitonParams(omega, c, b)
    if preconditioner == "l2":
        precond = None
        default_lr = 1.0 / (grid.k_max**2 + omega + abs(c) * grid.k_max)
    elif preconditioner == "h1":
        precond = 1.0 / (1.0 + grid.k**2)
        default_lr = 0.5 / max(1.0, omega)
    else:
        raise ValueError(f"unknown preconditioner {preconditioner!r}")
    lr = default_lr if lr is None else lr
    lr_cap = lr

    _, u = nehari_rescale(grid, grid.check(init), omega, c, b)
    s = parts_of(grid, u).action(omega, c, b)
    history = [s]
    converged = False
    message = "step budget exhausted"
    it = 0
    for it in range(1, steps + 1):
        g = action_gradient(grid, u, omega, c, b)
        if precond is not None:
            g = np.fft.ifft(precond * np.fft.fft(g))
        closest = math.inf
        while True:
            try:
                _, trial = nehari_rescale(grid, u - lr * g, omega, c, b)
                s_trial = parts_of(grid, trial).action(omega, c, b)
            except NehariError:
                s_trial = math.inf
            if s_trial <= s:
                break
            closest = min(closest, s_trial)
            lr *= 0.5
            if lr < 1e-16:
                break
        if not s_trial <= s:
            # no step lowers the action; at the rounding floor that is convergence
            converged = closest - s <= 64 * np.finfo(float).eps * max(abs(s), 1.0)
            message = "action stationary to rounding" if converged else "line search failed"
            break
        change = math.sqrt(grid.norms(trial - u).l2_sq / grid.norms(u).l2_sq)
        u, s = trial, s_trial
        history.append(s)
        lr = min(1.25 * lr, lr_cap)
        if change < tol:
            converged = True
            message = "update below tolerance"
            break

    target = build_soliton(params, grid, warn=False)
    dist = fit_orbit(grid, u, target).distance
    k_res = parts_of(grid, u).nehari(omega, c, b)
    log.info("minimize_action(%g, %g, %g): %s after %d iterations, mu=%.12g", omega, c, b, message, it, s)
    return MinimizationResult(
        minimizer=u,
        mu=s,
        iterations=it,
        converged=converged,
        orbit_distance=dist,
        nehari_residual=k_res,
        history=history,
        message=message,
    )


@dataclass
class RigiditySample:
    accepted: bool
    energy: float
    mass: float
    momentum: float
    omega: float = float("nan")
    distance: float = float("nan")
    passed: bool = False
    reason: str = ""


def rigidity_probe(
    grid: SpectralGrid,
    samples,
    info: DegenerateInfo,
    constraint_tol: float = 1e-6,
    distance_tol: float = 1e-6,
) -> list[RigiditySample]:
    """Check fields with ``E <= 0``, ``P <= 0`` and ``M = M*`` against the degenerate family.

    Samples violating the constraints are rejected and reported, not
    assessed.  For accepted samples the frequency is matched through the
    lambda0 rescaling (``omega = 1 / lambda0^2`` against ``omega = 1``) and the
    orbit distance to ``phi_{omega, 2 kappa0 sqrt(omega)}`` is reported.
    """
    b = info.b
    out = []
    for u in samples:
        u = grid.check(u)
        e, m, p = conserved(grid, u, b)
        bad = []
        if abs(m - info.threshold_mass) > constraint_tol * info.threshold_mass:
            bad.append(f"M - M* = {m - info.threshold_mass:.2e}")
        if e > constraint_tol * m:
            bad.append(f"E = {e:.2e} > 0")
        if p > constraint_tol * m:
            bad.append(f"P = {p:.2e} > 0")
        if bad:
            out.append(RigiditySample(False, e, m, p, reason="; ".join(bad)))
            continue
        lam0 = lambda0(grid, u, 1.0, b, info.threshold_mass)
        omega = 1.0 / lam0**2
        target = build_soliton(info.params(omega), grid, warn=False)
        d = fit_orbit(grid, u, target).distance
        out.append(RigiditySample(True, e, m, p, omega=omega, distance=d, passed=d < distance_tol))
    return out
