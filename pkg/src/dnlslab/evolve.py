"""Pseudo-spectral time integration of the derivative NLS with quintic term.

    i u_t + u_xx + i |u|^2 u_x + b |u|^4 u = 0

written as ``u_t = i u_xx + N(u)`` with ``N(u) = -|u|^2 u_x + i b |u|^4 u``.
The dispersive part is integrated exactly in Fourier space and the
nonlinear part with the classical four-stage scheme in the interaction
picture (integrating-factor RK4).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .functionals import ConservedTriple, conserved
from .grid import SpectralGrid

log = logging.getLogger(__name__)

COMPLETED = "completed"
BLOWUP = "blowup_detected"
RESOLUTION = "resolution_warning"


@dataclass(frozen=True)
class EvolveConfig:
    """Time-stepping settings.

    ``dealias_fraction`` is the share of the wavenumber band kept when forming
    nonlinear products (1 keeps every mode, 1/3 removes all quintic aliases).
    ``blowup_factor`` sets the H1-seminorm cap relative to the initial value
    when ``blowup_threshold`` is not given.  With ``stop_on_resolution`` the
    run ends at the first recorded field whose spectral tail exceeds
    ``tail_tolerance``.
    """

    dt: float
    t_end: float
    b: float = 0.0
    dealias_fraction: float = 1.0
    record_every: int = 100
    blowup_threshold: float | None = None
    blowup_factor: float = 1e3
    tail_tolerance: float = 1e-6
    stop_on_resolution: bool = False

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_end >= 0:
            raise ValueError(f"t_end must be non-negative, got {self.t_end}")
        if self.b < 0:
            raise ValueError("b must be non-negative")
        if not 0 < self.dealias_fraction <= 1:
            raise ValueError("dealias_fraction must lie in (0, 1]")
        if self.record_every < 1:
            raise ValueError("record_every must be a positive integer")


@dataclass
class Trajectory:
    times: np.ndarray
    fields: np.ndarray
    conserved: list[ConservedTriple]
    status: str = COMPLETED
    notes: list[str] = field(default_factory=list)
    resolved_count: int | None = None

    def __len__(self):
        return len(self.times)

    @property
    def resolved_until(self) -> float:
        """Last recorded time before the spectral tail first exceeded tolerance."""
        n = len(self.times) if self.resolved_count is None else self.resolved_count
        return float(self.times[n - 1])

    def drift(self) -> dict[str, float]:
        """Largest deviation of E, M, P from their initial values, relative to a scale.

        The mass is normalized by its initial value.  Energy and momentum can
        vanish identically on solitons, so they are normalized by
        ``max(|Q(0)|, M(0))``, the field's own mass scale.
        """
        e = np.array([c.energy for c in self.conserved])
        m = np.array([c.mass for c in self.conserved])
        p = np.array([c.momentum for c in self.conserved])
        scale_e = max(abs(e[0]), m[0])
        scale_p = max(abs(p[0]), m[0])
        return {
            "energy": float(np.max(np.abs(e - e[0])) / scale_e),
            "mass": float(np.max(np.abs(m - m[0])) / m[0]),
            "momentum": float(np.max(np.abs(p - p[0])) / scale_p),
        }


class Stepper:
    """Integrating-factor RK4 stepper bound to a grid and a quintic coefficient.

    Scratch arrays are owned by the instance; do not share one stepper
    between threads.
    """

    def __init__(self, grid: SpectralGrid, b: float, dealias_fraction: float = 1.0, nonlinear: bool = True):
        self.grid = grid
        self.b = float(b)
        self.nonlinear = nonlinear
        self.ik = 1j * grid.k_deriv
        self.k2 = grid.k**2
        if dealias_fraction < 1:
            self.mask = (np.abs(grid.k) <= dealias_fraction * grid.k_max).astype(float)
        else:
            self.mask = None
        self._dt = None

    def _set_dt(self, dt: float):
        if self._dt != dt:
            self._half = np.exp(-0.5j * self.k2 * dt)
            self._full = self._half**2
            self._dt = dt

    def nonlinear_hat(self, uh: np.ndarray) -> np.ndarray:
        """Fourier coefficients of ``-|u|^2 u_x + i b |u|^4 u`` from those of ``u``."""
        if not self.nonlinear:
            return np.zeros_like(uh)
        if self.mask is not None:
            uh = uh * self.mask
        u = np.fft.ifft(uh)
        ux = np.fft.ifft(self.ik * uh)
        a2 = u.real**2 + u.imag**2
        out = np.fft.fft(a2 * (1j * self.b * a2 * u - ux))
        if self.mask is not None:
            out *= self.mask
        return out

    def step_hat(self, uh: np.ndarray, dt: float) -> np.ndarray:
        self._set_dt(dt)
        eh, ef = self._half, self._full
        k1 = self.nonlinear_hat(uh)
        k2 = self.nonlinear_hat(eh * (uh + 0.5 * dt * k1))
        k3 = self.nonlinear_hat(eh * uh + 0.5 * dt * k2)
        k4 = self.nonlinear_hat(ef * uh + dt * (eh * k3))
        return ef * uh + (dt / 6.0) * (ef * k1 + 2.0 * eh * (k2 + k3) + k4)

    def step(self, u, dt: float) -> np.ndarray:
        return np.fft.ifft(self.step_hat(np.fft.fft(u), dt))


def rhs(grid: SpectralGrid, u, b: float, dealias_fraction: float = 1.0) -> np.ndarray:
    """Time derivative ``i u_xx - |u|^2 u_x + i b |u|^4 u``."""
    u = grid.check(u)
    st = Stepper(grid, b, dealias_fraction)
    uh = np.fft.fft(u)
    return np.fft.ifft(-1j * st.k2 * uh + st.nonlinear_hat(uh))


def step(grid: SpectralGrid, u, dt: float, b: float, dealias_fraction: float = 1.0) -> np.ndarray:
    """Advance ``u`` by one step of size ``dt`` (negative ``dt`` steps backward)."""
    u = grid.check(u)
    out = Stepper(grid, b, dealias_fraction).step(u, dt)
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("non-finite field after step")
    return out


def run(grid: SpectralGrid, u0, config: EvolveConfig) -> Trajectory:
    """Integrate from ``u0`` to ``config.t_end`` (or until blow-up detection).

    Fields and conserved quantities are recorded every ``record_every``
    steps and at the final time.
    """
    u0 = grid.check(u0)
    stepper = Stepper(grid, config.b, config.dealias_fraction)
    nsteps = int(round(config.t_end / config.dt))
    if nsteps and abs(nsteps * config.dt - config.t_end) > 1e-9 * max(config.t_end, 1.0):
        raise ValueError("t_end must be an integer multiple of dt")
    h0 = grid.norms(u0).hdot1
    cap = config.blowup_threshold if config.blowup_threshold is not None else config.blowup_factor * max(h0, 1e-300)
    if not cap > h0:
        raise ValueError(f"blow-up threshold {cap} must exceed the initial H1 seminorm {h0}")

    dt = config.dt
    times, fields, triples = [0.0], [u0.copy()], [conserved(grid, u0, config.b)]
    status, notes = COMPLETED, []
    tail_flagged = False
    resolved = None
    weights = grid.k_deriv**2 * grid.dx / grid.num_points
    uh = np.fft.fft(u0)
    for n in range(1, nsteps + 1):
        uh = stepper.step_hat(uh, dt)
        last = n == nsteps
        if n % config.record_every and not last:
            continue
        if not np.all(np.isfinite(uh)):
            status = BLOWUP
            notes.append(f"non-finite field at t={n * dt:.6g}")
            break
        h1 = float(np.sqrt(np.sum(weights * np.abs(uh) ** 2)))
        u = np.fft.ifft(uh)
        times.append(n * dt)
        fields.append(u)
        triples.append(conserved(grid, u, config.b))
        if h1 > cap:
            status = BLOWUP
            notes.append(f"H1 seminorm {h1:.3e} exceeded cap {cap:.3e} at t={n * dt:.6g}")
            break
        if not tail_flagged and grid.spectral_tail_fraction(u) > config.tail_tolerance:
            tail_flagged = True
            resolved = len(times) - 1
            notes.append(f"spectral tail above {config.tail_tolerance:g} at t={n * dt:.6g}")
            if config.stop_on_resolution:
                break
    if status == COMPLETED and tail_flagged:
        status = RESOLUTION
    if status != COMPLETED:
        log.info("run ended with status %s: %s", status, "; ".join(notes))
    return Trajectory(np.array(times), np.array(fields), triples, status, notes, resolved)
