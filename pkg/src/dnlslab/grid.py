"""Periodic spectral grid on [-L, L).

Fields are plain complex numpy arrays of length ``N`` sampled at the grid
nodes; every operation takes the grid it was sampled on.  The grid owns the
Fourier machinery (derivatives, quadrature, norms, band-limited
interpolation and translation).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.signal import czt


class ResolutionWarning(UserWarning):
    """A field is not well represented on the grid it is being mapped to."""


@dataclass(frozen=True)
class Norms:
    """Squared L2 norm, sixth power of the L6 norm and squared H1-seminorm."""

    l2_sq: float
    l6_6: float
    hdot1_sq: float

    @property
    def l2(self) -> float:
        return float(np.sqrt(self.l2_sq))

    @property
    def hdot1(self) -> float:
        return float(np.sqrt(self.hdot1_sq))

    @property
    def h1(self) -> float:
        return float(np.sqrt(self.l2_sq + self.hdot1_sq))


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform periodic grid with ``num_points`` nodes on ``[-half_width, half_width)``.

    Parameters
    ----------
    half_width : float
        Half length ``L`` of the periodic box.
    num_points : int
        Number of nodes ``N``; even and at least 16.
    """

    half_width: float
    num_points: int

    def __post_init__(self):
        n, L = self.num_points, self.half_width
        if int(n) != n or n < 16 or n % 2:
            raise ValueError(f"num_points must be an even integer >= 16, got {n!r}")
        if not np.isfinite(L) or L <= 0:
            raise ValueError(f"half_width must be positive, got {L!r}")
        object.__setattr__(self, "num_points", int(n))
        object.__setattr__(self, "half_width", float(L))

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / self.num_points

    @property
    def length(self) -> float:
        return 2.0 * self.half_width

    @cached_property
    def x(self) -> np.ndarray:
        return _readonly(-self.half_width + self.dx * np.arange(self.num_points))

    @cached_property
    def k(self) -> np.ndarray:
        """Wavenumbers in FFT order; the Nyquist entry is ``+pi N / (2L)``."""
        n = self.num_points
        idx = np.fft.fftfreq(n, d=1.0 / n)
        idx[n // 2] = n // 2
        return _readonly(idx * (np.pi / self.half_width))

    @cached_property
    def k_deriv(self) -> np.ndarray:
        """Wavenumbers for odd derivatives: Nyquist mode zeroed."""
        kd = self.k.copy()
        kd[self.num_points // 2] = 0.0
        return _readonly(kd)

    @property
    def k_max(self) -> float:
        return np.pi * self.num_points / (2.0 * self.half_width)

    # -- transforms -----------------------------------------------------

    def check(self, u) -> np.ndarray:
        """Return ``u`` as a complex array after validating length and finiteness."""
        u = np.asarray(u, dtype=complex)
        if u.shape != (self.num_points,):
            raise ValueError(f"field has shape {u.shape}, grid expects ({self.num_points},)")
        if not np.all(np.isfinite(u)):
            raise ValueError("field contains non-finite samples")
        return u

    def derivative(self, u, order: int = 1) -> np.ndarray:
        """Spectral derivative of ``u``; Nyquist mode dropped for odd orders."""
        u = self.check(u)
        k = self.k_deriv if order % 2 else self.k
        return np.fft.ifft((1j * k) ** order * np.fft.fft(u))

    # -- quadrature and norms -------------------------------------------

    def integrate(self, f) -> complex:
        """Rectangle rule ``dx * sum f(x_j)`` (equal to the periodic trapezoid rule)."""
        f = np.asarray(f)
        if f.shape != (self.num_points,):
            raise ValueError(f"integrand has shape {f.shape}, grid expects ({self.num_points},)")
        s = self.dx * np.sum(f)
        return complex(s) if np.iscomplexobj(s) else float(s)

    def inner(self, f, g) -> float:
        """Real inner product ``Re int f conj(g) dx``."""
        f, g = np.asarray(f), np.asarray(g)
        if f.shape != g.shape or f.shape != (self.num_points,):
            raise ValueError("fields do not live on this grid")
        return float(self.dx * np.real(np.vdot(g, f)))

    def norms(self, u) -> Norms:
        u = self.check(u)
        a2 = np.abs(u) ** 2
        du = self.derivative(u)
        return Norms(
            l2_sq=float(self.dx * a2.sum()),
            l6_6=float(self.dx * (a2**3).sum()),
            hdot1_sq=float(self.dx * (np.abs(du) ** 2).sum()),
        )

    def h1_norm(self, u) -> float:
        u = self.check(u)
        w = 1.0 + self.k_deriv**2
        return float(np.sqrt(self.dx / self.num_points * np.sum(w * np.abs(np.fft.fft(u)) ** 2)))

    def spectral_tail_fraction(self, u, band: float = 2.0 / 3.0) -> float:
        """Share of the squared L2 norm carried by modes with ``|k| > band * k_max``."""
        p = np.abs(np.fft.fft(u)) ** 2
        total = p.sum()
        if total == 0:
            return 0.0
        return float(p[np.abs(self.k) > band * self.k_max].sum() / total)

    # -- band-limited interpolation -------------------------------------

    def _symmetric_coefficients(self, u) -> np.ndarray:
        """Coefficients for modes ``-N/2 .. N/2`` with the Nyquist mode split evenly."""
        n = self.num_points
        c = np.fft.fftshift(np.fft.fft(u)) / n  # modes -N/2 .. N/2-1
        out = np.empty(n + 1, dtype=complex)
        out[:n] = c
        out[0] *= 0.5
        out[n] = out[0]
        return out

    def evaluate(self, u, start: float, step: float, count: int) -> np.ndarray:
        """Evaluate the trigonometric interpolant of ``u`` at ``start + step*j``, j < count.

        Uses a chirp-z transform, so the cost is O((N + count) log(N + count)).
        """
        u = self.check(u)
        n = self.num_points
        coef = self._symmetric_coefficients(u)
        modes = np.arange(-n // 2, n // 2 + 1)
        w0 = np.pi / self.half_width
        # sum_m coef_m exp(i w0 m (x0 - (-L) + step j)) with nodes referenced to -L
        shift = start + self.half_width
        weights = coef * np.exp(1j * w0 * modes * shift)
        ratio = np.exp(1j * w0 * step)
        vals = czt(weights, m=count, w=ratio, a=1.0)
        j = np.arange(count)
        return vals * np.exp(1j * w0 * modes[0] * step * j)

    def resample(self, u, target: "SpectralGrid") -> np.ndarray:
        """Band-limited interpolation of ``u`` onto the nodes of ``target``."""
        u = self.check(u)
        if target == self:
            return u.copy()
        if target.half_width == self.half_width:
            return self._resample_same_box(u, target)
        if target.k_max < self.k_max:
            lost = self.spectral_tail_fraction(u, band=target.k_max / self.k_max)
            if lost > 1e-12:
                warnings.warn(f"resample drops {lost:.2e} of the spectral mass", ResolutionWarning, stacklevel=2)
        if target.half_width < self.half_width:
            outside = np.abs(self.x) >= target.half_width
            frac = np.sum(np.abs(u[outside]) ** 2) / max(np.sum(np.abs(u) ** 2), 1e-300)
            if frac > 1e-12:
                warnings.warn(f"target box excludes {frac:.2e} of the mass", ResolutionWarning, stacklevel=2)
        return self.evaluate(u, -target.half_width, target.dx, target.num_points)

    def _resample_same_box(self, u, target: "SpectralGrid") -> np.ndarray:
        n, m = self.num_points, target.num_points
        coef = self._symmetric_coefficients(u)  # modes -n/2..n/2
        keep = min(n, m) // 2
        modes = np.arange(-n // 2, n // 2 + 1)
        full = np.zeros(m, dtype=complex)
        sel = np.abs(modes) <= keep
        if m < n:
            lost = float(np.sum(np.abs(coef[~sel]) ** 2) / max(np.sum(np.abs(coef) ** 2), 1e-300))
            if lost > 1e-12:
                warnings.warn(f"resample drops {lost:.2e} of the spectral mass", ResolutionWarning, stacklevel=3)
        # the +-m/2 pair folds into the single target Nyquist bin
        np.add.at(full, modes[sel] % m, coef[sel])
        return np.fft.ifft(full) * m

    def translate(self, u, shift: float) -> np.ndarray:
        """Return ``u(x - shift)`` evaluated through the trigonometric interpolant."""
        u = self.check(u)
        n = self.num_points
        uh = np.fft.fft(u)
        phase = np.exp(-1j * self.k * shift)
        # the Nyquist mode is shifted as the real cosine it represents
        phase[n // 2] = np.cos(self.k[n // 2] * shift)
        return np.fft.ifft(uh * phase)
