"""Conserved quantities and variational functionals.

All functionals are assembled from five integrals of a field ``u``::

    mass     = int |u|^2             hdot1_sq = int |u'|^2
    l6_6     = int |u|^6             twist    = Im int conj(u) u'
    quartic  = Im int |u|^2 conj(u) u'

so that, with momentum ``P = -twist`` and ``N1 = -quartic``,

    E = hdot1_sq / 2 - N1 / 4 - b l6_6 / 6
    K = hdot1_sq + omega mass - c twist + quartic - b l6_6
    S = E + omega mass / 2 + c P / 2
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import SpectralGrid


@dataclass(frozen=True)
class ConservedTriple:
    energy: float
    mass: float
    momentum: float

    def __iter__(self):
        return iter((self.energy, self.mass, self.momentum))


@dataclass(frozen=True)
class VariationalValues:
    K: float
    S: float
    N1: float
    N2: float


@dataclass(frozen=True)
class FunctionalParts:
    """The integrals every functional is built from (see module docstring)."""

    mass: float
    hdot1_sq: float
    l6_6: float
    twist: float
    quartic: float
    l4_4: float = float("nan")

    @property
    def momentum(self) -> float:
        return -self.twist

    @property
    def n1(self) -> float:
        return -self.quartic

    def n2(self, b: float) -> float:
        return b * self.l6_6

    def energy(self, b: float) -> float:
        return 0.5 * self.hdot1_sq + 0.25 * self.quartic - b / 6.0 * self.l6_6

    def conserved(self, b: float) -> ConservedTriple:
        return ConservedTriple(self.energy(b), self.mass, self.momentum)

    def nehari(self, omega: float, c: float, b: float) -> float:
        return self.hdot1_sq + omega * self.mass - c * self.twist + self.quartic - b * self.l6_6

    def nehari_expanded(self, omega: float, c: float, b: float) -> float:
        """Same functional written through E, M and P."""
        return -self.hdot1_sq - b / 3.0 * self.l6_6 + 4.0 * self.energy(b) + omega * self.mass + c * self.momentum

    def action(self, omega: float, c: float, b: float) -> float:
        return self.energy(b) + 0.5 * omega * self.mass + 0.5 * c * self.momentum

    def variational(self, omega: float, c: float, b: float) -> VariationalValues:
        return VariationalValues(
            K=self.nehari(omega, c, b), S=self.action(omega, c, b), N1=self.n1, N2=self.n2(b)
        )

    def scaled(self, lam: float) -> "FunctionalParts":
        """Parts of ``lam**0.5 u(lam x)`` predicted by mass-critical scaling."""
        return FunctionalParts(
            mass=self.mass,
            hdot1_sq=lam**2 * self.hdot1_sq,
            l6_6=lam**2 * self.l6_6,
            twist=lam * self.twist,
            quartic=lam**2 * self.quartic,
            l4_4=lam * self.l4_4,
        )

    def amplified(self, a: float) -> "FunctionalParts":
        """Parts of ``a u`` for a real amplitude ``a``."""
        return FunctionalParts(
            mass=a**2 * self.mass,
            hdot1_sq=a**2 * self.hdot1_sq,
            l6_6=a**6 * self.l6_6,
            twist=a**2 * self.twist,
            quartic=a**4 * self.quartic,
            l4_4=a**4 * self.l4_4,
        )

    def twisted(self, r: float) -> "FunctionalParts":
        """Parts of ``exp(i r x) u``."""
        return FunctionalParts(
            mass=self.mass,
            hdot1_sq=self.hdot1_sq + 2.0 * r * self.twist + r * r * self.mass,
            l6_6=self.l6_6,
            twist=self.twist + r * self.mass,
            quartic=self.quartic + r * self.l4_4,
            l4_4=self.l4_4,
        )


def parts_of(grid: SpectralGrid, u) -> FunctionalParts:
    """Evaluate the functional building blocks of ``u`` on ``grid``."""
    u = grid.check(u)
    du = grid.derivative(u)
    a2 = (u * u.conj()).real
    cu_du = u.conj() * du
    dx = grid.dx
    return FunctionalParts(
        mass=float(dx * a2.sum()),
        hdot1_sq=float(dx * (du * du.conj()).real.sum()),
        l6_6=float(dx * (a2**3).sum()),
        twist=float(dx * cu_du.imag.sum()),
        quartic=float(dx * (a2 * cu_du.imag).sum()),
        l4_4=float(dx * (a2**2).sum()),
    )


def mass(grid: SpectralGrid, u) -> float:
    u = grid.check(u)
    return float(grid.dx * np.sum(np.abs(u) ** 2))


def momentum(grid: SpectralGrid, u) -> float:
    """``(i u', u)`` with the real inner product."""
    u = grid.check(u)
    return grid.inner(1j * grid.derivative(u), u)


def energy(grid: SpectralGrid, u, b: float) -> float:
    return parts_of(grid, u).energy(b)


def conserved(grid: SpectralGrid, u, b: float) -> ConservedTriple:
    return parts_of(grid, u).conserved(b)


def n1(grid: SpectralGrid, u) -> float:
    return parts_of(grid, u).n1


def n2(grid: SpectralGrid, u, b: float) -> float:
    u = grid.check(u)
    return b * float(grid.dx * np.sum(np.abs(u) ** 6))


def nehari_K(grid: SpectralGrid, u, omega: float, c: float, b: float) -> float:
    return parts_of(grid, u).nehari(omega, c, b)


def action_S(grid: SpectralGrid, u, omega: float, c: float, b: float) -> float:
    return parts_of(grid, u).action(omega, c, b)


def variational_values(grid: SpectralGrid, u, omega: float, c: float, b: float) -> VariationalValues:
    return parts_of(grid, u).variational(omega, c, b)


def action_gradient(grid: SpectralGrid, u, omega: float, c: float, b: float) -> np.ndarray:
    """L2 gradient of the action: ``-u'' + omega u + i c u' - i |u|^2 u' - b |u|^4 u``.

    The first variation is ``dS(u)[h] = Re int gradient * conj(h) dx``.
    """
    u = grid.check(u)
    uh = np.fft.fft(u)
    du = np.fft.ifft(1j * grid.k_deriv * uh)
    d2u = np.fft.ifft(-(grid.k**2) * uh)
    a2 = np.abs(u) ** 2
    return -d2u + omega * u + 1j * c * du - 1j * a2 * du - b * a2 * a2 * u
