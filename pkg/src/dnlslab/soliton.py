"""Closed-form soliton family, degenerate speed ratio and gauge transforms.

For ``4 omega > c**2`` the profile has exponential decay; at ``c = 2 sqrt(omega)``
it decays algebraically and its integrals over the box need analytic tail
corrections.  Every integral of the modulus profile used here has a closed
form (arctan antiderivatives), so the soliton phase is exact at the nodes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special

from .functionals import FunctionalParts, action_gradient, conserved, momentum
from .grid import ResolutionWarning, SpectralGrid


def gamma_of_b(b: float) -> float:
    """Quintic-dependent profile constant ``1 + 16 b / 3``."""
    if b < 0:
        raise ValueError(f"quintic coefficient must be non-negative, got {b}")
    return 1.0 + 16.0 * b / 3.0


@dataclass(frozen=True)
class SolitonParams:
    """Frequency ``omega``, speed ``c`` and quintic coefficient ``b`` of a soliton.

    The admissible region is ``-2 sqrt(omega) < c <= 2 sqrt(omega)``.
    """

    omega: float
    c: float
    b: float = 0.0

    def __post_init__(self):
        if self.b < 0:
            raise ValueError(f"quintic coefficient must be non-negative, got {self.b}")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        edge = 2.0 * math.sqrt(self.omega)
        if not -edge < self.c <= edge * (1 + 1e-14):
            raise ValueError(f"speed c={self.c} outside (-2 sqrt(omega), 2 sqrt(omega)]")

    @property
    def gamma(self) -> float:
        return gamma_of_b(self.b)

    @property
    def is_endpoint(self) -> bool:
        """True on the algebraic branch ``omega = c**2 / 4``."""
        return self.c > 0 and abs(4.0 * self.omega - self.c**2) <= 1e-13 * 4.0 * self.omega

    @property
    def decay_rate(self) -> float:
        """Exponential decay rate of the squared profile; 0 on the endpoint."""
        return 0.0 if self.is_endpoint else math.sqrt(4.0 * self.omega - self.c**2)

    def _branch_constants(self):
        a = self.decay_rate
        s = math.sqrt(self.c**2 + self.gamma * a * a)
        return a, s


def profile_squared(params: SolitonParams, x) -> np.ndarray:
    """Squared modulus of the soliton profile at ``x``."""
    x = np.asarray(x, dtype=float)
    c, g = params.c, params.gamma
    if params.is_endpoint:
        return 4.0 * c / (c * c * x * x + g)
    a, s = params._branch_constants()
    e = np.exp(-a * np.abs(x))
    # overflow-free form of 2 a^2 / (s cosh(a x) - c)
    den = s * (1.0 + e * e) - 2.0 * c * e
    assert np.all(den > 0)
    return 4.0 * a * a * e / den


def profile_squared_derivative(params: SolitonParams, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    c, g = params.c, params.gamma
    if params.is_endpoint:
        return -8.0 * c**3 * x / (c * c * x * x + g) ** 2
    a, s = params._branch_constants()
    e = np.exp(-a * np.abs(x))
    den = s * (1.0 + e * e) - 2.0 * c * e
    # d/dx of 2a^2/(s cosh - c) = -2a^3 s sinh / (s cosh - c)^2, written with e = exp(-a|x|)
    return -np.sign(x) * 4.0 * a**3 * s * e * (1.0 - e * e) / den**2


def modulus_derivative_squared(params: SolitonParams, x) -> np.ndarray:
    """``|Phi'(x)|^2`` without dividing by the profile (safe in the far tail)."""
    x = np.asarray(x, dtype=float)
    c, g = params.c, params.gamma
    if params.is_endpoint:
        return 4.0 * c**5 * x * x / (c * c * x * x + g) ** 3
    a, s = params._branch_constants()
    e = np.exp(-a * np.abs(x))
    den = s * (1.0 + e * e) - 2.0 * c * e
    return a**4 * s * s * e * (1.0 - e * e) ** 2 / den**3


def cumulative_profile_integral(params: SolitonParams, x) -> np.ndarray:
    """Exact ``int_{-inf}^x |Phi|^2 dy``."""
    x = np.asarray(x, dtype=float)
    g = params.gamma
    if params.is_endpoint:
        return 4.0 / math.sqrt(g) * (np.arctan(params.c * x / math.sqrt(g)) + math.pi / 2)
    a, s = params._branch_constants()
    r = math.sqrt((s + params.c) / (s - params.c))
    return 4.0 / math.sqrt(g) * (np.arctan(r * np.tanh(a * x / 2.0)) + math.atan(r))


def soliton_mass(params: SolitonParams) -> float:
    """Closed-form mass of the soliton on the whole line."""
    g = params.gamma
    if params.is_endpoint:
        return 4.0 * math.pi / math.sqrt(g)
    a, s = params._branch_constants()
    return 8.0 / math.sqrt(g) * math.atan(math.sqrt((s + params.c) / (s - params.c)))


def soliton_phase(params: SolitonParams, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return 0.5 * params.c * x - 0.25 * cumulative_profile_integral(params, x)


def build_soliton(params: SolitonParams, grid: SpectralGrid, warn: bool = True) -> np.ndarray:
    """Sample the soliton field on ``grid``.

    The phase is ``c x / 2 - (1/4) int_{-inf}^x |Phi|^2``, with the integral from
    minus infinity evaluated in closed form, so the global phase convention is
    fixed and independent of the grid.
    """
    x = grid.x
    amp = np.sqrt(profile_squared(params, x))
    u = amp * np.exp(1j * soliton_phase(params, x))
    if warn:
        ratio = profile_squared(params, grid.half_width) / profile_squared(params, 0.0)
        if not params.is_endpoint and ratio > 1e-10:
            warnings.warn(
                f"soliton not decayed at the box edge (|phi(L)|/|phi(0)| = {math.sqrt(ratio):.1e})",
                ResolutionWarning,
                stacklevel=2,
            )
    return u


def soliton_derivative(params: SolitonParams, grid: SpectralGrid) -> np.ndarray:
    """Exact derivative of the soliton at the nodes (no spectral truncation)."""
    x = grid.x
    p2 = profile_squared(params, x)
    amp = np.sqrt(p2)
    damp = profile_squared_derivative(params, x) / (2.0 * amp)
    dphase = 0.5 * params.c - 0.25 * p2
    return (damp + 1j * amp * dphase) * np.exp(1j * soliton_phase(params, x))


def ode_residual(params: SolitonParams, grid: SpectralGrid, u=None) -> float:
    """Max-norm of ``-u'' + omega u + i c u' - i |u|^2 u' - b |u|^4 u`` with spectral derivatives.

    ``u`` defaults to the soliton built on ``grid``.
    """
    if u is None:
        u = build_soliton(params, grid, warn=False)
    r = action_gradient(grid, u, params.omega, params.c, params.b)
    return float(np.max(np.abs(r)))


def periodic_half_width(params: SolitonParams, approx: float) -> float:
    """Half width near ``approx`` at which the sampled soliton is continuous across the box edge.

    The profile is even, so continuity only requires the total phase change
    over ``[-L, L]`` to be a multiple of 2pi.
    """

    def winding(L):
        return (params.c * L - 0.25 * (cumulative_profile_integral(params, L) - cumulative_profile_integral(params, -L))) / (
            2 * math.pi
        )

    n = round(float(winding(approx)))
    if params.c == 0:
        return approx
    lo, hi = approx * 0.5, approx * 1.5
    return float(optimize.brentq(lambda L: winding(L) - n, lo, hi, xtol=1e-14))


# -- tail corrections on the algebraic branch -------------------------------


def _tail_power(n: int, T: float) -> float:
    """``int_T^inf (1 + t^2)^(-n) dt``.

    With ``t = cot(phi)`` this is ``int_0^phi0 sin(phi)^(2n-2) dphi``, an
    incomplete beta function; that form avoids the cancellation of the
    arctan expressions for large ``T``.
    """
    a = n - 0.5
    return 0.5 * special.beta(a, 0.5) * special.betainc(a, 0.5, 1.0 / (1.0 + T * T))


def _tail_mixed(T: float) -> float:
    """``int_T^inf t^2 (1 + t^2)^(-3) dt`` (the modulus-derivative tail)."""
    return 0.5 * special.beta(1.5, 1.5) * special.betainc(1.5, 1.5, 1.0 / (1.0 + T * T))


@dataclass(frozen=True)
class TailCorrections:
    """Integrals over ``|x| > L`` (both tails) of the algebraic soliton."""

    mass: float
    l4_4: float
    l6_6: float
    hdot1_sq: float
    modulus_hdot1_sq: float


def endpoint_tail_corrections(params: SolitonParams, grid: SpectralGrid | float) -> TailCorrections:
    """Analytic tails beyond ``+-L`` of the endpoint soliton's integrals."""
    if not params.is_endpoint:
        raise ValueError("tail corrections apply to the algebraic branch only")
    L = grid.half_width if isinstance(grid, SpectralGrid) else float(grid)
    c, g = params.c, params.gamma
    T = c * L / math.sqrt(g)
    i1, i2, i3 = (_tail_power(n, T) for n in (1, 2, 3))
    m2 = 2 * 4.0 / math.sqrt(g) * i1
    m4 = 2 * 16.0 * c / g**1.5 * i2
    m6 = 2 * 64.0 * c * c / g**2.5 * i3
    dmod = 2 * 4.0 * c * c / g**1.5 * _tail_mixed(T)
    dfull = dmod + c * c / 4 * m2 - c / 4 * m4 + m6 / 16
    return TailCorrections(mass=m2, l4_4=m4, l6_6=m6, hdot1_sq=dfull, modulus_hdot1_sq=dmod)


def soliton_parts(params: SolitonParams, grid: SpectralGrid | None = None) -> FunctionalParts:
    """Functional building blocks of the soliton from its modulus profile.

    Uses ``phi = Phi exp(i theta)`` with ``theta' = c/2 - Phi^2/4``, so no
    numerical derivative is involved.  With ``grid=None`` the integrals are
    taken over the whole line (closed form on the algebraic branch, adaptive
    quadrature otherwise).  With a grid they are rectangle-rule sums over the
    nodes plus, on the algebraic branch, the analytic tails.
    """
    c = params.c
    if grid is None:
        if params.is_endpoint:
            tails = endpoint_tail_corrections(params, 0.0)
            m2, m4, m6, dmod = tails.mass, tails.l4_4, tails.l6_6, tails.modulus_hdot1_sq
        else:
            m2 = soliton_mass(params)
            m4, m6, dmod = _line_integrals(params)
    else:
        x = grid.x
        p2 = profile_squared(params, x)
        m2 = grid.integrate(p2)
        m4 = grid.integrate(p2**2)
        m6 = grid.integrate(p2**3)
        dmod = grid.integrate(modulus_derivative_squared(params, x))
        if params.is_endpoint:
            t = endpoint_tail_corrections(params, grid)
            m2, m4, m6, dmod = m2 + t.mass, m4 + t.l4_4, m6 + t.l6_6, dmod + t.modulus_hdot1_sq
    hdot1 = dmod + c * c / 4 * m2 - c / 4 * m4 + m6 / 16
    return FunctionalParts(
        mass=m2,
        hdot1_sq=hdot1,
        l6_6=m6,
        twist=c / 2 * m2 - m4 / 4,
        quartic=c / 2 * m4 - m6 / 4,
        l4_4=m4,
    )


def _line_integrals(params: SolitonParams):
    a = params.decay_rate
    # the integrands are even and fall below 1e-300 past this point
    xmax = 700.0 / a

    def q(f):
        val, _ = integrate.quad(f, 0.0, xmax, epsabs=0.0, epsrel=2e-14, limit=400, points=[1.0 / a, 5.0 / a, 20.0 / a])
        return 2.0 * val

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        m4 = q(lambda x: profile_squared(params, x) ** 2)
        m6 = q(lambda x: profile_squared(params, x) ** 3)
        dmod = q(lambda x: modulus_derivative_squared(params, x))
    return m4, m6, dmod


# -- scaling and gauge -------------------------------------------------------


def scale_field(grid: SpectralGrid, u, lam: float, warn: bool = True) -> np.ndarray:
    """Mass-critical rescaling ``sqrt(lam) u(lam x)`` on the same grid.

    Values are taken from the trigonometric interpolant of ``u``.  Nodes with
    ``|lam x| >= L`` fall outside the original box; they take the boundary
    value ``u(L) = u(-L)`` so the result stays continuous and no periodic
    image of the interior leaks in.
    """
    if not lam > 0:
        raise ValueError(f"scaling factor must be positive, got {lam}")
    u = grid.check(u)
    if lam == 1.0:
        return u.copy()
    L = grid.half_width
    if warn and lam < 1.0:
        outside = np.abs(grid.x) >= lam * L
        frac = np.sum(np.abs(u[outside]) ** 2) / max(np.sum(np.abs(u) ** 2), 1e-300)
        if frac > 1e-12:
            warnings.warn(f"rescaled support leaves {frac:.1e} of the mass outside the box", ResolutionWarning, stacklevel=2)
    elif warn:
        lost = grid.spectral_tail_fraction(u, band=1.0 / lam)
        if lost > 1e-12:
            warnings.warn(f"rescaling pushes {lost:.1e} of the spectrum past Nyquist", ResolutionWarning, stacklevel=2)
    v = grid.evaluate(u, lam * grid.x[0], lam * grid.dx, grid.num_points)
    pts = lam * grid.x
    outside = (pts < -L) | (pts >= L)
    if outside.any():
        v[outside] = u[0]
    return math.sqrt(lam) * v


def kaup_newell_gauge(grid: SpectralGrid, u) -> np.ndarray:
    """Map to the Kaup-Newell form: ``u exp(-(i/2) int_{-L}^x |u|^2)``.

    The running integral is the trapezoid rule from the left box edge.
    """
    u = grid.check(u)
    a2 = np.abs(u) ** 2
    run = integrate.cumulative_trapezoid(a2, dx=grid.dx, initial=0.0)
    return u * np.exp(-0.5j * run)


# -- degenerate soliton -----------------------------------------------------


@dataclass(frozen=True)
class DegenerateInfo:
    """Degenerate speed ratio ``kappa0(b)`` and the associated threshold data."""

    b: float
    kappa0: float
    threshold_mass: float
    energy_residual: float
    momentum_residual: float

    @property
    def corollary_constant(self) -> float:
        k = self.kappa0
        return k * math.sqrt(1 + k * k) - k * k

    def params(self, omega: float = 1.0) -> SolitonParams:
        """Degenerate soliton parameters at frequency ``omega``."""
        return SolitonParams(omega, 2.0 * self.kappa0 * math.sqrt(omega), self.b)


class BracketError(RuntimeError):
    pass


def _momentum_at(kappa: float, b: float, grid: SpectralGrid | None) -> float:
    p = SolitonParams(1.0, 2.0 * kappa, b)
    if grid is None or p.is_endpoint:
        return soliton_parts(p).momentum
    return momentum(grid, build_soliton(p, grid, warn=False))


def kappa0(b: float, tol: float = 1e-12, grid: SpectralGrid | None = None) -> DegenerateInfo:
    """Speed ratio at which the soliton's energy and momentum both vanish.

    ``kappa0(0) = 1`` (the algebraic soliton).  For ``b > 0`` the momentum of
    ``phi_{1, 2 kappa}`` is bisected on ``(1e-3, 1)``.  By default the
    momentum comes from exact line integrals of the profile; pass ``grid`` to
    bisect the grid momentum of the sampled field instead.
    """
    if b < 0:
        raise ValueError(f"quintic coefficient must be non-negative, got {b}")
    if b == 0:
        k0 = 1.0
    else:
        lo, hi = 1e-3, 1.0
        g_lo, g_hi = _momentum_at(lo, b, grid), _momentum_at(hi, b, grid)
        if not (g_lo > 0 > g_hi):
            raise BracketError(f"momentum does not change sign on ({lo}, {hi}): {g_lo:.3e}, {g_hi:.3e}")
        probes = [_momentum_at(k, b, grid) for k in np.linspace(lo, hi, 9)[1:-1]]
        if np.any(np.diff([g_lo, *probes, g_hi]) >= 0):
            raise BracketError("momentum is not monotone in kappa on the bracket")
        k0 = optimize.bisect(lambda k: _momentum_at(k, b, grid), lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    params = SolitonParams(1.0, 2.0 * k0, b)
    if grid is None or params.is_endpoint:
        parts = soliton_parts(params)
        mass, e_res, p_res = parts.mass, parts.energy(b), parts.momentum
    else:
        trip = conserved(grid, build_soliton(params, grid, warn=False), b)
        mass, e_res, p_res = trip.mass, trip.energy, trip.momentum
    # E = -(c/4) P on the family, so a vanishing momentum forces a vanishing energy
    if abs(p_res) >= tol or abs(e_res) >= tol:
        raise BracketError(f"degenerate residuals too large: E={e_res:.2e}, P={p_res:.2e}")
    return DegenerateInfo(b=float(b), kappa0=float(k0), threshold_mass=float(mass), energy_residual=float(e_res), momentum_residual=float(p_res))
