import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, optimize

from dnlslab.functionals import conserved, mass, momentum, parts_of
from dnlslab.grid import ResolutionWarning, SpectralGrid
from dnlslab.soliton import (
    SolitonParams,
    build_soliton,
    cumulative_profile_integral,
    endpoint_tail_corrections,
    gamma_of_b,
    kappa0,
    kaup_newell_gauge,
    modulus_derivative_squared,
    ode_residual,
    periodic_half_width,
    profile_squared,
    profile_squared_derivative,
    scale_field,
    soliton_derivative,
    soliton_mass,
    soliton_parts,
)

from conftest import gaussian_field


class TestGamma:
    @pytest.mark.parametrize("b, expected", [(0.0, 1.0), (3.0 / 16.0, 2.0), (3.0, 17.0)])
    def test_values(self, b, expected):
        assert gamma_of_b(b) == pytest.approx(expected, rel=1e-15)

    def test_negative_b_rejected(self):
        with pytest.raises(ValueError):
            gamma_of_b(-0.1)


class TestParams:
    @pytest.mark.parametrize("omega, c, b", [(1, 2.0001, 0), (1, -2, 0), (0, 0, 0), (-1, 0, 0), (1, 0, -1), (4, 5, 0)])
    def test_inadmissible(self, omega, c, b):
        with pytest.raises(ValueError):
            SolitonParams(omega, c, b)

    def test_branches(self):
        assert SolitonParams(1, 2).is_endpoint
        assert SolitonParams(4, 4, 1).is_endpoint
        assert not SolitonParams(1, 1.999).is_endpoint
        assert not SolitonParams(1, -1.999).is_endpoint
        assert SolitonParams(1, 1).decay_rate == pytest.approx(math.sqrt(3))
        assert SolitonParams(1, 2).decay_rate == 0.0


class TestProfile:
    def test_endpoint_peak(self):
        assert profile_squared(SolitonParams(1, 2), 0.0) == pytest.approx(8.0, rel=1e-15)

    def test_zero_speed_is_sech(self):
        x = np.linspace(-10, 10, 401)
        p = profile_squared(SolitonParams(1, 0), x)
        assert np.max(np.abs(p - 4 / np.cosh(2 * x))) < 1e-14
        assert p[200] == pytest.approx(4.0)

    def test_positive_speed_peak(self):
        assert profile_squared(SolitonParams(1, 1), 0.0) == pytest.approx(6.0, rel=1e-14)

    def test_against_textbook_cosh_form(self):
        # independent evaluation of 2(4w - c^2) / (sqrt(c^2 + g(4w - c^2)) cosh(sqrt(4w - c^2) x) - c)
        x = np.linspace(-8, 8, 161)
        for om, c, b in [(1, 1, 0.5), (9, -3, 0.2), (2, 0.3, 1)]:
            d = 4 * om - c * c
            g = 1 + 16 * b / 3
            ref = 2 * d / (math.sqrt(c * c + g * d) * np.cosh(math.sqrt(d) * x) - c)
            assert np.max(np.abs(profile_squared(SolitonParams(om, c, b), x) - ref)) < 1e-13 * ref.max()

    def test_far_tail_does_not_overflow(self):
        p = profile_squared(SolitonParams(1, 0), np.array([1e3, -1e4]))
        assert np.all(np.isfinite(p)) and np.all(p >= 0)

    @pytest.mark.parametrize("params", [SolitonParams(1, 1, 0.5), SolitonParams(1, 2, 0), SolitonParams(2, -1, 1)])
    def test_derivatives_against_finite_differences(self, params):
        x = np.linspace(-4, 4, 81) + 0.0123
        h = 1e-5
        fd = (profile_squared(params, x + h) - profile_squared(params, x - h)) / (2 * h)
        assert np.max(np.abs(fd - profile_squared_derivative(params, x))) < 1e-7
        amp = lambda y: np.sqrt(profile_squared(params, y))  # noqa: E731
        fd_amp = (amp(x + h) - amp(x - h)) / (2 * h)
        assert np.max(np.abs(fd_amp**2 - modulus_derivative_squared(params, x))) < 1e-7

    @pytest.mark.parametrize("params", [SolitonParams(1, 1, 0.5), SolitonParams(9, -3, 0.2), SolitonParams(1, 2, 0)])
    def test_cumulative_integral_against_quadrature(self, params):
        for x in (-3.0, 0.0, 0.7, 5.0):
            val, _ = integrate.quad(lambda y: profile_squared(params, y), -np.inf, x, epsabs=1e-13, epsrel=1e-12, limit=500)
            assert cumulative_profile_integral(params, x) == pytest.approx(val, rel=1e-9, abs=1e-11)
        assert cumulative_profile_integral(params, 1e8) == pytest.approx(soliton_mass(params), rel=1e-7)

    @pytest.mark.parametrize("k", range(2, 7))
    def test_branch_continuity(self, k):
        x = np.array([0.0, 0.5, 1.0, 3.0])
        near = profile_squared(SolitonParams(1, 2 * (1 - 10.0**-k)), x)
        edge = profile_squared(SolitonParams(1, 2), x)
        err = np.max(np.abs(near - edge))
        # gap closes like the square of the distance to the edge times x^2 growth; generous linear bound
        assert err < 50 * 10.0**-k


class TestBuild:
    @pytest.mark.parametrize("params", [SolitonParams(1, 1, 0.5), SolitonParams(1, 2, 0), SolitonParams(1, -1.5, 2)])
    def test_modulus_is_profile(self, grid40, params):
        u = build_soliton(params, grid40, warn=False)
        assert np.max(np.abs(np.abs(u) - np.sqrt(profile_squared(params, grid40.x)))) < 1e-12
        assert np.max(np.abs(np.abs(u) ** 2 - profile_squared(params, grid40.x))) < 1e-12

    def test_zero_speed_phase(self, grid40):
        p = SolitonParams(1, 0)
        u = build_soliton(p, grid40)
        # for c = 0 the phase is -(1/4) int_{-inf}^x Phi^2; compare at a few nodes
        for j in (0, 300, 512, 700, 1023):
            x = grid40.x[j]
            run = integrate.quad(lambda y: profile_squared(p, y), -np.inf, x, epsabs=1e-14, epsrel=1e-13, limit=400)[0]
            assert abs(u[j] / abs(u[j]) - np.exp(-0.25j * run)) < 1e-10

    def test_ode_residual_reference(self):
        assert ode_residual(SolitonParams(1, 1, 0.5), SpectralGrid(40.0, 4096)) < 1e-6

    @pytest.mark.parametrize("params", [SolitonParams(16, 0, 0), SolitonParams(9, -3, 0.2), SolitonParams(4, 3, 1)])
    def test_ode_residual_converges_spectrally(self, params):
        r1 = ode_residual(params, SpectralGrid(40.0, 1024))
        r2 = ode_residual(params, SpectralGrid(40.0, 2048))
        assert r2 < r1 / 100

    def test_exact_derivative_matches_spectral(self, grid40):
        p = SolitonParams(1, 1, 0.5)
        u = build_soliton(p, grid40)
        assert np.max(np.abs(grid40.derivative(u) - soliton_derivative(p, grid40))) < 1e-10

    def test_small_box_warns(self):
        with pytest.warns(ResolutionWarning):
            build_soliton(SolitonParams(1, 1.9), SpectralGrid(5.0, 256))

    def test_periodic_half_width_closes_phase(self):
        p = SolitonParams(1, 2, 0)
        L = periodic_half_width(p, 100.0)
        assert 50 < L < 150
        phase = lambda x: 0.5 * p.c * x - 0.25 * cumulative_profile_integral(p, x)  # noqa: E731
        winding = (phase(L) - phase(-L)) / (2 * math.pi)
        assert abs(winding - round(winding)) < 1e-10


class TestScaling:
    def test_identity(self, grid40, rng):
        f = gaussian_field(grid40, rng)
        assert np.array_equal(scale_field(grid40, f, 1.0), f)

    @pytest.mark.parametrize("lam", [0.5, 0.8, 1.3, 2.0])
    def test_mass_preserved(self, grid40, rng, lam):
        f = gaussian_field(grid40, rng)
        assert mass(grid40, scale_field(grid40, f, lam)) == pytest.approx(mass(grid40, f), rel=1e-10)

    def test_rejects_nonpositive(self, grid40):
        with pytest.raises(ValueError):
            scale_field(grid40, np.ones(1024), 0.0)

    @pytest.mark.parametrize("omega", [0.5, 2.0, 4.0])
    def test_degenerate_family_is_one_orbit(self, degenerate, omega):
        info = degenerate[0.5]
        g = SpectralGrid(40.0, 2048)
        base = build_soliton(info.params(1.0), g)
        scaled = scale_field(g, base, math.sqrt(omega))
        direct = build_soliton(info.params(omega), g)
        assert np.max(np.abs(scaled - direct)) < 1e-8

    @given(seed=st.integers(0, 10**6), lam=st.floats(0.5, 2.0))
    def test_scaling_laws_on_arbitrary_fields(self, seed, lam):
        g = SpectralGrid(20.0, 512)
        f = gaussian_field(g, np.random.default_rng(seed))
        fl = scale_field(g, f, lam)
        a, s = parts_of(g, f), parts_of(g, fl)
        b = 0.7
        assert s.mass == pytest.approx(a.mass, rel=1e-8)
        assert s.momentum == pytest.approx(lam * a.momentum, rel=1e-8, abs=1e-8 * a.mass)
        scale = a.hdot1_sq + abs(a.quartic) + b * a.l6_6
        assert abs(s.energy(b) - lam**2 * a.energy(b)) < 1e-8 * lam**2 * scale

    def test_warns_when_mass_leaves_box(self):
        g = SpectralGrid(10.0, 256)
        f = np.exp(-((g.x / 3) ** 2))
        with pytest.warns(ResolutionWarning):
            scale_field(g, f, 0.3)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            scale_field(g, f, 0.3, warn=False)


class TestDegenerate:
    def test_cubic_case(self, degenerate):
        info = degenerate[0.0]
        assert info.kappa0 == 1.0
        assert info.threshold_mass == pytest.approx(4 * math.pi, rel=1e-14)
        assert info.corollary_constant == pytest.approx(math.sqrt(2) - 1, abs=1e-15)

    @pytest.mark.parametrize("b", [0.5, 1.0])
    def test_quintic_case(self, degenerate, b):
        info = degenerate[b]
        assert 0 < info.kappa0 < 1
        assert abs(info.energy_residual) < 1e-12 and abs(info.momentum_residual) < 1e-12
        assert info.threshold_mass == pytest.approx(soliton_mass(info.params()), rel=1e-14)

    @pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
    @pytest.mark.parametrize("b", [0.25, 0.5, 1.0, 2.0])
    def test_root_against_independent_quadrature(self, b):
        # P(phi_{1, 2k}) = -(c/2) M + (1/4) int Phi^4; solve it with brute-force quadrature
        def p_of(k):
            prm = SolitonParams(1.0, 2 * k, b)
            f2 = lambda x: profile_squared(prm, x)  # noqa: E731
            m2 = integrate.quad(f2, -np.inf, np.inf, epsabs=0, epsrel=1e-13, limit=400)[0]
            m4 = integrate.quad(lambda x: f2(x) ** 2, -np.inf, np.inf, epsabs=0, epsrel=1e-13, limit=400)[0]
            return -k * m2 + 0.25 * m4

        ref = optimize.brentq(p_of, 1e-3, 0.999999, xtol=1e-14)
        assert kappa0(b).kappa0 == pytest.approx(ref, abs=1e-10)

    def test_grid_route_agrees(self):
        g = SpectralGrid(40.0, 1024)
        assert kappa0(0.5, grid=g).kappa0 == pytest.approx(kappa0(0.5).kappa0, abs=1e-12)

    def test_grid_energy_and_momentum_vanish(self, degenerate, grid40):
        for b in (0.5, 1.0):
            trip = conserved(grid40, build_soliton(degenerate[b].params(), grid40), b)
            assert abs(trip.energy) < 1e-10 and abs(trip.momentum) < 1e-10

    def test_negative_b(self):
        with pytest.raises(ValueError):
            kappa0(-1.0)


class TestGauge:
    def test_modulus_and_mass(self, grid40, rng):
        u = gaussian_field(grid40, rng)
        psi = kaup_newell_gauge(grid40, u)
        assert np.max(np.abs(np.abs(psi) - np.abs(u))) < 1e-14
        assert mass(grid40, psi) == pytest.approx(mass(grid40, u), rel=1e-12)

    def test_real_input_phase_decreases(self, grid40):
        u = 1 / np.cosh(grid40.x)
        phase = np.unwrap(np.angle(kaup_newell_gauge(grid40, u)))
        assert np.all(np.diff(phase) <= 1e-15) and phase[-1] < phase[0]
        run = integrate.cumulative_trapezoid(u**2, grid40.x, initial=0.0)
        assert np.max(np.abs(phase + 0.5 * run)) < 1e-12


class TestEndpointTails:
    def test_mass_tail_closed_form(self):
        p = SolitonParams(1, 2, 0)
        for L in (10.0, 50.0, 400.0):
            t = endpoint_tail_corrections(p, L)
            # each side carries 4 (pi/2 - arctan 2L) ~ 2/L
            assert t.mass == pytest.approx(8 * (math.pi / 2 - math.atan(2 * L)), rel=1e-12)
            assert t.mass == pytest.approx(4 / L, rel=1 / L)

    def test_tails_vanish(self):
        p = SolitonParams(1, 2, 0)
        t = [endpoint_tail_corrections(p, L) for L in (10.0, 100.0, 1000.0)]
        for name in ("mass", "l4_4", "l6_6", "hdot1_sq", "modulus_hdot1_sq"):
            vals = [getattr(x, name) for x in t]
            assert vals[0] > vals[1] > vals[2] > 0

    def test_other_tails_against_quadrature(self):
        p = SolitonParams(1, 2, 0.5)
        L = 20.0
        t = endpoint_tail_corrections(p, L)
        f2 = lambda x: profile_squared(p, x)  # noqa: E731
        q = lambda f: 2 * integrate.quad(f, L, np.inf, epsabs=0, epsrel=1e-12)[0]  # noqa: E731
        assert t.l4_4 == pytest.approx(q(lambda x: f2(x) ** 2), rel=1e-9)
        assert t.l6_6 == pytest.approx(q(lambda x: f2(x) ** 3), rel=1e-9)
        assert t.modulus_hdot1_sq == pytest.approx(q(lambda x: modulus_derivative_squared(p, x)), rel=1e-9)

    def test_far_tails_keep_relative_accuracy(self):
        p = SolitonParams(1, 2, 0)
        L = 1e5
        t = endpoint_tail_corrections(p, L)
        # Phi^2 ~ 2 / x^2 and |Phi'|^2 ~ 2 / x^4
        assert t.l4_4 * L**3 == pytest.approx(2 * 4.0 / 3, rel=1e-8)
        assert t.l6_6 * L**5 == pytest.approx(2 * 8.0 / 5, rel=1e-8)
        assert t.modulus_hdot1_sq * L**3 == pytest.approx(2 * 2.0 / 3, rel=1e-8)

    def test_corrected_mass_on_large_box(self):
        g = SpectralGrid(200.0, 8192)
        assert abs(soliton_parts(SolitonParams(1, 2, 0), g).mass - 4 * math.pi) < 1e-8

    def test_exponential_branch_rejected(self):
        with pytest.raises(ValueError):
            endpoint_tail_corrections(SolitonParams(1, 1), 10.0)


class TestLineIntegrals:
    @pytest.mark.parametrize("params", [SolitonParams(1, 1, 0.5), SolitonParams(2, -1, 1), SolitonParams(9, -3, 0.2)])
    def test_line_and_grid_routes_agree(self, params):
        grid40 = SpectralGrid(40.0, 2048)
        exact = soliton_parts(params)
        nodes = soliton_parts(params, grid40)
        spectral = parts_of(grid40, build_soliton(params, grid40))
        for name in ("mass", "hdot1_sq", "l6_6", "twist", "quartic"):
            ref = getattr(exact, name)
            assert getattr(nodes, name) == pytest.approx(ref, rel=1e-11, abs=1e-12)
            assert getattr(spectral, name) == pytest.approx(ref, rel=1e-10, abs=1e-11)

    def test_mass_against_quadrature(self):
        for params in (SolitonParams(1, 1, 0.5), SolitonParams(1, -1.9, 0), SolitonParams(3, 0.2, 2)):
            ref = integrate.quad(lambda x: profile_squared(params, x), -np.inf, np.inf, epsabs=0, epsrel=1e-13, limit=400)[0]
            assert soliton_mass(params) == pytest.approx(ref, rel=1e-10)

    def test_momentum_sign_of_real_soliton(self, grid40):
        # c = 0 soliton: P = int Phi^4 / 4 > 0 from the phase gradient -Phi^2/4
        u = build_soliton(SolitonParams(1, 0), grid40)
        ref = 0.25 * grid40.integrate(profile_squared(SolitonParams(1, 0), grid40.x) ** 2)
        assert momentum(grid40, u) == pytest.approx(ref, rel=1e-10)
