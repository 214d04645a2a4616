"""Tilted moments, the covariance representation, OU derivatives, W2."""
import math

import numpy as np
import pytest

from logheat import (
    AtomicMeasure,
    CapabilityError,
    NumericalError,
    lemma1_check,
    log_hessian,
    log_hessian_heat,
    make_gaussian_mixture,
    make_perturbed,
    ou_log_derivatives,
    standard_gaussian,
    tilted_moments,
    wasserstein2_1d,
)
from logheat.measures import convolve_gaussian

from conftest import random_atomic, random_mixture, random_perturbed


def two_atoms():
    return AtomicMeasure(dim=1, weights=np.array([0.5, 0.5]),
                         locations=np.array([[0.0], [2.0]]))


class TestTiltedMoments:
    def test_symmetric_two_atom(self):
        tm = tilted_moments(two_atoms(), [1.0], 1.0)
        assert tm.mean[0] == pytest.approx(1.0, abs=1e-12)
        assert tm.covariance[0, 0] == pytest.approx(1.0, abs=1e-12)

    def test_gaussian_closed_form(self):
        g = standard_gaussian(1)
        for z in (0.0, 2.0, -5.0):
            tm = tilted_moments(g, [z], 0.7)
            assert tm.covariance[0, 0] == pytest.approx(0.7 / 1.7, rel=1e-12)
            assert tm.mean[0] == pytest.approx(z / 1.7, rel=1e-12)

    def test_dirac(self):
        a = AtomicMeasure(dim=1, weights=np.array([1.0]), locations=np.array([[0.0]]))
        tm = tilted_moments(a, [3.0], 1.0)
        assert tm.covariance[0, 0] == pytest.approx(0.0, abs=1e-15)

    def test_mass_log_is_convolved_density(self):
        g = make_gaussian_mixture([(0.5, [0.0], 1.0), (0.5, [2.0], 0.5)])
        z, t = 0.7, 1.3
        tm = tilted_moments(g, [z], t)
        c = convolve_gaussian(g, t)
        from logheat import log_density

        assert tm.mass_log == pytest.approx(log_density(c, [z]), abs=1e-12)

    def test_huge_tilt_raises(self):
        with pytest.raises(NumericalError):
            tilted_moments(two_atoms(), [1e160], 1.0)

    def test_perturbed_vs_trapezoid(self):
        pm = make_perturbed(1.0, h_knots=[0.0], h_slopes=[1.0, -1.0])
        z, t = 0.7, 0.8
        tm = tilted_moments(pm, [z], t)
        xs = np.linspace(-30, 30, 400001)
        logv = (-pm.potential(xs) - pm.log_normalizer
                - (xs - z) ** 2 / (2 * t) - 0.5 * math.log(2 * math.pi * t))
        w = np.exp(logv - logv.max())
        dx = xs[1] - xs[0]
        mass = w.sum() * dx
        mean = (w * xs).sum() * dx / mass
        var = (w * (xs - mean) ** 2).sum() * dx / mass
        assert tm.mass_log == pytest.approx(math.log(mass) + logv.max(), abs=1e-9)
        assert tm.mean[0] == pytest.approx(mean, abs=1e-9)
        assert tm.covariance[0, 0] == pytest.approx(var, abs=1e-9)


class TestLogHessianHeat:
    def test_two_atom_threshold(self):
        # value 0 exactly at t = x0^2/4 = 1
        assert log_hessian_heat(two_atoms(), [1.0], 1.0)[0, 0] == pytest.approx(
            0.0, abs=1e-12
        )

    def test_gaussian(self):
        g = standard_gaussian(1)
        for z in (-1.0, 0.0, 2.0):
            assert log_hessian_heat(g, [z], 1.0)[0, 0] == pytest.approx(0.5, rel=1e-12)

    def test_two_atom_below_threshold(self):
        got = log_hessian_heat(two_atoms(), [1.0], 0.9)[0, 0]
        assert got == pytest.approx((1 / 0.9) * (1 - 1 / 0.9), abs=1e-10)

    def test_mixture_consistency_grids(self, rng):
        # analytic Hessian of the convolved mixture vs covariance form
        for _ in range(5):
            m = random_mixture(rng)
            t = float(rng.uniform(0.3, 2.0))
            for z in np.linspace(-4, 4, 41):
                got = log_hessian_heat(m, [z], t)[0, 0]
                direct = -log_hessian(convolve_gaussian(m, t), [z])[0, 0]
                assert got == pytest.approx(direct, abs=1e-8)

    def test_upper_bound_universal(self, rng):
        for maker in (random_mixture, random_atomic, random_perturbed):
            for _ in range(3):
                m = maker(rng)
                t = float(rng.uniform(0.3, 2.0))
                for z in np.linspace(-5, 5, 21):
                    lam = log_hessian_heat(m, [z], t)[0, 0]
                    assert lam <= 1.0 / t + 1e-9

    def test_brascamp_lieb_pure_convex(self, rng):
        # L = 0: tilted variance bounded by 1/(alpha + 1/t)
        for _ in range(5):
            alpha = float(rng.uniform(0.3, 3.0))
            pm = make_perturbed(alpha, v_knots=[0.0], v_slopes=[-0.5, 0.5])
            t = float(rng.uniform(0.3, 2.0))
            for z in np.linspace(-4, 4, 17):
                tm = tilted_moments(pm, [z], t)
                assert tm.covariance[0, 0] <= 1.0 / (alpha + 1.0 / t) + 1e-8

    def test_dim2_consistency(self, rng):
        m = random_mixture(rng, dim=2)
        t = 0.8
        for z in [np.array([0.3, -1.0]), np.array([2.0, 1.0])]:
            got = log_hessian_heat(m, z, t)
            direct = -log_hessian(convolve_gaussian(m, t), z)
            assert np.max(np.abs(got - direct)) < 1e-8


class TestOuDerivatives:
    def test_gaussian_reference(self):
        g = standard_gaussian(1)
        for t in (0.3, 1.0, 2.5):
            for x in (-1.0, 0.0, 2.0):
                v, gr, h = ou_log_derivatives(g, t, [x])
                assert v == pytest.approx(0.0, abs=1e-12)
                assert gr[0] == pytest.approx(0.0, abs=1e-12)
                assert h[0, 0] == pytest.approx(0.0, abs=1e-12)

    def test_translated_gaussian(self):
        gm = make_gaussian_mixture([(1.0, [1.5], 1.0)])
        t = 0.7
        _, gr, h = ou_log_derivatives(gm, t, [0.4])
        assert gr[0] == pytest.approx(1.5 * math.exp(-t), rel=1e-12)
        assert h[0, 0] == pytest.approx(0.0, abs=1e-12)

    def test_scaled_gaussian(self):
        s2 = 4.0
        gs = make_gaussian_mixture([(1.0, [0.0], s2)])
        t = 0.7
        e = math.exp(-2 * t)
        expect = (s2 - 1) * e / (1 + (s2 - 1) * e)
        _, _, h = ou_log_derivatives(gs, t, [0.4])
        assert h[0, 0] == pytest.approx(expect, rel=1e-12)
        # finite-difference cross-check on the value
        eps = 1e-4
        vals = [ou_log_derivatives(gs, t, [0.4 + k * eps])[0] for k in (-1, 0, 1)]
        fd = (vals[0] - 2 * vals[1] + vals[2]) / eps**2
        assert h[0, 0] == pytest.approx(fd, abs=1e-5)

    def test_perturbed_fd_cross_check(self, rng):
        pm = random_perturbed(rng)
        t, x = 0.6, 0.9
        val, gr, h = ou_log_derivatives(pm, t, [x])
        eps = 1e-4
        vals = [ou_log_derivatives(pm, t, [x + k * eps])[0] for k in (-2, -1, 0, 1, 2)]
        fd_g = (vals[3] - vals[1]) / (2 * eps)
        fd_h = (vals[1] - 2 * vals[2] + vals[3]) / eps**2
        assert gr[0] == pytest.approx(fd_g, abs=1e-6)
        assert h[0, 0] == pytest.approx(fd_h, abs=1e-4)


class TestWasserstein:
    def test_diracs(self):
        a = AtomicMeasure(dim=1, weights=np.array([1.0]), locations=np.array([[0.0]]))
        b = AtomicMeasure(dim=1, weights=np.array([1.0]), locations=np.array([[3.0]]))
        assert wasserstein2_1d(a, b) == pytest.approx(3.0)

    def test_translation(self):
        g = standard_gaussian(1)
        gm = make_gaussian_mixture([(1.0, [2.5], 1.0)])
        assert wasserstein2_1d(g, gm) == pytest.approx(2.5, rel=1e-12)

    def test_pair_vs_midpoint(self):
        a = two_atoms()
        b = AtomicMeasure(dim=1, weights=np.array([1.0]), locations=np.array([[1.0]]))
        assert wasserstein2_1d(a, b) == pytest.approx(1.0)

    def test_gaussian_vs_gaussian_quadrature_path(self):
        # non-single-component path goes through the quantile coupling
        g1 = make_gaussian_mixture([(0.5, [0.0], 1.0), (0.5, [0.0], 1.0)])
        gm = make_gaussian_mixture([(1.0, [2.0], 4.0)])
        assert wasserstein2_1d(g1, gm) == pytest.approx(math.hypot(2.0, 1.0), abs=5e-3)

    def test_unsupported_dim(self):
        g2 = standard_gaussian(2)
        with pytest.raises(CapabilityError):
            wasserstein2_1d(g2, g2)


class TestLemma1:
    def test_tight_case(self):
        a = two_atoms()
        b = AtomicMeasure(dim=1, weights=np.array([1.0]), locations=np.array([[1.0]]))
        lhs, rhs, slack = lemma1_check(a, b)
        assert lhs == pytest.approx(1.0)
        assert rhs == pytest.approx(1.0)
        assert slack == pytest.approx(0.0, abs=1e-10)

    def test_identical_measures(self, rng):
        m = random_mixture(rng)
        lhs, rhs, slack = lemma1_check(m, m)
        _, var = __import__("logheat").mean_variance_1d(m)
        assert rhs == pytest.approx(var, rel=1e-6)

    def test_gaussian_pair_frozen(self):
        # N(0,1) vs N(5,4): W2 = sqrt(26), rhs = (sqrt(26)+2)^2   [DERIVED]
        g = standard_gaussian(1)
        gm = make_gaussian_mixture([(1.0, [5.0], 4.0)])
        lhs, rhs, slack = lemma1_check(g, gm)
        assert lhs == pytest.approx(1.0)
        assert rhs == pytest.approx((math.sqrt(26.0) + 2.0) ** 2, rel=1e-12)
        assert slack >= -1e-10

    def test_randomized_slack(self, rng):
        makers = (random_mixture, random_atomic, random_perturbed)
        for i in range(200):
            mu = makers[i % 3](rng)
            nu = makers[(i + 1) % 3](rng)
            _, _, slack = lemma1_check(mu, nu)
            assert slack >= -1e-10
