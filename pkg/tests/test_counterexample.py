"""Heavy-tail certificates and the two-atom threshold analysis."""
import math

import numpy as np
import pytest

from logheat import (
    SearchError,
    ValidationError,
    build_counterexample,
    split_function_F,
    tilted_moments,
    two_atom_analysis,
    variance_certificate,
)


def psi_zero(x):
    return 0.0


def psi_linear(x):
    return x


class TestBuild:
    def test_atom_positions_and_weights(self):
        m = build_counterexample(psi_zero, truncation=10)
        assert m.locations[:5].tolist() == [0.0, 1.0, 3.0, 6.0, 10.0]
        w = np.exp(m.log_weights)
        expect = 1.0 / (np.arange(11) + 1.0) ** 2
        expect /= expect.sum()
        assert np.allclose(w, expect, atol=1e-14)
        # gaps grow linearly
        assert np.allclose(np.diff(m.locations), np.arange(1, 11))

    def test_exp_psi_moment_linear(self):
        # series oracle: Z = sum (i+1)^-2 e^{-x_i}; moment = (pi^2/6)/Z
        m = build_counterexample(psi_linear, truncation=60)
        i = np.arange(61)
        xs = i * (i + 1) / 2.0
        Z = np.sum(np.exp(-2 * np.log(i + 1.0) - xs))
        assert m.exp_psi_moment == pytest.approx((math.pi**2 / 6) / Z, rel=1e-10)
        assert m.exp_psi_moment == pytest.approx(1.4986, abs=1e-4)

    def test_exp_psi_moment_quadratic(self):
        m = build_counterexample(lambda x: x * x, truncation=60)
        i = np.arange(61)
        xs = i * (i + 1) / 2.0
        Z = np.sum(np.exp(-2 * np.log(i + 1.0) - xs * xs))
        assert m.exp_psi_moment == pytest.approx((math.pi**2 / 6) / Z, rel=1e-10)

    def test_decreasing_psi_rejected(self):
        with pytest.raises(ValidationError):
            build_counterexample(lambda x: -x, truncation=5)
        with pytest.raises(ValidationError):
            build_counterexample(lambda x: 10.0 - x, truncation=10)


class TestSplitFunction:
    def test_nonnegative_at_zero(self):
        m = build_counterexample(psi_zero, truncation=30)
        for j in (1, 5, 15):
            assert split_function_F(m, 1.0, j, 0.0) >= 0.0

    def test_negative_at_large_z(self):
        m = build_counterexample(psi_zero, truncation=30)
        assert split_function_F(m, 1.0, 5, 200.0) < 0.0

    def test_two_atom_closed_form_root(self):
        # truncation 2 keeps three atoms; use j = 1 so the root solves
        # w0-tilt = (w1+w2)-tilt; check sign change around the j=1 gap
        m = build_counterexample(psi_zero, truncation=2)
        t = 1.0
        f = lambda z: split_function_F(m, t, 1, z)
        # exact root of the degenerate two-group split via bisection oracle
        lo, hi = 0.0, 10.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if f(mid) > 0:
                lo = mid
            else:
                hi = mid
        z0 = 0.5 * (lo + hi)
        assert f(z0) == pytest.approx(0.0, abs=1e-12)


class TestVarianceCertificate:
    @pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("M", [5.0, 10.0])
    def test_linear_psi_certificates(self, t, M):
        m = build_counterexample(psi_linear, truncation=60)
        cert = variance_certificate(m, t, M)
        assert cert.variance >= M * M * (1 - 1e-6)
        assert cert.curvature <= (1 - M * M / t) / t + 1e-6
        # definitional identity
        assert cert.curvature == pytest.approx(
            (1 - cert.variance / t) / t, abs=1e-10
        )
        # half-mass split at z*
        l = m.log_weights + cert.z_star * m.locations / t - m.locations**2 / (2 * t)
        w = np.exp(l - l.max())
        below = w[: cert.j].sum() / w.sum()
        assert below == pytest.approx(0.5, abs=1e-9)
        # gap property of the atom sequence
        assert m.locations[cert.j] - m.locations[cert.j - 1] == cert.j

    def test_t1_m10_below_minus_99(self):
        m = build_counterexample(psi_zero, truncation=60)
        cert = variance_certificate(m, 1.0, 10.0)
        assert cert.curvature <= -99.0 + 1e-6

    def test_small_target(self):
        m = build_counterexample(psi_zero, truncation=60)
        cert = variance_certificate(m, 0.5, 1.0)
        assert cert.j <= 5
        assert cert.variance >= 1.0 - 1e-6

    def test_monotone_refutation(self):
        m = build_counterexample(psi_zero, truncation=120)
        curvs = [variance_certificate(m, 1.0, M).curvature for M in (5.0, 10.0, 20.0)]
        assert curvs[0] > curvs[1] > curvs[2]

    def test_variance_matches_tilted_moments(self):
        m = build_counterexample(psi_linear, truncation=60)
        cert = variance_certificate(m, 1.0, 5.0)
        tm = tilted_moments(m, [cert.z_star], 1.0)
        assert cert.variance == pytest.approx(tm.covariance[0, 0], rel=1e-12)

    def test_truncation_too_small(self):
        m = build_counterexample(psi_zero, truncation=10)
        with pytest.raises((ValidationError, SearchError)):
            variance_certificate(m, 1.0, 50.0)


class TestTwoAtom:
    def test_threshold_case(self):
        rec = two_atom_analysis(2.0, 0.5, 0.5, 1.0)
        assert rec.z_bar == pytest.approx(1.0)
        assert rec.curvature_at_z_bar == pytest.approx(0.0, abs=1e-10)
        assert rec.grid_min_curvature >= -1e-9
        assert rec.argmin_z == pytest.approx(1.0, abs=1e-6)

    def test_below_threshold(self):
        rec = two_atom_analysis(2.0, 0.5, 0.5, 0.9)
        expect = (1 / 0.9) * (1 - 4.0 / 3.6)
        assert rec.curvature_at_z_bar == pytest.approx(expect, abs=1e-10)
        assert rec.curvature_at_z_bar == pytest.approx(-0.12346, abs=1e-5)
        assert rec.grid_min_curvature < -0.1

    def test_weight_independence(self):
        rec = two_atom_analysis(2.0, 0.9, 0.1, 1.0)
        assert rec.curvature_at_z_bar == pytest.approx(0.0, abs=1e-10)
        assert rec.z_bar == pytest.approx(1.0 + math.log(9.0) / 2.0)

    @pytest.mark.parametrize("x0", [1.0, 2.0, 5.0])
    @pytest.mark.parametrize("w", [(0.5, 0.5), (0.9, 0.1)])
    def test_both_directions(self, x0, w):
        t_hi = x0 * x0 / 4.0
        rec_hi = two_atom_analysis(x0, w[0], w[1], t_hi)
        assert rec_hi.grid_min_curvature >= -1e-9
        rec_lo = two_atom_analysis(x0, w[0], w[1], 0.9 * t_hi)
        assert rec_lo.grid_min_curvature < 0.0

    def test_validation(self):
        with pytest.raises(ValidationError):
            two_atom_analysis(0.0, 0.5, 0.5, 1.0)
