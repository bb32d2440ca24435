import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from doalf.crlb import (
    CrlbParams, Observation, crlb, crlb_closed_form, crlb_numeric, eta, fim, fim_printed,
    hessian, log_likelihood, observation_at, sampled_fim, score,
)
from doalf.exceptions import DegenerateGeometry, InvalidParameter, SingularFim, SingularTerm

CORNERS = [(0, 0), (100, 0), (100, 100), (0, 100)]


def params(aps=CORNERS, n=2.0, sigma_s=2.0, sigma_phi=math.radians(2), area=1.0):
    return CrlbParams(n, sigma_s, sigma_phi, np.array(aps, float), area)


def numeric_grad(f, theta, h=1e-5):
    t = np.asarray(theta, float)
    return np.array([(f(t + h * e) - f(t - h * e)) / (2 * h) for e in np.eye(2)])


class TestEta:
    def test_frozen_value(self):
        assert eta(2, 2) == pytest.approx(9.430584850580694, rel=1e-14)

    def test_scaling(self):
        assert eta(4, 2) == pytest.approx(4 * eta(2, 2), rel=1e-14)
        assert eta(2, 4) == pytest.approx(eta(2, 2) / 4, rel=1e-14)

    def test_rejects_zero_shadowing(self):
        with pytest.raises(InvalidParameter):
            eta(2, 0)

    def test_params_reject_zero_noise(self):
        with pytest.raises(InvalidParameter):
            params(sigma_phi=0)
        with pytest.raises(InvalidParameter):
            params(sigma_s=0)


class TestLikelihood:
    def test_peak_value_at_truth(self):
        p = params(area=1e4)
        theta = (30.0, 55.0)
        obs = observation_at(theta, p)
        assert log_likelihood(obs, theta, p) == pytest.approx(4 * p.log_kappa, rel=1e-12)

    def test_truth_is_local_max(self):
        p = params()
        theta = np.array([30.0, 55.0])
        obs = observation_at(theta, p)
        base = log_likelihood(obs, theta, p)
        for delta in ([0.1, 0], [0, 0.1], [-0.1, 0.05]):
            assert log_likelihood(obs, theta + delta, p) < base

    def test_coincident_point_raises(self):
        p = params()
        with pytest.raises(DegenerateGeometry):
            fim((0.0, 0.0), p)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(5, 95), st.floats(5, 95), st.integers(0, 2**31))
    def test_score_matches_finite_difference(self, x, y, seed):
        p = params()
        obs = Observation(
            np.random.default_rng(seed).uniform(10, 120, 4),
            np.random.default_rng(seed + 1).uniform(0, 2 * math.pi, 4),
        )
        theta = np.array([x, y])
        # skip points where an observed DoA sits on the wrap seam of the residual
        dphi = obs.doa - np.arctan2(p.aps[:, 1] - y, p.aps[:, 0] - x)
        if np.any(np.abs(np.abs(np.mod(dphi + math.pi, 2 * math.pi) - math.pi) - math.pi) < 1e-2):
            return
        fd = numeric_grad(lambda t: log_likelihood(obs, t, p), theta)
        assert score(theta, obs, p) == pytest.approx(fd, rel=1e-5, abs=1e-6)

    def test_hessian_matches_finite_difference_of_score(self):
        p = params()
        rng = np.random.default_rng(3)
        for _ in range(10):
            theta = rng.uniform(10, 90, 2)
            obs = Observation(rng.uniform(20, 100, 4), rng.uniform(0, 2 * math.pi, 4))
            h = 1e-5
            fd = np.column_stack([
                (score(theta + h * e, obs, p) - score(theta - h * e, obs, p)) / (2 * h) for e in np.eye(2)
            ])
            assert hessian(theta, obs, p) == pytest.approx(fd, rel=1e-5, abs=1e-7)

    def test_radial_single_ap_score(self):
        # AP due east at 10 m; observed 20 m, true bearing: gradient points away from the AP
        p = params(aps=[(10, 0)])
        obs = Observation(np.array([20.0]), np.array([0.0]))
        g = score((0.0, 0.0), obs, p)
        assert g[0] == pytest.approx(-2 * p.eta * math.log(2) / 10, rel=1e-12)
        assert g[1] == pytest.approx(0, abs=1e-15)


class TestFim:
    def test_single_ap_on_axis_is_diagonal(self):
        p = params(aps=[(10, 0)])
        info = fim((0.0, 0.0), p)
        var = p.doa_std_rad**2
        assert info.j_xx == pytest.approx(2 * p.eta / 100, rel=1e-12)
        assert info.j_yy == pytest.approx(1 / (var * 100), rel=1e-12)
        assert info.j_xy == pytest.approx(0, abs=1e-12)

    def test_quarter_turn_swaps_axes(self):
        a = fim((0.0, 0.0), params(aps=[(10, 0)]))
        b = fim((0.0, 0.0), params(aps=[(0, 10)]))
        assert (b.j_xx, b.j_yy) == pytest.approx((a.j_yy, a.j_xx), rel=1e-12)

    def test_symmetric_positive_definite(self):
        p = params()
        rng = np.random.default_rng(4)
        for _ in range(50):
            m = fim(rng.uniform(1, 99, 2), p).matrix
            assert np.allclose(m, m.T)
            assert np.linalg.eigvalsh(m).min() > 0

    def test_rotated_single_ap_eigenvalues(self):
        # one AP gives eigenvalues 2 eta/d^2 and 1/(sigma^2 d^2) at any bearing
        p = params(aps=[(7, 7)])
        m = fim((0.0, 0.0), p).matrix
        d2 = 98.0
        want = sorted([2 * p.eta / d2, 1 / (p.doa_std_rad**2 * d2)])
        assert np.linalg.eigvalsh(m) == pytest.approx(want, rel=1e-10)

    def test_matches_monte_carlo(self):
        p = params()
        theta = (23.0, 61.0)
        mc = sampled_fim(theta, p, 100_000, np.random.default_rng(5))
        exact = fim(theta, p).matrix
        assert np.abs(mc - exact).max() <= 0.02 * np.abs(exact).max()

    def test_scale_law(self):
        p = params()
        theta = np.array([30.0, 40.0])
        for lam in (0.5, 3.0):
            assert crlb(theta * lam, p.scaled(lam)) == pytest.approx(lam**2 * crlb(theta, p), rel=1e-10)


class TestBounds:
    def test_single_ap_value(self):
        p = params(aps=[(10, 0)])
        want = 100 / (2 * p.eta) + p.doa_std_rad**2 * 100
        assert crlb((0.0, 0.0), p) == pytest.approx(want, rel=1e-12)

    def test_numeric_of_diagonal(self):
        from doalf.crlb import FisherInfo
        assert crlb_numeric(FisherInfo(2.0, 0.0, 4.0)) == pytest.approx(0.5 + 0.25)

    def test_singular_matrix_raises(self):
        from doalf.crlb import FisherInfo
        with pytest.raises(SingularFim) as err:
            crlb_numeric(FisherInfo(1.0, 1.0, 1.0), theta=(1.0, 2.0))
        assert err.value.det == 0

    def test_printed_singular_at_diagonal_bearing(self):
        p = params(aps=[(10, 10)])
        with pytest.raises(SingularFim):
            crlb_numeric(fim_printed((0.0, 0.0), p))
        assert math.isfinite(crlb((0.0, 0.0), p))

    @pytest.mark.parametrize("ap", [(10, 0), (10, 3), (-4, 9), (2, -7)])
    def test_closed_form_equals_printed_single_ap(self, ap):
        p = params(aps=[ap])
        assert crlb_closed_form((0.0, 0.0), p) == pytest.approx(
            crlb_numeric(fim_printed((0.0, 0.0), p)), rel=1e-9)

    def test_closed_form_singular_term(self):
        with pytest.raises(SingularTerm):
            crlb_closed_form((0.0, 0.0), params(aps=[(5, 5), (10, 0)]))

    def test_more_doa_noise_loosens_bound(self):
        theta = (30.0, 60.0)
        values = [crlb(theta, params(sigma_phi=math.radians(s))) for s in (0.5, 1, 2, 5, 10)]
        assert values == sorted(values)

    def test_shadowing_and_exponent(self):
        theta = (30.0, 60.0)
        by_sigma = [crlb(theta, params(sigma_s=s)) for s in (1, 2, 3, 4)]
        by_n = [crlb(theta, params(n=n)) for n in (1.5, 2, 2.5, 3)]
        assert by_sigma == sorted(by_sigma)
        assert by_n == sorted(by_n, reverse=True)

    def test_area_does_not_enter(self):
        theta = (30.0, 60.0)
        assert crlb(theta, params(area=1.0)) == crlb(theta, params(area=1e4))
