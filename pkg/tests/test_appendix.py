"""Endpoint-singular frequency superposition: growth rates and L^pL^q region."""

import cmath
import math

import mpmath
import numpy as np
import pytest

from disperse_lab import appendix, special
from disperse_lab.appendix import (
    delta_limit_consistency,
    lpq_region,
    lr_membership,
    lr_membership_quadrature,
    min_scaling_p,
    necessary_p_bound,
    phi_expected_space_exponent,
    phi_space_fit,
    psi_expected_time_exponent,
    psi_time_fit,
    singular_phi,
    singular_psi,
    truncated_lplq,
)

INF = math.inf


def mpmath_oracle(delta, n, x, t):
    """Direct high-precision quadrature of the defining integral, with the
    endpoint singularity removed by the same power substitution."""
    nu = special.order_from_dim(n)
    pw = 1.0 / (1.0 - delta)

    # with w - 1 = v^{1/(1-delta)}: (w-1)^{-delta} dw = pw dv exactly
    def f(v):
        w = 1.0 + v ** pw
        return mpmath.exp(-1j * t * w * w) * mpmath.besselj(nu, w * x) * pw

    val = mpmath.quad(f, [0, 1], maxdegree=10)
    return x ** ((2 - n) / 2.0) * complex(val)


class TestEvaluation:
    @pytest.mark.parametrize("n,delta", [(2, 0.3), (3, 0.5), (3, 0.7)])
    def test_against_mpmath(self, n, delta):
        for x, t in ((0.5, 0.0), (3.0, 1.0), (12.0, 2.0), (7.0, 8.0),
                     (30.0, 0.5)):
            got = singular_psi(delta, n, x, t)
            want = mpmath_oracle(delta, n, x, t)
            assert abs(got - want) <= 1e-3 * max(abs(want), 1e-8)

    def test_regime_overlap_consistency(self):
        # large-t contour vs direct quadrature on their common domain
        for x, t in ((5.0, 60.0), (20.0, 120.0)):
            a = appendix._contour_integral_large_t(0.5, 3, x, t)
            b = appendix._direct_integral(0.5, 3, x, t)
            assert abs(a - b) <= 1e-7 * max(abs(b), 1e-10)
        # large-x contour vs direct quadrature
        for x, t in ((60.0, 2.0), (200.0, 10.0)):
            a = appendix._contour_integral_large_x(0.5, 3, x, t)
            b = appendix._direct_integral(0.5, 3, x, t)
            assert abs(a - b) <= 1e-7 * max(abs(b), 1e-10)

    def test_small_delta_limit(self):
        assert delta_limit_consistency(3, 0.5, delta=0.05) <= 1e-2

    def test_input_validation(self):
        with pytest.raises(ValueError):
            singular_psi(1.2, 3, 1.0, 0.0)
        with pytest.raises(ValueError):
            singular_psi(0.5, 3, -1.0, 0.0)


class TestRates:
    @pytest.mark.parametrize("n,delta", [(2, 0.5), (3, 0.3)])
    def test_datum_space_exponent(self, n, delta):
        fit = phi_space_fit(delta, n)
        want = phi_expected_space_exponent(delta, n)
        assert fit.fitted_exponent == pytest.approx(want, abs=0.1)

    @pytest.mark.parametrize("n,delta", [(2, 0.5), (3, 0.7)])
    def test_solution_time_exponent(self, n, delta):
        fit = psi_time_fit(delta, n)
        want = psi_expected_time_exponent(delta)
        assert fit.fitted_exponent == pytest.approx(want, abs=0.1)


class TestLrMembership:
    def test_quadrature_agrees_with_closed_form(self):
        n = 2
        for delta in (0.2, 0.5, 0.8):
            for r in (1.6, 2.2, 3.0):
                # skip points too close to the membership boundary for a
                # fitted-exponent verdict to be trustworthy
                if abs(delta - ((n + 1) / 2.0 - n / r)) < 0.08:
                    continue
                assert lr_membership_quadrature(delta, n, r) \
                    == lr_membership(delta, n, r)


class TestNecessaryPBound:
    def test_values(self):
        for n in range(2, 7):
            assert necessary_p_bound(2.0, n) == pytest.approx(2.0, abs=1e-12)
        assert necessary_p_bound(10.0 / 3.0, 2) == pytest.approx(10.0, rel=1e-9)
        assert math.isinf(necessary_p_bound(4.0, 2))

    def test_continuity_from_above_at_two(self):
        vals = [necessary_p_bound(2.0 + eps, 3) for eps in (0.1, 0.01, 0.001)]
        assert vals[0] > vals[1] > vals[2] > 2.0
        assert vals[2] == pytest.approx(2.0, abs=0.01)

    def test_rejects_small_r(self):
        with pytest.raises(ValueError):
            necessary_p_bound(1.0, 3)


class TestLpqRegion:
    def test_monotone_in_p_and_q(self):
        delta, n = 0.5, 3
        v = lpq_region(delta, n, 4.0, 6.0)
        if v.member:
            assert lpq_region(delta, n, 8.0, 6.0).member
            assert lpq_region(delta, n, 4.0, 12.0).member

    def test_binding_labels(self):
        delta, n = 0.5, 3
        low_q = lpq_region(delta, n, 10.0, 1.5)
        assert not low_q.member and low_q.binding.startswith("spatial")
        low_p = lpq_region(delta, n, 1.2, 50.0)
        assert not low_p.member
        ok = lpq_region(delta, n, 10.0, 50.0)
        assert ok.member and ok.binding == "interior"

    def test_min_scaling_p_consistent_with_necessary_bound(self):
        # the worst admissible density sits at the L^r boundary
        # delta* = (n+1)/2 - n/r, where the temporal threshold 1/(1-delta*)
        # reproduces the necessary lower bound on p
        n, r = 2, 3.0
        d_star = (n + 1) / 2.0 - n / r
        q_grid = np.geomspace(2.0, 400.0, 120)
        for eps in (0.02, 0.005):
            got = min_scaling_p(n, r, q_grid, [d_star - eps])
            assert got >= 1.0 / (1.0 - d_star + eps) - 1e-9
        assert 1.0 / (1.0 - d_star) == pytest.approx(
            necessary_p_bound(r, n), rel=1e-12)
        # milder densities admit smaller p: the family-wide minimum is below
        d_grid = np.linspace(0.05, d_star - 0.05, 20)
        assert min_scaling_p(n, r, q_grid, d_grid) < necessary_p_bound(r, n)

    def test_truncated_norm_growth_detects_nonmembership(self):
        # inside the region the truncated norm saturates as the window grows;
        # outside it keeps growing
        delta, n = 0.5, 2
        good = (6.0, 40.0)     # member
        bad = (1.4, 40.0)      # temporal failure: p < 1/(1-delta) = 2
        assert lpq_region(delta, n, *good).member
        assert not lpq_region(delta, n, *bad).member
        field = {}
        vals_good = []
        vals_bad = []
        for t_hi in (50.0, 400.0):
            vals_good.append(truncated_lplq(delta, n, good[0], good[1],
                                            (1.0, t_hi), 30.0, field=field))
            vals_bad.append(truncated_lplq(delta, n, bad[0], bad[1],
                                           (1.0, t_hi), 30.0, field=field))
        growth_good = vals_good[1] / vals_good[0]
        growth_bad = vals_bad[1] / vals_bad[0]
        assert growth_bad > growth_good
        assert growth_good <= 1.2
        assert growth_bad >= 1.5
