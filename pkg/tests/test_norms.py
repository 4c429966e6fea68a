"""Weighted-norm evaluation, divergence certification, threshold scans."""

import math

import numpy as np
import pytest

from disperse_lab import norms, profiles, special
from disperse_lab.norms import (
    DivergentNormError,
    FamilySpec,
    empirical_threshold,
    herglotz_decompose,
    membership_scan,
    norm_report,
    norm_X,
    norm_Ym,
    oscillating_power,
)
from disperse_lab.profiles import RadialProfile


class TestHomogeneityAndDilation:
    def test_absolute_homogeneity(self):
        p = profiles.bump(1.0, 2.0)
        x1, x2 = norm_X(p, 3)
        for lam in (2.0, 1.0 / 3.0, 1j, 0.3 - 0.4j):
            y1, y2 = norm_X(p.scale(lam), 3)
            assert y1 == pytest.approx(abs(lam) * x1, rel=1e-10)
            assert y2 == pytest.approx(abs(lam) * x2, rel=1e-10)
        for m in (0, 2, 3):
            base = norm_Ym(p, 3, m)
            assert norm_Ym(p.scale(1j * 2.0), 3, m) \
                == pytest.approx(2.0 * base, rel=1e-10)

    @pytest.mark.parametrize("m", [0, 1, 2])
    def test_dilation_scaling_law(self, m):
        # ||f(s .)||_{Y_m} = s^{m-n} ||f||_{Y_m}
        n = 3
        p = profiles.bump(1.0, 2.0)
        base = norm_Ym(p, n, m)
        for s in (2.0, 0.5):
            assert norm_Ym(p.dilate(s), n, m) \
                == pytest.approx(s ** (m - n) * base, rel=1e-6)

    def test_triangle_inequality(self):
        b1 = profiles.bump(1.0, 2.0)
        b2 = profiles.bump(1.5, 3.0)
        combo = RadialProfile(
            label="sum", omega=0.0,
            envelope=lambda r: b1.envelope(r) + b2.envelope(r),
            deriv_fn=lambda k, r: b1.deriv(k, r) + b2.deriv(k, r),
            support=3.0)
        n = 3
        for m in (0, 1, 3):
            assert norm_Ym(combo, n, m) \
                <= norm_Ym(b1, n, m) + norm_Ym(b2, n, m) + 1e-10
        xs = norm_X(combo, n)
        x1s = norm_X(b1, n)
        x2s = norm_X(b2, n)
        for a, b, c in zip(xs, x1s, x2s):
            assert a <= b + c + 1e-10


class TestGridRobustness:
    def test_refinement_stability(self):
        p = profiles.power(3.0)
        a1 = norm_X(p, 3, per_octave=4)
        a2 = norm_X(p, 3, per_octave=8)
        for u, v in zip(a1, a2):
            assert abs(u - v) <= 5e-3 * abs(v)
        b1 = norm_Ym(p, 3, 1, per_octave=4)
        b2 = norm_Ym(p, 3, 1, per_octave=8)
        assert abs(b1 - b2) <= 5e-3 * abs(b2)


class TestDivergenceCertification:
    def test_slow_tail_is_certified_divergent(self):
        x1, x2 = norm_X(profiles.power(0.6), 3)
        assert math.isinf(x1) or math.isinf(x2)
        assert math.isinf(norm_Ym(profiles.power(1.2), 3, 1))

    def test_fast_tail_is_finite(self):
        x1, x2 = norm_X(profiles.power(4.0), 3)
        assert math.isfinite(x1) and math.isfinite(x2)
        assert math.isfinite(norm_Ym(profiles.power(4.0), 3, 1))

    def test_missing_tail_descriptor_rejected(self):
        bare = RadialProfile(label="bare", omega=0.0,
                             envelope=lambda r: 1.0 / (1.0 + np.asarray(r) ** 2))
        with pytest.raises(DivergentNormError):
            norm_X(bare, 3)

    def test_report_collects_all_norms(self):
        rep = norm_report(profiles.bump(1.0, 2.0), 3)
        assert len(rep.ym) == 4
        assert all(math.isfinite(v) for v in rep.ym)
        assert math.isfinite(rep.x1) and math.isfinite(rep.x2)


class TestThresholds:
    def test_x_norm_power_family(self):
        # plain power tails enter X above alpha = (n-1)/2
        n = 3
        spec = FamilySpec(family="power")
        scan = membership_scan(spec, n, "X",
                               np.arange(0.7, 1.35, 0.1))
        assert empirical_threshold(scan) == pytest.approx(1.0, abs=0.06)

    def test_x_norm_oscillating_family(self):
        # a unimodular carrier buys one extra power: threshold (n+1)/2
        n = 3
        spec = FamilySpec(family="oscillating_power")
        scan = membership_scan(spec, n, "X",
                               np.arange(1.7, 2.35, 0.1))
        assert empirical_threshold(scan) == pytest.approx(2.0, abs=0.06)

    def test_ym_power_family(self):
        n = 3
        spec = FamilySpec(family="power")
        scan = membership_scan(spec, n, "Y1",
                               np.arange(1.7, 2.35, 0.1))
        assert empirical_threshold(scan) == pytest.approx(2.0, abs=0.06)

    def test_threshold_requires_bracketing(self):
        with pytest.raises(ValueError):
            empirical_threshold([(0.5, True), (1.0, True)])


class TestHerglotzDecomposition:
    @pytest.mark.parametrize("n,omega", [(2, 1.0), (3, 1.0), (3, 2.0)])
    def test_reconstructs_bessel_mode(self, n, omega):
        pair = herglotz_decompose(omega, n, K=6)
        nu = special.order_from_dim(n)
        for r in (50.0, 120.0):
            got = sum(complex(np.asarray(q.phi_rad(r)).ravel()[0])
                      for q in pair)
            want = r ** ((2 - n) / 2.0) * special.bessel_j(nu, omega * r)
            assert abs(got - want) <= 1e-6 * max(abs(want), r ** ((1 - n) / 2.0))

    def test_component_tail_size(self):
        # each component decays like r^{(1-n)/2}
        (eta, _) = herglotz_decompose(1.0, 3)
        r = np.array([40.0, 160.0])
        vals = np.abs(np.asarray(eta.phi_rad(r)))
        ratio = vals[1] / vals[0]
        assert ratio == pytest.approx(4.0 ** (-1.0), rel=0.1)

    def test_rejects_zero_frequency(self):
        with pytest.raises(ValueError):
            herglotz_decompose(0.0, 3)


class TestOscillatingPower:
    def test_carrier_modulus(self):
        p = oscillating_power(2.0)
        r = np.array([0.0, 1.0, 7.0])
        assert np.allclose(np.abs(p.envelope(r)), (1.0 + r) ** -2.0)
