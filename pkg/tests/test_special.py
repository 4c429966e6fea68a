"""Bessel evaluation, oscillatory splitting, and iterated Fresnel tails."""

import cmath
import math

import mpmath
import numpy as np
import pytest

from disperse_lab import special


def residual_envelope_slope(n, K, z_lo=20.0, z_hi=160.0, per_octave=24):
    """Fit the oscillation envelope of the splitting residual over [z_lo, z_hi].

    The residual carries an oscillatory factor, so single-point ratios are
    noisy; max-pool within half-octave bins and regress the bin peaks.
    """
    octaves = math.log2(z_hi / z_lo)
    zs = np.geomspace(z_lo, z_hi, int(per_octave * octaves) + 1)
    vals = np.array([special.splitting_residual(n, K, z) for z in zs])
    peak = float(vals.max())
    nbins = int(2 * octaves)
    bins = np.minimum((np.log2(zs / z_lo) * 2).astype(int), nbins - 1)
    xs, ys = [], []
    for b in range(nbins):
        sel = bins == b
        i = np.argmax(vals[sel])
        xs.append(math.log(zs[sel][i]))
        ys.append(math.log(max(vals[sel][i], 1e-300)))
    slope = np.polyfit(xs, ys, 1)[0]
    return float(slope), peak


class TestBessel:
    @pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 1.5, 2.0, 3.5])
    def test_matches_mpmath(self, nu):
        zs = np.concatenate([np.linspace(1e-3, 14.9, 40),
                             np.geomspace(15.1, 500.0, 40)])
        got = special.bessel_j(nu, zs)
        for z, g in zip(zs, got):
            want = float(mpmath.besselj(nu, z))
            # envelope-relative accuracy: near zeros of J the absolute scale
            # is set by the oscillation amplitude ~ z^{-1/2}
            scale = max(abs(want), (2.0 / (math.pi * z)) ** 0.5 if z > 1 else 1.0)
            assert abs(g - want) <= 5e-13 * scale

    def test_complex_argument_matches_mpmath(self):
        for nu in (0.0, 0.5, 1.5):
            for z in (0.3 + 0.1j, 5.0 + 1.0j, 20.0 + 2.0j, 120.0 + 0.5j):
                got = special.bessel_j_c(nu, z)
                want = complex(mpmath.besselj(nu, z))
                assert abs(got - want) <= 1e-10 * max(abs(want), 1.0)

    def test_origin(self):
        assert special.bessel_j(0.0, 0.0) == pytest.approx(1.0)
        assert special.bessel_j(1.5, 0.0) == 0.0


class TestSplitting:
    @pytest.mark.parametrize("n,K", [(2, 0), (2, 2), (2, 6), (3, 0),
                                     (4, 1), (4, 4)])
    def test_reconstruction_residual_decays(self, n, K):
        slope, peak = residual_envelope_slope(n, K)
        if peak < 1e-11:
            return  # series terminates: residual at rounding noise
        expect = (n - 1) / 2.0 - K - 1
        assert slope == pytest.approx(expect, abs=0.2)

    def test_terminating_series_residual_is_rounding_noise(self):
        # half-integer order: once every nonzero coefficient is included the
        # reconstruction is exact up to z^{n/2}-amplified rounding
        for n, K in ((3, 1), (5, 2), (7, 3)):
            for z in (25.0, 160.0):
                assert special.splitting_residual(n, K, z) \
                    <= 1e-13 * z ** (n / 2.0)

    def test_odd_dimension_series_terminates(self):
        # half-integer order: the large-argument expansion is finite
        assert special.splitting_residual(3, 1, 25.0) <= 1e-11
        assert special.splitting_residual(5, 2, 25.0) <= 1e-11

    def test_compact_part_supported_in_unit_interval(self):
        z = np.array([1.001, 2.0, 10.0])
        assert np.all(special.splitting_A(3, z) == 0.0)
        z = np.array([0.1, 0.5])
        assert np.all(special.splitting_A(3, z) != 0.0)

    def test_reconstructs_bessel(self):
        # A + e^{iz} B + e^{-iz} conj(B) == z^{n/2} J_nu(z); exact for odd n,
        # asymptotic (error ~ z^{(n-1)/2 - K - 1}) for even n
        for n in (3, 5):
            nu = special.order_from_dim(n)
            for z in (0.3, 0.9, 1.5, 8.0, 40.0):
                b = complex(special.splitting_B(n, 10, z))
                lhs = (special.splitting_A(n, z) + cmath.exp(1j * z) * b
                       + cmath.exp(-1j * z) * b.conjugate())
                want = z ** (n / 2.0) * float(mpmath.besselj(nu, z))
                assert abs(lhs - want) <= 1e-10 * max(1.0, abs(want))
        for n in (2, 4):
            nu = special.order_from_dim(n)
            for z in (40.0, 160.0):
                b = complex(special.splitting_B(n, 10, z))
                lhs = (special.splitting_A(n, z) + cmath.exp(1j * z) * b
                       + cmath.exp(-1j * z) * b.conjugate())
                want = z ** (n / 2.0) * float(mpmath.besselj(nu, z))
                tol = max(10.0 * z ** ((n - 1) / 2.0 - 11),
                          1e-12 * z ** (n / 2.0))
                assert abs(lhs - want) <= tol


class TestFresnel:
    def test_value_at_origin(self):
        want = cmath.exp(1j * math.pi / 4.0) * math.sqrt(math.pi) / 2.0
        assert abs(complex(special.fresnel_xi(0, 0.0, 0.0)) - want) <= 1e-12

    def test_linear_shift_identity(self):
        # int_s^inf e^{i(r^2+ar)} dr = e^{-ia^2/4} int_{s+a/2}^inf e^{iu^2} du
        for a in np.linspace(-3.0, 3.0, 7):
            for s in np.linspace(0.0, 3.0, 7):
                lhs = complex(special.fresnel_xi(0, a, s))
                rhs = cmath.exp(-1j * a * a / 4.0) \
                    * complex(special.fresnel_xi(0, 0.0, s + a / 2.0))
                assert abs(lhs - rhs) <= 1e-10

    def test_against_mpmath_fresnel(self):
        # int_s^inf e^{iu^2} du in terms of the classical Fresnel integrals
        scale = math.sqrt(2.0 / math.pi)
        for s in (0.0, 0.7, 2.0, 10.0):
            c = float(mpmath.fresnelc(s * scale))
            sn = float(mpmath.fresnels(s * scale))
            want = math.sqrt(math.pi / 2.0) * complex(0.5 - c, 0.5 - sn)
            got = complex(special.fresnel_xi(0, 0.0, s))
            assert abs(got - want) <= 1e-11

    def test_large_s_asymptotics(self):
        s = 50.0
        for k in range(4):
            xi = complex(special.fresnel_xi(k, 0.0, s))
            lead = xi * (-2j * s) ** (k + 1) * cmath.exp(-1j * s * s)
            probe = s * s * (1.0 - lead)
            want = (k + 2) * (k + 1) * 1j / 4.0
            assert abs(probe - want) <= 0.05 * abs(want)

    def test_uniform_bound_constants_finite(self):
        for m in range(5):
            c = special.xi_bound_constant(m)
            assert 0.0 < c < 1e8
