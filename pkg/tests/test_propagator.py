"""Radial free-flow evaluation: closed forms, oracle agreement, bounds."""

import cmath
import math

import numpy as np
import pytest

from disperse_lab import profiles, special
from disperse_lab.propagator import (
    ComplexAmplitude,
    DivergentTailError,
    EvalPoint,
    decompose_g,
    evolve_oracle,
    evolve_radial,
    initial_mass,
    solution_bound,
    solution_mass,
)


def gaussian_closed_form(n, width, x, t):
    s = width * width + 4.0j * t
    return (width * width / s) ** (n / 2.0) * cmath.exp(-x * x / s)


class TestClosedForms:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_gaussian(self, n):
        prof = profiles.gaussian(1.0)
        for x, t in ((0.5, 0.3), (1.5, 1.0), (4.0, 2.5), (2.0, 20.0)):
            got = evolve_radial(prof, EvalPoint(n, x, t))
            want = gaussian_closed_form(n, 1.0, x, t)
            assert abs(got.value - want) <= 1e-6 * abs(want)

    def test_gaussian_width(self):
        prof = profiles.gaussian(0.7)
        got = evolve_radial(prof, EvalPoint(3, 1.2, 0.8)).value
        want = gaussian_closed_form(3, 0.7, 1.2, 0.8)
        assert abs(got - want) <= 1e-6 * abs(want)

    def test_error_estimate_covers_truth(self):
        prof = profiles.gaussian(1.0)
        for x, t in ((0.5, 0.3), (3.0, 1.5)):
            got = evolve_radial(prof, EvalPoint(3, x, t))
            want = gaussian_closed_form(3, 1.0, x, t)
            assert abs(got.value - want) <= max(got.err_est, 1e-12)


class TestHerglotzInvariance:
    """Bessel-mode data evolve by a global phase: |psi(x,t)| = |phi(x)|."""

    # odd n only: the envelope/carrier decomposition terminates and is exact;
    # for even n it is asymptotic and the components are not valid data near 0
    @pytest.mark.parametrize("n,omega", [(3, 1.0), (3, 2.5), (5, 1.5)])
    def test_modulus_preserved(self, n, omega):
        pair = profiles.herglotz_pair(omega, n)
        for t in (0.5, 5.0, 50.0):
            for x in (1.0, 3.0, 8.0):
                amp = sum(evolve_radial(p, EvalPoint(n, x, t)).value
                          for p in pair)
                datum = complex(sum(np.asarray(p.phi_rad(x)).ravel()[0]
                                    for p in pair))
                assert abs(abs(amp) - abs(datum)) <= 1e-4 * max(abs(datum), 1e-3)

    def test_phase_is_quadratic_in_omega(self):
        # psi = e^{-i t omega^2} phi for the exact Bessel mode
        n, omega, x, t = 3, 1.5, 2.0, 0.8
        pair = profiles.herglotz_pair(omega, n)
        amp = sum(evolve_radial(p, EvalPoint(n, x, t)).value for p in pair)
        datum = complex(sum(np.asarray(p.phi_rad(x)).ravel()[0] for p in pair))
        want = cmath.exp(-1j * t * omega * omega) * datum
        assert abs(amp - want) <= 1e-4 * abs(datum)


class TestOracleAgreement:
    def test_bump_matches_finite_difference(self):
        prof = profiles.bump(1.0, 2.0)
        run = evolve_oracle(prof, 3, (0.4, 1.2), r_domain=96.0, levels=15)
        assert run.mass_drift <= 1e-4
        for t in (0.4, 1.2):
            scale = max(abs(run.at(t, x)) for x in (0.8, 2.0, 4.0))
            for x in (0.8, 2.0, 4.0):
                got = evolve_radial(prof, EvalPoint(3, x, t)).value
                assert abs(got - run.at(t, x)) <= 1e-3 * scale

    def test_oracle_rejects_unbounded_support(self):
        with pytest.raises(ValueError):
            evolve_oracle(profiles.power(3.0), 3, (0.5,))


class TestDecomposition:
    @pytest.mark.parametrize("n", [3, 5])
    def test_pieces_sum_to_integrand(self, n):
        # e^{ia1 rho} g1 + e^{ia2 rho} g2 + e^{ia3 rho} g3 == g (exact, odd n)
        prof = profiles.bump(1.0, 2.0, omega=0.5)
        pt = EvalPoint(n, 3.0, 0.4)
        dec = decompose_g(prof, pt)
        for rho in (0.6, 1.1, 2.0):
            total = (cmath.exp(1j * dec.a1 * rho) * complex(np.asarray(dec.g1(rho)).ravel()[0])
                     + cmath.exp(1j * dec.a2 * rho) * complex(np.asarray(dec.g2(rho)).ravel()[0])
                     + cmath.exp(1j * dec.a3 * rho) * complex(np.asarray(dec.g3(rho)).ravel()[0]))
            want = complex(np.asarray(dec.g(rho)).ravel()[0])
            assert abs(total - want) <= 1e-8 * max(1.0, abs(want))

    def test_compact_piece_vanishes_beyond_turning_point(self):
        prof = profiles.bump(1.0, 2.0)
        pt = EvalPoint(3, 3.0, 0.4)
        dec = decompose_g(prof, pt)
        gamma = 2.0 * math.sqrt(pt.t)
        beta = pt.x_abs / math.sqrt(pt.t)
        rho = 1.2 / beta  # argument beta*rho > 1: compact splitting part is 0
        assert abs(complex(np.asarray(dec.g1(rho)).ravel()[0])) == 0.0


class TestSolutionBound:
    @pytest.mark.parametrize("m", [0, 1, 2, 3])
    def test_dominates_modulus(self, m):
        prof = profiles.bump(1.0, 2.0)
        for x, t in ((1.0, 0.6), (2.5, 1.5), (1.0, 6.0)):
            pt = EvalPoint(3, x, t)
            psi = abs(evolve_radial(prof, pt).value)
            assert solution_bound(prof, pt, m) >= psi

    def test_rejects_bad_order(self):
        with pytest.raises(ValueError):
            solution_bound(profiles.bump(), EvalPoint(3, 1.0, 1.0), 4)


class TestMass:
    def test_conserved_under_flow(self):
        prof = profiles.bump(1.0, 2.0)
        m0 = initial_mass(prof, 3, 10.0)
        for t in (0.5, 2.0):
            mt = solution_mass(prof, 3, t, r_max=30.0 + 110.0 * t)
            assert abs(mt - m0) <= 1e-4 * m0


class TestTailValidation:
    def test_divergent_tail_rejected(self):
        # alpha <= (n-3)/2 leaves the representation integral divergent
        with pytest.raises(DivergentTailError):
            evolve_radial(profiles.power(0.4), EvalPoint(4, 1.0, 1.0))

    def test_slow_but_admissible_tail_evaluates(self):
        amp = evolve_radial(profiles.power(2.0), EvalPoint(3, 1.0, 1.0))
        assert isinstance(amp, ComplexAmplitude)
        assert np.isfinite(amp.value.real) and np.isfinite(amp.value.imag)
        assert amp.err_est <= 1e-6

    def test_eval_point_validation(self):
        with pytest.raises(ValueError):
            EvalPoint(1, 1.0, 1.0)
        with pytest.raises(ValueError):
            EvalPoint(3, 1.0, -0.5)
