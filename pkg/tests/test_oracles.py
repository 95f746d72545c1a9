"""Independent verification routes: closed forms, series, quadrature, W, MC."""

import math

import numpy as np
import pytest
import scipy.special

from quartic_planar import (
    DomainError,
    Spectrum,
    g0_matrix,
    j2_inverse,
    lambert_pade_check,
    lambert_w0,
    monte_carlo_moment,
    one_matrix_closed_form,
    perturbative_series,
    quadrature_g,
    quadrature_g_line,
)

from conftest import build_curve, random_spectrum

FROZEN_G11 = 0.45044716368952126


class TestOneMatrixClosedForm:
    def test_free_limit(self):
        cf = one_matrix_closed_form(2.0, 0.0)
        assert cf.epsilon1 == pytest.approx(1.0, abs=1e-15)
        assert cf.rho1_over_n == pytest.approx(1.0, abs=1e-15)
        assert cf.epsilon1_hat == pytest.approx(-1.0, abs=1e-15)
        assert cf.g11 == pytest.approx(0.5, abs=1e-15)

    def test_reference_point(self):
        cf = one_matrix_closed_form(2.0, 0.25)
        assert cf.epsilon1 == pytest.approx(1.1076252185107651, abs=1e-14)
        assert cf.rho1_over_n == pytest.approx(0.9536672493620403, abs=1e-14)
        assert cf.epsilon1_hat == pytest.approx(-1.2152504370215302, abs=1e-14)
        assert cf.g11 == pytest.approx(FROZEN_G11, abs=1e-14)

    def test_internal_identity(self):
        # g11 must equal -2*eps_hat / (eps - eps_hat)^2 in both phases
        for lam in (0.01, 0.25, 1.0, -0.3):
            cf = one_matrix_closed_form(2.0, lam)
            ident = -2.0 * cf.epsilon1_hat / (cf.epsilon1 - cf.epsilon1_hat) ** 2
            assert cf.g11 == pytest.approx(ident, rel=1e-12)

    def test_fold_rejected(self):
        with pytest.raises(DomainError):
            one_matrix_closed_form(2.0, -0.4)


class TestPerturbativeSeries:
    def test_zeroth_order_is_free_propagator(self):
        sp = Spectrum([0.7, 1.9], [2, 1])
        series = perturbative_series(sp, 0)
        e = sp.eigenvalues
        for a in range(2):
            for b in range(2):
                assert series.orders[0][a, b] == pytest.approx(
                    1.0 / (e[a] + e[b]), rel=1e-14
                )

    def test_first_order_one_matrix(self):
        # mu^2 = 2: expanding the radical closed form gives -1/4 at order 1
        series = perturbative_series(Spectrum([1.0], [1]), 1)
        assert series.orders[1][0, 0] == pytest.approx(-0.25, rel=1e-13)

    def test_second_order_one_matrix(self):
        series = perturbative_series(Spectrum([1.0], [1]), 2)
        assert series.orders[2][0, 0] == pytest.approx(0.28125, rel=1e-13)

    def test_order_cap(self):
        with pytest.raises(ValueError):
            perturbative_series(Spectrum([1.0], [1]), 7)

    def test_partial_sum_matches_exact(self):
        rng = np.random.default_rng(41)
        sp = random_spectrum(rng, 2, e_min=0.9)
        lam = 0.01
        series = perturbative_series(sp, 4)
        j = build_curve(sp, lam)
        exact = g0_matrix(j).entries
        assert np.max(np.abs(series.partial_sum(lam) - exact)) < 1e-8

    def test_first_order_vs_lambda_derivative(self):
        # central difference of the exact solution in lam
        sp = Spectrum([1.0, 1.6], [1, 2])
        h = 1e-5
        gp = g0_matrix(build_curve(sp, h)).entries
        gm = g0_matrix(build_curve(sp, -h)).entries
        deriv = (gp - gm) / (2 * h)
        series = perturbative_series(sp, 1)
        assert np.max(np.abs(series.orders[1] - deriv)) < 1e-6


class TestContourQuadrature:
    def test_free_limit(self):
        j = build_curve(Spectrum([0.8, 1.7], [1, 1]), 1e-8)
        for a in range(2):
            for b in range(2):
                got = quadrature_g(j, a, b)
                want = 1.0 / (0.8 * (a == 0) + 1.7 * (a == 1)
                              + 0.8 * (b == 0) + 1.7 * (b == 1))
                assert got == pytest.approx(want, abs=1e-6)

    def test_one_matrix_reference(self):
        j = build_curve(Spectrum([1.0], [1]), 0.25)
        assert quadrature_g(j, 0, 0) == pytest.approx(FROZEN_G11, abs=1e-6)

    def test_three_eigenvalue_agreement(self):
        rng = np.random.default_rng(42)
        sp = random_spectrum(rng, 3)
        j = build_curve(sp, 0.05)
        exact = g0_matrix(j).entries
        for a in range(3):
            for b in range(3):
                assert quadrature_g(j, a, b) == pytest.approx(
                    exact[a, b], abs=1e-6
                )

    def test_vertical_line_route_agrees(self):
        rng = np.random.default_rng(43)
        sp = random_spectrum(rng, 2)
        j = build_curve(sp, 0.1)
        exact = g0_matrix(j).entries
        for a in range(2):
            for b in range(2):
                rect = quadrature_g(j, a, b)
                line = quadrature_g_line(j, a, b)
                assert line == pytest.approx(exact[a, b], rel=1e-10)
                assert rect == pytest.approx(line, rel=1e-8)

    def test_negative_coupling(self):
        j = build_curve(Spectrum([1.0, 2.2], [1, 1]), -0.01)
        exact = g0_matrix(j).entries
        assert quadrature_g(j, 0, 1) == pytest.approx(exact[0, 1], abs=1e-6)


class TestLambertW:
    def test_spot_values(self):
        assert lambert_w0(0.0) == 0.0
        assert lambert_w0(math.e) == pytest.approx(1.0, rel=1e-15)
        assert lambert_w0(-1.0 / math.e) == pytest.approx(-1.0, rel=1e-12)

    def test_residual_grid(self):
        xs = np.concatenate(
            [
                -np.exp(-1.0) + np.logspace(-12, -1, 40),
                np.logspace(-8, 8, 120),
            ]
        )
        for x in xs:
            w = lambert_w0(float(x))
            assert abs(w * math.exp(w) - x) <= 1e-13 * max(1.0, abs(x))

    def test_domain(self):
        with pytest.raises(DomainError):
            lambert_w0(-0.5)

    def test_against_scipy(self):
        for x in (-0.3, -0.05, 0.1, 1.0, 7.3, 1e4):
            ref = float(np.real(scipy.special.lambertw(x)))
            assert lambert_w0(x) == pytest.approx(ref, rel=1e-14)

    def test_j2_inverse_round_trip(self):
        lam = 0.1
        for a in (0.0, 1.0, 10.0):
            t = j2_inverse(a, lam)
            # t solves a = t + lam*log(1+t)
            assert a == pytest.approx(t + lam * math.log1p(t), abs=1e-10)

    def test_j2_inverse_large_argument(self):
        # exponent overflows float64; the log-form path must take over
        t = j2_inverse(100.0, 0.1)
        assert 100.0 == pytest.approx(t + 0.1 * math.log1p(t), rel=1e-12)

    def test_j2_inverse_domain(self):
        with pytest.raises(DomainError):
            j2_inverse(1.0, 0.0)


class TestPadeLadder:
    def test_orders_converge(self):
        results = [lambert_pade_check(0.1, d, 1.0, 1.0) for d in (2, 3, 4, 5)]
        exact = results[-1].j2_inverse_exact
        for r in results:
            assert r.j2_inverse_exact == pytest.approx(exact, rel=1e-14)
        diffs = [abs(results[i + 1].g_approx - results[i].g_approx)
                 for i in range(3)]
        assert diffs[0] > diffs[1] > diffs[2]

    def test_model_spectrum_shape(self):
        r = lambert_pade_check(0.1, 3, 1.0, 1.0)
        assert len(r.model_epsilons) == 3
        assert np.all(np.diff(r.model_epsilons) > 0)
        assert np.all(np.asarray(r.model_rhos) > 0)


class TestMonteCarlo:
    def test_free_theory(self):
        sp = Spectrum([1.0, 2.0], [8, 8])
        est = monte_carlo_moment(sp, 0.0, 0, 1, sweeps=20000, seed=7)
        exact = 1.0 / 3.0
        assert abs(est.mean - exact) < 3 * est.std_error
        assert 0.2 < est.acceptance_rate < 0.8

    def test_interacting_one_matrix(self):
        sp = Spectrum([1.0], [16])
        est = monte_carlo_moment(sp, 0.1, 0, 0, sweeps=30000, seed=11)
        cf = one_matrix_closed_form(2.0, 0.1)
        gate = max(3 * est.std_error, 5.0 / 16)
        assert abs(est.mean - cf.g11) < gate

    def test_seed_determinism(self):
        sp = Spectrum([1.0], [8])
        a = monte_carlo_moment(sp, 0.1, 0, 0, sweeps=10000, seed=3)
        b = monte_carlo_moment(sp, 0.1, 0, 0, sweeps=10000, seed=3)
        assert a.mean == b.mean
        assert a.std_error == b.std_error
        assert a.acceptance_rate == b.acceptance_rate

    def test_independent_seeds_compatible(self):
        sp = Spectrum([1.0], [12])
        a = monte_carlo_moment(sp, 0.1, 0, 0, sweeps=20000, seed=21)
        b = monte_carlo_moment(sp, 0.1, 0, 0, sweeps=20000, seed=22)
        pooled = math.hypot(a.std_error, b.std_error)
        assert abs(a.mean - b.mean) < 5 * pooled
        assert a.std_error > 0 and b.std_error > 0

    def test_guards(self):
        sp = Spectrum([1.0], [8])
        with pytest.raises(ValueError):
            monte_carlo_moment(sp, 0.1, 0, 0, sweeps=500, seed=1)
        with pytest.raises(ValueError):
            monte_carlo_moment(sp, -0.1, 0, 0, sweeps=20000, seed=1)
        with pytest.raises(ValueError):
            monte_carlo_moment(Spectrum([1.0], [80]), 0.1, 0, 0,
                               sweeps=20000, seed=1)
