"""Rational curve J: evaluation, preimages, ramification, identities."""

import numpy as np
import pytest

from quartic_planar import PoleHit, Spectrum, partial_fraction_unity

from conftest import build_curve, random_spectrum, sample_point


def direct_j(j, z):
    coef = j.lam / j.matrix_size
    return z - coef * np.sum(j.rho / (j.eps + z))


class TestEvaluation:
    def test_matches_direct_formula(self):
        rng = np.random.default_rng(11)
        j = build_curve(random_spectrum(rng, 3), 0.08)
        for _ in range(20):
            z = sample_point(rng, j.scale)
            assert abs(j.j(z) - direct_j(j, z)) < 1e-12 * (1 + abs(z))

    def test_derivative_finite_difference(self):
        rng = np.random.default_rng(12)
        j = build_curve(random_spectrum(rng, 2), -0.05)
        for _ in range(10):
            z = sample_point(rng, j.scale)
            h = 1e-6 * j.scale
            fd = (j.j(z + h) - j.j(z - h)) / (2 * h)
            assert abs(fd - j.j_prime(z)) < 1e-6 * (1 + abs(j.j_prime(z)))

    def test_difference_identity(self):
        rng = np.random.default_rng(13)
        j = build_curve(random_spectrum(rng, 3), 0.1)
        for _ in range(10):
            x, y = sample_point(rng, j.scale), sample_point(rng, j.scale)
            assert abs(j.j_difference(x, y) - (j.j(x) - j.j(y))) < 1e-11

    def test_pole_hit(self):
        j = build_curve(Spectrum([1.0, 2.0], [1, 1]), 0.1)
        with pytest.raises(PoleHit):
            j.j(-j.eps[0])

    def test_weights_recover_multiplicities(self):
        rng = np.random.default_rng(14)
        sp = random_spectrum(rng, 4)
        j = build_curve(sp, 0.1)
        assert np.max(np.abs(j.weights() - sp.multiplicities)) < 1e-9 * np.max(
            sp.multiplicities
        )


class TestPreimages:
    def test_completeness(self):
        rng = np.random.default_rng(15)
        j = build_curve(random_spectrum(rng, 3), 0.07)
        for _ in range(25):
            v = sample_point(rng, j.scale)
            pre = j.preimages(v)
            assert pre.roots.shape == (3,)
            jv = j.j(v)
            for root in pre.roots:
                assert abs(j.j(root) - jv) <= 1e-8 * (1 + abs(jv))

    def test_interlacing_positive_coupling(self):
        rng = np.random.default_rng(16)
        for d in (2, 3, 4):
            j = build_curve(random_spectrum(rng, d), 0.1)
            for a in range(d):
                roots = j.eigen_preimages()[a].roots
                assert np.max(np.abs(roots.imag)) < 1e-9 * j.scale
                hats = np.sort(roots.real)  # ascending
                bounds = -j.eps[::-1]
                # hat^d < -eps_d < hat^{d-1} < ... < hat^1 < -eps_1
                assert np.all(hats < bounds)
                assert np.all(hats[1:] > bounds[:-1])

    def test_real_nonnegative_v_real_roots(self):
        j = build_curve(Spectrum([0.6, 1.1, 2.3], [1, 2, 1]), 0.1)
        pre = j.preimages(0.9)
        assert np.max(np.abs(pre.roots.imag)) < 1e-9

    def test_pole_residues(self):
        # Res_{z -> -eps_k} J = -(lam/N) rho_k, by a trapezoid ring which is
        # spectrally accurate for the analytic integrand
        j = build_curve(Spectrum([0.8, 1.7], [2, 1]), 0.12)
        for k in range(2):
            radius = 0.25 * min(
                abs(j.eps[k] - j.eps[l]) for l in range(2) if l != k
            )
            theta = np.linspace(0.0, 2 * np.pi, 257)[:-1]
            ring = -j.eps[k] + radius * np.exp(1j * theta)
            residue = np.mean(j.j(ring) * radius * np.exp(1j * theta))
            target = -(j.lam / j.matrix_size) * j.rho[k]
            assert abs(residue - target) <= 1e-8 * (1 + abs(target))


class TestRamification:
    def test_fixed_points_of_reflection(self):
        rng = np.random.default_rng(17)
        for d in (1, 2, 3):
            j = build_curve(random_spectrum(rng, d), 0.09)
            alphas = j.ramification_points()
            assert len(alphas) == d
            for a in alphas:
                assert a > 0
                assert abs(j.j(a) - j.j(-a)) < 1e-8 * (1 + abs(j.j(a)))


class TestPartialFractionUnity:
    def test_random_nodes(self):
        rng = np.random.default_rng(18)
        for d in (1, 2, 3, 4):
            for _ in range(5):
                x = np.sort(rng.uniform(0.5, 4.0, d + 1))
                while np.min(np.diff(x)) < 1e-2:
                    x = np.sort(rng.uniform(0.5, 4.0, d + 1))
                c = rng.uniform(-2.0, -0.5, d)
                assert abs(partial_fraction_unity(x, c) - 1.0) < 1e-9
