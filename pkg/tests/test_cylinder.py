"""Cylinder amplitude and the algebraic spectral curve."""

import numpy as np
import scipy.linalg

from quartic_planar import (
    Spectrum,
    cylinder_boundary_values,
    g0_cylinder,
    g0_rational,
    spectral_curve,
)
from quartic_planar.cylinder import _system_matrix

from conftest import build_curve, random_spectrum, sample_point


class TestBoundaryValues:
    def test_system_residual(self):
        rng = np.random.default_rng(31)
        for d in (1, 2, 3):
            j = build_curve(random_spectrum(rng, d), 0.1)
            w = sample_point(rng, j.scale)
            boundary = cylinder_boundary_values(j, None, w)
            alphas, cmat, _, _ = _system_matrix(j)
            y = boundary.values * j.weights() / float(j.matrix_size)
            g_ww = g0_rational(j, w, w).value
            rhs = np.array(
                [
                    (g0_rational(j, alphas[k], w).value - g_ww)
                    / complex(j.j_difference(alphas[k], w))
                    for k in range(d)
                ]
            )
            assert np.max(np.abs(cmat @ y - rhs)) < 1e-10

    def test_one_matrix_scalar_system(self):
        # d=1 the system is scalar; solve it by hand and compare
        j = build_curve(Spectrum([1.0], [1]), 0.25)
        w = 1.4 + 0.3j
        boundary = cylinder_boundary_values(j, None, w)
        alpha = j.ramification_points()[0]
        g_ww = g0_rational(j, w, w).value
        g_aw = g0_rational(j, alpha, w).value
        c11 = 1.0 / float(np.real(j.j_difference(alpha, j.eps[0])))
        rhs = (g_aw - g_ww) / complex(j.j_difference(alpha, w))
        y = rhs / c11
        expected = y * j.matrix_size / j.weights()[0]
        assert abs(boundary.values[0] - expected) < 1e-12 * (1 + abs(expected))

    def test_mirrored_system_same_values(self):
        # substituting -alpha_k instead of alpha_k solves to the same values
        rng = np.random.default_rng(32)
        j = build_curve(random_spectrum(rng, 2), 0.1)
        w = sample_point(rng, j.scale)
        boundary = cylinder_boundary_values(j, None, w)
        alphas, _, _, _ = _system_matrix(j)
        d = j.dimension
        cmat = np.empty((d, d))
        for k in range(d):
            for l in range(d):
                cmat[k, l] = 1.0 / float(
                    np.real(j.j_difference(-alphas[k], j.eps[l]))
                )
        g_ww = g0_rational(j, w, w).value
        rhs = np.array(
            [
                (g0_rational(j, -alphas[k], w).value - g_ww)
                / complex(j.j_difference(-alphas[k], w))
                for k in range(d)
            ]
        )
        y = scipy.linalg.solve(cmat, rhs)
        values = y * (float(j.matrix_size) / j.weights())
        dev = np.max(np.abs(values - boundary.values))
        assert dev < 1e-9 * (1 + np.max(np.abs(boundary.values)))

    def test_boundary_continuity(self):
        # G(z|w) approaches the solved boundary value as z -> eps_l
        j = build_curve(Spectrum([0.9, 1.8], [1, 1]), 0.1)
        w = 0.5 + 0.45j
        boundary = cylinder_boundary_values(j, None, w)
        h = 1e-7 * j.scale
        for l in range(2):
            direct = g0_cylinder(j, complex(j.eps[l]) + h * (1 + 1j), w,
                                 boundary=boundary)
            assert abs(direct - boundary.values[l]) < 1e-5 * (
                1 + abs(boundary.values[l])
            )


class TestRegularity:
    def test_bounded_at_ramification_points(self):
        rng = np.random.default_rng(33)
        for d in (1, 2):
            j = build_curve(random_spectrum(rng, d), 0.1)
            alphas = j.ramification_points()
            w = sample_point(rng, j.scale)
            boundary = cylinder_boundary_values(j, None, w)
            probes = []
            for a in alphas:
                for h in (1e-4, 1e-5):
                    probes.append(
                        abs(g0_cylinder(j, a - h * j.scale, w, boundary=boundary))
                    )
                    probes.append(
                        abs(g0_cylinder(j, -a + h * j.scale, w, boundary=boundary))
                    )
            assert max(probes) < 1e6


class TestSpectralCurve:
    def test_total_degree(self):
        rng = np.random.default_rng(34)
        for d in (1, 2, 3):
            j = build_curve(random_spectrum(rng, d), 0.1)
            poly = spectral_curve(j)
            assert poly.total_degree == 2 * d + 1

    def test_defining_residual(self):
        rng = np.random.default_rng(35)
        for d in (1, 2, 3):
            j = build_curve(random_spectrum(rng, d), 0.07)
            poly = spectral_curve(j)
            for _ in range(20):
                z = sample_point(rng, j.scale)
                x, y = j.j(z), -j.j(-z)
                assert abs(poly.evaluate(x, y)) <= 1e-7 * poly.residual_scale(x, y)

    def test_small_coupling_factorization(self):
        # lam -> 0: the curve degenerates to (y - x)(x - E_1)(y + E_1),
        # checked through normalized evaluations off the vanishing locus
        j = build_curve(Spectrum([1.0], [1]), 1e-8)
        poly = spectral_curve(j)
        rng = np.random.default_rng(36)
        for _ in range(10):
            x = complex(rng.uniform(0.3, 2.0), rng.uniform(0.2, 1.0))
            y = complex(rng.uniform(0.3, 2.0), rng.uniform(-1.0, -0.2))
            factored = (y - x) * (x - 1.0) * (y + 1.0)
            ratio = poly.evaluate(x, y) / factored
            assert abs(ratio.imag) < 1e-6 * abs(ratio)
            # a single x-independent normalization constant relates them
            x2 = complex(rng.uniform(0.3, 2.0), rng.uniform(0.2, 1.0))
            factored2 = (y - x2) * (x2 - 1.0) * (y + 1.0)
            ratio2 = poly.evaluate(x2, y) / factored2
            assert abs(ratio - ratio2) < 1e-6 * abs(ratio)
