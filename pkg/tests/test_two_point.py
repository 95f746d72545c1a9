"""Planar two-point function: representation equivalence and identities."""

import numpy as np
import pytest

from quartic_planar import (
    PoleHit,
    PoleProximity,
    Representation,
    Spectrum,
    dse_residual,
    g0_branch,
    g0_matrix,
    g0_product,
    g0_rational,
    g0_rfe,
    jzz_residual,
)

from conftest import build_curve, random_spectrum, sample_point

FROZEN_G11 = 0.45044716368952126  # one-matrix model, E=1, lam=1/4


def all_representations(j, z, w):
    return {
        Representation.RATIONAL: g0_rational(j, z, w).value,
        Representation.BRANCH: g0_branch(j, z, w).value,
        Representation.PRODUCT: g0_product(j, z, w).value,
        Representation.RFE: g0_rfe(j, z, w).value,
    }


class TestRepresentationEquivalence:
    def test_pairwise_agreement(self):
        rng = np.random.default_rng(21)
        for d in (1, 2, 3):
            for lam in (-0.01, 0.05):
                j = build_curve(random_spectrum(rng, d), lam)
                for _ in range(5):
                    z = sample_point(rng, j.scale)
                    w = sample_point(rng, j.scale)
                    vals = list(all_representations(j, z, w).values())
                    ref = max(abs(v) for v in vals)
                    for i, a in enumerate(vals):
                        for b in vals[i + 1:]:
                            assert abs(a - b) <= 1e-8 * ref

    def test_representation_tags(self):
        j = build_curve(Spectrum([1.0], [1]), 0.1)
        amp = g0_rational(j, 0.5 + 0.5j, 0.7 + 0.2j)
        assert amp.representation == Representation.RATIONAL

    def test_symmetry(self):
        rng = np.random.default_rng(22)
        j = build_curve(random_spectrum(rng, 3), 0.1)
        for _ in range(10):
            z, w = sample_point(rng, j.scale), sample_point(rng, j.scale)
            a = g0_rational(j, z, w).value
            b = g0_rational(j, w, z).value
            assert abs(a - b) <= 1e-10 * max(abs(a), 1e-12)

    def test_zero_coupling_limit(self):
        rng = np.random.default_rng(23)
        sp = random_spectrum(rng, 2)
        j = build_curve(sp, 1e-9)
        for _ in range(5):
            z, w = sample_point(rng, j.scale), sample_point(rng, j.scale)
            assert abs(g0_rational(j, z, w).value - 1.0 / (z + w)) < 1e-6


class TestSpectrumPointValues:
    def test_one_matrix_value(self, curve_61):
        val = g0_rational(curve_61, curve_61.eps[0], curve_61.eps[0]).value
        assert abs(val - FROZEN_G11) < 1e-12

    def test_matrix_consistency(self):
        rng = np.random.default_rng(24)
        sp = random_spectrum(rng, 3)
        j = build_curve(sp, 0.1)
        m = g0_matrix(j)
        assert m.entries.shape == (3, 3)
        assert m.ordering_deviation < 1e-8
        # matrix is symmetric and matches pointwise spectrum-limit values
        assert np.max(np.abs(m.entries - m.entries.T)) < 1e-10
        v01 = g0_rational(j, j.eps[0], j.eps[1]).value
        assert abs(m.entries[0, 1] - v01) < 1e-10 * abs(v01)

    def test_lam_zero_matrix(self):
        sp = Spectrum([1.0, 2.0], [1, 1])
        j = build_curve(sp, 0.0)
        m = g0_matrix(j).entries
        pair = np.add.outer(sp.eigenvalues, sp.eigenvalues)
        assert np.max(np.abs(m - 1.0 / pair)) < 1e-14


class TestFunctionalEquations:
    def test_dse_residual(self):
        rng = np.random.default_rng(25)
        for d in (1, 2, 3):
            j = build_curve(random_spectrum(rng, d), 0.08)
            for _ in range(20):
                z = sample_point(rng, j.scale)
                w = sample_point(rng, j.scale)
                g = abs(g0_rational(j, z, w).value)
                assert dse_residual(j, z, w) <= 1e-8 * (1 + g)

    def test_jzz_residual(self):
        rng = np.random.default_rng(26)
        j = build_curve(random_spectrum(rng, 3), -0.01)
        for _ in range(20):
            z = sample_point(rng, j.scale)
            assert jzz_residual(j, z) <= 1e-8 * (1 + abs(j.j(z)))


class TestSingularities:
    def test_regular_at_negated_preimages(self):
        # G(z, w) stays bounded at z = -what^n: the apparent pole cancels
        rng = np.random.default_rng(27)
        j = build_curve(random_spectrum(rng, 2), 0.1)
        w = sample_point(rng, j.scale)
        for hat in j.preimages(w).roots:
            base = abs(g0_rational(j, -hat + 1e-4 * j.scale, w).value)
            near = abs(g0_rational(j, -hat + 1e-6 * j.scale, w).value)
            assert near <= 10.0 * base

    def test_near_singularity_refused(self):
        j = build_curve(Spectrum([1.0, 2.0], [1, 1]), 0.1)
        # right on a pole of J: the hard evaluation guard fires
        with pytest.raises(PoleHit):
            g0_rational(j, -j.eps[0] + 1e-14, 1.0 + 1.0j)
        # approaching the diagonal z = -w: the proximity guard fires
        w = 1.0 + 1.0j
        with pytest.raises(PoleProximity):
            g0_rational(j, -w + 1e-12, w)
        with pytest.raises(PoleProximity):
            g0_product(j, 1.3, -1.3 + 1e-12)
