"""Deformation solver: fixed-point identities, limits, failure modes."""

import numpy as np
import pytest

from quartic_planar import (
    InvalidSpectrum,
    NonConvergence,
    SolverOptions,
    Spectrum,
    continuation_path,
    deformation_residual,
    solve_deformation,
)
from quartic_planar.oracles import one_matrix_closed_form

from conftest import random_spectrum


class TestSpectrumValidation:
    def test_basic_construction(self):
        sp = Spectrum([1.0, 2.0], [1, 2])
        assert sp.dimension == 2
        assert sp.matrix_size == 3

    def test_explicit_matrix_size(self):
        sp = Spectrum([1.0, 2.0], [1, 2], matrix_size=3)
        assert sp.matrix_size == 3

    def test_not_increasing(self):
        with pytest.raises(InvalidSpectrum, match="not increasing"):
            Spectrum([2.0, 1.0], [1, 1])

    def test_zero_multiplicity(self):
        with pytest.raises(InvalidSpectrum, match="multiplicity < 1"):
            Spectrum([1.0, 2.0], [0, 1])

    def test_fractional_multiplicity(self):
        with pytest.raises(InvalidSpectrum):
            Spectrum([1.0, 2.0], [1.5, 1])

    def test_solver_options_validate(self):
        with pytest.raises(ValueError):
            SolverOptions(tolerance=-1.0).validate()


class TestSolveDeformation:
    def test_zero_coupling_is_identity(self):
        sp = Spectrum([0.7, 1.4, 2.2], [2, 1, 3])
        dfm = solve_deformation(sp, 0.0)
        np.testing.assert_array_equal(dfm.epsilons, sp.eigenvalues)
        np.testing.assert_array_equal(dfm.rhos, sp.multiplicities.astype(float))

    def test_one_matrix_radicals(self):
        # E_1 = mu_sq/2 = 1, lam = 1/4: closed-form radicals
        cf = one_matrix_closed_form(2.0, 0.25)
        dfm = solve_deformation(Spectrum([1.0], [1]), 0.25)
        assert abs(dfm.epsilons[0] - cf.epsilon1) < 1e-12
        assert abs(dfm.rhos[0] - cf.rho1_over_n) < 1e-12

    def test_residual_below_tolerance(self):
        rng = np.random.default_rng(5)
        for d in (1, 2, 3, 4):
            sp = random_spectrum(rng, d)
            for lam in (-0.01, 0.05, 0.1):
                dfm = solve_deformation(sp, lam)
                res = deformation_residual(sp, lam, dfm)
                assert np.max(np.abs(res)) < 1e-10

    def test_principal_branch_limit(self):
        rng = np.random.default_rng(6)
        sp = random_spectrum(rng, 3)
        dfm = solve_deformation(sp, 1e-6)
        scale = max(sp.eigenvalues[-1], float(np.max(sp.multiplicities)))
        assert np.max(np.abs(dfm.epsilons - sp.eigenvalues)) < 1e-4 * scale
        assert np.max(np.abs(dfm.rhos - sp.multiplicities)) < 1e-4 * scale

    def test_order_preserved(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            sp = random_spectrum(rng, 4)
            dfm = solve_deformation(sp, 0.1)
            assert np.all(np.diff(dfm.epsilons) > 0)

    def test_positive_coupling_shifts_up(self):
        sp = Spectrum([1.0, 2.0], [1, 1])
        dfm = solve_deformation(sp, 0.1)
        assert np.all(dfm.epsilons > sp.eigenvalues)

    def test_fold_reports_last_converged(self):
        # d=1, E=1: real solutions stop at lam = -1/3
        with pytest.raises(NonConvergence) as info:
            solve_deformation(Spectrum([1.0], [1]), -0.4)
        last = info.value.last_converged
        assert last is not None
        assert -0.3334 < last <= -0.33

    def test_continuation_path(self):
        sp = Spectrum([0.8, 1.6], [1, 2])
        path = continuation_path(sp, 0.2, steps=5)
        assert len(path) == 5
        final = solve_deformation(sp, 0.2)
        assert np.max(np.abs(path[-1].epsilons - final.epsilons)) < 1e-10
