"""Shared helpers: seeded random spectra and curve construction."""

import numpy as np
import pytest

from quartic_planar import RationalJ, Spectrum, solve_deformation


def random_spectrum(rng, d, e_min=0.4, e_max=3.0, min_gap=0.15, max_mult=3):
    """Sorted eigenvalues with a guaranteed gap; small integer weights."""
    while True:
        e = np.sort(rng.uniform(e_min, e_max, d))
        if d == 1 or np.min(np.diff(e)) > min_gap:
            break
    return Spectrum(e, rng.integers(1, max_mult + 1, d))


def build_curve(spectrum, lam):
    deformed = solve_deformation(spectrum, lam)
    return RationalJ(deformed, lam, spectrum.matrix_size)


def sample_point(rng, scale):
    """Right-half-plane point safely away from poles and the real axis."""
    return complex(
        rng.uniform(0.2, 2.5) * scale, rng.uniform(0.1, 1.5) * scale
    )


@pytest.fixture(scope="session")
def curve_61():
    """The one-eigenvalue reference model: E=1 (mu_sq=2), lam=1/4."""
    return build_curve(Spectrum([1.0], [1]), 0.25)
