"""Exact planar sector of the quartic matrix model with finite spectra.

The package solves the deformed-spectrum fixed point for input data
(E, multiplicities, coupling), builds the rational curve J from it, and
evaluates the planar two-point function in several equivalent closed
forms, the cylinder amplitude, and the algebraic spectral curve.  A
separate oracle layer re-derives the same numbers through perturbation
theory, contour quadrature, rational approximants of the logarithmic
model, and direct Monte Carlo sampling of the matrix measure.
"""

from .errors import (
    BranchCrossing,
    DegenerateResultant,
    DomainError,
    EngineError,
    InputError,
    InvalidSpectrum,
    NonConvergence,
    PadeDegenerate,
    ParseError,
    PoleHit,
    PoleProximity,
    QuadratureNonConvergence,
    RootDefect,
    SingularSystem,
    ValidationError,
    WNonConvergence,
)
from .spectrum import (
    Coupling,
    DeformedSpectrum,
    SolverOptions,
    Spectrum,
    continuation_path,
    deformation_residual,
    solve_deformation,
)
from .rational_j import PreimageSet, RationalJ, partial_fraction_unity
from .two_point import (
    PlanarAmplitude,
    Representation,
    TwoPointMatrix,
    dse_residual,
    g0_branch,
    g0_matrix,
    g0_product,
    g0_rational,
    g0_rfe,
    jzz_residual,
)
from .cylinder import (
    CylinderBoundaryValues,
    SpectralCurvePoly,
    cylinder_boundary_values,
    g0_cylinder,
    spectral_curve,
)
from .oracles import (
    MCEstimate,
    OneMatrixClosedForm,
    PadeCheck,
    SeriesCoefficients,
    j2_inverse,
    lambert_pade_check,
    lambert_w0,
    monte_carlo_matrix,
    monte_carlo_moment,
    one_matrix_closed_form,
    perturbative_series,
    quadrature_g,
    quadrature_g_line,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # spectrum
    "Spectrum",
    "Coupling",
    "SolverOptions",
    "DeformedSpectrum",
    "solve_deformation",
    "continuation_path",
    "deformation_residual",
    # curve data
    "RationalJ",
    "PreimageSet",
    "partial_fraction_unity",
    # two-point function
    "Representation",
    "PlanarAmplitude",
    "TwoPointMatrix",
    "g0_rational",
    "g0_branch",
    "g0_product",
    "g0_rfe",
    "g0_matrix",
    "dse_residual",
    "jzz_residual",
    # cylinder and curve
    "CylinderBoundaryValues",
    "SpectralCurvePoly",
    "cylinder_boundary_values",
    "g0_cylinder",
    "spectral_curve",
    # oracles
    "OneMatrixClosedForm",
    "one_matrix_closed_form",
    "SeriesCoefficients",
    "perturbative_series",
    "quadrature_g",
    "quadrature_g_line",
    "lambert_w0",
    "j2_inverse",
    "PadeCheck",
    "lambert_pade_check",
    "MCEstimate",
    "monte_carlo_moment",
    "monte_carlo_matrix",
    # errors
    "EngineError",
    "InputError",
    "InvalidSpectrum",
    "NonConvergence",
    "PoleHit",
    "PoleProximity",
    "RootDefect",
    "SingularSystem",
    "DegenerateResultant",
    "QuadratureNonConvergence",
    "BranchCrossing",
    "DomainError",
    "PadeDegenerate",
    "WNonConvergence",
    "ParseError",
    "ValidationError",
]
