"""Cylinder (two-boundary) amplitude and the classical spectral curve.

The cylinder amplitude G(z|w) is fixed by the two-point function through
an affine system: at the ramification points a_k (positive solutions of
J(z) = J(-z)) the global denominator J(z) - J(-z) vanishes, so the
numerator must vanish there too.  That condition is a d x d linear
system for the boundary values G(eps_l|w); once solved, the amplitude
follows from a single explicit formula, regular at every z = +-a_k and
with its only denominator pole at z = 0.

The classical spectral curve E(x, y) is the resultant in z of the two
covering polynomials

    (x - z) prod_k (eps_k + z) + (lam/N) sum_k rho_k prod_{j!=k} (eps_j + z)
    (y - z) prod_k (eps_k - z) - (lam/N) sum_k rho_k prod_{j!=k} (eps_j - z)

computed from the Sylvester matrix with bivariate-polynomial entries by
fraction-free elimination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numpy.polynomial import polynomial as npoly

from .bipoly import BiPoly, bareiss_determinant
from .errors import DegenerateResultant, PoleProximity, SingularSystem
from .two_point import _weights, g0_rational

# Refusal radius (in units of the curve scale) around the denominator
# zeros of the explicit cylinder formula.
CYLINDER_PROXIMITY = 1e-8
CONDITION_LIMIT = 1e12
# Curve coefficients below this (relative to the largest) are truncated
# to exact zero for degree reporting.
COEFF_TRUNCATION = 1e-12


@dataclass(frozen=True)
class CylinderBoundaryValues:
    """Boundary values G(eps_l|w) of the cylinder amplitude."""

    w: complex
    values: np.ndarray


@dataclass(frozen=True)
class SpectralCurvePoly:
    """Bivariate polynomial E(x, y); coefficients[i, j] multiplies x^i y^j.

    Normalized so the largest coefficient has magnitude 1; degrees are
    reported after relative truncation of tiny coefficients.
    """

    coefficients: np.ndarray
    total_degree: int
    x_degree: int
    y_degree: int

    def evaluate(self, x, y):
        xi = x ** np.arange(self.coefficients.shape[0])
        yj = y ** np.arange(self.coefficients.shape[1])
        return xi @ (self.coefficients @ yj)

    def residual_scale(self, x, y):
        """Backward-error scale |E|(|x|, |y|) for the defining residual."""
        xi = np.abs(x) ** np.arange(self.coefficients.shape[0])
        yj = np.abs(y) ** np.arange(self.coefficients.shape[1])
        return float(xi @ (np.abs(self.coefficients) @ yj))


def _system_matrix(j):
    """Cauchy-like matrix C[k, l] = 1 / (J(a_k) - J(eps_l)), cached with
    its LU factorization and condition number."""
    if "cyl_system" not in j._cache:
        alphas = j.ramification_points()
        d = j.dimension
        c = np.empty((d, d))
        for k in range(d):
            for l in range(d):
                c[k, l] = 1.0 / float(np.real(j.j_difference(alphas[k], j.eps[l])))
        cond = float(np.linalg.cond(c))
        lu = scipy.linalg.lu_factor(c) if cond <= CONDITION_LIMIT else None
        j._cache["cyl_system"] = (alphas, c, lu, cond)
    return j._cache["cyl_system"]


def cylinder_boundary_values(j, alphas, w):
    """Solve the affine system for the boundary values G(eps_l|w).

    The system equates, at every ramification point a_k,
    ``(1/N) sum_l r_l G(eps_l|w) / (J(a_k)-J(eps_l))`` with
    ``(G(a_k, w) - G(w, w)) / (J(a_k)-J(w))``; its matrix is
    w-independent and LU factors are cached on the curve.
    """
    w = complex(w)
    cached_alphas, c, lu, cond = _system_matrix(j)
    if alphas is None:
        alphas = cached_alphas
    elif np.max(np.abs(np.asarray(alphas) - cached_alphas)) > 1e-9 * j.scale:
        raise ValueError("alphas disagree with the curve's ramification points")
    if cond > CONDITION_LIMIT:
        raise SingularSystem(
            f"boundary-value system condition {cond:.3e} exceeds {CONDITION_LIMIT:.1e}"
        )
    g_ww = g0_rational(j, w, w).value
    rhs = np.empty(j.dimension, dtype=complex)
    for k in range(j.dimension):
        g_aw = g0_rational(j, alphas[k], w).value
        rhs[k] = (g_aw - g_ww) / complex(j.j_difference(alphas[k], w))
    # Unknowns y_l = (r_l/N) G(eps_l|w)
    if np.iscomplexobj(rhs) and np.max(np.abs(rhs.imag)) == 0.0:
        rhs = rhs.real.astype(complex)
    y = scipy.linalg.lu_solve(lu, rhs)
    r = _weights(j)
    values = y * (float(j.matrix_size) / r)
    values.flags.writeable = False
    return CylinderBoundaryValues(w=w, values=values)


def g0_cylinder(j, z, w, boundary=None):
    """Evaluate the explicit cylinder formula

    ``[(lam/N) sum_k r_k G(eps_k|w)/(J(eps_k)-J(z))
       + lam (G(z,w)-G(w,w))/(J(z)-J(w))] / (J(z)-J(-z))``.

    The point z must stay away from the denominator zeros: the pole at
    z = 0 and the ramification points +-a_k (where the amplitude is
    finite but the quotient needs the solved cancellation; probe nearby
    instead).  z = w needs the derivative limit and is likewise refused.
    """
    z, w = complex(z), complex(w)
    alphas, _, _, _ = _system_matrix(j)
    radius = CYLINDER_PROXIMITY * j.scale
    if abs(z) < radius:
        raise PoleProximity("cylinder amplitude has its denominator pole at z=0")
    if np.min(np.abs(np.abs(z) - alphas)) < radius and abs(z.imag) < radius:
        raise PoleProximity(
            "z within the cancellation region of a ramification point; "
            "probe at a small offset instead"
        )
    if abs(z - w) < radius:
        raise PoleProximity("z = w requires the derivative limit; offset z")
    if boundary is None:
        boundary = cylinder_boundary_values(j, alphas, w)
    r = _weights(j)
    lam_n = j.lam / float(j.matrix_size)
    total = complex(0.0)
    for k in range(j.dimension):
        total += r[k] * boundary.values[k] / complex(
            j.j_difference(j.eps[k], z)
        )
    g_zw = g0_rational(j, z, w).value
    g_ww = g0_rational(j, w, w).value
    total = lam_n * total + j.lam * (g_zw - g_ww) / complex(j.j_difference(z, w))
    return total / complex(j.j_difference(z, -z))


# -- spectral curve ------------------------------------------------------


def _covering_polynomials(j):
    """Coefficient lists (ascending in z) of the two covering polynomials;
    entries are BiPoly in (x, y)."""
    d = j.dimension
    eps = j.eps
    lam_n = j.lam / float(j.matrix_size)
    x, y = BiPoly.x(), BiPoly.y()

    plus = npoly.polyfromroots(-eps)  # prod (z + eps_k), ascending
    minus = (-1.0) ** d * npoly.polyfromroots(eps)  # prod (eps_k - z)
    p = [BiPoly.constant(0.0) for _ in range(d + 2)]
    q = [BiPoly.constant(0.0) for _ in range(d + 2)]
    for i in range(d + 1):
        p[i] = p[i] + x * float(plus[i])
        p[i + 1] = p[i + 1] - BiPoly.constant(float(plus[i]))
        q[i] = q[i] + y * float(minus[i])
        q[i + 1] = q[i + 1] - BiPoly.constant(float(minus[i]))
    for k in range(d):
        sub_p = npoly.polyfromroots(-np.delete(eps, k))
        sub_q = (-1.0) ** (d - 1) * npoly.polyfromroots(np.delete(eps, k))
        for i in range(d):
            p[i] = p[i] + BiPoly.constant(lam_n * j.rho[k] * float(sub_p[i]))
            q[i] = q[i] - BiPoly.constant(lam_n * j.rho[k] * float(sub_q[i]))
    return p, q


def _sylvester(p, q):
    """Sylvester matrix (in z) of two coefficient lists of BiPoly entries."""
    dp = len(p) - 1
    dq = len(q) - 1
    n = dp + dq
    zero = BiPoly.constant(0.0)
    rows = []
    for shift in range(dq):
        row = [zero] * n
        for i, coeff in enumerate(reversed(p)):  # descending order
            row[shift + i] = coeff
        rows.append(row)
    for shift in range(dp):
        row = [zero] * n
        for i, coeff in enumerate(reversed(q)):
            row[shift + i] = coeff
        rows.append(row)
    return rows


def spectral_curve(j):
    """Classical spectral curve E(x, y) as the resultant of the two
    covering polynomials, eliminated fraction-free over bivariate entries.

    Raises DegenerateResultant when the determinant collapses to zero
    (coincident deformed eigenvalues).
    """
    p, q = _covering_polynomials(j)
    det = bareiss_determinant(_sylvester(p, q))
    det = det.trim()
    if det.is_negligible(1e-200) or det.max_abs == 0.0:
        raise DegenerateResultant("resultant vanished identically")
    c = det.c / det.max_abs
    # Fix the overall sign so the lexicographically last surviving
    # coefficient is positive (stable output convention).
    nz = np.nonzero(np.abs(c) > COEFF_TRUNCATION)
    if len(nz[0]) == 0:
        raise DegenerateResultant("resultant vanished after truncation")
    last = (nz[0][-1], nz[1][-1])
    if c[last] < 0:
        c = -c
    curve = BiPoly(c)
    total, dx, dy = curve.degrees(COEFF_TRUNCATION)
    trimmed = curve.trim(COEFF_TRUNCATION)
    return SpectralCurvePoly(
        coefficients=trimmed.c,
        total_degree=total,
        x_degree=dx,
        y_degree=dy,
    )
