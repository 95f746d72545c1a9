"""The rational curve attached to a deformed spectrum.

For a deformed spectrum ``(eps_k, rho_k)`` at coupling ``lam`` and matrix
size ``N`` the curve is

    J(z) = z - (lam/N) * sum_k rho_k / (eps_k + z),

a degree-(d+1) rational map with simple poles at ``z = -eps_k``.  A point
``v`` has d+1 preimages under ``J(.) = J(v)``; besides ``v`` itself there
are d extra roots, which drive every closed-form amplitude downstream.
For real ``v >= 0`` and ``lam > 0`` the extra roots are real and
interlace the poles:

    -eps_{k+1} < vhat^k < -eps_k   (k = 1..d-1),   vhat^d < -eps_d.

Roots are computed from the companion matrix of the deflated numerator
polynomial and polished by a few Newton steps on ``J(z) - J(v)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import PoleHit, RootDefect

# A computed preimage set is rejected when the worst backward error
# max_k |J(root_k) - J(v)| exceeds DEFECT_TOL * (1 + |J(v)|).
DEFECT_TOL = 1e-6
# Ramification points must return |J(a) - J(-a)| below this.
RAMIFICATION_TOL = 1e-9


@dataclass(frozen=True)
class PreimageSet:
    """The d extra solutions of J(z) = J(base_point), base point excluded."""

    base_point: complex
    roots: np.ndarray
    max_defect: float


class RationalJ:
    """Evaluator for the rational curve of a deformed spectrum.

    Parameters
    ----------
    deformed : DeformedSpectrum
        Solution of the deformation system (``eps_k`` increasing, ``rho_k > 0``).
    lam : float
        Quartic coupling.
    matrix_size : int or float
        The ``N`` in the ``lam/N`` prefactor.

    Notes
    -----
    The effective multiplicities used by amplitude formulas are
    ``r_k = rho_k * J'(eps_k)``; for a spectrum solved from integer input
    these agree with the integer multiplicities to solver accuracy.
    """

    def __init__(self, deformed, lam, matrix_size):
        self.deformed = deformed
        self.lam = float(lam)
        self.matrix_size = matrix_size
        self.eps = np.asarray(deformed.epsilons, dtype=float)
        self.rho = np.asarray(deformed.rhos, dtype=float)
        self.dimension = self.eps.size
        self.scale = 1.0 + float(np.max(np.abs(self.eps)))
        # Exclusion radius around the poles z = -eps_k.
        self.pole_radius = 1e-13 * self.scale
        self._coef = self.lam / float(matrix_size)
        self._eigen_preimages = None
        self._cache = {}

    # -- evaluation ----------------------------------------------------

    def _check_poles(self, z):
        dist = np.abs(np.asarray(z)[..., None] + self.eps)
        if np.any(dist < self.pole_radius):
            raise PoleHit(
                f"evaluation within {self.pole_radius:.3e} of a pole of J"
            )

    def weights(self):
        """Effective multiplicities r_k = rho_k * J'(eps_k)."""
        return self.rho * self.j_prime(self.eps)

    def j(self, z):
        """Evaluate J(z).  Raises PoleHit within 1e-13*(1+max eps) of a pole."""
        z = np.asarray(z)
        self._check_poles(z)
        return z - self._coef * (self.rho / (self.eps + z[..., None])).sum(axis=-1)

    def j_prime(self, z):
        """Evaluate J'(z) = 1 + (lam/N) sum_k rho_k/(eps_k+z)^2."""
        z = np.asarray(z)
        self._check_poles(z)
        return 1.0 + self._coef * (self.rho / (self.eps + z[..., None]) ** 2).sum(
            axis=-1
        )

    def j_difference(self, x, y):
        """J(x) - J(y) without subtractive cancellation.

        Uses the identity
        ``J(x) - J(y) = (x-y) * [1 + (lam/N) sum_k rho_k/((eps_k+x)(eps_k+y))]``,
        which keeps full relative accuracy when x and y are close (the
        plain difference of two J values loses all digits there).
        """
        x = np.asarray(x)
        y = np.asarray(y)
        self._check_poles(x)
        self._check_poles(y)
        s = (
            self.rho / ((self.eps + x[..., None]) * (self.eps + y[..., None]))
        ).sum(axis=-1)
        return (x - y) * (1.0 + self._coef * s)

    # -- preimages -----------------------------------------------------

    def numerator_polynomial(self, v):
        """Ascending coefficients of the monic degree-(d+1) polynomial
        ``(J(z) - J(v)) * prod_k (z + eps_k)``."""
        jv = self.j(v)
        base = npoly.polyfromroots(-self.eps)  # prod_k (z + eps_k)
        out = npoly.polymul(np.array([-jv, 1.0]), base.astype(np.result_type(jv)))
        for k in range(self.dimension):
            sub = npoly.polyfromroots(-np.delete(self.eps, k))
            out[: self.dimension] -= self._coef * self.rho[k] * sub
        return out

    def preimages(self, v):
        """The d extra preimages of J(v), companion-matrix roots plus polish.

        Roots are sorted real-descending; genuinely complex roots follow
        the real ones, ordered by argument (this fixed order is a
        convention of this implementation).  Raises RootDefect when the
        backward error exceeds ``1e-6 * (1 + |J(v)|)``.
        """
        coeffs = self.numerator_polynomial(v)
        quotient = _deflate(coeffs, v)
        monic = quotient / quotient[-1]
        if monic.size == 1:
            roots = np.array([], dtype=complex)
        else:
            comp = npoly.polycompanion(monic)
            roots = np.linalg.eigvals(comp)
        jv = self.j(v)
        roots = self._polish(roots, jv)
        defect = float(np.max(np.abs(self.j(roots) - jv))) if roots.size else 0.0
        # Near a pole |J'| blows up, so |J(root)-J(v)| cannot resolve below
        # |J'| * ulp(root) no matter how accurate the root is; widen the
        # gate by that floor (negligible away from poles).
        noise = 64.0 * np.finfo(float).eps * float(
            np.max(np.abs(self.j_prime(roots)) * (1.0 + np.abs(roots)))
        ) if roots.size else 0.0
        tol = DEFECT_TOL * (1.0 + abs(jv)) + noise
        if defect > tol:
            raise RootDefect(
                f"preimage backward error {defect:.3e} exceeds {tol:.3e}"
            )
        roots = _sort_roots(roots, self.scale)
        roots.flags.writeable = False
        return PreimageSet(base_point=complex(v), roots=roots, max_defect=defect)

    def _polish(self, roots, target):
        roots = np.asarray(roots, dtype=complex).copy()
        for i, z in enumerate(roots):
            if np.min(np.abs(z + self.eps)) < 16 * self.pole_radius:
                continue  # cannot evaluate J this close to a pole
            best, best_err = z, abs(self.j(z) - target)
            for _ in range(5):
                fz = self.j(z) - target
                dz = fz / self.j_prime(z)
                z = z - dz
                if np.min(np.abs(z + self.eps)) < 16 * self.pole_radius:
                    break
                err = abs(self.j(z) - target)
                if err < best_err:
                    best, best_err = z, err
                if abs(dz) < 1e-16 * (1.0 + abs(z)):
                    break
            roots[i] = best
        return roots

    def eigen_preimages(self):
        """PreimageSets of every eps_k (cached; used by all amplitude formulas)."""
        if self._eigen_preimages is None:
            self._eigen_preimages = tuple(
                self.preimages(e) for e in self.eps
            )
        return self._eigen_preimages

    # -- ramification points --------------------------------------------

    def ramification_points(self):
        """Positive solutions of J(z) = J(-z), ascending.

        In the variable s = z**2 these are the d roots of
        ``prod_j (eps_j^2 - s) + (lam/N) sum_k rho_k prod_{j!=k} (eps_j^2 - s)``,
        obtained from the companion matrix and checked against
        ``|J(a) - J(-a)| <= 1e-9``.
        """
        eps2 = self.eps**2
        d = self.dimension
        # prod_j (eps_j^2 - s) = (-1)^d prod_j (s - eps_j^2), ascending in s
        q = (-1.0) ** d * npoly.polyfromroots(eps2)
        for k in range(d):
            sub = (-1.0) ** (d - 1) * npoly.polyfromroots(np.delete(eps2, k))
            q[:d] += self._coef * self.rho[k] * sub
        monic = q / q[-1]
        if monic.size == 2:
            s_roots = np.array([-monic[0]], dtype=complex)
        else:
            s_roots = np.linalg.eigvals(npoly.polycompanion(monic))
        if np.any(np.abs(s_roots.imag) > 1e-9 * self.scale**2) or np.any(
            s_roots.real <= 0
        ):
            raise RootDefect(
                f"ramification solutions not real positive: {s_roots}"
            )
        alphas = np.sort(np.sqrt(s_roots.real))
        defect = np.max(np.abs(self.j(alphas) - self.j(-alphas)))
        # As the coupling shrinks, the points approach the poles of J(-z)
        # and the identity residual cannot resolve below |J'(-a)| * ulp(a);
        # the gate widens by that floor, staying at 1e-9 for working
        # couplings.
        noise = 64.0 * np.finfo(float).eps * float(
            np.max(
                (1.0 + np.abs(alphas))
                * (np.abs(self.j_prime(alphas)) + np.abs(self.j_prime(-alphas)))
            )
        )
        if defect > RAMIFICATION_TOL + noise:
            raise RootDefect(
                f"|J(a) - J(-a)| = {defect:.3e} exceeds {RAMIFICATION_TOL:.1e}"
            )
        alphas.flags.writeable = False
        return alphas

    def __repr__(self):
        return (
            f"RationalJ(d={self.dimension}, lam={self.lam}, "
            f"N={self.matrix_size})"
        )


def _deflate(coeffs, root):
    """Synthetic division of an ascending-coefficient polynomial by (z - root)."""
    c = np.asarray(coeffs, dtype=complex)
    n = c.size - 1
    q = np.zeros(n, dtype=complex)
    acc = c[n]
    for i in range(n - 1, -1, -1):
        q[i] = acc
        acc = c[i] + acc * root
    # acc is the remainder = P(root); small for a genuine root, dropped.
    return q


def _sort_roots(roots, scale):
    if roots.size == 0:
        return roots.astype(complex)
    imag_tol = 1e-8 * scale
    real_mask = np.abs(roots.imag) <= imag_tol * (1.0 + np.abs(roots.real))
    if np.all(real_mask):
        return np.sort(roots.real)[::-1].copy()
    real_part = np.sort(roots[real_mask].real)[::-1]
    rest = roots[~real_mask]
    rest = rest[np.lexsort((np.abs(rest), np.angle(rest)))]
    return np.concatenate([real_part.astype(complex), rest])


def partial_fraction_unity(x, c):
    """The interpolation sum ``sum_j prod_k (x_j - c_k) / prod_{m!=j} (x_j - x_m)``.

    For d+1 pairwise distinct nodes ``x`` and any d values ``c`` this is
    identically 1 (the leading coefficient of the Lagrange interpolant of
    a monic polynomial); exposed as a helper because the closed-form
    two-point representation rests on it.
    """
    x = np.asarray(x, dtype=complex)
    c = np.asarray(c, dtype=complex)
    if x.size != c.size + 1:
        raise ValueError("need one more node than factor")
    total = 0.0 + 0.0j
    for jdx in range(x.size):
        num = np.prod(x[jdx] - c)
        den = np.prod(np.delete(x, jdx) * -1.0 + x[jdx])
        total += num / den
    return total
