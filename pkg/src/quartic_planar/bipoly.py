"""Dense bivariate polynomials with fraction-free determinant support.

Coefficient layout: ``c[i, j]`` multiplies ``x**i * y**j``.  Arithmetic
is plain double precision; the exact divisions required by fraction-free
(Bareiss) elimination are carried out by multivariate long division in
lexicographic order (x before y) and checked against a relative
remainder threshold.
"""

from __future__ import annotations

import numpy as np

# Relative remainder above this means a division that should have been
# exact was not; the caller's elimination is then invalid.
DIVISION_RESIDUAL_TOL = 1e-9


class BiPoly:
    __slots__ = ("c",)

    def __init__(self, c):
        self.c = np.atleast_2d(np.asarray(c, dtype=float))

    @classmethod
    def constant(cls, v):
        return cls([[float(v)]])

    @classmethod
    def x(cls):
        return cls([[0.0], [1.0]])

    @classmethod
    def y(cls):
        return cls([[0.0, 1.0]])

    def copy(self):
        return BiPoly(self.c.copy())

    @property
    def max_abs(self):
        return float(np.max(np.abs(self.c)))

    def is_negligible(self, tol=1e-250):
        return self.max_abs <= tol

    def trim(self, rel_tol=0.0):
        """Drop trailing zero rows/columns (and coefficients below
        rel_tol * max_abs when rel_tol > 0)."""
        c = self.c.copy()
        if rel_tol > 0 and c.size:
            c[np.abs(c) < rel_tol * np.max(np.abs(c))] = 0.0
        nz = np.nonzero(c)
        if len(nz[0]) == 0:
            return BiPoly([[0.0]])
        return BiPoly(c[: nz[0].max() + 1, : nz[1].max() + 1])

    def degrees(self, rel_tol=0.0):
        """(total_degree, x_degree, y_degree) after relative truncation."""
        c = self.trim(rel_tol).c
        nz = np.nonzero(c)
        if len(nz[0]) == 0 or (c.shape == (1, 1) and c[0, 0] == 0.0):
            return (-1, -1, -1)
        total = int(np.max(nz[0] + nz[1]))
        return (total, int(nz[0].max()), int(nz[1].max()))

    def __add__(self, other):
        a, b = self.c, other.c
        n = (max(a.shape[0], b.shape[0]), max(a.shape[1], b.shape[1]))
        out = np.zeros(n)
        out[: a.shape[0], : a.shape[1]] += a
        out[: b.shape[0], : b.shape[1]] += b
        return BiPoly(out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return BiPoly(-self.c)

    def __mul__(self, other):
        if np.isscalar(other):
            return BiPoly(self.c * other)
        a, b = self.c, other.c
        out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1))
        for i in range(a.shape[0]):
            for jj in range(a.shape[1]):
                if a[i, jj] != 0.0:
                    out[i : i + b.shape[0], jj : jj + b.shape[1]] += a[i, jj] * b
        return BiPoly(out)

    __rmul__ = __mul__

    def evaluate(self, x, y):
        xi = x ** np.arange(self.c.shape[0])
        yj = y ** np.arange(self.c.shape[1])
        return xi @ (self.c @ yj)

    def abs_evaluate(self, x, y):
        """Evaluation of the absolute-coefficient polynomial at (|x|, |y|);
        the natural backward-error scale for residual checks."""
        xi = np.abs(x) ** np.arange(self.c.shape[0])
        yj = np.abs(y) ** np.arange(self.c.shape[1])
        return float(xi @ (np.abs(self.c) @ yj))

    def _leading(self):
        # lex order with x dominant: highest i, then highest j
        nz = np.nonzero(self.c)
        if len(nz[0]) == 0:
            return None
        i = int(nz[0].max())
        jj = int(self.c[i].nonzero()[0].max())
        return i, jj

    def divide_exact(self, divisor):
        """Quotient of an exact division (raises on a genuine remainder)."""
        if divisor.is_negligible():
            raise ZeroDivisionError("division by (near-)zero polynomial")
        rem = self.c.copy()
        scale = max(np.max(np.abs(rem)), 1e-300)
        lead = divisor._leading()
        li, lj = lead
        lc = divisor.c[li, lj]
        qshape = (
            max(rem.shape[0] - divisor.c.shape[0] + 1, 1),
            max(rem.shape[1] - divisor.c.shape[1] + 1, 1),
        )
        quot = np.zeros(qshape)
        # Zero out noise so the leading-term scan terminates.
        cutoff = 1e-14 * scale
        while True:
            rem[np.abs(rem) <= cutoff] = 0.0
            nz = np.nonzero(rem)
            if len(nz[0]) == 0:
                break
            i = int(nz[0].max())
            jj = int(rem[i].nonzero()[0].max())
            if i < li or jj < lj:
                break  # leftover below the divisor's leading term
            qi, qj = i - li, jj - lj
            coeff = rem[i, jj] / lc
            quot[qi, qj] += coeff
            rem[qi : qi + divisor.c.shape[0], qj : qj + divisor.c.shape[1]] -= (
                coeff * divisor.c
            )
            rem[i, jj] = 0.0  # cancelled exactly by construction
        leftover = float(np.max(np.abs(rem))) if rem.size else 0.0
        if leftover > DIVISION_RESIDUAL_TOL * scale:
            raise ArithmeticError(
                f"inexact polynomial division (remainder {leftover:.3e} "
                f"vs scale {scale:.3e})"
            )
        return BiPoly(quot).trim()

    def __repr__(self):
        return f"BiPoly(shape={self.c.shape}, max={self.max_abs:.3g})"


def bareiss_determinant(matrix):
    """Fraction-free determinant of a square matrix of BiPoly entries.

    Each elimination step divides by the previous pivot; those divisions
    are exact in exact arithmetic (Bareiss), and are verified here by the
    remainder check inside divide_exact.
    """
    n = len(matrix)
    m = [[matrix[i][jj].copy() for jj in range(n)] for i in range(n)]
    if n == 0:
        return BiPoly.constant(1.0)
    if n == 1:
        return m[0][0]
    sign = 1.0
    prev = BiPoly.constant(1.0)
    for k in range(n - 1):
        if m[k][k].is_negligible():
            for i in range(k + 1, n):
                if not m[i][k].is_negligible():
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return BiPoly.constant(0.0)
        for i in range(k + 1, n):
            for jj in range(k + 1, n):
                num = m[k][k] * m[i][jj] - m[i][k] * m[k][jj]
                m[i][jj] = num.divide_exact(prev)
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign > 0 else -det
