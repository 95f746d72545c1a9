"""Deformed-spectrum solver for the planar quartic model.

Input data is a finite spectrum: eigenvalues ``E_1 < ... < E_d`` with
integer multiplicities ``r_k`` (matrix size ``N = sum r_k``) and a quartic
coupling ``lam``.  The deformed eigenvalues ``eps_k`` and deformed
multiplicities ``rho_k`` solve the coupled system

    E_l = eps_l - (lam/N) * sum_k rho_k / (eps_k + eps_l)
    1   = r_l / rho_l - (lam/N) * sum_k rho_k / (eps_k + eps_l)**2

The principal branch is the solution continuously connected to
``(eps, rho) = (E, r)`` at ``lam = 0``.  It is tracked by a homotopy in
the coupling with a damped Newton corrector (analytic Jacobian) at each
step; the step is halved whenever Newton stalls or leaves the positive
cone, down to a floor of ``2**-20 * |lam_target|``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpectrum, NonConvergence

# Continuation may not shrink its step below this fraction of the target
# coupling; reaching the floor means the requested coupling is outside the
# reachable branch.
MIN_STEP_FACTOR = 2.0**-20


class Spectrum:
    """Validated input spectrum.

    Parameters
    ----------
    eigenvalues : array_like
        Strictly increasing, strictly positive reals ``E_1 < ... < E_d``.
        Spacings below ``1e-12 * E_d`` are rejected as degenerate.
    multiplicities : array_like
        Integers ``>= 1``, one per eigenvalue.
    matrix_size : int, optional
        Must equal ``sum(multiplicities)`` when given.
    """

    def __init__(self, eigenvalues, multiplicities, matrix_size=None):
        e = np.atleast_1d(np.asarray(eigenvalues, dtype=float))
        r = np.atleast_1d(np.asarray(multiplicities))
        if e.ndim != 1 or r.ndim != 1 or e.size == 0 or e.size != r.size:
            raise InvalidSpectrum(
                "need equally many eigenvalues and multiplicities (at least one)"
            )
        if not np.all(np.isfinite(e)):
            raise InvalidSpectrum("eigenvalues must be finite")
        if np.any(e <= 0.0):
            raise InvalidSpectrum("eigenvalues must be strictly positive")
        if e.size > 1 and np.min(np.diff(e)) < 1e-12 * e[-1]:
            raise InvalidSpectrum(
                "eigenvalues not increasing (or spacing below 1e-12 * E_d)"
            )
        r_int = np.round(np.asarray(r, dtype=float)).astype(int)
        if np.any(np.abs(np.asarray(r, dtype=float) - r_int) > 0):
            raise InvalidSpectrum("multiplicities must be integers")
        if np.any(r_int < 1):
            raise InvalidSpectrum("multiplicity < 1")
        n = int(r_int.sum())
        if matrix_size is not None and int(matrix_size) != n:
            raise InvalidSpectrum(
                f"matrix_size {matrix_size} != sum of multiplicities {n}"
            )
        e.flags.writeable = False
        r_int.flags.writeable = False
        self.eigenvalues = e
        self.multiplicities = r_int
        self.matrix_size = n

    @property
    def dimension(self):
        return self.eigenvalues.size

    def __repr__(self):
        return (
            f"Spectrum(eigenvalues={self.eigenvalues.tolist()}, "
            f"multiplicities={self.multiplicities.tolist()})"
        )


@dataclass(frozen=True)
class Coupling:
    """Quartic coupling constant (the coefficient of the Tr Phi^4 / 4 term)."""

    value: float

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise InvalidSpectrum("coupling must be finite")


def _coupling_value(coupling):
    # Accept a bare float alongside the Coupling wrapper.
    if isinstance(coupling, Coupling):
        return float(coupling.value)
    return float(coupling)


@dataclass
class SolverOptions:
    tolerance: float = 1e-12
    max_newton_iters: int = 50
    max_continuation_steps: int = 4096

    def validate(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_newton_iters < 1:
            raise ValueError("max_newton_iters must be >= 1")
        if self.max_continuation_steps < 1:
            raise ValueError("max_continuation_steps must be >= 1")


@dataclass(frozen=True)
class DeformedSpectrum:
    """Solution (eps_k, rho_k) of the deformation system at coupling lam."""

    epsilons: np.ndarray
    rhos: np.ndarray
    residual_norm: float
    lam: float

    @property
    def dimension(self):
        return self.epsilons.size


def deformation_residual(spectrum, coupling, candidate):
    """Residual vector of the deformation system at a candidate point.

    Returns the 2d real components in the order: the d defects of the
    eigenvalue equations, then the d defects of the multiplicity
    equations, i.e. ``E_l - [eps_l - (lam/N) sum_k rho_k/(eps_k+eps_l)]``
    followed by ``1 - [r_l/rho_l - (lam/N) sum_k rho_k/(eps_k+eps_l)^2]``.
    """
    lam = _coupling_value(coupling)
    eps = np.asarray(candidate.epsilons, dtype=float)
    rho = np.asarray(candidate.rhos, dtype=float)
    return _residual(
        spectrum.eigenvalues,
        spectrum.multiplicities.astype(float),
        spectrum.matrix_size,
        lam,
        eps,
        rho,
    )


def _residual(e_in, r_in, n, lam, eps, rho):
    pair = np.add.outer(eps, eps)  # pair[l, m] = eps_l + eps_m
    s1 = (rho / pair).sum(axis=1)
    s2 = (rho / pair**2).sum(axis=1)
    res_e = e_in - (eps - (lam / n) * s1)
    res_r = 1.0 - (r_in / rho - (lam / n) * s2)
    return np.concatenate([res_e, res_r])


def _jacobian(r_in, n, lam, eps, rho):
    # Blocks of d(residual)/d(eps, rho); residual as in _residual.
    d = eps.size
    pair = np.add.outer(eps, eps)
    inv1 = 1.0 / pair
    inv2 = inv1**2
    inv3 = inv1**3
    s2 = (rho * inv2).sum(axis=1)
    s3 = (rho * inv3).sum(axis=1)
    c = lam / n

    a = -np.eye(d) - c * (rho[None, :] * inv2 + np.diag(s2))
    b = c * inv1
    cc = -2.0 * c * (rho[None, :] * inv3 + np.diag(s3))
    dd = np.diag(r_in / rho**2) + c * inv2
    return np.block([[a, b], [cc, dd]])


def _newton(e_in, r_in, n, lam, eps0, rho0, tol, max_iters):
    """Damped Newton on the deformation system.  Returns (eps, rho, ok, resnorm)."""
    eps = eps0.copy()
    rho = rho0.copy()
    f = _residual(e_in, r_in, n, lam, eps, rho)
    fnorm = np.max(np.abs(f))
    for _ in range(max_iters):
        if fnorm <= tol:
            return eps, rho, True, fnorm
        jac = _jacobian(r_in, n, lam, eps, rho)
        try:
            dx = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            return eps, rho, False, fnorm
        # Backtrack until the iterate stays in the positive cone and the
        # residual does not grow.
        t = 1.0
        for _ in range(40):
            eps_t = eps + t * dx[: eps.size]
            rho_t = rho + t * dx[eps.size :]
            if np.all(eps_t > 0) and np.all(rho_t > 0):
                f_t = _residual(e_in, r_in, n, lam, eps_t, rho_t)
                fnorm_t = np.max(np.abs(f_t))
                if fnorm_t < fnorm or fnorm_t <= tol:
                    eps, rho, f, fnorm = eps_t, rho_t, f_t, fnorm_t
                    break
            t *= 0.5
        else:
            return eps, rho, False, fnorm
    return eps, rho, fnorm <= tol, fnorm


def _is_principal(eps):
    # The branch connected to lam=0 keeps the eigenvalue ordering.
    return eps.size == 1 or np.all(np.diff(eps) > 0)


def _continue_to(e_in, r_in, n, eps, rho, lam_from, lam_to, opts):
    """March the solution from lam_from to lam_to with adaptive steps."""
    if lam_to == lam_from:
        return eps, rho, 0.0
    span = lam_to - lam_from
    min_step = MIN_STEP_FACTOR * abs(span) if span != 0 else 0.0
    lam_cur = lam_from
    step = span
    n_steps = 0
    resnorm = 0.0
    while lam_cur != lam_to:
        n_steps += 1
        if n_steps > opts.max_continuation_steps:
            raise NonConvergence(
                f"continuation exceeded {opts.max_continuation_steps} steps "
                f"at coupling {lam_cur}",
                last_converged=lam_cur,
            )
        lam_try = lam_to if abs(lam_to - lam_cur) <= abs(step) else lam_cur + step
        eps_t, rho_t, ok, resnorm = _newton(
            e_in, r_in, n, lam_try, eps, rho, opts.tolerance, opts.max_newton_iters
        )
        if ok and _is_principal(eps_t):
            eps, rho = eps_t, rho_t
            lam_cur = lam_try
            # Grow cautiously after a success so short stalls stay cheap.
            step = step * 2.0 if abs(step) < abs(span) else span
        else:
            step *= 0.5
            if abs(step) < min_step:
                raise NonConvergence(
                    f"continuation stalled near coupling {lam_cur} "
                    f"(step below 2**-20 of target)",
                    last_converged=lam_cur,
                )
    return eps, rho, resnorm


def solve_deformation(spectrum, coupling, opts=None):
    """Solve the deformation system on the principal branch.

    Parameters
    ----------
    spectrum : Spectrum
    coupling : Coupling or float
    opts : SolverOptions, optional

    Returns
    -------
    DeformedSpectrum
        With ``max |residual| <= opts.tolerance``.  At ``lam == 0`` the
        result is exactly ``(E, r)``.

    Raises
    ------
    NonConvergence
        If the homotopy stalls before reaching the requested coupling; the
        exception carries the last coupling that did converge.
    """
    if opts is None:
        opts = SolverOptions()
    opts.validate()
    lam = _coupling_value(coupling)
    e_in = spectrum.eigenvalues
    r_in = spectrum.multiplicities.astype(float)
    n = spectrum.matrix_size
    if lam == 0.0:
        return DeformedSpectrum(e_in.copy(), r_in.copy(), 0.0, 0.0)
    eps, rho, resnorm = _continue_to(
        e_in, r_in, n, e_in.copy(), r_in.copy(), 0.0, lam, opts
    )
    eps.flags.writeable = False
    rho.flags.writeable = False
    return DeformedSpectrum(eps, rho, float(resnorm), lam)


def continuation_path(spectrum, lambda_target, steps, opts=None):
    """Solutions along the uniform coupling grid ``lam_j = j*lambda_target/steps``.

    Each grid point is solved by warm-starting from the previous one; the
    marching between grid points halves its internal step adaptively.
    Returns a list of ``steps`` DeformedSpectrum entries, ``j = 1..steps``.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if opts is None:
        opts = SolverOptions()
    opts.validate()
    lam_t = _coupling_value(lambda_target)
    e_in = spectrum.eigenvalues
    r_in = spectrum.multiplicities.astype(float)
    n = spectrum.matrix_size
    eps, rho = e_in.copy(), r_in.copy()
    lam_cur = 0.0
    out = []
    for j in range(1, steps + 1):
        lam_j = j * lam_t / steps
        if lam_j == 0.0:
            out.append(DeformedSpectrum(e_in.copy(), r_in.copy(), 0.0, 0.0))
            continue
        eps, rho, resnorm = _continue_to(e_in, r_in, n, eps, rho, lam_cur, lam_j, opts)
        lam_cur = lam_j
        out.append(DeformedSpectrum(eps.copy(), rho.copy(), float(resnorm), lam_j))
    return out
