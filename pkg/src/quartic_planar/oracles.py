"""Independent verification engines for the planar two-point amplitude.

Five routes that never share code with the closed-form evaluators:

* ``perturbative_series``   -- coupling-power recursion of the planar
  self-consistency equation, resummable at small coupling,
* ``quadrature_g``          -- contour-integral representation, evaluated
  on a closed rectangle around the positive-axis singular set,
* ``quadrature_g_line``     -- a second, structurally different integral
  representation on a vertical line (no preimage data enters),
* ``one_matrix_closed_form``-- exact radicals for the one-eigenvalue model,
* ``lambert_pade_check``    -- rational approximants of the logarithmic
  curve J(z) = z + lam*log(1+z), whose inverse is Lambert-W,
* ``monte_carlo_moment``    -- Metropolis sampling of the matrix measure
  itself, the only route that does not assume the planar limit.

Agreement across these routes and the closed forms is the package's
correctness argument; each one has an error channel of its own
(truncation order, quadrature tolerance, approximant order, statistics).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit
from numpy.polynomial import polynomial as npoly
from scipy import integrate, optimize

from .errors import (
    BranchCrossing,
    DomainError,
    PadeDegenerate,
    QuadratureNonConvergence,
    WNonConvergence,
)
from .spectrum import DeformedSpectrum
from .rational_j import RationalJ
from .two_point import g0_rational

__all__ = [
    "SeriesCoefficients",
    "MCEstimate",
    "OneMatrixClosedForm",
    "PadeCheck",
    "perturbative_series",
    "quadrature_g",
    "quadrature_g_line",
    "one_matrix_closed_form",
    "lambert_w0",
    "j2_inverse",
    "lambert_pade_check",
    "monte_carlo_moment",
]


# ----------------------------------------------------------------------
# closed form for a single eigenvalue
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class OneMatrixClosedForm:
    """Exact values for d = 1, eigenvalue E_1 = mu_sq/2, any multiplicity."""

    epsilon1: float
    rho1_over_n: float
    epsilon1_hat: float
    g11: float


def one_matrix_closed_form(mu_sq, lam):
    """Radical solution of the one-eigenvalue deformation.

    For E_1 = mu_sq/2 the deformation system collapses to a quadratic;
    with s = sqrt(mu_sq^2 + 12 lam):

        epsilon_1      = (2 mu_sq + s) / 6
        rho_1 / N      = (2/3) (2 mu_sq + s) / (mu_sq + s)
        epsilon_1_hat  = -(mu_sq + 2 s) / 6          (the lone preimage)
        G_11           = (4/3) (mu_sq + 2 s) / (mu_sq + s)^2

    and the cross-identity G_11 = -2 ehat / (eps - ehat)^2 holds exactly.
    The rho expression is the cancellation-free rewriting of
    (mu_sq*s - mu_sq^2 + 12 lam)/(18 lam); both agree for lam != 0 and the
    rewriting extends continuously to 1 at lam = 0.

    Raises DomainError when mu_sq^2 + 12 lam < 0 (the branch point where
    the deformed spectrum leaves the reals).
    """
    mu_sq = float(mu_sq)
    lam = float(lam)
    disc = mu_sq * mu_sq + 12.0 * lam
    if disc < 0.0:
        raise DomainError(
            f"mu_sq^2 + 12*lam = {disc:.6g} < 0: no real deformed spectrum"
        )
    s = math.sqrt(disc)
    eps1 = (2.0 * mu_sq + s) / 6.0
    rho1 = (2.0 / 3.0) * (2.0 * mu_sq + s) / (mu_sq + s)
    ehat = -(mu_sq + 2.0 * s) / 6.0
    g11 = (4.0 / 3.0) * (mu_sq + 2.0 * s) / (mu_sq + s) ** 2
    return OneMatrixClosedForm(
        epsilon1=eps1, rho1_over_n=rho1, epsilon1_hat=ehat, g11=g11
    )


# ----------------------------------------------------------------------
# perturbative series
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class SeriesCoefficients:
    """Coupling-power coefficients of the planar two-point matrix.

    ``orders[m][a, b]`` is the coefficient of lam**m in G_ab.  Order 0 is
    1/(E_a + E_b) by construction.
    """

    orders: list

    def partial_sum(self, lam):
        """Sum of all stored orders at the given coupling."""
        lam = float(lam)
        total = np.zeros_like(self.orders[0])
        for m, coeff in enumerate(self.orders):
            total += coeff * lam**m
        return total


MAX_SERIES_ORDER = 6


def perturbative_series(spectrum, order):
    """Coefficients of G_ab as a power series in the coupling.

    The planar self-consistency equation

        (E_a + E_b) G_ab = 1 - (lam/N) sum_n r_n
            [ G_ab G_an - (G_nb - G_ab)/(E_n - E_a) ]

    is solved order by order.  The n = a term of the sum is the
    derivative limit of the difference quotient, so the recursion tracks
    Taylor jets of each coefficient in the first argument: coefficient m
    is carried with jet depth (order - m), exactly what order m+1
    consumes.  All arithmetic is polynomial in the jet offset h; no
    finite differences are taken anywhere.
    """
    order = int(order)
    if order < 0 or order > MAX_SERIES_ORDER:
        raise ValueError(f"order must be in [0, {MAX_SERIES_ORDER}]")
    e = spectrum.eigenvalues
    r = spectrum.multiplicities.astype(float)
    n_tot = float(spectrum.matrix_size)
    d = e.size
    depth = order + 2  # jet length; entry t of order m is valid for t <= order-m
    pair = np.add.outer(e, e)
    powers = np.arange(depth)

    jets = np.zeros((order + 1, d, d, depth))
    for a in range(d):
        for b in range(d):
            jets[0, a, b, :] = (-1.0) ** powers / pair[a, b] ** (powers + 1)

    for m in range(order):
        for a in range(d):
            for b in range(d):
                bracket = np.zeros(depth)
                for nn in range(d):
                    prod = np.zeros(depth)
                    for p in range(m + 1):
                        prod += np.convolve(
                            jets[p, a, b, :], jets[m - p, a, nn, :]
                        )[:depth]
                    if nn == a:
                        # (c(E_a) - c(E_a + h))/(E_a - (E_a + h)): shift the jet
                        diff = np.zeros(depth)
                        diff[: depth - 1] = jets[m, a, b, 1:]
                    else:
                        gap = 1.0 / (e[nn] - e[a])
                        geo = gap ** (powers + 1)
                        num = -jets[m, a, b, :].copy()
                        num[0] += jets[m, nn, b, 0]
                        diff = np.convolve(num, geo)[:depth]
                    bracket += (r[nn] / n_tot) * (prod - diff)
                inv_pair = (-1.0) ** powers / pair[a, b] ** (powers + 1)
                jets[m + 1, a, b, :] = -np.convolve(bracket, inv_pair)[:depth]

    return SeriesCoefficients(orders=[jets[m, :, :, 0].copy() for m in range(order + 1)])


# ----------------------------------------------------------------------
# contour quadrature on a closed rectangle
# ----------------------------------------------------------------------

QUAD_LIMIT = 800
# Relative root-mean defect above which complex-valued cut endpoints are
# refused; beyond it the rectangle geometry below does not apply.
REAL_CUT_TOL = 1e-9


def _rect_integrand(j, u, ju, v):
    """f(z) = J'(z) log[(J(u)-J(-z))/(z+J(u))] / (J(z)-J(v)) as a callable."""

    def f(z):
        arg = j.j_difference(u, -z) / (z + ju)
        return j.j_prime(z) * np.log(arg) / j.j_difference(z, v)

    def log_arg(z):
        return j.j_difference(u, -z) / (z + ju)

    return f, log_arg


def _scan_branch(log_arg, x0, xt, delta, n_samples=4096):
    """Raise if the log argument crosses the negative real axis between
    consecutive samples of the upper contour line."""
    x = np.linspace(x0, xt, n_samples)
    g = log_arg(x + 1j * delta)
    neg = g.real < 0.0
    flip = np.sign(g.imag[:-1]) * np.sign(g.imag[1:]) < 0
    if np.any(neg[:-1] & neg[1:] & flip):
        raise BranchCrossing(
            "integrand logarithm crossed its branch cut along the contour; "
            "reduce the coupling or the contour offset"
        )


def quadrature_g(j, a_index, b_index, delta=1e-3, tail_bound=1e-12):
    """Two-point amplitude at an eigenvalue pair from its integral
    representation

        G(u, v) = exp( (1/2 pi i) oint dz J'(z)
                       log[(J(u)-J(-z))/(z+J(u))] / (J(z)-J(v)) ) / (J(u)+v)

    with u = eps_a, v = eps_b.  The contour is a closed rectangle
    [x0, T] x [-delta, +delta] around the positive-axis singular set of
    the integrand: the log-jump cuts [eps_k, -uhat^k] and the simple pole
    at z = v.  Because the integrand is analytic between any two such
    rectangles, the value is independent of delta and of T (once they
    clear the singular set); delta = 1e-3 is a conditioning choice, not a
    limit parameter.  The horizontal lines are integrated in two pieces,
    a breakpointed core through the singular set and a smooth far tail
    taken to infinity by the integrator's change of variables, where the
    integrand decays like lam/x^3; tail_bound is the absolute error
    budget of the tail piece, and the cap at the far edge vanishes.

    By conjugation symmetry the rectangle reduces to real integrals: the
    two horizontal lines give (1/pi) * Int Im f(x + i delta) dx and the
    vertical caps give -(1/pi) * Int Re f(edge + i t) dt at the right
    edge and the opposite sign at the left edge.

    Raises BranchCrossing when the logarithm leaves the principal branch
    along the contour and QuadratureNonConvergence when the quadrature
    error estimate exceeds its budget.
    """
    d = j.dimension
    if not (0 <= a_index < d and 0 <= b_index < d):
        raise ValueError("eigenvalue indices out of range")
    u = float(j.eps[a_index])
    v = float(j.eps[b_index])
    ju = float(np.real(j.j(u)))
    if abs(j.lam) == 0.0:
        return complex(1.0 / (ju + v))

    roots = j.eigen_preimages()[a_index].roots
    if roots.size and np.max(np.abs(np.asarray(roots).imag)) > REAL_CUT_TOL * j.scale:
        raise BranchCrossing(
            "cut endpoints are not real; the rectangle contour does not "
            "enclose the singular set at this coupling"
        )
    cut_ends = np.sort(-np.real(np.asarray(roots))) if roots.size else np.array([])

    x0 = 0.5 * float(j.eps[0])
    right_most = max(
        float(cut_ends[-1]) if cut_ends.size else 0.0, v, float(j.eps[-1])
    )
    edge = right_most + max(1.0, j.scale)

    f, log_arg = _rect_integrand(j, u, ju, v)
    _scan_branch(log_arg, x0, edge + 1.0, delta)

    raw_pts = np.sort(
        np.array([p for p in np.concatenate([j.eps, cut_ends, [v]]) if x0 < p < edge])
    )
    pts = []
    for p in raw_pts:
        if not pts or p - pts[-1] > 1e-12 * j.scale:
            pts.append(float(p))

    def upper_imag(x):
        return np.imag(f(x + 1j * delta))

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        core, err_c = integrate.quad(
            upper_imag, x0, edge, points=pts, limit=QUAD_LIMIT,
            epsabs=1e-13, epsrel=1e-12,
        )
        tail, err_t = integrate.quad(
            upper_imag, edge, np.inf, limit=QUAD_LIMIT,
            epsabs=min(1e-13, tail_bound), epsrel=1e-12,
        )
        cap_l, err_l = integrate.quad(
            lambda t: np.real(f(x0 + 1j * t)), 0.0, delta,
            epsabs=1e-14, epsrel=1e-12,
        )

    # Clockwise traversal: fixed against the one-eigenvalue radicals and
    # the vertical-line route, which agree with each other to 1e-14.
    exponent = (core + tail + cap_l) / math.pi
    err = (err_c + err_t + err_l) / math.pi
    if err > max(1e-9, 1e-7 * abs(exponent)):
        raise QuadratureNonConvergence(
            f"contour quadrature error estimate {err:.3e} above budget"
        )
    return complex(math.exp(exponent) / (ju + v))


def quadrature_g_line(j, a_index, b_index):
    """Second integral representation, on the vertical line Re z = 0:

        G_ab = (A+B) exp(Ntilde) / ((B + eps_a)(A + eps_b)),
        Ntilde = (1/pi) Int_0^inf Im{ log[(A-J(-it))/(A+it)]
                                      * d/dt log[(B-J(it))/(B-it)] } dt

    with A = J(eps_a), B = J(eps_b).  No preimage or ramification data
    enters, and the line never meets the poles of J, so this route is
    structurally independent of both the closed forms and the rectangle
    contour of ``quadrature_g``.
    """
    d = j.dimension
    if not (0 <= a_index < d and 0 <= b_index < d):
        raise ValueError("eigenvalue indices out of range")
    ea = float(j.eps[a_index])
    eb = float(j.eps[b_index])
    aa = float(np.real(j.j(ea)))
    bb = float(np.real(j.j(eb)))
    if abs(j.lam) == 0.0:
        return complex(1.0 / (aa + bb))

    def h(t):
        zt = 1j * t
        la = np.log((aa - j.j(-zt)) / (aa + zt))
        mp = -1j * j.j_prime(zt) / (bb - j.j(zt)) + 1j / (bb - zt)
        return np.imag(la * mp)

    val, err = integrate.quad(
        h, 0.0, np.inf, limit=QUAD_LIMIT, epsabs=1e-12, epsrel=1e-11
    )
    exponent = val / math.pi
    if err / math.pi > max(1e-9, 1e-7 * abs(exponent)):
        raise QuadratureNonConvergence(
            f"line quadrature error estimate {err / math.pi:.3e} above budget"
        )
    return complex((aa + bb) * math.exp(exponent) / ((bb + ea) * (aa + eb)))


# ----------------------------------------------------------------------
# Lambert-W and the logarithmic model
# ----------------------------------------------------------------------

_INV_E = math.exp(-1.0)
_W_MAX_ITERS = 60


def lambert_w0(x):
    """Principal real branch of w e^w = x, by Halley iteration.

    Defined for x >= -1/e.  The starting point switches between the
    branch-point expansion in sqrt(2(e x + 1)), a rational guess, and
    log x - log log x; Halley then converges cubically.  The residual
    |w e^w - x| lands at a few ulps of |x| across the whole range.
    """
    x = float(x)
    if x < -_INV_E:
        if x > -_INV_E - 1e-15 * _INV_E:
            return -1.0
        raise DomainError(f"lambert_w0 needs x >= -1/e, got {x}")
    if x == 0.0:
        return 0.0
    if x < -0.3:
        p = math.sqrt(2.0 * (math.e * x + 1.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 * p**3 / 72.0
    elif x < math.e:
        w = x / (1.0 + x)
    else:
        lx = math.log(x)
        w = lx - math.log(lx)
    for _ in range(_W_MAX_ITERS):
        ew = math.exp(w)
        fw = w * ew - x
        if abs(fw) <= 4.0 * np.finfo(float).eps * (abs(x) + abs(w * ew)):
            return w
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * fw / (2.0 * wp1)
        step = fw / denom
        w -= step
        if abs(step) <= 2.0 * np.finfo(float).eps * abs(w):
            return w
    raise WNonConvergence(f"Halley iteration stalled for lambert_w0({x})")


def _lambert_w0_log(eta):
    """Solve w + log w = eta for w > 0; the overflow-free form of W0.

    For x = e^eta this is W0(x) without ever forming x, usable when
    (1+a)/lam exceeds the exponent range.
    """
    eta = float(eta)
    if eta < 1.0:
        raise ValueError("log-form iteration expects eta >= 1")
    w = eta - math.log(eta)
    for _ in range(_W_MAX_ITERS):
        lw = math.log(w)
        fw = w + lw - eta
        if abs(fw) <= 4.0 * np.finfo(float).eps * (abs(eta) + 1.0):
            return w
        fp = 1.0 + 1.0 / w
        fpp = -1.0 / (w * w)
        w -= 2.0 * fw * fp / (2.0 * fp * fp - fw * fpp)
    raise WNonConvergence(f"Halley iteration stalled for log-form W0, eta={eta}")


def j2_inverse(a, lam):
    """Inverse of J2(z) = z + lam*log(1+z) on [0, inf):

        J2^{-1}(a) = lam * W0( exp((1+a)/lam) / lam ) - 1.

    The exponent (1+a)/lam overflows double precision long before the
    answer does, so large arguments are routed through the additive form
    w + log w = (1+a)/lam - log lam.
    """
    a = float(a)
    lam = float(lam)
    if lam <= 0.0:
        raise DomainError("j2_inverse needs lam > 0")
    eta = (1.0 + a) / lam - math.log(lam)
    if eta > 700.0:
        w = _lambert_w0_log(eta)
    else:
        w = lambert_w0(math.exp((1.0 + a) / lam) / lam)
    return lam * w - 1.0


# ----------------------------------------------------------------------
# rational approximants of the logarithmic curve
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class PadeCheck:
    """Result of one approximant order: the model amplitude, the exact
    curve inverse, and the finite model data the amplitude was built on."""

    g_approx: float
    j2_inverse_exact: float
    model_epsilons: np.ndarray
    model_rhos: np.ndarray


def _log_convergent(n_terms):
    """Numerator/denominator coefficients (ascending) of the continued
    fraction of log(1+z) truncated after n_terms fractions.

    The fraction reads z/(1+z/(2+z/(3+4z/(4+4z/(5+9z/(6+9z/(7+...)))))));
    partial numerators are c_k z with c_1 = 1 and c_k = (k//2)^2 for
    k >= 2, partial denominators are k.
    """
    a_prev2 = np.array([1.0])
    a_prev = np.array([0.0])
    b_prev2 = np.array([0.0])
    b_prev = np.array([1.0])
    for k in range(1, n_terms + 1):
        ck = 1.0 if k == 1 else float((k // 2) ** 2)
        bk = float(k)
        a_new = npoly.polyadd(bk * a_prev, ck * np.concatenate([[0.0], a_prev2]))
        b_new = npoly.polyadd(bk * b_prev, ck * np.concatenate([[0.0], b_prev2]))
        a_prev2, a_prev = a_prev, a_new
        b_prev2, b_prev = b_prev, b_new
    return a_prev, b_prev


def _pade_log_model(lam, d_order):
    """Finite-spectrum model equivalent to J(z) = z + lam * L_d(z), where
    L_d is the order-d approximant of log(1+z).

    L_d has d simple poles on (-inf, -1) with negative residues; after
    recentring by the half-unit mass shift the poles map to eps_k and the
    residues to lam * rho_k (N = 1).  The additive constant of L_d only
    shifts J by a constant, which every amplitude formula is blind to.
    """
    a_poly, b_poly = _log_convergent(2 * d_order)
    roots = npoly.polyroots(b_poly)
    span = 1.0 + float(np.max(np.abs(roots)))
    if np.any(np.abs(roots.imag) > 1e-10 * span):
        raise PadeDegenerate("approximant poles left the real axis")
    p = np.sort(roots.real)
    if p.size != d_order or np.any(p >= -1.0):
        raise PadeDegenerate("approximant poles not all below -1")
    if p.size > 1 and np.min(np.diff(p)) < 1e-10 * span:
        raise PadeDegenerate("approximant poles collided")
    db = npoly.polyder(b_poly)
    res = npoly.polyval(p, a_poly) / npoly.polyval(p, db)
    if np.any(res >= 0.0):
        raise PadeDegenerate("approximant residues have the wrong sign")

    eps = -p - 0.5  # recentred pole positions, mu_sq = 1
    idx = np.argsort(eps)
    eps = eps[idx]
    rho = (-res)[idx]
    deformed = DeformedSpectrum(
        epsilons=eps, rhos=rho, residual_norm=0.0, lam=float(lam)
    )
    model = RationalJ(deformed, float(lam), matrix_size=1)

    def l_d(t):
        return npoly.polyval(t, a_poly) / npoly.polyval(t, b_poly)

    return model, l_d


def lambert_pade_check(lam, pade_order, a, b):
    """Evaluate the logarithmic-curve amplitude through its order-d
    rational stand-in and report the exact curve inverse alongside.

    The recentred model is a genuine finite spectrum, so the amplitude
    comes from the standard closed form; the evaluation points solve
    J(t) + lam L_d(t) = target on [0, target], bracketed because L_d >= 0
    there.  Successive orders must approach each other (the approximants
    converge uniformly on the positive axis), which the caller checks.
    """
    lam = float(lam)
    a = float(a)
    b = float(b)
    if lam <= 0.0:
        raise DomainError("lambert_pade_check needs lam > 0")
    if pade_order < 1:
        raise ValueError("pade_order must be >= 1")
    if a < 0.0 or b < 0.0:
        raise ValueError("evaluation points must be >= 0")

    model, l_d = _pade_log_model(lam, int(pade_order))

    def point(target):
        if target == 0.0:
            return 0.5
        root = optimize.brentq(
            lambda t: t + lam * l_d(t) - target,
            0.0,
            target,
            xtol=1e-14,
            rtol=8.9e-16,
        )
        return 0.5 + root

    ua = point(a)
    ub = point(b) if b != a else ua
    g_val = g0_rational(model, ua, ub).value
    return PadeCheck(
        g_approx=float(np.real(g_val)),
        j2_inverse_exact=j2_inverse(a, lam),
        model_epsilons=model.eps.copy(),
        model_rhos=model.rho.copy(),
    )


# ----------------------------------------------------------------------
# Monte Carlo over the matrix measure
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class MCEstimate:
    """Metropolis estimate of the scaled second moment N <Phi_ab Phi_ba>.

    ``mean`` carries the scaling that makes the lam = 0 value equal
    1/(E_a+E_b); ``raw_mean`` is the same estimate without the factor N,
    reported because the measure normalization conventions differ between
    natural definitions of the moment.  ``std_error`` is the jackknife
    error over 20 contiguous blocks.
    """

    mean: float
    std_error: float
    samples: int
    acceptance_rate: float
    raw_mean: float
    raw_std_error: float


MC_MAX_SIZE = 64
MC_MIN_SWEEPS = 10**4
_JACK_BLOCKS = 20


@njit(cache=True)
def _mc_chain(e_full, offsets, lam, sweeps, therm, seed, step_init):
    """Single-site Metropolis chain for exp(-N Tr(E Phi^2 + lam/4 Phi^4)).

    Phi and B = Phi^2 are carried together; every proposal costs O(N)
    through the cached row/column products, and B is rebuilt from scratch
    every 256 sweeps to stop roundoff drift.  Measurements are the
    block-averaged moduli N * |Phi_pq|^2 for every eigenvalue block pair.
    """
    np.random.seed(seed)
    n = e_full.shape[0]
    d = offsets.shape[0] - 1
    phi = np.zeros((n, n), np.complex128)
    bmat = np.zeros((n, n), np.complex128)
    step = step_init
    meas = np.zeros((sweeps, d, d))
    acc = 0
    tot = 0
    acc_meas = 0
    tot_meas = 0
    for sweep in range(-therm, sweeps):
        if sweep < 0 and tot >= 50 * (n * (n + 1)) // 2:
            rate = acc / tot
            step *= math.exp(rate - 0.5)
            if step < 1e-8:
                step = 1e-8
            if step > 1e3:
                step = 1e3
            acc = 0
            tot = 0
        for i in range(n):
            for k in range(i, n):
                tot += 1
                if sweep >= 0:
                    tot_meas += 1
                if i == k:
                    delta = step * (np.random.random() - 0.5)
                    aii = phi[i, i].real
                    a3 = 0.0
                    for q in range(n):
                        a3 += (bmat[i, q] * phi[q, i]).real
                    ds2 = e_full[i] * (2.0 * delta * aii + delta * delta)
                    ds4 = (
                        4.0 * delta * a3
                        + 2.0 * delta * delta * aii * aii
                        + 4.0 * delta * delta * bmat[i, i].real
                        + 4.0 * delta**3 * aii
                        + delta**4
                    )
                    ds = n * (ds2 + 0.25 * lam * ds4)
                    if ds <= 0.0 or np.random.random() < math.exp(-ds):
                        acc += 1
                        if sweep >= 0:
                            acc_meas += 1
                        for q in range(n):
                            bmat[q, i] += phi[q, i] * delta
                        for q in range(n):
                            bmat[i, q] += delta * phi[i, q]
                        bmat[i, i] += delta * delta
                        phi[i, i] += delta
                else:
                    dre = step * (np.random.random() - 0.5)
                    dim = step * (np.random.random() - 0.5)
                    dlt = complex(dre, dim)
                    dc = complex(dre, -dim)
                    ad2 = dre * dre + dim * dim
                    pij = phi[i, k]
                    aji = phi[k, i]
                    aii = phi[i, i].real
                    ajj = phi[k, k].real
                    c3 = 0.0 + 0.0j
                    for q in range(n):
                        c3 += bmat[k, q] * phi[q, i]
                    ds2 = (e_full[i] + e_full[k]) * (
                        2.0 * (dc * pij).real + ad2
                    )
                    ds4 = (
                        8.0 * (c3 * dlt).real
                        + 4.0 * ((dlt * dlt) * (aji * aji)).real
                        + 4.0 * ad2 * aii * ajj
                        + 4.0 * ad2 * (bmat[i, i].real + bmat[k, k].real)
                        + 8.0 * ad2 * (dlt * aji).real
                        + 2.0 * ad2 * ad2
                    )
                    ds = n * (ds2 + 0.25 * lam * ds4)
                    if ds <= 0.0 or np.random.random() < math.exp(-ds):
                        acc += 1
                        if sweep >= 0:
                            acc_meas += 1
                        for q in range(n):
                            bmat[q, k] += phi[q, i] * dlt
                            bmat[q, i] += phi[q, k] * dc
                        for q in range(n):
                            bmat[k, q] += dc * phi[i, q]
                            bmat[i, q] += dlt * phi[k, q]
                        bmat[i, i] += ad2
                        bmat[k, k] += ad2
                        phi[i, k] += dlt
                        phi[k, i] += dc
        if (sweep + therm) % 256 == 255:
            for i in range(n):
                for k in range(n):
                    acc_c = 0.0 + 0.0j
                    for q in range(n):
                        acc_c += phi[i, q] * phi[q, k]
                    bmat[i, k] = acc_c
        if sweep >= 0:
            for ai in range(d):
                for bi in range(d):
                    total = 0.0
                    cnt = 0
                    for p in range(offsets[ai], offsets[ai + 1]):
                        for q in range(offsets[bi], offsets[bi + 1]):
                            val = phi[p, q]
                            total += val.real * val.real + val.imag * val.imag
                            cnt += 1
                    meas[sweep, ai, bi] = n * total / cnt
    rate_meas = acc_meas / tot_meas if tot_meas > 0 else 0.0
    return meas, rate_meas


def _jackknife(series, n_blocks):
    """Leave-one-block-out mean and standard error of a 1-d series."""
    m = series.size // n_blocks
    used = series[: m * n_blocks].reshape(n_blocks, m)
    block_means = used.mean(axis=1)
    mean = float(block_means.mean())
    loo = (block_means.sum() - block_means) / (n_blocks - 1)
    var = (n_blocks - 1) / n_blocks * float(np.sum((loo - loo.mean()) ** 2))
    return mean, math.sqrt(var)


def monte_carlo_moment(
    spectrum, lam, a_index, b_index, sweeps, seed, thermalization=None
):
    """Metropolis estimate of the planar second moment at a block pair.

    The chain samples Hermitian N x N matrices under
    exp(-N Tr(E Phi^2 + (lam/4) Phi^4)) with single-entry proposals whose
    step is tuned toward 50% acceptance during thermalization.  The
    estimator averages N |Phi_pq|^2 over the full eigenvalue-block pair
    (a, b), which is exact at lam = 0 where the value is 1/(E_a+E_b), and
    carries the finite-N correction away from it.  Reproducibility: the
    generator is the Mersenne-Twister state seeded inside the compiled
    kernel, so a (seed, numba version) pair fixes every draw.
    """
    lam = float(lam)
    n = spectrum.matrix_size
    d = spectrum.dimension
    if n > MC_MAX_SIZE:
        raise ValueError(f"matrix size {n} exceeds {MC_MAX_SIZE}")
    if lam < 0.0:
        raise ValueError("monte_carlo_moment needs lam >= 0")
    if sweeps < MC_MIN_SWEEPS:
        raise ValueError(f"need at least {MC_MIN_SWEEPS} sweeps")
    if not (0 <= a_index < d and 0 <= b_index < d):
        raise ValueError("eigenvalue indices out of range")
    therm = (
        int(thermalization)
        if thermalization is not None
        else max(1000, sweeps // 10)
    )
    e_full = np.repeat(spectrum.eigenvalues, spectrum.multiplicities)
    offsets = np.concatenate([[0], np.cumsum(spectrum.multiplicities)]).astype(
        np.int64
    )
    step0 = 1.0 / math.sqrt(n * float(np.mean(spectrum.eigenvalues)))
    meas, rate = _mc_chain(
        e_full, offsets, lam, int(sweeps), therm, int(seed), step0
    )
    mean, err = _jackknife(meas[:, a_index, b_index], _JACK_BLOCKS)
    return MCEstimate(
        mean=mean,
        std_error=err,
        samples=int(sweeps),
        acceptance_rate=float(rate),
        raw_mean=mean / n,
        raw_std_error=err / n,
    )


def monte_carlo_matrix(spectrum, lam, sweeps, seed, thermalization=None):
    """All block-pair estimates from a single chain; same contract as
    ``monte_carlo_moment`` but returns matrices (means, errors, rate)."""
    lam = float(lam)
    n = spectrum.matrix_size
    d = spectrum.dimension
    if n > MC_MAX_SIZE:
        raise ValueError(f"matrix size {n} exceeds {MC_MAX_SIZE}")
    if lam < 0.0:
        raise ValueError("monte_carlo_matrix needs lam >= 0")
    if sweeps < MC_MIN_SWEEPS:
        raise ValueError(f"need at least {MC_MIN_SWEEPS} sweeps")
    therm = (
        int(thermalization)
        if thermalization is not None
        else max(1000, sweeps // 10)
    )
    e_full = np.repeat(spectrum.eigenvalues, spectrum.multiplicities)
    offsets = np.concatenate([[0], np.cumsum(spectrum.multiplicities)]).astype(
        np.int64
    )
    step0 = 1.0 / math.sqrt(n * float(np.mean(spectrum.eigenvalues)))
    meas, rate = _mc_chain(
        e_full, offsets, lam, int(sweeps), therm, int(seed), step0
    )
    means = np.empty((d, d))
    errs = np.empty((d, d))
    for a in range(d):
        for b in range(d):
            means[a, b], errs[a, b] = _jackknife(meas[:, a, b], _JACK_BLOCKS)
    return means, errs, float(rate)
