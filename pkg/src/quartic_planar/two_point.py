"""Planar two-point amplitude in four equivalent closed forms.

All four evaluators compute the same meromorphic function G(z, w), the
planar two-point amplitude attached to a rational curve J:

* ``g0_rational``  -- eigenvalue sum with a product correction factor,
* ``g0_branch``    -- single product over the preimages of one argument,
* ``g0_product``   -- double product over the preimages of both arguments,
* ``g0_rfe``       -- partial-fraction expansion with a rank-4 residue
  tensor built from the eigenvalue-pair amplitudes,

plus ``g0_matrix`` for the matrix of amplitudes at eigenvalue pairs and
two Dyson-Schwinger residual probes (``dse_residual``, ``jzz_residual``)
that test a candidate amplitude against the defining equations.

G has true poles at z = -w, at the partner preimages z = -what^n, and at
the negative-side preimages eps-hat of the eigenvalues.  Points near any
of those are refused (PoleProximity), never regularized.  The eigenvalues
themselves are removable points of the closed forms; arguments within
the snap radius of an eps_a are dispatched to the analytic limit there.

Every difference J(x) - J(y) is evaluated through the cancellation-free
form, so the formulas keep full precision also when two J values nearly
coincide.  Below ``|lam| <= 1e-7`` the amplitude equals 1/(z+w) up to
O(lam^2) < 1e-14 (the linear term vanishes in these coordinates), and the
closed forms would divide O(ulp) gaps by lam; the evaluators return the
limit value there instead.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import PoleProximity

# Below this coupling the closed forms are noise-dominated (they resolve
# O(lam) root gaps against a 1/lam prefactor); G = 1/(z+w) + O(lam^2) is
# then the more accurate evaluation.
SMALL_COUPLING = 1e-7
# Arguments within SNAP * scale of an eigenvalue take the limit formula.
SNAP = 1e-10
# Refusal radius around true poles, in units of the curve scale.
PROXIMITY = 1e-10


class Representation(enum.Enum):
    RATIONAL = "rational"
    BRANCH = "branch"
    PRODUCT = "product"
    MATRIX = "matrix"
    RFE = "rfe"


@dataclass(frozen=True)
class PlanarAmplitude:
    value: complex
    representation: Representation
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class TwoPointMatrix:
    """Amplitudes at all eigenvalue pairs; entries[a, b] = G(eps_a, eps_b).

    ordering_deviation is the maximum disagreement between the two
    (algebraically equal) evaluation orderings of the closed form.
    """

    entries: np.ndarray
    ordering_deviation: float


# -- cached per-curve data ---------------------------------------------


def _weights(j):
    if "weights" not in j._cache:
        j._cache["weights"] = j.weights()
    return j._cache["weights"]


def _hats(j):
    # hats[k, m] = m-th extra preimage of eps_k (rows follow eps order)
    if "hats" not in j._cache:
        j._cache["hats"] = np.array(
            [p.roots for p in j.eigen_preimages()]
        )
    return j._cache["hats"]


def _spectrum_index(j, z):
    dist = np.abs(z - j.eps)
    a = int(np.argmin(dist))
    return a if dist[a] <= SNAP * j.scale else None


def _refuse_near(j, value, what):
    if abs(value) < PROXIMITY * j.scale:
        raise PoleProximity(
            f"argument within {PROXIMITY:g}*scale of {what}; "
            "move the point instead of regularizing"
        )


# -- limit formulas at eigenvalue arguments -----------------------------


def _corgev(j, a, v, pre_v=None):
    """G(eps_a, v) for generic v: the analytic limit of the closed forms
    as the first argument reaches the spectrum."""
    if abs(j.lam) <= SMALL_COUPLING:
        return 1.0 / (j.eps[a] + v)
    if pre_v is None:
        pre_v = j.preimages(v)
    r = _weights(j)
    num = complex(1.0)
    for root in pre_v.roots:
        num *= complex(j.j_difference(j.eps[a], -root))
    den = complex(1.0)
    for b in range(j.dimension):
        if b != a:
            den *= complex(j.j_difference(j.eps[a], j.eps[b]))
    n_over_lam = float(j.matrix_size) / j.lam
    return -n_over_lam / r[a] * num / den


def _g_vs_spectrum(j, z, pre_z=None):
    """Vector of G(eps_k, z) over the whole spectrum, sharing one
    preimage computation for z."""
    if abs(j.lam) <= SMALL_COUPLING:
        return 1.0 / (j.eps + z)
    if pre_z is None:
        pre_z = j.preimages(z)
    return np.array(
        [_corgev(j, a, z, pre_z) for a in range(j.dimension)]
    )


def g0_matrix(j):
    """Matrix of amplitudes at eigenvalue pairs.

    The closed form can be anchored at either argument; both orderings
    are evaluated and their maximum disagreement reported.  The returned
    entries use the first-argument anchoring.
    """
    d = j.dimension
    if abs(j.lam) <= SMALL_COUPLING:
        entries = 1.0 / np.add.outer(j.eps, j.eps)
        return TwoPointMatrix(entries=entries, ordering_deviation=0.0)
    pres = j.eigen_preimages()
    m1 = np.empty((d, d))
    for a in range(d):
        for b in range(d):
            m1[a, b] = np.real(_corgev(j, a, j.eps[b], pres[b]))
    deviation = float(np.max(np.abs(m1 - m1.T)))
    return TwoPointMatrix(entries=m1, ordering_deviation=deviation)


# -- the four representations -------------------------------------------


def g0_rational(j, z, w):
    """Eigenvalue-sum representation of G(z, w).

    ``[1 - (lam/N) sum_k r_k / ((J(eps_k)-J(-w)) (J(z)-J(eps_k)))
    * prod_j (J(w)-J(-hat_k^j)) / (J(w)-J(eps_j))] / (J(w)-J(-z))``

    Arguments on the spectrum are dispatched to the analytic limit;
    arguments near a true pole raise PoleProximity.
    """
    z, w = complex(z), complex(w)
    az, aw = _spectrum_index(j, z), _spectrum_index(j, w)
    if az is not None and aw is not None:
        value = _corgev(j, az, j.eps[aw], j.eigen_preimages()[aw])
        return PlanarAmplitude(value, Representation.RATIONAL, {"limit": "both"})
    if az is not None:
        return PlanarAmplitude(
            _corgev(j, az, w), Representation.RATIONAL, {"limit": "first"}
        )
    if aw is not None:
        return PlanarAmplitude(
            _corgev(j, aw, z), Representation.RATIONAL, {"limit": "second"}
        )
    den = complex(j.j_difference(w, -z))
    # |J(w)-J(-z)| / |J'(-z)| approximates the distance from z to the
    # nearest zero of the denominator (z = -w or a partner preimage).
    _refuse_near(j, den / max(1.0, abs(complex(j.j_prime(-z)))), "a zero of J(w)-J(-z)")
    if abs(j.lam) <= SMALL_COUPLING:
        return PlanarAmplitude(
            1.0 / (z + w), Representation.RATIONAL, {"limit": "small coupling"}
        )
    r = _weights(j)
    hats = _hats(j)
    total = complex(0.0)
    min_gap = np.inf
    for k in range(j.dimension):
        dk1 = complex(j.j_difference(j.eps[k], -w))
        dk2 = complex(j.j_difference(z, j.eps[k]))
        min_gap = min(min_gap, abs(dk1), abs(dk2))
        prod = complex(1.0)
        for jj in range(j.dimension):
            num = complex(j.j_difference(w, -hats[k, jj]))
            djw = complex(j.j_difference(w, j.eps[jj]))
            min_gap = min(min_gap, abs(djw))
            prod *= num / djw
        total += r[k] / (dk1 * dk2) * prod
    _refuse_near(j, min_gap, "a pole of the eigenvalue-sum form")
    value = (1.0 - j.lam / j.matrix_size * total) / den
    return PlanarAmplitude(
        value, Representation.RATIONAL, {"min_denominator": float(min_gap)}
    )


def g0_branch(j, u, v):
    """Preimage-product representation:
    ``(1/(J(v)-J(-u))) prod_k (J(u)-J(-vhat^k)) / (J(u)-J(eps_k))``."""
    u, v = complex(u), complex(v)
    au = _spectrum_index(j, u)
    av = _spectrum_index(j, v)
    if au is not None:
        pre_v = j.eigen_preimages()[av] if av is not None else None
        return PlanarAmplitude(
            _corgev(j, au, j.eps[av] if av is not None else v, pre_v),
            Representation.BRANCH,
            {"limit": "first"},
        )
    if abs(j.lam) <= SMALL_COUPLING:
        return PlanarAmplitude(
            1.0 / (u + v), Representation.BRANCH, {"limit": "small coupling"}
        )
    pre_v = j.eigen_preimages()[av] if av is not None else j.preimages(v)
    den = complex(j.j_difference(v, -u))
    _refuse_near(j, den / max(1.0, abs(complex(j.j_prime(-u)))), "a zero of J(v)-J(-u)")
    value = 1.0 / den
    min_gap = np.inf
    for k in range(j.dimension):
        num = complex(j.j_difference(u, -pre_v.roots[k]))
        dk = complex(j.j_difference(u, j.eps[k]))
        min_gap = min(min_gap, abs(dk))
        value *= num / dk
    _refuse_near(j, min_gap, "a negative-side preimage of an eigenvalue")
    return PlanarAmplitude(
        value,
        Representation.BRANCH,
        {"preimage_defect": pre_v.max_defect, "min_denominator": float(min_gap)},
    )


def g0_product(j, u, v):
    """Symmetric double-product representation:
    ``(1/(u+v)) prod_{k,l} (eps_k+eps_l)(-uhat^l-vhat^k)
    / ((eps_k-uhat^l)(eps_l-vhat^k))``."""
    u, v = complex(u), complex(v)
    _refuse_near(j, u + v, "the diagonal pole z = -w")
    au, av = _spectrum_index(j, u), _spectrum_index(j, v)
    pre_u = j.eigen_preimages()[au] if au is not None else j.preimages(u)
    pre_v = j.eigen_preimages()[av] if av is not None else j.preimages(v)
    uh = pre_u.roots
    vh = pre_v.roots
    eps = j.eps
    den1 = eps[:, None] - uh[None, :]  # eps_k - uhat^l
    den2 = eps[:, None] - vh[None, :]  # den2[l, k] = eps_l - vhat^k
    min_gap = float(min(np.min(np.abs(den1)), np.min(np.abs(den2))))
    _refuse_near(j, min_gap, "a coincidence eps_k = uhat^l")
    # entry [k, l]: (eps_k+eps_l)(-vhat^k-uhat^l) / ((eps_k-uhat^l)(eps_l-vhat^k))
    ratio = np.add.outer(eps, eps) * -(vh[:, None] + uh[None, :])
    ratio = ratio / (den1 * den2.T)
    value = np.prod(ratio) / (u + v)
    return PlanarAmplitude(
        complex(value),
        Representation.PRODUCT,
        {
            "preimage_defect": max(pre_u.max_defect, pre_v.max_defect),
            "min_denominator": min_gap,
        },
    )


def _rfe_tensor(j):
    """Residue tensor C[k, m, l, n] of the partial-fraction representation."""
    if "rfe_tensor" in j._cache:
        return j._cache["rfe_tensor"]
    d = j.dimension
    r = _weights(j)
    hats = _hats(j)
    g_ee = g0_matrix(j).entries
    jp_h = np.array(
        [[complex(j.j_prime(hats[k, m])) for m in range(d)] for k in range(d)]
    )
    # dd[l, k, m] = J(eps_l) - J(-hat_k^m)
    dd = np.array(
        [
            [
                [complex(j.j_difference(j.eps[l], -hats[k, m])) for m in range(d)]
                for k in range(d)
            ]
            for l in range(d)
        ]
    )
    c = np.empty((d, d, d, d), dtype=complex)
    for k in range(d):
        for m in range(d):
            for l in range(d):
                for n in range(d):
                    c[k, m, l, n] = (
                        (hats[k, m] + hats[l, n])
                        * r[k]
                        * r[l]
                        * g_ee[k, l]
                        / (jp_h[k, m] * jp_h[l, n] * dd[l, k, m] * dd[k, l, n])
                    )
    j._cache["rfe_tensor"] = c
    return c


def g0_rfe(j, z, w):
    """Partial-fraction representation:
    ``(1/(z+w)) [1 + (lam/N)^2 sum C[k,m,l,n] / ((z-hat_k^m)(w-hat_l^n))]``."""
    z, w = complex(z), complex(w)
    _refuse_near(j, z + w, "the diagonal pole z = -w")
    if abs(j.lam) <= SMALL_COUPLING:
        return PlanarAmplitude(
            1.0 / (z + w), Representation.RFE, {"limit": "small coupling"}
        )
    hats = _hats(j)
    gap = min(float(np.min(np.abs(z - hats))), float(np.min(np.abs(w - hats))))
    _refuse_near(j, gap, "a negative-side preimage of an eigenvalue")
    c = _rfe_tensor(j)
    az = 1.0 / (z - hats)
    aw = 1.0 / (w - hats)
    s = np.einsum("kmln,km,ln->", c, az, aw)
    value = (1.0 + (j.lam / j.matrix_size) ** 2 * s) / (z + w)
    return PlanarAmplitude(
        complex(value),
        Representation.RFE,
        {"tensor_scale": float(np.max(np.abs(c))), "min_denominator": gap},
    )


# -- defining-equation residuals ----------------------------------------


def dse_residual(j, z, w):
    """Absolute defect of the quartic Dyson-Schwinger equation at (z, w).

    ``| [J(z) + J(w) + (lam/N) sum_k r_k G(z,eps_k)
        + (lam/N) sum_k r_k/(J(eps_k)-J(z))] * G(z,w)
        - 1 - (lam/N) sum_k r_k G(eps_k,w)/(J(eps_k)-J(z)) |``

    evaluated with the closed-form amplitudes.
    """
    z, w = complex(z), complex(w)
    lam_n = j.lam / j.matrix_size
    r = _weights(j)
    g_zw = g0_rational(j, z, w).value
    g_z = _g_vs_spectrum(j, z)
    g_w = _g_vs_spectrum(j, w)
    d_ez = np.array(
        [complex(j.j_difference(j.eps[k], z)) for k in range(j.dimension)]
    )
    bracket = (
        complex(j.j(z))
        + complex(j.j(w))
        + lam_n * np.sum(r * g_z)
        + lam_n * np.sum(r / d_ez)
    )
    rhs = 1.0 + lam_n * np.sum(r * g_w / d_ez)
    return float(abs(bracket * g_zw - rhs))


def jzz_residual(j, z):
    """Absolute defect of the reflection identity at z:
    ``| J(z) + (lam/N) sum_k r_k G(z,eps_k)
       + (lam/N) sum_k r_k/(J(eps_k)-J(z)) + J(-z) |``."""
    z = complex(z)
    lam_n = j.lam / j.matrix_size
    r = _weights(j)
    g_z = _g_vs_spectrum(j, z)
    d_ez = np.array(
        [complex(j.j_difference(j.eps[k], z)) for k in range(j.dimension)]
    )
    value = (
        complex(j.j(z))
        + lam_n * np.sum(r * g_z)
        + lam_n * np.sum(r / d_ez)
        + complex(j.j(-z))
    )
    return float(abs(value))
