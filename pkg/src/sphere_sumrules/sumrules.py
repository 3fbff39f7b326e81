"""Exact renormalized sum rules for -Laplace psi = E Sigma psi on S^d.

The eigenvalue problem with a positive density Sigma has a zero mode and a
divergent sum over 1/E_n unless renormalized; the quantities computed here
are the renormalized power sums over the nonzero spectrum,

    Z_p = sum_{n >= 1} 1 / E_n^p,        p = 2, 3,

obtained without ever diagonalizing anything.  Everything reduces to sums
in harmonic coefficient space:

* I-type integrals: finite sums over the density's coefficients against
  iterated inverse-eigenvalue kernels (exact, no truncation);
* J-type traces: an infinite degree sum handled by closed-form pair
  strengths S_L(l, l') plus Euler-Maclaurin tail acceleration, and (for
  densities with coupled degree triples) a banded triple trace;
* the zero-mode energy coefficients eps_1..eps_4 of the gamma-shifted
  problem, both in closed form and by an independent linear-algebra
  recursion;
* a shifted diagnostic Z_p(gamma) whose renormalized limit reproduces the
  exact sum rules as gamma -> 0+.

The uniform-density values ("zeta functions" of the round sphere) come
from the same tail-accelerated traces.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import special

from . import harmonics, tails
from .density import DensitySpec, kappa_bound
from .errors import (CutoffTooSmallError, DivergentSumError,
                     UnsupportedDensityError, UnsupportedOrderError,
                     ValidationError)

__all__ = [
    "DensitySpec", "EpsilonCoeffs", "SumRuleResult", "closed_form_reference",
    "density_integrals", "epsilon_closed", "epsilon_recursive", "kappa_bound",
    "p_min", "sum_rule", "sum_rule_shifted", "zeta_uniform",
]

DEFAULT_ELL_CUT = 200

_ORDER_COUNT = {"I1": 1, "I2": 2, "I3": 3, "J1": 2, "J2": 3}


def p_min(d):
    """Smallest power with a convergent uniform-density sum, floor((d+2)/2)."""
    return (d + 2) // 2


def _check_dimension(d):
    if d not in (2, 3, 4, 5):
        raise ValidationError("sphere dimension must be 2..5, got %r" % (d,))


@dataclass(frozen=True)
class EpsilonCoeffs:
    """Taylor coefficients of the shifted zero-mode energy E0(gamma)."""

    eps: tuple

    def energy(self, gamma):
        """E0(gamma) = sum_k eps_k gamma^k through the stored order."""
        return sum(e * gamma ** k for k, e in enumerate(self.eps, start=1))


@dataclass(frozen=True)
class SumRuleResult:
    d: int
    p: int
    value: float
    trunc_error: float
    provenance: str
    ell_cut: int


# ----------------------------------------------------------------------
# uniform traces


def _spectral_trace(d, p, gamma=0.0, switch=DEFAULT_ELL_CUT):
    """sum_{l>=1} g_l / (lambda_l + gamma)^p with Euler-Maclaurin tail."""
    if 2 * p <= d:
        raise DivergentSumError(
            "divergent sum rule for d=%d, p=%d: convergence needs p >= %d"
            % (d, p, p_min(d)))

    def f(l):
        l = np.asarray(l, dtype=float)
        return np.exp(harmonics.log_degeneracy(d, l)
                      - p * np.log(l * (l + d - 1) + gamma))

    return tails.accelerated_sum(f, 1, switch=switch)


def zeta_uniform(d, p):
    """Uniform-density sum rule sum_{l>=1} g_l^{(d)} / (l(l+d-1))^p."""
    _check_dimension(d)
    if p != int(p) or p < 1:
        raise ValidationError("order p must be a positive integer, got %r" % (p,))
    value, _ = _spectral_trace(d, int(p))
    return value


# ----------------------------------------------------------------------
# degree-pair band sums


def _band_sum(d, L, a, b, gamma=0.0, switch=DEFAULT_ELL_CUT):
    """sum_{l,l'>=1} S_L(l,l') / ((lam_l+g)^a (lam_l'+g)^b).

    Split by offset l' - l; each offset gives a smooth summand handled by
    direct summation plus an Euler-Maclaurin tail.
    """
    total = 0.0
    err = 0.0
    for delta in range(-L, L + 1):
        smooth = harmonics.pair_strength_offset(d, L, delta)
        if smooth is None:
            continue
        start = max(1, 1 - delta)
        ls = np.arange(start, switch, dtype=float)
        lam1 = ls * (ls + d - 1) + gamma
        lam2 = (ls + delta) * (ls + delta + d - 1) + gamma
        direct = harmonics.pair_strength(d, L, ls, ls + delta)
        total += float(np.sum(direct / (lam1 ** a * lam2 ** b)))

        def f(l, s=smooth, dlt=delta):
            l = np.asarray(l, dtype=float)
            v1 = l * (l + d - 1) + gamma
            v2 = (l + dlt) * (l + dlt + d - 1) + gamma
            return s(l) / (v1 ** a * v2 ** b)

        tval, terr = tails.tail_sum(f, switch)
        total += tval
        err += terr
    return total, err


# ----------------------------------------------------------------------
# cubic (triple-sigma) trace for zonal densities


def _coupled_triples(density):
    """Ordered degree triples in the support passing parity + triangle."""
    degs = sorted({idx.ell for idx, _ in density.entries})
    out = []
    for a in degs:
        for b in degs:
            for c in degs:
                if (a + b + c) % 2 == 0 and abs(a - b) <= c <= a + b:
                    out.append((a, b, c))
    return out


def _cubic_core(density, exps, gamma, lcut):
    """Triple trace over sigma insertions, truncated at degree lcut.

    gamma=None gives the unshifted trace over l >= 1 with weights
    1/lambda^(e+1); a positive gamma includes the l = 0 row with weights
    1/(lambda + gamma)."""
    d = density.d
    zc = density.zonal_coeffs()
    triples = _coupled_triples(density)
    degs = sorted(zc)
    floor = 1 if gamma is None else 0
    shift = 0.0 if gamma is None else gamma
    powers = [e + 1 for e in exps] if gamma is None else [1, 1, 1]
    total = 0.0
    for m2 in range(0, lcut + 1):
        lo = max(floor, m2)
        if lo > lcut:
            break
        n = lcut - lo + 1
        bands = {L: harmonics.zonal_band_matrix(d, L, m2, lo, lcut)
                 for L in degs}
        ls = np.arange(lo, lcut + 1, dtype=float)
        lam = ls * (ls + d - 1) + shift
        dvec = [lam ** -pw for pw in powers]
        gm = harmonics.degeneracy(d - 1, m2)
        for (L1, L2, L3) in triples:
            coeff = gm * zc[L1] * zc[L2] * zc[L3]
            W1, W2, W3 = bands[L1], bands[L2], bands[L3]
            acc = 0.0
            for d1 in range(-L2, L2 + 1):
                if (L2 + d1) % 2:
                    continue
                for d2 in range(-L3, L3 + 1):
                    if (L3 + d2) % 2 or abs(d1 + d2) > L1:
                        continue
                    i0 = max(0, -d1, -d1 - d2)
                    i1 = n - 1 - max(0, d1, d1 + d2)
                    if i1 < i0:
                        continue
                    i = np.arange(i0, i1 + 1)
                    acc += float(np.sum(
                        dvec[0][i] * W2[i, i + d1] * dvec[1][i + d1]
                        * W3[i + d1, i + d1 + d2] * dvec[2][i + d1 + d2]
                        * W1[i + d1 + d2, i]))
            total += coeff * acc
    return total


def _cubic_trace(density, exps, gamma=None, lcut=DEFAULT_ELL_CUT):
    """Cubic trace with a shell-difference truncation estimate."""
    if not _coupled_triples(density):
        return 0.0, 0.0
    if not density.is_zonal:
        raise UnsupportedDensityError(
            "the cubic trace term is implemented for zonal densities only "
            "(non-zonal support would need the full coupling tensor)")
    inner = max(density.ell_max + 1, lcut - 16)
    value = _cubic_core(density, exps, gamma, lcut)
    shell = value - _cubic_core(density, exps, gamma, inner)
    err = abs(shell) * lcut / (4.0 * max(1, lcut - inner)) + 1e-15 * abs(value)
    return value, err


# ----------------------------------------------------------------------
# I-type integrals (exact finite sums)


def _lam(d, ell):
    return float(ell * (ell + d - 1))


def _sigma_element(density, j, jp):
    """<j|sigma|j'> = sum over coefficients of c_i W(j, i, j')."""
    total = 0.0 + 0.0j
    for idx, c in density.entries:
        total += c * harmonics.coupling_W(j, idx, jp)
    return total


def _as_real(value, what):
    if abs(value.imag) > 1e-10 * max(1.0, abs(value.real)):
        raise ValidationError("%s evaluated to a complex value %r"
                              % (what, value))
    return float(value.real)


def _I1(q, density):
    d = density.d
    return sum(abs(c) ** 2 / _lam(d, idx.ell) ** (q + 1)
               for idx, c in density.entries)


def _I2(q, p, density):
    d = density.d
    value = sum(abs(c) ** 2 / _lam(d, idx.ell) ** (q + p + 2)
                for idx, c in density.entries) + 0.0j
    for j, cj in density.entries:
        for jp, cjp in density.entries:
            elem = _sigma_element(density, j, jp)
            if elem != 0:
                value += (cj.conjugate() * cjp * elem
                          / (_lam(d, j.ell) ** (q + 1)
                             * _lam(d, jp.ell) ** (p + 1)))
    return _as_real(value, "I2")


def _internal_indices(density):
    """Indices the coupling can reach from the support (degree <= 2 max)."""
    d = density.d
    out = []
    for ell in range(1, 2 * density.ell_max + 1):
        if density.is_zonal:
            out.append(harmonics.HarmonicIndex(d, ell, (0,) * (d - 1)))
        else:
            out.extend(harmonics.HarmonicIndex(d, ell, m)
                       for m in harmonics.enumerate_m(d, ell))
    return out


def _I3(q, p, r, density):
    d = density.d
    value = sum(abs(c) ** 2 / _lam(d, idx.ell) ** (q + p + r + 3)
                for idx, c in density.entries) + 0.0j
    for j, cj in density.entries:
        for jp, cjp in density.entries:
            elem = _sigma_element(density, j, jp)
            if elem != 0:
                lj, ljp = _lam(d, j.ell), _lam(d, jp.ell)
                value += cj.conjugate() * cjp * elem * (
                    1.0 / (lj ** (q + 1) * ljp ** (p + r + 2))
                    + 1.0 / (lj ** (q + p + 2) * ljp ** (r + 1)))
    internals = _internal_indices(density)
    for mid in internals:
        lmid = _lam(d, mid.ell)
        left = {j: _sigma_element(density, j, mid) for j, _ in density.entries}
        for j, cj in density.entries:
            if left[j] == 0:
                continue
            for jpp, cjpp in density.entries:
                if left[jpp] == 0:
                    continue
                value += (cj.conjugate() * left[j] * left[jpp].conjugate()
                          * cjpp / (_lam(d, j.ell) ** (q + 1)
                                    * lmid ** (p + 1)
                                    * _lam(d, jpp.ell) ** (r + 1)))
    return _as_real(value, "I3")


# ----------------------------------------------------------------------
# J-type traces


def _J1(q, p, density, switch):
    d = density.d
    s = p + q + 2
    if s < p_min(d):
        raise DivergentSumError(
            "divergent trace J1(%d,%d) for d=%d: needs p+q+2 > d/2" % (q, p, d))
    value, err = _spectral_trace(d, s, 0.0, switch)
    for L, rho in sorted(density.rho_by_degree().items()):
        bval, berr = _band_sum(d, L, q + 1, p + 1, 0.0, switch)
        value += rho * bval
        err += rho * berr
    return value, err


def _J2(q, p, r, density, switch):
    d = density.d
    s = p + q + r + 3
    if s < p_min(d):
        raise DivergentSumError(
            "divergent trace J2(%d,%d,%d) for d=%d" % (q, p, r, d))
    value, err = _spectral_trace(d, s, 0.0, switch)
    for L, rho in sorted(density.rho_by_degree().items()):
        for aa, bb in ((q + 1, p + r + 2), (p + 1, q + r + 2),
                       (r + 1, p + q + 2)):
            bval, berr = _band_sum(d, L, aa, bb, 0.0, switch)
            value += rho * bval
            err += rho * berr
    cval, cerr = _cubic_trace(density, (q, p, r), gamma=None, lcut=switch)
    return value + cval, err + cerr


def density_integrals(kind, orders, density, ell_cut=None):
    """One coefficient-space integral of the sum-rule expansion.

    kind is 'I1', 'I2', 'I3', 'J1' or 'J2'; orders is the tuple of kernel
    iteration orders (q,), (q, p) or (q, p, r).  I-type values are exact
    finite sums (trunc_error 0); J-type values carry the tail estimate of
    their accelerated degree sums.  Returns {"value", "trunc_error"}.
    """
    if kind not in _ORDER_COUNT:
        raise ValidationError("unknown integral kind %r" % (kind,))
    orders = tuple(int(v) for v in orders)
    if len(orders) != _ORDER_COUNT[kind]:
        raise ValidationError("integral %s takes %d order(s), got %r"
                              % (kind, _ORDER_COUNT[kind], orders))
    if any(v < 0 for v in orders):
        raise ValidationError("kernel orders must be >= 0, got %r" % (orders,))
    if not isinstance(density, DensitySpec):
        raise ValidationError("density must be a DensitySpec")
    _check_dimension(density.d)
    switch = max(DEFAULT_ELL_CUT, ell_cut or 0)
    if ell_cut is not None and ell_cut < density.ell_max + 1:
        raise CutoffTooSmallError(
            "ell_cut=%d is below the density's top degree %d + 1"
            % (ell_cut, density.ell_max))
    if kind == "I1":
        return {"value": _I1(orders[0], density), "trunc_error": 0.0}
    if kind == "I2":
        return {"value": _I2(*orders, density), "trunc_error": 0.0}
    if kind == "I3":
        return {"value": _I3(*orders, density), "trunc_error": 0.0}
    if kind == "J1":
        value, err = _J1(*orders, density, switch)
    else:
        value, err = _J2(*orders, density, switch)
    return {"value": value, "trunc_error": err}


# ----------------------------------------------------------------------
# zero-mode energy coefficients


def epsilon_closed(density):
    """(eps_1..eps_4) of E0(gamma) from the closed coefficient formulas."""
    vol = harmonics.sphere_volume(density.d)
    i10 = _I1(0, density)
    i11 = _I1(1, density)
    i12 = _I1(2, density)
    i200 = _I2(0, 0, density)
    i201 = _I2(0, 1, density)
    i210 = _I2(1, 0, density)
    i3000 = _I3(0, 0, 0, density)
    e2 = -i10 / vol
    e3 = i11 / vol + 2.0 * (i10 / vol) ** 2 - i200 / vol
    e4 = (-i12 / vol + (i201 + i210) / vol - 4.0 * i10 * i11 / vol ** 2
          - 5.0 * (i10 / vol) ** 3 + 5.0 * i10 * i200 / vol ** 2
          - i3000 / vol)
    return EpsilonCoeffs(eps=(1.0, e2, e3, e4))


def _recursion_operators(density, ell_cut):
    """Basis list, multiplication matrix B of Sigma, and reduced inverse."""
    d = density.d
    if density.is_zonal:
        zc = density.zonal_coeffs()
        size = ell_cut + 1
        B = np.eye(size)
        for L, c in zc.items():
            B += c * harmonics.zonal_band_matrix(d, L, 0, 0, ell_cut)
        lam = np.array([_lam(d, l) for l in range(size)])
    else:
        basis = [harmonics.HarmonicIndex(d, 0, (0,) * (d - 1))]
        for ell in range(1, ell_cut + 1):
            basis.extend(harmonics.HarmonicIndex(d, ell, m)
                         for m in harmonics.enumerate_m(d, ell))
        size = len(basis)
        B = np.eye(size, dtype=complex)
        lmax = density.ell_max
        for a, j in enumerate(basis):
            for b, jp in enumerate(basis):
                if abs(j.ell - jp.ell) > lmax:
                    continue
                elem = _sigma_element(density, j, jp)
                if elem != 0:
                    B[a, b] += elem
        lam = np.array([_lam(d, j.ell) for j in basis])
    ginv = np.zeros(size)
    ginv[lam > 0] = 1.0 / lam[lam > 0]
    return B, ginv


def epsilon_recursive(density, order, ell_cut=None):
    """eps_k by the projection recursion, independent of the closed forms.

    Represents the order-k wavefunction correction as a coefficient vector,
    applies the density as its coupling matrix and the inverted Laplacian
    as 1/lambda on the nonzero modes, and projects on the zero mode.
    """
    order = int(order)
    if order < 1:
        raise ValidationError("order must be >= 1, got %r" % (order,))
    if order > 6:
        raise UnsupportedOrderError(
            "zero-mode coefficients are supported through order 6, got %d"
            % order)
    needed = order * max(1, density.ell_max)
    if ell_cut is None:
        ell_cut = needed + 2
    elif ell_cut < needed:
        raise CutoffTooSmallError(
            "ell_cut=%d cannot hold order-%d corrections (need >= %d)"
            % (ell_cut, order, needed))
    B, ginv = _recursion_operators(density, ell_cut)
    b00 = B[0, 0].real
    psi = [np.zeros(B.shape[0], dtype=B.dtype)]
    psi[0][0] = 1.0
    eps = [1.0]
    for k in range(1, order + 1):
        if k > 1:
            val = -sum(eps[j - 1] * (B @ psi[k - j])[0]
                       for j in range(1, k)) / b00
            eps.append(_as_real(complex(val), "eps[%d]" % k))
        forced = sum(eps[j - 1] * (B @ psi[k - j]) for j in range(1, k + 1))
        psi.append(ginv * (forced - psi[k - 1]))
    return eps[order - 1]


# ----------------------------------------------------------------------
# the sum rules


def _check_sum_rule_orders(d, p):
    _check_dimension(d)
    if p != int(p) or int(p) < 2 or int(p) > 3:
        raise UnsupportedOrderError(
            "sum rules are implemented for p in {2, 3}, got %r" % (p,))
    if p < p_min(d):
        raise DivergentSumError(
            "divergent sum rule for d=%d, p=%d: convergence needs p >= %d"
            % (d, p, p_min(d)))


def sum_rule(d, p, density, ell_cut=None):
    """The exact renormalized sum rule Z_p for the given density."""
    _check_sum_rule_orders(d, p)
    if density.d != d:
        raise ValidationError("density has d=%d, asked for d=%d"
                              % (density.d, d))
    switch = max(DEFAULT_ELL_CUT, ell_cut or 0, density.ell_max + 1)
    vol = harmonics.sphere_volume(d)
    i10 = _I1(0, density)
    i200 = _I2(0, 0, density)
    if p == 2:
        jval, jerr = _J1(0, 0, density, switch)
        value = jval + (i10 / vol) ** 2 - 2.0 * i200 / vol
    else:
        jval, jerr = _J2(0, 0, 0, density, switch)
        i3000 = _I3(0, 0, 0, density)
        value = (jval - (i10 / vol) ** 3 + 3.0 * i10 * i200 / vol ** 2
                 - 3.0 * i3000 / vol)
    return SumRuleResult(d=d, p=int(p), value=value, trunc_error=jerr,
                         provenance="exact-engine", ell_cut=switch)


_REFERENCE_FORMS = {}


def closed_form_reference(d, p, kappa):
    """Reference polynomial-in-kappa value of Z_p for the tilt family."""
    if (d, p) not in {(3, 2), (3, 3), (4, 3), (5, 3)}:
        raise UnsupportedOrderError(
            "no closed-form reference for (d, p) = (%r, %r)" % (d, p))
    bound = kappa_bound(d)
    if not abs(kappa) < bound:
        raise ValidationError(
            "kappa=%g violates the positivity bound |kappa| < %.6g for d=%d"
            % (kappa, bound, d))
    pi = math.pi
    k2 = kappa * kappa
    if (d, p) == (3, 2):
        return ((3 + 4 * pi ** 2) / 48.0 + 7 * k2 / (36 * pi ** 2)
                + k2 ** 2 / (36 * pi ** 4))
    if (d, p) == (3, 3):
        return ((2 * pi ** 2 - 3) / 96.0
                + (1.0 / 24 - 103 / (288 * pi ** 2)) * k2
                + 5 * k2 ** 2 / (288 * pi ** 4) - k2 ** 3 / (216 * pi ** 6))
    if (d, p) == (4, 3):
        zeta3 = float(special.zeta(3.0))
        return (23 / 1458.0 + 2 * zeta3 / 27.0 + 49 * k2 / (1152 * pi ** 2)
                + 513 * k2 ** 2 / (143360 * pi ** 4)
                - 27 * k2 ** 3 / (32768 * pi ** 6))
    return ((15 + 152 * pi ** 2) / 18432.0
            + (529 / (96000 * pi ** 3) + 1 / (80 * pi)) * k2
            + 23 * k2 ** 2 / (2000 * pi ** 6) - k2 ** 3 / (125 * pi ** 9))


# ----------------------------------------------------------------------
# shifted diagnostic


def sum_rule_shifted(d, p, density, gamma, ell_cut=None):
    """Z_p(gamma) and its renormalization against the zero-mode energy.

    Z is the coefficient-space trace with shifted denominators (the zero
    mode contributing 1/gamma); Z_renorm subtracts 1/E0(gamma)^p with the
    quartic Taylor polynomial E0.  The subtraction is evaluated in a
    regrouped form so the leading 1/gamma^p pieces cancel analytically
    rather than in floating point.
    """
    _check_sum_rule_orders(d, p)
    if density.d != d:
        raise ValidationError("density has d=%d, asked for d=%d"
                              % (density.d, d))
    gamma = float(gamma)
    if not gamma > 0.0:
        raise ValidationError("shift gamma must be > 0, got %r" % (gamma,))
    switch = max(DEFAULT_ELL_CUT, ell_cut or 0, density.ell_max + 1)
    vol = harmonics.sphere_volume(d)
    eps = epsilon_closed(density).eps
    x = eps[1] * gamma + eps[2] * gamma ** 2 + eps[3] * gamma ** 3
    trace, _ = _spectral_trace(d, p, gamma, switch)
    finite = trace
    if p == 2:
        for L, rho in sorted(density.rho_by_degree().items()):
            dl = 1.0 / (_lam(d, L) + gamma)
            finite += rho * (2.0 / (gamma * vol) * dl
                             + _band_sum(d, L, 1, 1, gamma, switch)[0])
        lead = (2.0 * x + x * x) / (gamma ** 2 * (1.0 + x) ** 2)
    else:
        for L, rho in sorted(density.rho_by_degree().items()):
            dl = 1.0 / (_lam(d, L) + gamma)
            finite += 3.0 * rho * ((dl / gamma ** 2 + dl * dl / gamma) / vol
                                   + _band_sum(d, L, 2, 1, gamma, switch)[0])
        if _coupled_triples(density):
            finite += _cubic_trace(density, (0, 0, 0), gamma=gamma,
                                   lcut=switch)[0]
        lead = ((3.0 * x + 3.0 * x * x + x ** 3)
                / (gamma ** 3 * (1.0 + x) ** 3))
    return {"Z": gamma ** -p + finite, "Z_renorm": lead + finite}
