"""Hyperspherical harmonics on the unit d-sphere and their couplings.

Everything basis-level lives here: eigenvalues l(l+d-1) and degeneracies of
the Laplace-Beltrami operator, sphere volumes, Gegenbauer evaluation, the
explicit harmonic representation

    Y_{l,m}(Omega) = phase * N_{l,m} e^{i m_d phi}
                     prod_k (sin theta_k)^{m_{k+1}} C^{lambda_k}_{n_k}(cos theta_k)

with n_k = m_k - m_{k+1} and lambda_k = m_{k+1} + (d-k)/2 (|m_d| at the last
level), and the triple-product coupling coefficients

    W(i1, i2, i3) = int Y*_{i1} Y_{i2} Y_{i3} dOmega,

which generalize the Wigner 3j symbols.  The coupling integral factorizes
angle by angle, so each level is one exact Gauss-Jacobi quadrature of a
product of three Gegenbauer polynomials.

For densities that depend only on the polar angle the couplings collapse to
a reduced form w_L(l, l', m2) that depends on the shared m-vector only
through its leading entry; that reduction, and the fully m-summed pair
strength S_L(l, l') (a Gegenbauer product-linearization identity, smooth in
continuous l), are what make the infinite degree sums in the sum-rule
engine tractable.
"""

from dataclasses import dataclass, field
from functools import lru_cache
import math

import numpy as np

from .errors import ValidationError
from .quadrature import QuadratureRule, quadrature, total_weight

__all__ = [
    "HarmonicIndex", "CouplingTable", "QuadratureRule", "quadrature",
    "basis_constants", "degeneracy", "eigenvalue", "sphere_volume",
    "gegenbauer", "gegenbauer_all", "gegenbauer_at_one", "log_gegenbauer_at_one",
    "eval_harmonic", "coupling_W", "zonal_coupling_w", "zonal_coupling_table",
    "addition_eval", "pair_strength", "log_degeneracy", "enumerate_m",
]

TABLE_FORMAT_VERSION = 1


# ----------------------------------------------------------------------
# scalar basis data


def sphere_volume(d):
    """Surface volume of the unit d-sphere, 2 pi^((d+1)/2) / Gamma((d+1)/2)."""
    return 2.0 * math.pi ** ((d + 1) / 2.0) / math.gamma((d + 1) / 2.0)


def eigenvalue(d, ell):
    """Laplace-Beltrami eigenvalue l(l+d-1)."""
    return ell * (ell + d - 1)


def degeneracy(d, ell):
    """Exact integer multiplicity of degree ell on S^d (d >= 1)."""
    if ell < 0:
        raise ValidationError("degree must be non-negative, got %r" % (ell,))
    if ell == 0:
        return 1
    if d == 1:
        return 2
    return math.comb(ell + d - 1, ell) + math.comb(ell + d - 2, ell - 1)


def log_degeneracy(d, ell):
    """log of the degeneracy, valid for continuous ell > 0 (tail analysis)."""
    ell = np.asarray(ell, dtype=float)
    return (np.log(2 * ell + d - 1)
            + _lgamma(ell + d - 1) - _lgamma(ell + 1) - math.lgamma(d))


def basis_constants(d, ell):
    """Degeneracy, eigenvalue and sphere volume for one degree."""
    if d < 2:
        raise ValidationError("need sphere dimension d >= 2, got %r" % (d,))
    if ell < 0:
        raise ValidationError("degree must be non-negative, got %r" % (ell,))
    return {"g": degeneracy(d, ell), "lambda": eigenvalue(d, ell),
            "vol": sphere_volume(d)}


_lgamma = np.vectorize(math.lgamma, otypes=[float])


# ----------------------------------------------------------------------
# Gegenbauer polynomials


def gegenbauer(alpha, n, x):
    """C_n^alpha(x) by the forward three-term recurrence (alpha > -1/2)."""
    if n < 0:
        raise ValidationError("Gegenbauer degree must be >= 0, got %r" % (n,))
    if not alpha > -0.5:
        raise ValidationError("Gegenbauer order must exceed -1/2, got %r" % (alpha,))
    x = np.asarray(x, dtype=float)
    c_prev = np.ones_like(x)
    if n == 0:
        return c_prev if c_prev.ndim else float(c_prev)
    c = 2.0 * alpha * x
    for k in range(2, n + 1):
        c, c_prev = (2.0 * (k + alpha - 1.0) * x * c
                     - (k + 2.0 * alpha - 2.0) * c_prev) / k, c
    return c if c.ndim else float(c)


def gegenbauer_all(alpha, nmax, x):
    """All of C_0^alpha ... C_nmax^alpha at x, as an (nmax+1, len(x)) array."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((nmax + 1, x.size))
    out[0] = 1.0
    if nmax >= 1:
        out[1] = 2.0 * alpha * x
    for k in range(2, nmax + 1):
        out[k] = (2.0 * (k + alpha - 1.0) * x * out[k - 1]
                  - (k + 2.0 * alpha - 2.0) * out[k - 2]) / k
    return out


def log_gegenbauer_at_one(alpha, n):
    """log C_n^alpha(1) = log [Gamma(n+2a) / (n! Gamma(2a))], continuous n."""
    n = np.asarray(n, dtype=float)
    return _lgamma(n + 2 * alpha) - _lgamma(n + 1) - math.lgamma(2 * alpha)


def gegenbauer_at_one(alpha, n):
    """C_n^alpha(1), the maximum of |C_n^alpha| on [-1, 1] for alpha > 0."""
    return float(np.exp(log_gegenbauer_at_one(alpha, n)))


# ----------------------------------------------------------------------
# harmonic indices


@dataclass(frozen=True, order=True)
class HarmonicIndex:
    """Quantum numbers (d; ell; m2, ..., m_d) of one hyperspherical harmonic.

    The admissible chains satisfy ell >= m2 >= ... >= m_{d-1} >= |m_d| with
    every entry integral.  For d = 2 the m-vector has the single signed
    entry m_d.
    """

    d: int
    ell: int
    m: tuple = ()

    def __post_init__(self):
        if self.d < 2:
            raise ValidationError("harmonic index needs d >= 2, got %r" % (self.d,))
        if self.ell < 0:
            raise ValidationError("degree must be >= 0, got %r" % (self.ell,))
        m = tuple(int(v) for v in self.m)
        object.__setattr__(self, "m", m)
        if len(m) != self.d - 1:
            raise ValidationError(
                "m-vector for d=%d must have %d entries, got %r"
                % (self.d, self.d - 1, m))
        chain = (self.ell,) + m[:-1] + (abs(m[-1]),)
        for a, b in zip(chain, chain[1:]):
            if a < b:
                raise ValidationError("index ordering violated: %r" % (self,))

    @property
    def m_d(self):
        return self.m[-1]

    def quantum(self, k):
        """m_k for k = 1..d (m_1 = ell)."""
        return self.ell if k == 1 else self.m[k - 2]

    def conjugate_partner(self):
        """Index paired under complex conjugation (m_d sign flipped)."""
        return HarmonicIndex(self.d, self.ell, self.m[:-1] + (-self.m[-1],))

    def conjugate_phase(self):
        """Sign s with conj(Y_self) = s * Y_partner, i.e. (-1)^(m_d)."""
        return -1.0 if self.m_d % 2 else 1.0


def enumerate_m(d, ell):
    """All admissible m-vectors for degree ell on S^d, lexicographic order."""
    def rec(bound, slots):
        if slots == 1:
            for md in range(-bound, bound + 1):
                yield (md,)
            return
        for m in range(0, bound + 1):
            for rest in rec(m, slots - 1):
                yield (m,) + rest
    return list(rec(ell, d - 1))


# ----------------------------------------------------------------------
# normalization and point evaluation


def _log_h(n, lam):
    """log of h(n, lam) = int (1-x^2)^(lam-1/2) C_n^lam(x)^2 dx."""
    return (math.log(math.pi) + (1.0 - 2.0 * lam) * math.log(2.0)
            + math.lgamma(n + 2.0 * lam) - math.lgamma(n + 1.0)
            - math.log(n + lam) - 2.0 * math.lgamma(lam))


def _levels(idx):
    """Per-angle data (n_k, lambda_k, sine exponent) for k = 1..d-1."""
    d = idx.d
    out = []
    for k in range(1, d):
        mk = idx.quantum(k) if k > 1 else idx.ell
        mk1 = idx.quantum(k + 1)
        if k + 1 == d:
            mk1 = abs(mk1)
        out.append((mk - mk1, mk1 + (d - k) / 2.0, mk1))
    return out


def _log_norm(idx):
    """log of the normalization constant N_{l,m}."""
    acc = math.log(2.0 * math.pi)
    for n_k, lam_k, _ in _levels(idx):
        acc += _log_h(n_k, lam_k)
    return -0.5 * acc


def _phase(idx):
    """(-1)^((m_d + |m_d|)/2): -1 exactly for positive odd m_d."""
    md = idx.m_d
    return -1.0 if (md > 0 and md % 2 == 1) else 1.0


def eval_harmonic(idx, omega):
    """Value of Y_idx at omega = (theta_1, ..., theta_{d-1}, phi).

    theta_k in [0, pi], phi in [0, 2 pi).  Complex result; the zonal
    harmonics (m = 0) are real.
    """
    if len(omega) != idx.d:
        raise ValidationError(
            "omega for d=%d needs %d angles, got %d" % (idx.d, idx.d, len(omega)))
    thetas, phi = omega[:-1], omega[-1]
    value = _phase(idx) * math.exp(_log_norm(idx))
    for theta, (n_k, lam_k, sin_pow) in zip(thetas, _levels(idx)):
        value *= math.sin(theta) ** sin_pow * gegenbauer(lam_k, n_k, math.cos(theta))
    return value * complex(math.cos(idx.m_d * phi), math.sin(idx.m_d * phi))


# ----------------------------------------------------------------------
# addition theorem


def addition_eval(d, ell, cosgamma):
    """sum_m Y_{l,m}(O) Y*_{l,m}(O') = (g_l/Vol) C_l^a(cos g)/C_l^a(1), a=(d-1)/2."""
    alpha = (d - 1) / 2.0
    ratio = gegenbauer(alpha, ell, cosgamma) / gegenbauer_at_one(alpha, ell)
    return degeneracy(d, ell) / sphere_volume(d) * ratio


# ----------------------------------------------------------------------
# generic triple-product coupling


def _selection_ok(i1, i2, i3):
    if i1.m_d != i2.m_d + i3.m_d:
        return False
    if not abs(i1.ell - i2.ell) <= i3.ell <= i1.ell + i2.ell:
        return False
    return (i1.ell + i2.ell + i3.ell) % 2 == 0


def coupling_W(i1, i2, i3):
    """W = int Y*_{i1} Y_{i2} Y_{i3} dOmega (first slot conjugated).

    Zero is returned immediately when the azimuthal rule
    m_d(i1) = m_d(i2) + m_d(i3), the triangle rule, or the parity rule
    fails.  Otherwise the integral factorizes into d-1 one-dimensional
    Gauss-Jacobi quadratures that are exact for the polynomial part.
    """
    if not (i1.d == i2.d == i3.d):
        raise ValidationError("coupling of mixed dimensions: %d/%d/%d"
                              % (i1.d, i2.d, i3.d))
    if not _selection_ok(i1, i2, i3):
        return 0.0
    d = i1.d
    value = (_phase(i1) * _phase(i2) * _phase(i3)
             * math.exp(_log_norm(i1) + _log_norm(i2) + _log_norm(i3))
             * 2.0 * math.pi)
    levels = [_levels(i) for i in (i1, i2, i3)]
    for k in range(d - 1):
        degs = [levels[j][k][0] for j in range(3)]
        sin_pow = sum(levels[j][k][2] for j in range(3))
        weight_exp = (sin_pow + d - k - 2) / 2.0
        rule = quadrature(weight_exp, sum(degs) // 2 + 4)
        integrand = np.ones_like(rule.nodes)
        for j in range(3):
            integrand = integrand * gegenbauer(levels[j][k][1], degs[j], rule.nodes)
        value *= rule.integrate(integrand)
    return value


# ----------------------------------------------------------------------
# reduced zonal couplings


@lru_cache(maxsize=None)
def _log_zonal_norm(d, L):
    """log of [Vol(S^{d-1}) h(L, (d-1)/2)]^(-1/2), the zonal normalization."""
    vol_sub = 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)
    return -0.5 * (math.log(vol_sub) + _log_h(L, (d - 1) / 2.0))


def zonal_coupling_w(d, L, l1, l2, m2):
    """Reduced coupling W(i1, i2, (L, 0)) for indices sharing an m-vector.

    For a zonal third slot the coupling depends on the shared m-vector only
    through its leading entry m2; the deeper-angle factors integrate to the
    squared norms and cancel against the normalizations.  What remains is a
    single polar integral of three Gegenbauer polynomials of order
    lam = m2 + (d-1)/2, (d-1)/2 against the weight (1-x^2)^(lam-1/2).
    """
    if min(l1, l2) < m2 or m2 < 0:
        return 0.0
    if (l1 + l2 + L) % 2 != 0 or not abs(l1 - l2) <= L <= l1 + l2:
        return 0.0
    lam = m2 + (d - 1) / 2.0
    alpha = (d - 1) / 2.0
    n1, n2 = l1 - m2, l2 - m2
    rule = quadrature(lam - 0.5, (n1 + n2 + L) // 2 + 4)
    integral = rule.integrate(gegenbauer(lam, n1, rule.nodes)
                              * gegenbauer(lam, n2, rule.nodes)
                              * gegenbauer(alpha, L, rule.nodes))
    log_scale = (_log_zonal_norm(d, L)
                 - 0.5 * (_log_h(n1, lam) + _log_h(n2, lam)))
    return math.exp(log_scale) * integral


def zonal_band_matrix(d, L, m2, l_lo, l_hi):
    """Matrix of w_L(l, l', m2) for l, l' in [l_lo, l_hi] (band |l-l'| <= L).

    Vectorized helper for block assembly: builds one Gegenbauer table on a
    shared node set and fills the admissible band by weighted dot products.
    """
    nmax = l_hi - m2
    lam = m2 + (d - 1) / 2.0
    alpha = (d - 1) / 2.0
    rule = quadrature(lam - 0.5, nmax + L // 2 + 4)
    table = gegenbauer_all(lam, nmax, rule.nodes)
    u = rule.weights * gegenbauer(alpha, L, rule.nodes)
    log_h = np.array([_log_h(n, lam) for n in range(nmax + 1)])
    scale = np.exp(-0.5 * log_h)
    norm = math.exp(_log_zonal_norm(d, L))
    size = l_hi - l_lo + 1
    out = np.zeros((size, size))
    for i, l1 in enumerate(range(l_lo, l_hi + 1)):
        for l2 in range(max(l_lo, l1 - L), min(l_hi, l1 + L) + 1):
            if (l1 + l2 + L) % 2 != 0:
                continue
            n1, n2 = l1 - m2, l2 - m2
            out[i, l2 - l_lo] = (norm * scale[n1] * scale[n2]
                                 * float(np.dot(table[n1] * u, table[n2])))
    return out


# ----------------------------------------------------------------------
# zonal coupling tables


@dataclass
class CouplingTable:
    """Precomputed reduced couplings W(i1, i2, (L, 0)) up to a degree cutoff.

    Entries are keyed by (l1, l2, m2); the value is shared by every pair of
    indices with that degree pair and a common m-vector of leading entry
    m2.  Triples failing the selection rules are simply absent.
    """

    d: int
    ell_max: int
    L: int
    entries: dict = field(default_factory=dict)

    def lookup(self, i1, i2, i3):
        """Coupling value for explicit indices (third slot (L, 0))."""
        if not (i1.d == i2.d == i3.d == self.d):
            raise ValidationError("table lookup with mixed dimensions")
        if i3.ell != self.L or any(v != 0 for v in i3.m):
            raise ValidationError("table holds third slot (%d, 0) only" % self.L)
        if i1.m != i2.m:
            return 0.0
        m2 = abs(i1.m[0]) if self.d == 2 else i1.m[0]
        return self.entries.get((i1.ell, i2.ell, m2), 0.0)

    def save(self, path):
        """Serialize to a versioned .npz cache file."""
        keys = np.array(sorted(self.entries), dtype=np.int64)
        vals = np.array([self.entries[tuple(k)] for k in keys])
        np.savez(path, header=np.array([TABLE_FORMAT_VERSION, self.d,
                                        self.ell_max, self.L], dtype=np.int64),
                 keys=keys, values=vals)

    @classmethod
    def load(cls, path):
        with np.load(path) as data:
            version, d, ell_max, L = (int(v) for v in data["header"])
            if version != TABLE_FORMAT_VERSION:
                raise ValidationError("unknown coupling-table format version %d"
                                      % version)
            entries = {tuple(int(v) for v in k): float(w)
                       for k, w in zip(data["keys"], data["values"])}
        return cls(d=d, ell_max=ell_max, L=L, entries=entries)


def zonal_coupling_table(d, ell_max, L):
    """All reduced couplings w_L(l1, l2, m2) with l1, l2 <= ell_max."""
    if L < 1:
        raise ValidationError("density degree L must be >= 1, got %r" % (L,))
    entries = {}
    for l1 in range(ell_max + 1):
        for l2 in range(max(0, l1 - L), min(ell_max, l1 + L) + 1):
            if (l1 + l2 + L) % 2 != 0 or not abs(l1 - l2) <= L <= l1 + l2:
                continue
            for m2 in range(0, min(l1, l2) + 1):
                entries[(l1, l2, m2)] = zonal_coupling_w(d, L, l1, l2, m2)
    return CouplingTable(d=d, ell_max=ell_max, L=L, entries=entries)


# ----------------------------------------------------------------------
# m-summed pair strength


def _pair_strength_raw(d, L, l, lp):
    """The smooth log-space pair-strength formula, no lattice rule checks.

    Valid wherever every log-gamma argument is positive, in particular for
    continuous degrees away from the small-l triangle boundary.
    """
    alpha = (d - 1) / 2.0
    l = np.asarray(l, dtype=float)
    lp = np.asarray(lp, dtype=float)
    k = (l + lp - L) / 2.0
    sigma = (l + lp + L) / 2.0
    log_a = (np.log(L + alpha) - np.log(sigma + alpha) + math.lgamma(L + 1)
             - _lgamma(k + 1) - _lgamma(l - k + 1) - _lgamma(lp - k + 1)
             + _lgamma(alpha + k) + _lgamma(alpha + l - k)
             + _lgamma(alpha + lp - k) - 2.0 * math.lgamma(alpha)
             + _lgamma(2 * alpha + sigma) - _lgamma(alpha + sigma)
             - math.lgamma(2 * alpha + L))
    log_s = (log_degeneracy(d, l) + log_degeneracy(d, lp)
             - math.log(sphere_volume(d))
             + log_gegenbauer_at_one(alpha, L) - math.log(degeneracy(d, L))
             + log_a - log_gegenbauer_at_one(alpha, l)
             - log_gegenbauer_at_one(alpha, lp))
    return np.exp(log_s)


def pair_strength(d, L, l, lp):
    """S_L(l, l') = sum over m, m' of |W(l,m; l',m'; L,M)|^2 (any fixed M).

    Equals (g_l g_l' / Vol) * (C_L^a(1)/g_L) * A_L(l,l') / (C_l^a(1) C_l'^a(1))
    with a = (d-1)/2 and A_L the Gegenbauer product-linearization
    coefficient of C_L^a in C_l^a C_l'^a (Dougall's expansion).  Zero when
    the triangle or parity rule fails.  Accepts array-valued integer l with
    lp = l + const.
    """
    l = np.asarray(l)
    lp_arr = np.broadcast_to(np.asarray(lp), l.shape) if l.ndim \
        else np.asarray(lp)
    scalar = l.ndim == 0
    l = np.atleast_1d(l).astype(float)
    lp_arr = np.atleast_1d(lp_arr).astype(float)
    ok = ((np.rint(l + lp_arr + L).astype(int) % 2 == 0)
          & (np.abs(l - lp_arr) <= L) & (L <= l + lp_arr)
          & (l >= 0) & (lp_arr >= 0))
    out = np.zeros_like(l)
    if np.any(ok):
        out[ok] = _pair_strength_raw(d, L, l[ok], lp_arr[ok])
    return float(out[0]) if scalar else out


def pair_strength_offset(d, L, delta):
    """Smooth callable f(l) = S_L(l, l + delta) for tail acceleration.

    Returns None when the offset pattern itself is excluded (parity or
    |delta| > L); otherwise f is valid for continuous l large enough that
    the triangle rule holds with slack.
    """
    if abs(delta) > L or (L + delta) % 2 != 0:
        return None
    return lambda l: _pair_strength_raw(d, L, np.asarray(l, dtype=float),
                                        np.asarray(l, dtype=float) + delta)
