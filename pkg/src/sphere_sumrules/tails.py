"""Euler-Maclaurin acceleration for slowly convergent spectral sums.

Several of the degree sums in this package decay only like l^-2, so direct
summation to a tolerance of 1e-10 is hopeless.  Every such sum here has a
summand that extends to a smooth function of a continuous degree variable,
which makes Euler-Maclaurin ideal: sum the first terms directly, then close
the tail with

    sum_{l>=a} f(l) = int_a^inf f + f(a)/2 - f'(a)/12 + f'''(a)/720 - ...

The integral is mapped to (0, 1] by l = a/t and done with Gauss-Legendre;
the derivatives use five-point central differences (f is cheap and smooth).
"""

import numpy as np

from .errors import DivergentSumError

__all__ = ["tail_sum", "accelerated_sum"]

_GL_NODES_CACHE = {}


def _gauss_legendre(n):
    if n not in _GL_NODES_CACHE:
        x, w = np.polynomial.legendre.leggauss(n)
        # map [-1, 1] -> [0, 1]
        _GL_NODES_CACHE[n] = (0.5 * (x + 1.0), 0.5 * w)
    return _GL_NODES_CACHE[n]


def _integral_to_infinity(f, a, nodes):
    """int_a^inf f(l) dl via the substitution l = a/t, t in (0, 1]."""
    t, w = _gauss_legendre(nodes)
    l = a / t
    vals = f(l) * a / (t * t)
    if not np.all(np.isfinite(vals)):
        raise DivergentSumError("tail integrand not finite; sum likely divergent")
    return float(np.dot(w, vals))


def tail_sum(f, start, nodes=120, h=0.5):
    """Euler-Maclaurin value of sum_{l=start}^inf f(l).

    f must accept numpy arrays of (possibly non-integer) degrees and decay
    at least like l^-2; start should sit past any small-degree structure.
    Returns (value, error_estimate) where the estimate is the magnitude of
    the last Euler-Maclaurin correction kept (a practical, not rigorous,
    gauge of the truncation level).
    """
    a = float(start)
    integral = _integral_to_infinity(f, a, nodes)
    stencil = f(np.array([a - 2 * h, a - h, a, a + h, a + 2 * h]))
    fa = float(stencil[2])
    d1 = float(stencil[0] - 8 * stencil[1] + 8 * stencil[3] - stencil[4]) / (12 * h)
    d3 = float(-stencil[0] + 2 * stencil[1] - 2 * stencil[3] + stencil[4]) / (2 * h ** 3)
    correction = -d1 / 12.0 + d3 / 720.0
    value = integral + 0.5 * fa + correction
    return value, abs(d3) / 720.0


def accelerated_sum(f, first, switch=200, nodes=120):
    """sum_{l=first}^inf f(l): direct terms up to switch, then tail_sum.

    Returns (value, error_estimate).
    """
    switch = max(int(switch), int(first))
    l_direct = np.arange(first, switch, dtype=float)
    head = float(np.sum(f(l_direct))) if l_direct.size else 0.0
    tail, err = tail_sum(f, switch, nodes=nodes)
    return head + tail, err
