"""Exact renormalized sum-rule engine: closed forms, dual routes, guards.

Oracles: the uniform-density constants are classical zeta-type sums with
known closed forms; the tilt-family integrals have hand-derived polynomial
expressions in kappa; and the full engine is checked against the quartic/
sextic closed forms for (d, p) in {(3,2), (3,3), (4,3), (5,3)}.
"""

import math

import numpy as np
import pytest
from scipy.special import zeta

from sphere_sumrules.density import DensitySpec, kappa_bound
from sphere_sumrules.errors import (
    CutoffTooSmallError,
    DivergentSumError,
    UnsupportedDensityError,
    UnsupportedOrderError,
    ValidationError,
)
from sphere_sumrules.harmonics import HarmonicIndex, sphere_volume
from sphere_sumrules.sumrules import (
    closed_form_reference,
    density_integrals,
    epsilon_closed,
    epsilon_recursive,
    p_min,
    sum_rule,
    sum_rule_shifted,
    zeta_uniform,
)

PI = math.pi


# ----------------------------------------------------------------------
# uniform-density constants


def test_p_min():
    assert [p_min(d) for d in (2, 3, 4, 5)] == [2, 2, 3, 3]


def test_zeta_uniform_closed_forms():
    cases = {
        (2, 2): 1.0,
        (2, 3): 2 * (float(zeta(3, 1)) - 1.0),
        (3, 2): 1.0 / 16 + PI ** 2 / 12,
        (3, 3): (2 * PI ** 2 - 3) / 96,
        (4, 3): 2 * float(zeta(3, 1)) / 27 + 23.0 / 1458,
        (5, 3): 5.0 / 6144 + 19 * PI ** 2 / 2304,
    }
    for (d, p), want in cases.items():
        assert zeta_uniform(d, p) == pytest.approx(want, abs=1e-12)


def test_zeta_uniform_sanity_vs_direct_sum():
    # brute partial sum plus crude remainder bound brackets the value
    for d, p in ((2, 2), (3, 2), (4, 3), (5, 3)):
        direct = 0.0
        from sphere_sumrules.harmonics import degeneracy, eigenvalue
        for ell in range(1, 4000):
            direct += degeneracy(d, ell) / eigenvalue(d, ell) ** p
        assert direct < zeta_uniform(d, p)
        assert zeta_uniform(d, p) - direct < 1e-3


def test_zeta_uniform_divergence_guard():
    for d, p in ((2, 1), (3, 1), (4, 2), (5, 2)):
        with pytest.raises(DivergentSumError):
            zeta_uniform(d, p)


# ----------------------------------------------------------------------
# density integrals of the tilt family: hand-derived kappa polynomials


I3_QUARTIC = {2: 1 / (120 * PI), 3: 1 / (144 * PI ** 2),
              4: 3 / (1120 * PI ** 2), 5: 1 / (240 * PI ** 3)}
J1_CLOSED = {2: lambda k: 1.0 + k ** 2 / (8 * PI),
             3: lambda k: (3 + 4 * PI ** 2) / 48 + 11 * k ** 2 / (36 * PI ** 2)}
J2_QUADRATIC = {2: 3 / (32 * PI),
                3: (4 * PI ** 2 - 29) / (96 * PI ** 2),
                4: 277 / (4608 * PI ** 2),
                5: 2833 / (96000 * PI ** 3) + 1 / (80 * PI)}


@pytest.mark.parametrize("d", [2, 3, 4, 5])
@pytest.mark.parametrize("kappa", [0.5, 1.0, 2.0])
def test_first_moments_of_tilt_family(d, kappa):
    den = DensitySpec.tilted(d, kappa)
    got = density_integrals("I1", (0,), den)
    assert got["value"] == pytest.approx(kappa ** 2 / d, rel=1e-9)
    got = density_integrals("I2", (0, 0), den)
    assert got["value"] == pytest.approx(kappa ** 2 / d ** 2, rel=1e-9)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
@pytest.mark.parametrize("kappa", [0.5, 1.0, 2.0])
def test_cubic_moment_of_tilt_family(d, kappa):
    den = DensitySpec.tilted(d, kappa)
    want = kappa ** 2 / d ** 3 + I3_QUARTIC[d] * kappa ** 4
    got = density_integrals("I3", (0, 0, 0), den)
    assert got["value"] == pytest.approx(want, rel=1e-8)


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("kappa", [0.5, 1.0, 2.0])
def test_quadratic_weighted_sum_j1(d, kappa):
    den = DensitySpec.tilted(d, kappa)
    got = density_integrals("J1", (0, 0), den)
    assert got["value"] == pytest.approx(J1_CLOSED[d](kappa), rel=1e-8)


def test_j1_divergent_for_high_dimension():
    for d in (4, 5):
        with pytest.raises(DivergentSumError):
            density_integrals("J1", (0, 0), DensitySpec.tilted(d, 1.0))


@pytest.mark.parametrize("d", [2, 3, 4, 5])
@pytest.mark.parametrize("kappa", [0.5, 1.0, 2.0])
def test_cubic_weighted_sum_j2(d, kappa):
    den = DensitySpec.tilted(d, kappa)
    want = zeta_uniform(d, 3) + J2_QUADRATIC[d] * kappa ** 2
    got = density_integrals("J2", (0, 0, 0), den)
    assert got["value"] == pytest.approx(want, rel=1e-8)


def test_density_integrals_argument_checks():
    den = DensitySpec.tilted(3, 1.0)
    with pytest.raises(ValidationError):
        density_integrals("I1", (0, 0), den)       # wrong order count
    with pytest.raises(ValidationError):
        density_integrals("X9", (0,), den)         # unknown kind
    with pytest.raises(CutoffTooSmallError):
        density_integrals("J2", (0, 0, 0), den, ell_cut=1)


def test_density_integrals_uniform_density():
    den = DensitySpec.uniform(3)
    assert density_integrals("I1", (0,), den)["value"] == pytest.approx(0.0)
    got = density_integrals("J2", (0, 0, 0), den)
    assert got["value"] == pytest.approx(zeta_uniform(3, 3), rel=1e-10)


def test_cubic_weighted_sum_requires_zonal_density():
    # degrees {1, 2} admit a coupled triple, so the cubic term is live and
    # the engine must refuse the non-zonal case rather than silently drop it
    den = DensitySpec.from_coeffs(3, {
        HarmonicIndex(3, 1, (1, 1)): 0.2,
        HarmonicIndex(3, 1, (1, -1)): -0.2,
        HarmonicIndex(3, 2, (1, 1)): 0.1,
        HarmonicIndex(3, 2, (1, -1)): -0.1,
    })
    with pytest.raises(UnsupportedDensityError):
        density_integrals("J2", (0, 0, 0), den)
    # a pure degree-1 non-zonal density has no coupled triple: fine
    pure = DensitySpec.from_coeffs(3, {HarmonicIndex(3, 1, (1, 1)): 0.2,
                                       HarmonicIndex(3, 1, (1, -1)): -0.2})
    got = density_integrals("J2", (0, 0, 0), pure)["value"]
    want = zeta_uniform(3, 3) + J2_QUADRATIC[3] * pure.rho_by_degree()[1]
    assert got == pytest.approx(want, rel=1e-8)


def test_trunc_error_shrinks_with_cutoff():
    den = DensitySpec.tilted(3, 1.5)
    loose = density_integrals("J2", (0, 0, 0), den, ell_cut=40)
    tight = density_integrals("J2", (0, 0, 0), den, ell_cut=320)
    assert tight["trunc_error"] < loose["trunc_error"]
    assert abs(loose["value"] - tight["value"]) < 1e-6


# ----------------------------------------------------------------------
# perturbation coefficients: closed forms vs the recursion


def _densities_for_epsilon():
    rng = np.random.default_rng(20240817)
    dens = [DensitySpec.tilted(3, 0.8), DensitySpec.tilted(4, 1.0),
            DensitySpec.zonal(3, {1: 0.5, 2: 0.3}),
            DensitySpec.zonal(5, {1: 0.7, 3: 0.2})]
    for _ in range(3):
        coeffs = {L: float(rng.uniform(-0.3, 0.3)) for L in (1, 2, 3)}
        dens.append(DensitySpec.zonal(3, coeffs))
    return dens


def test_epsilon_recursion_matches_closed_forms():
    for den in _densities_for_epsilon():
        closed = epsilon_closed(den)
        for k in (1, 2, 3, 4):
            got = epsilon_recursive(den, k)
            assert got == pytest.approx(closed.eps[k - 1], abs=1e-10), \
                "order %d for %r" % (k, den)


def test_epsilon_on_non_zonal_density():
    c = 0.25 + 0.1j
    i_plus = HarmonicIndex(3, 1, (1, 1))
    i_minus = HarmonicIndex(3, 1, (1, -1))
    den = DensitySpec.from_coeffs(3, {i_plus: c, i_minus: -c.conjugate()})
    closed = epsilon_closed(den)
    for k in (1, 2, 3, 4):
        assert epsilon_recursive(den, k) == pytest.approx(closed.eps[k - 1],
                                                          abs=1e-10)


def test_epsilon_first_orders_analytic():
    # eps_1 = 1 and eps_2 = -I1(0)/Vol for any density
    den = DensitySpec.tilted(3, 1.2)
    vol = sphere_volume(3)
    i1 = density_integrals("I1", (0,), den)["value"]
    assert epsilon_recursive(den, 1) == pytest.approx(1.0, abs=1e-14)
    assert epsilon_recursive(den, 2) == pytest.approx(-i1 / vol, abs=1e-12)


def test_epsilon_uniform_density_is_trivial():
    den = DensitySpec.uniform(4)
    for k in (1, 2, 3, 4, 5, 6):
        want = 1.0 if k == 1 else 0.0
        assert epsilon_recursive(den, k) == pytest.approx(want, abs=1e-14)


def test_epsilon_order_guard():
    den = DensitySpec.tilted(3, 0.5)
    epsilon_recursive(den, 5)
    epsilon_recursive(den, 6)
    with pytest.raises(UnsupportedOrderError):
        epsilon_recursive(den, 7)
    with pytest.raises(ValidationError):
        epsilon_recursive(den, 0)


# ----------------------------------------------------------------------
# full sum rules against the closed references


CLOSED_PAIRS = [(3, 2), (3, 3), (4, 3), (5, 3)]


@pytest.mark.parametrize("d,p", CLOSED_PAIRS)
@pytest.mark.parametrize("kappa", [0.0, 0.5, 1.0, 2.0])
def test_sum_rule_matches_closed_reference(d, p, kappa):
    den = DensitySpec.tilted(d, kappa)
    res = sum_rule(d, p, den)
    want = closed_form_reference(d, p, kappa)
    assert res.value == pytest.approx(want, rel=1e-6)
    assert res.d == d and res.p == p
    assert res.provenance == "exact-engine"


def test_closed_reference_samples():
    # spot values of the quartic/sextic kappa polynomials at kappa = 1
    want_32 = (3 + 4 * PI ** 2) / 48 + 7 / (36 * PI ** 2) + 1 / (36 * PI ** 4)
    assert closed_form_reference(3, 2, 1.0) == pytest.approx(want_32, rel=1e-14)
    want_33 = ((2 * PI ** 2 - 3) / 96 + (1.0 / 24 - 103 / (288 * PI ** 2))
               + 5 / (288 * PI ** 4) - 1 / (216 * PI ** 6))
    assert closed_form_reference(3, 3, 1.0) == pytest.approx(want_33, rel=1e-14)


def test_sum_rule_even_in_kappa():
    for d, p in ((3, 2), (4, 3)):
        plus = sum_rule(d, p, DensitySpec.tilted(d, 0.9)).value
        minus = sum_rule(d, p, DensitySpec.tilted(d, -0.9)).value
        assert plus == pytest.approx(minus, rel=1e-10)


def test_sum_rule_uniform_reduces_to_zeta():
    for d, p in CLOSED_PAIRS:
        res = sum_rule(d, p, DensitySpec.uniform(d))
        assert res.value == pytest.approx(zeta_uniform(d, p), rel=1e-10)


def test_sum_rule_2_with_nonpolar_tilt_is_rotation_invariant():
    # p = 2 needs no cubic integral, so any degree-1 density with the same
    # rho_1 must give the tilt-family value
    c = 1.0 / math.sqrt(2)
    i_plus = HarmonicIndex(3, 1, (1, 1))
    i_minus = HarmonicIndex(3, 1, (1, -1))
    den = DensitySpec.from_coeffs(3, {i_plus: c, i_minus: -c})
    assert den.rho_by_degree()[1] == pytest.approx(1.0)
    res = sum_rule(3, 2, den)
    assert res.value == pytest.approx(closed_form_reference(3, 2, 1.0),
                                      rel=1e-6)


def test_sum_rule_divergence_and_order_guards():
    den = DensitySpec.tilted(4, 1.0)
    with pytest.raises(DivergentSumError):
        sum_rule(4, 2, den)
    with pytest.raises(DivergentSumError):
        sum_rule(5, 2, DensitySpec.tilted(5, 1.0))
    with pytest.raises(UnsupportedOrderError):
        sum_rule(3, 4, DensitySpec.tilted(3, 1.0))
    with pytest.raises(UnsupportedOrderError):
        sum_rule(3, 1, DensitySpec.tilted(3, 1.0))


def test_closed_reference_rejects_out_of_bound_kappa():
    with pytest.raises(ValidationError):
        closed_form_reference(3, 2, 2.5)
    with pytest.raises(UnsupportedOrderError):
        closed_form_reference(2, 2, 1.0)   # no closed form kept for (2, 2)


# ----------------------------------------------------------------------
# shifted (regularized) route


def test_shifted_route_extrapolates_to_exact():
    d, p, kappa = 3, 2, 1.0
    den = DensitySpec.tilted(d, kappa)
    want = closed_form_reference(d, p, kappa)
    g1, g2 = 1e-3, 1e-4
    z1 = sum_rule_shifted(d, p, den, g1)["Z_renorm"]
    z2 = sum_rule_shifted(d, p, den, g2)["Z_renorm"]
    extrap = (g1 * z2 - g2 * z1) / (g1 - g2)
    assert extrap == pytest.approx(want, abs=2e-8)


def test_shifted_total_grows_like_gamma_power():
    d, p = 3, 3
    den = DensitySpec.tilted(d, 1.0)
    for gamma in (1e-2, 1e-3):
        z = sum_rule_shifted(d, p, den, gamma)["Z"]
        assert z * gamma ** p == pytest.approx(1.0, rel=1e-2)


def test_shifted_requires_positive_gamma():
    den = DensitySpec.tilted(3, 1.0)
    with pytest.raises(ValidationError):
        sum_rule_shifted(3, 2, den, 0.0)
    with pytest.raises(ValidationError):
        sum_rule_shifted(3, 2, den, -1e-3)
