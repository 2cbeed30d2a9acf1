import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlsblowup.asymptotics import (
    CONVERGING,
    DIVERGING,
    envelope,
    decay_exponent,
    fit_far_field,
    lp_integrability_check,
    wkb_basis,
)
from nlsblowup.errors import DomainError, FitError, PreconditionError
from nlsblowup.profile_ode import ProfileParams, RadialProfile, integrate_profile

P = ProfileParams(1, 1.9, 0.5145, 1.2953)
Q2_MOD_AT_4 = 0.518577522223096  # 4^-(1 - 1/1.9), arbitrary precision


def synthetic(params, rho, q):
    return RadialProfile(params, np.asarray(rho, float), np.asarray(q, complex), np.zeros(len(rho), complex))


def test_basis_at_one():
    q1, q2 = wkb_basis(P, 1.0)
    assert q1 == pytest.approx(1.0, abs=1e-15)
    assert q2 == pytest.approx(cmath.exp(-0.5j * P.a), abs=1e-15)


def test_basis_modulus():
    assert abs(wkb_basis(P, 4.0)[1]) == pytest.approx(Q2_MOD_AT_4, rel=1e-13)


@pytest.mark.parametrize("rho", [2.0, 10.0, 50.0])
def test_basis_modulus_ratio(rho):
    q1, q2 = wkb_basis(P, rho)
    assert abs(q1) / abs(q2) == pytest.approx(rho ** (1 - 2 / 1.9), rel=1e-12)


def test_basis_domain():
    with pytest.raises(DomainError):
        wkb_basis(P, 0.0)
    with pytest.raises(DomainError):
        wkb_basis(P, np.array([1.0, -1.0]))


def test_basis_solves_far_field():
    """Both basis functions satisfy the profile ODE to leading order: residual/|q| -> 0."""
    from nlsblowup.profile_ode import profile_rhs

    h = 1e-4
    rels = []
    for r in (20.0, 40.0):
        for k in (0, 1):
            f = lambda x: wkb_basis(P, x)[k]
            q, dq = f(r), (f(r + h) - f(r - h)) / (2 * h)
            ddq = (f(r + h) - 2 * q + f(r - h)) / h**2
            lin = ddq - profile_rhs(P, r, q, dq) - abs(q) ** (2 * P.sigma) * q  # drop nonlinearity
            rels.append(abs(lin) / (abs(q) * max(1.0, (P.a * r) ** 2)))
    assert max(rels) < 1e-2


def test_synthetic_fit_exact():
    rho = np.linspace(5, 35, 601)
    q1, q2 = wkb_basis(P, rho)
    fit = fit_far_field(synthetic(P, rho, 1.0 * q1 + 0.5j * q2), (10, 30))
    assert abs(fit.c1 - 1.0) < 1e-10 and abs(fit.c2 - 0.5j) < 1e-10
    assert fit.residual < 1e-10


@settings(max_examples=25, deadline=None)
@given(
    c1=st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
    c2=st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
    lo=st.floats(10, 30),
    width=st.floats(5, 30),
)
def test_synthetic_fit_property(c1, c2, lo, width):
    hi = min(lo + width, 40.0)
    rho = np.linspace(1e-6, 40, 4001)
    q1, q2 = wkb_basis(P, rho)
    fit = fit_far_field(synthetic(P, rho, c1 * q1 + c2 * q2), (lo, hi))
    assert abs(fit.c1 - c1) < 1e-8 * max(1, abs(c1))
    assert abs(fit.c2 - c2) < 1e-8 * max(1, abs(c2))


def test_zero_profile():
    rho = np.linspace(1, 40, 100)
    fit = fit_far_field(synthetic(P, rho, np.zeros_like(rho)), (10, 40))
    assert fit.c1 == 0 and fit.c2 == 0 and fit.residual == 0


def test_fit_preconditions():
    rho = np.linspace(1, 40, 100)
    prof = synthetic(P, rho, np.ones_like(rho))
    with pytest.raises(PreconditionError):
        fit_far_field(prof, (4.0, 40))
    with pytest.raises(PreconditionError):
        fit_far_field(prof, (10.0, 11.0))  # 2 nodes
    with pytest.raises(PreconditionError):
        fit_far_field(prof, (10.0, 50.0))


def test_rank_deficient():
    # every window node at the same radius makes the two basis columns parallel
    rho = np.concatenate(([1.0], np.full(10, 20.0), [40.0]))
    with pytest.raises(FitError):
        fit_far_field(synthetic(P, rho, np.ones(rho.size)), (19.9, 20.1))


def test_reference_fit(ref_profile):
    fit = fit_far_field(ref_profile, (24, 40))
    assert abs(fit.c2) > 0
    # frozen from the reference build: the leading-order basis leaves an O(rho^-2) misfit
    assert abs(fit.c1) == pytest.approx(0.134, abs=2e-3)
    assert abs(fit.c2) == pytest.approx(0.304, abs=2e-3)
    assert fit.residual == pytest.approx(1.49e-3, rel=0.05)


def test_fit_residual_phase_invariant(ref_profile):
    base = fit_far_field(ref_profile, (24, 40))
    rot = fit_far_field(ref_profile.rotated(0.7), (24, 40))
    assert rot.residual == pytest.approx(base.residual, rel=1e-12)
    assert rot.c2 == pytest.approx(base.c2 * cmath.exp(0.7j), rel=1e-12)


def test_fit_residual_improves_outward(ref_profile70):
    res = [fit_far_field(ref_profile70, (lo, lo + 16)).residual for lo in (14, 24, 34, 44, 54)]
    assert all(b <= 2 * a for a, b in zip(res, res[1:]))


def test_fit_json(ref_profile):
    js = fit_far_field(ref_profile, (24, 40)).to_json()
    assert set(js) == {"c1_re", "c1_im", "c2_re", "c2_im", "window_lo", "window_hi", "residual"}


def test_decay_power_law():
    rho = np.linspace(1, 40, 500)
    assert decay_exponent(synthetic(P, rho, rho**-0.5), (20, 40)) == pytest.approx(-0.5, abs=1e-6)


def test_decay_pure_q2():
    rho = np.linspace(1, 40, 20001)
    _, q2 = wkb_basis(P, rho)
    assert decay_exponent(synthetic(P, rho, q2), (20, 40)) == pytest.approx(-(1 - 1 / 1.9), abs=1e-6)


def test_decay_reference(ref_profile):
    target = -(1 - 1 / 1.9)
    slope = decay_exponent(ref_profile, (20, 40))
    assert abs(slope - target) < 0.05 * abs(target)
    assert decay_exponent(ref_profile.rotated(1.1), (20, 40)) == pytest.approx(slope, rel=1e-12)


def test_decay_too_few_points():
    rho = np.linspace(1, 40, 400)
    amp = 1 + 0.1 * np.cos(rho)  # period 2 pi: only two maxima in [20, 34]
    with pytest.raises(FitError):
        decay_exponent(synthetic(P, rho, amp), (20, 34))


def test_envelope_monotone_and_minima():
    r = np.linspace(1, 2, 5)
    assert np.array_equal(envelope(r, r)[1], r)
    assert envelope(r, np.array([3.0, 2, 1, 2, 3]))[0].size == 0


def test_integrability_reference(ref_profile):
    assert lp_integrability_check(ref_profile, 3.0).verdict == CONVERGING
    assert lp_integrability_check(ref_profile, 1.8).verdict == DIVERGING
    assert lp_integrability_check(ref_profile, 2.7).verdict == CONVERGING


def test_integrability_p2_needs_long_profile(ref_params):
    # at rho_max = 40 the p = 2 increments are still close to flat; at 80 the growth shows
    prof = integrate_profile(ref_params, 80.0)
    assert lp_integrability_check(prof, 2.0).verdict == DIVERGING


def test_integrability_synthetic_tail():
    rho = np.linspace(1e-6, 40, 40001)
    q = 1.0 / np.maximum(rho, 1.0)
    rep = lp_integrability_check(synthetic(P, rho, q), 2.0)
    assert rep.verdict == CONVERGING
    assert rep.partial_integrals[-1] == pytest.approx(1 + (1 - 1 / 40), rel=1e-6)
    assert all(r == pytest.approx(0.5, rel=1e-3) for r in rep.increment_ratios)


def test_integrability_preconditions(ref_params):
    short = integrate_profile(ref_params, 10.0)
    with pytest.raises(PreconditionError):
        lp_integrability_check(short, 3.0)
    with pytest.raises(PreconditionError):
        lp_integrability_check(integrate_profile(ref_params, 20.0), 1.0)
