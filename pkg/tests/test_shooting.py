import math

import numpy as np
import pytest

from nlsblowup.shooting import ShootOptions, far_field_c2, nelder_mead, objective, shoot

TARGET = (0.5145, 1.2953)


def test_objective_ordering():
    assert objective(0.5145, 1.2953, 1, 1.9) < objective(0.6, 1.5, 1, 1.9)


def test_objective_large_q0_much_larger():
    # measured separation is about 3.2x
    assert 3 * objective(0.5145, 1.2953, 1, 1.9) < objective(0.5145, 3.0, 1, 1.9)


def test_objective_gauge_invariant():
    base = far_field_c2(0.5145, 1.2953, 1, 1.9)
    rotated = far_field_c2(0.5145, 1.2953 * np.exp(0.9j), 1, 1.9)
    assert rotated == pytest.approx(base, rel=1e-8)


def test_objective_deterministic():
    assert objective(0.52, 1.3, 1, 1.9) == objective(0.52, 1.3, 1, 1.9)


def test_c2_local_min_in_q0():
    c = [far_field_c2(0.5145, q, 1, 1.9) for q in (1.2753, 1.2953, 1.3153)]
    assert c[1] < c[0] and c[1] < c[2]


def test_nelder_mead_quadratic():
    f = lambda x: (x[0] - 1) ** 2 + 10 * (x[1] + 2) ** 2
    x, fx, conv, iters, hist = nelder_mead(f, (0.0, 0.0), (0.5, 0.5), xtol=1e-8, max_evals=2000)
    assert conv and np.allclose(x, (1, -2), atol=1e-7)
    assert all(b <= a for a, b in zip(hist, hist[1:]))


def test_nelder_mead_rosenbrock():
    f = lambda x: 100 * (x[1] - x[0] ** 2) ** 2 + (1 - x[0]) ** 2
    x, *_ = nelder_mead(f, (-1.2, 1.0), (0.1, 0.1), xtol=1e-9, max_evals=5000)
    assert np.allclose(x, (1, 1), atol=1e-6)


def test_nelder_mead_budget():
    calls = []
    f = lambda x: calls.append(1) or float(np.sum(np.asarray(x) ** 2))
    x, fx, conv, *_ = nelder_mead(f, (3.0, 3.0), (1.0, 1.0), xtol=1e-12, max_evals=17)
    assert not conv and len(calls) == 17
    assert fx == pytest.approx(float(np.sum(x**2)))


def test_nelder_mead_inf_region():
    f = lambda x: math.inf if x[0] < 0 else (x[0] - 0.1) ** 2 + x[1] ** 2
    x, *_ = nelder_mead(f, (0.5, 0.5), (0.5, 0.5), xtol=1e-8, max_evals=3000)
    assert np.allclose(x, (0.1, 0), atol=1e-6)


def test_shoot_default(shoot_default):
    r = shoot_default
    assert r.converged
    assert abs(r.a_opt - TARGET[0]) < 0.01 and abs(r.q0_opt - TARGET[1]) < 0.01
    assert r.c2_min > 0
    assert r.evaluations == len(r.trace)
    assert all(b <= a for a, b in zip(r.best_history, r.best_history[1:]))


def test_shoot_c2_relative_to_c1(shoot_default):
    from nlsblowup.asymptotics import fit_far_field
    from nlsblowup.profile_ode import ProfileParams, integrate_profile

    fit = fit_far_field(integrate_profile(ProfileParams(1, 1.9, TARGET[0], TARGET[1]), 40.0), (24, 40))
    assert shoot_default.c2_min > 1e-6 * abs(fit.c1)


def test_shoot_fixed_point(shoot_default):
    start = (shoot_default.a_opt, shoot_default.q0_opt)
    again = shoot(1, 1.9, start)
    moved = math.hypot(again.a_opt - start[0], again.q0_opt - start[1])
    assert again.converged and moved < ShootOptions.xtol


@pytest.mark.slow
def test_shoot_basin():
    xtol = ShootOptions.xtol
    r1 = shoot(1, 1.9, (0.45, 1.2))
    r2 = shoot(1, 1.9, (0.55, 1.4))
    assert r1.converged and r2.converged
    assert math.hypot(r1.a_opt - r2.a_opt, r1.q0_opt - r2.q0_opt) < 2 * xtol


def test_shoot_reproducible(shoot_default):
    again = shoot(1, 1.9, (0.5, 1.3))
    assert again.to_json() == shoot_default.to_json()
    assert again.trace == shoot_default.trace


def test_shoot_budget_exhaustion():
    r = shoot(1, 1.9, (0.5, 1.3), ShootOptions(max_evals=6))
    assert not r.converged and r.evaluations == 6
    assert r.objective_min == min(e.value for e in r.trace)


def test_shoot_invalid_points_are_inf():
    # the second simplex vertex has a < 0, which is invalid and must score +inf
    r = shoot(1, 1.9, (0.02, 1.3), ShootOptions(scale=(-0.05, 0.1), max_evals=3))
    assert math.isinf(r.trace[1].value)
