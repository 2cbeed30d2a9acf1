"""Shooting for the profile parameters that suppress the oscillatory far field.

Q(0) is restricted to the positive real axis (the profile equation is
phase-equivariant), leaving a 2-D derivative-free search over (a, Q(0)).

The objective is a*|c2| rather than the bare |c2|. The c2 mode enters the
far-field slope Q' with weight ~ a*rho*|c2 Q2| while the c1 mode enters with
weight ~ |c1 Q1| / rho, so a*|c2| is (up to the a-independent factor
rho*|Q2|) the mismatch of the radiation condition Q' = (Q1'/Q1) Q that a
classical shooting drives to zero. The bare |c2| depends on how Q2 is
normalised, and its minimiser in ``a`` is not the one reported for the
sigma = 1.9 profile; the slope-weighted objective is.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import fit_far_field
from .errors import NLSBlowupError
from .profile_ode import ProfileParams, integrate_profile

log = logging.getLogger(__name__)

OBJECTIVE_RHO_MAX = 40.0
OBJECTIVE_WINDOW = (24.0, 40.0)
OBJECTIVE_TOL = 1e-10


def far_field_c2(a, q0, d, sigma, rho_max=OBJECTIVE_RHO_MAX, window=OBJECTIVE_WINDOW, tol=OBJECTIVE_TOL):
    """|c2| of the profile with parameters (d, sigma, a, q0)."""
    profile = integrate_profile(ProfileParams(d, sigma, a, q0), rho_max, tol)
    return abs(fit_far_field(profile, window).c2)


def objective(a, q0, d, sigma, rho_max=OBJECTIVE_RHO_MAX, window=OBJECTIVE_WINDOW, tol=OBJECTIVE_TOL) -> float:
    """Slope-weighted far-field coefficient a*|c2| (see module docstring)."""
    return a * far_field_c2(a, q0, d, sigma, rho_max, window, tol)


@dataclass(frozen=True)
class ShootOptions:
    scale: tuple[float, float] = (0.05, 0.1)
    max_evals: int = 400
    xtol: float = 1e-4
    rho_max: float = OBJECTIVE_RHO_MAX
    window: tuple[float, float] = OBJECTIVE_WINDOW
    tol: float = OBJECTIVE_TOL


@dataclass(frozen=True)
class Evaluation:
    index: int
    a: float
    q0: float
    abs_c2: float
    value: float


@dataclass(frozen=True)
class ShootResult:
    a_opt: float
    q0_opt: float
    c2_min: float
    objective_min: float
    evaluations: int
    converged: bool
    iterations: int
    trace: tuple[Evaluation, ...] = field(repr=False, default=())
    best_history: tuple[float, ...] = field(repr=False, default=())

    def to_json(self) -> dict:
        return {
            "a_opt": self.a_opt,
            "q0_opt": self.q0_opt,
            "c2_min": self.c2_min,
            "objective_min": self.objective_min,
            "evaluations": self.evaluations,
            "iterations": self.iterations,
            "converged": self.converged,
        }


class _Budget(Exception):
    pass


def nelder_mead(func, x0, scale, *, xtol=1e-4, max_evals=400,
                alpha=1.0, gamma=2.0, rho=0.5, shrink=0.5):
    """Minimise ``func`` with the Nelder-Mead simplex method.

    Stops when the simplex diameter (largest vertex distance from the best
    vertex) drops below ``xtol`` or after ``max_evals`` evaluations. Returns
    (x_best, f_best, converged, iterations, best_history) where
    ``best_history`` is the best value after each iteration.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    nevals = 0

    def call(x):
        nonlocal nevals
        if nevals >= max_evals:
            raise _Budget
        nevals += 1
        return func(x)

    simplex = [x0]
    for i in range(n):
        v = x0.copy()
        v[i] += scale[i]
        simplex.append(v)
    simplex = np.array(simplex)
    fvals = np.empty(n + 1)
    history = []
    converged = False
    iterations = 0
    try:
        for i in range(n + 1):
            fvals[i] = call(simplex[i])
        while True:
            order = np.argsort(fvals, kind="stable")
            simplex, fvals = simplex[order], fvals[order]
            history.append(float(fvals[0]))
            if np.max(np.linalg.norm(simplex[1:] - simplex[0], axis=1)) < xtol:
                converged = True
                break
            iterations += 1

            centroid = simplex[:-1].mean(axis=0)
            xr = centroid + alpha * (centroid - simplex[-1])
            fr = call(xr)
            if fvals[0] <= fr < fvals[-2]:
                simplex[-1], fvals[-1] = xr, fr
                continue
            if fr < fvals[0]:
                xe = centroid + gamma * (xr - centroid)
                fe = call(xe)
                if fe < fr:
                    simplex[-1], fvals[-1] = xe, fe
                else:
                    simplex[-1], fvals[-1] = xr, fr
                continue
            if fr < fvals[-1]:
                xc = centroid + rho * (xr - centroid)
                fc = call(xc)
                if fc <= fr:
                    simplex[-1], fvals[-1] = xc, fc
                    continue
            else:
                xc = centroid + rho * (simplex[-1] - centroid)
                fc = call(xc)
                if fc < fvals[-1]:
                    simplex[-1], fvals[-1] = xc, fc
                    continue
            for i in range(1, n + 1):
                xs = simplex[0] + shrink * (simplex[i] - simplex[0])
                fs = call(xs)
                simplex[i], fvals[i] = xs, fs
    except _Budget:
        pass

    best = int(np.argmin(fvals))
    if not history or fvals[best] < history[-1]:
        history.append(float(fvals[best]))
    return simplex[best].copy(), float(fvals[best]), converged, iterations, history


def shoot(d, sigma, initial_guess, opts: ShootOptions | None = None) -> ShootResult:
    """Minimise the far-field objective over (a, Q(0)) from ``initial_guess``.

    Failed evaluations (invalid parameters, integration or fit errors) count
    as +inf so that the simplex simply backs away from them.
    """
    opts = opts or ShootOptions()
    trace: list[Evaluation] = []

    def func(x):
        a, q0 = float(x[0]), float(x[1])
        try:
            c2 = far_field_c2(a, q0, d, sigma, opts.rho_max, opts.window, opts.tol)
            value = a * c2
        except NLSBlowupError as exc:
            log.debug("objective failed at a=%r q0=%r: %s", a, q0, exc)
            c2 = value = math.inf
        trace.append(Evaluation(len(trace), a, q0, c2, value))
        log.info("eval %d: a=%.10f q0=%.10f |c2|=%.6e obj=%.6e", len(trace) - 1, a, q0, c2, value)
        return value

    x, fx, converged, iterations, history = nelder_mead(
        func, initial_guess, opts.scale, xtol=opts.xtol, max_evals=opts.max_evals
    )
    best = min(trace, key=lambda e: (e.value, e.index))
    return ShootResult(
        a_opt=float(x[0]),
        q0_opt=float(x[1]),
        c2_min=best.abs_c2,
        objective_min=fx,
        evaluations=len(trace),
        converged=converged,
        iterations=iterations,
        trace=tuple(trace),
        best_history=tuple(history),
    )
