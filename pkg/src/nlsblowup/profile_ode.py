"""Radial self-similar profile equation.

The profile Q(rho) solves

    Q'' + (d-1)/rho Q' - Q + i a (Q/sigma + rho Q') + |Q|^(2 sigma) Q = 0,
    Q'(0) = 0,  Q(0) = q0 != 0,

on 0 < rho < infinity. We start from a two-term Taylor series at a small
radius rho0 (rho = 0 is a removable singular point of the (d-1)/rho term)
and march outward with an embedded Dormand-Prince 5(4) pair.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import IntegrationError, ParameterError

DEFAULT_RHO0 = 1e-6
DEFAULT_RHO_MAX = 40.0
DEFAULT_TOL = 1e-10
DEFAULT_STEP_FACTOR = 0.1


@dataclass(frozen=True)
class ProfileParams:
    """Parameters (d, sigma, a, Q(0)) of the profile problem."""

    d: int
    sigma: float
    a: float
    q0: complex

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ParameterError(f"d must be a positive integer, got {self.d!r}")
        if not self.sigma > 0:
            raise ParameterError(f"sigma must be positive, got {self.sigma!r}")
        sd = self.sigma * self.d
        if not 1.0 < sd < 2.0:
            raise ParameterError(f"sigma*d = {sd!r} is outside the subcritical window (1, 2)")
        if not self.a > 0:
            raise ParameterError(f"a must be positive, got {self.a!r}")
        q0 = complex(self.q0)
        if q0 == 0 or not cmath.isfinite(q0):
            raise ParameterError(f"q0 must be finite and nonzero, got {self.q0!r}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "sigma", float(self.sigma))
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "q0", q0)


def profile_rhs(params: ProfileParams, rho, q, dq):
    """Second derivative Q'' from the profile equation (works on arrays)."""
    d, s, a = params.d, params.sigma, params.a
    nonlin = (q.real**2 + q.imag**2) ** s
    return -(d - 1) / rho * dq + q - 1j * a * (q / s + rho * dq) - nonlin * q


def second_derivative_at_origin(params: ProfileParams) -> complex:
    """Q''(0) from the rho -> 0 limit, where (d-1) Q'/rho -> (d-1) Q''(0)."""
    q0, s, a = params.q0, params.sigma, params.a
    return (q0 - 1j * (a / s) * q0 - abs(q0) ** (2 * s) * q0) / params.d


def taylor_start(params: ProfileParams, rho0: float = DEFAULT_RHO0) -> tuple[complex, complex]:
    """Series values (Q(rho0), Q'(rho0)) for starting the integration."""
    if not rho0 > 0:
        raise ParameterError(f"rho0 must be positive, got {rho0!r}")
    q2 = second_derivative_at_origin(params)
    return params.q0 + 0.5 * q2 * rho0**2, q2 * rho0


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Sampled profile Q(rho), Q'(rho) on a strictly increasing grid.

    ``rho[0]`` is the series-start radius. The interpolant is a piecewise
    cubic Hermite built from (Q, Q') at the nodes and is extended to
    rho = 0 with Q(0) = q0, Q'(0) = 0.
    """

    params: ProfileParams
    rho: np.ndarray
    q: np.ndarray
    dq: np.ndarray

    @property
    def rho_max(self) -> float:
        return float(self.rho[-1])

    @cached_property
    def ddq(self) -> np.ndarray:
        return profile_rhs(self.params, self.rho, self.q, self.dq)

    @cached_property
    def _splines(self):
        rho, q, dq, ddq = self.rho, self.q, self.dq, self.ddq
        if rho[0] > 0:
            rho = np.concatenate(([0.0], rho))
            q = np.concatenate(([self.params.q0], q))
            dq = np.concatenate(([0.0], dq))
            ddq = np.concatenate(([second_derivative_at_origin(self.params)], ddq))
        return CubicHermiteSpline(rho, q, dq, extrapolate=False), CubicHermiteSpline(
            rho, dq, ddq, extrapolate=False
        )

    def __call__(self, rho):
        """Interpolated Q at the given radii (NaN outside [0, rho_max])."""
        return self._splines[0](rho)

    def derivative(self, rho):
        """Interpolated Q' at the given radii."""
        return self._splines[1](rho)

    def rotated(self, theta: float) -> RadialProfile:
        """Profile multiplied by the global phase e^{i theta}."""
        ph = cmath.exp(1j * theta)
        params = ProfileParams(self.params.d, self.params.sigma, self.params.a, self.params.q0 * ph)
        return RadialProfile(params, self.rho, self.q * ph, self.dq * ph)


# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A2 = (1 / 5,)
_A3 = (3 / 40, 9 / 40)
_A4 = (44 / 45, -56 / 15, 32 / 9)
_A5 = (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729)
_A6 = (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


def integrate_profile(
    params: ProfileParams,
    rho_max: float = DEFAULT_RHO_MAX,
    tol: float = DEFAULT_TOL,
    *,
    rho0: float = DEFAULT_RHO0,
    step_factor: float = DEFAULT_STEP_FACTOR,
    rho_out=None,
) -> RadialProfile:
    """Integrate the profile equation from ``rho0`` to ``rho_max``.

    Steps are accepted when the embedded error estimate satisfies
    |err| <= tol * (1 + |y|) componentwise, and are capped at
    ``step_factor / (a * rho)`` so that the far-field phase a rho^2 / 2
    advances by a bounded amount per step. Radii listed in ``rho_out`` are
    added to the output grid by cubic Hermite dense output.

    Raises IntegrationError on step-size underflow or a non-finite state.
    """
    if not rho_max > rho0:
        raise ParameterError(f"rho_max={rho_max!r} must exceed rho0={rho0!r}")
    if not tol > 0:
        raise ParameterError(f"tol must be positive, got {tol!r}")

    d, s, a = params.d, params.sigma, params.a
    dm1 = d - 1
    ia_s = 1j * a / s
    ia = 1j * a

    def f(r, q, p):
        return p, -dm1 / r * p + q - ia_s * q - ia * r * p - (q.real * q.real + q.imag * q.imag) ** s * q

    q, p = taylor_start(params, rho0)
    r = rho0
    rs, qs, ps = [r], [q], [p]

    k1q, k1p = f(r, q, p)
    h = min(1e-2, rho_max - r)
    e1, e3, e4, e5, e6, e7 = _E[0], _E[2], _E[3], _E[4], _E[5], _E[6]
    while r < rho_max:
        hcap = step_factor / (a * r)
        if h > hcap:
            h = hcap
        last = False
        if r + h >= rho_max:
            h = rho_max - r
            last = True
        if h <= 1e-14 * max(1.0, r):
            raise IntegrationError("step size underflow", r)

        k2q, k2p = f(r + _C[1] * h, q + h * _A2[0] * k1q, p + h * _A2[0] * k1p)
        k3q, k3p = f(
            r + _C[2] * h,
            q + h * (_A3[0] * k1q + _A3[1] * k2q),
            p + h * (_A3[0] * k1p + _A3[1] * k2p),
        )
        k4q, k4p = f(
            r + _C[3] * h,
            q + h * (_A4[0] * k1q + _A4[1] * k2q + _A4[2] * k3q),
            p + h * (_A4[0] * k1p + _A4[1] * k2p + _A4[2] * k3p),
        )
        k5q, k5p = f(
            r + _C[4] * h,
            q + h * (_A5[0] * k1q + _A5[1] * k2q + _A5[2] * k3q + _A5[3] * k4q),
            p + h * (_A5[0] * k1p + _A5[1] * k2p + _A5[2] * k3p + _A5[3] * k4p),
        )
        k6q, k6p = f(
            r + h,
            q + h * (_A6[0] * k1q + _A6[1] * k2q + _A6[2] * k3q + _A6[3] * k4q + _A6[4] * k5q),
            p + h * (_A6[0] * k1p + _A6[1] * k2p + _A6[2] * k3p + _A6[3] * k4p + _A6[4] * k5p),
        )
        qn = q + h * (_B[0] * k1q + _B[2] * k3q + _B[3] * k4q + _B[4] * k5q + _B[5] * k6q)
        pn = p + h * (_B[0] * k1p + _B[2] * k3p + _B[3] * k4p + _B[4] * k5p + _B[5] * k6p)
        rn = rho_max if last else r + h
        k7q, k7p = f(rn, qn, pn)

        errq = h * (e1 * k1q + e3 * k3q + e4 * k4q + e5 * k5q + e6 * k6q + e7 * k7q)
        errp = h * (e1 * k1p + e3 * k3p + e4 * k4p + e5 * k5p + e6 * k6p + e7 * k7p)
        err = max(
            abs(errq) / (tol * (1.0 + max(abs(q), abs(qn)))),
            abs(errp) / (tol * (1.0 + max(abs(p), abs(pn)))),
        )
        if not math.isfinite(err):
            if not (cmath.isfinite(qn) and cmath.isfinite(pn)):
                raise IntegrationError("non-finite state", r)
            err = math.inf

        if err <= 1.0:
            r, q, p = rn, qn, pn
            k1q, k1p = k7q, k7p
            rs.append(r)
            qs.append(q)
            ps.append(p)
            fac = 5.0 if err == 0 else min(5.0, 0.9 * err**-0.2)
        else:
            fac = max(0.2, 0.9 * err**-0.2) if math.isfinite(err) else 0.2
        h *= fac

    rho = np.array(rs)
    prof = RadialProfile(params, rho, np.array(qs, dtype=complex), np.array(ps, dtype=complex))
    if rho_out is None:
        return prof

    extra = np.atleast_1d(np.asarray(rho_out, dtype=float))
    extra = extra[(extra > rho0) & (extra < rho_max)]
    extra = np.setdiff1d(extra, rho)
    if extra.size == 0:
        return prof
    grid = np.concatenate((rho, extra))
    order = np.argsort(grid, kind="stable")
    return RadialProfile(
        params,
        grid[order],
        np.concatenate((prof.q, prof(extra)))[order],
        np.concatenate((prof.dq, prof.derivative(extra)))[order],
    )
