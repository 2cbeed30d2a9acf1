"""Norms and conserved quantities of 1-D fields."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .errors import DomainError


@dataclass(frozen=True)
class ConservedQuantities:
    t: float
    mass: float
    hamiltonian: float
    linf: float


def p_star(sigma: float, d: int) -> float:
    """Critical exponent sigma*d / (sigma*d - 1); requires 1 < sigma*d < 2."""
    sd = sigma * d
    if not 1.0 < sd < 2.0:
        raise DomainError(f"sigma*d = {sd!r} is outside (1, 2)")
    return sd / (sd - 1.0)


def mass(state) -> float:
    """||psi||_2^2 by the trapezoid rule."""
    return float(trapezoid(np.abs(state.psi) ** 2, state.x))


def gradient(psi: np.ndarray, dx: float, order: int = 4) -> np.ndarray:
    """Centred first derivative, with odd (Dirichlet) ghost values beyond the ends."""
    if order == 4:
        g = np.concatenate((-psi[2:0:-1], psi, -psi[-2:-4:-1]))
        return (g[:-4] - 8.0 * g[1:-3] + 8.0 * g[3:-1] - g[4:]) / (12.0 * dx)
    if order == 2:
        g = np.concatenate((-psi[1:2], psi, -psi[-2:-1]))
        return (g[2:] - g[:-2]) / (2.0 * dx)
    raise ValueError(f"unsupported gradient order {order!r}")


def hamiltonian(state, sigma: float, order: int = 4) -> float:
    """||psi_x||_2^2 - ||psi||_{2 sigma + 2}^{2 sigma + 2} / (sigma + 1)."""
    dx = state.x[1] - state.x[0]
    grad = gradient(state.psi, dx, order)
    kinetic = trapezoid(np.abs(grad) ** 2, state.x)
    potential = trapezoid(np.abs(state.psi) ** (2 * sigma + 2), state.x) / (sigma + 1)
    return float(kinetic - potential)


def lp_norm(state, p: float) -> float:
    """(int |psi|^p dx)^(1/p) by trapezoid; p = inf gives the max modulus."""
    if math.isinf(p):
        return float(np.max(np.abs(state.psi), initial=0.0))
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p!r}")
    return float(trapezoid(np.abs(state.psi) ** p, state.x) ** (1.0 / p))


def conserved(state, sigma: float) -> ConservedQuantities:
    return ConservedQuantities(
        t=float(state.t),
        mass=mass(state),
        hamiltonian=hamiltonian(state, sigma),
        linf=lp_norm(state, math.inf),
    )


def interpolation_p_grid(sigma: float) -> tuple[float, ...]:
    return (2 * sigma + 2, 8.0, 16.0, 64.0, math.inf)


@dataclass(frozen=True)
class InterpolationMargin:
    p: float
    norm_p: float
    bound: float
    margin: float


def blowup_implication_check(state, sigma: float, p_grid=None) -> list[InterpolationMargin]:
    """Hoelder interpolation ||psi||_p <= ||psi||_2^(2/p) ||psi||_inf^(1-2/p).

    ``margin`` is log(bound) - log(||psi||_p); it is >= 0 up to rounding for
    any field, so blowup of ||psi||_p for p >= 2 sigma + 2 forces blowup of
    ||psi||_inf when the mass stays bounded. A zero field has margin 0.
    """
    p_grid = interpolation_p_grid(sigma) if p_grid is None else p_grid
    n2, ninf = lp_norm(state, 2), lp_norm(state, math.inf)
    out = []
    for p in p_grid:
        theta = 0.0 if math.isinf(p) else 2.0 / p
        norm_p = lp_norm(state, p)
        bound = n2**theta * ninf ** (1.0 - theta)
        margin = 0.0 if norm_p == 0.0 else math.log(bound) - math.log(norm_p)
        out.append(InterpolationMargin(float(p), norm_p, float(bound), margin))
    return out


def focusing_factor(linf: float, linf0: float, sigma: float) -> float:
    """(||psi||_inf / ||psi_0||_inf)^sigma, which tracks 1/L(t) for psi_Q."""
    return (linf / linf0) ** sigma
