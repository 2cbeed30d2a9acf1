"""Explicit self-similar singular solution of the NLS.

    psi(t, r) = L(t)^(-1/sigma) Q(r / L(t)) exp(i tau(t)),
    L(t) = sqrt(2 a (Tc - t)),
    tau(t) = int_0^t L(s)^-2 ds = log(Tc / (Tc - t)) / (2 a).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import lp_norm_profile
from .diagnostics import p_star
from .errors import DomainError, ExtrapolationError, NormDivergenceError
from .profile_ode import RadialProfile


def _check_time(Tc, t):
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(t_arr >= Tc):
        raise DomainError(f"t={t!r} must lie in [0, Tc={Tc!r})")
    return t_arr


def scale_L(a, Tc, t):
    """Width L(t) = sqrt(2a(Tc - t)); DomainError at or past the collapse."""
    out = np.sqrt(2.0 * a * (Tc - _check_time(Tc, t)))
    return float(out) if out.ndim == 0 else out


def phase_tau(a, Tc, t):
    """Accumulated phase tau(t) = log(Tc/(Tc - t)) / (2a)."""
    t_arr = _check_time(Tc, t)
    out = -np.log1p(-t_arr / Tc) / (2.0 * a)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class SelfSimilarSolution:
    profile: RadialProfile
    Tc: float

    def __post_init__(self):
        if not self.Tc > 0:
            raise DomainError(f"Tc must be positive, got {self.Tc!r}")

    @classmethod
    def unit_width(cls, profile: RadialProfile) -> SelfSimilarSolution:
        """Solution with L(0) = 1, i.e. Tc = 1/(2a), so psi(0, x) = Q(|x|)."""
        return cls(profile, 1.0 / (2.0 * profile.params.a))

    @property
    def a(self) -> float:
        return self.profile.params.a

    @property
    def sigma(self) -> float:
        return self.profile.params.sigma

    def L(self, t):
        return scale_L(self.a, self.Tc, t)

    def tau(self, t):
        return phase_tau(self.a, self.Tc, t)

    def __call__(self, t, r):
        return evaluate_psiQ(self, t, r)


def evaluate_psiQ(sol: SelfSimilarSolution, t: float, r):
    """psi(t, r) from the stored profile; refuses rho = r/L beyond rho_max."""
    L = sol.L(t)
    rho = np.abs(np.asarray(r, dtype=float)) / L
    if np.any(rho > sol.profile.rho_max):
        raise ExtrapolationError(
            f"rho = r/L up to {float(np.max(rho))!r} exceeds the stored profile (rho_max={sol.profile.rho_max!r})"
        )
    out = L ** (-1.0 / sol.sigma) * sol.profile(rho) * np.exp(1j * sol.tau(t))
    return complex(out) if out.ndim == 0 else out


def nls_residual(sol: SelfSimilarSolution, t: float, x: np.ndarray, h: float, dt: float,
                 time_derivative: str = "fd") -> np.ndarray:
    """Pointwise |i psi_t + psi_xx + |psi|^(2 sigma) psi| in one dimension.

    psi_xx always uses the 3-point centred difference with step ``h``;
    psi_t uses a centred difference with step ``dt`` ("fd") or the chain
    rule through L, tau and the stored Q' ("analytic").
    """
    psi = evaluate_psiQ(sol, t, x)
    psi_xx = (evaluate_psiQ(sol, t, x + h) - 2.0 * psi + evaluate_psiQ(sol, t, x - h)) / h**2
    if time_derivative == "fd":
        psi_t = (evaluate_psiQ(sol, t + dt, x) - evaluate_psiQ(sol, t - dt, x)) / (2.0 * dt)
    elif time_derivative == "analytic":
        L = sol.L(t)
        rho = np.abs(x) / L
        dlog_L = -sol.a / L**2
        s = sol.sigma
        phase = L ** (-1.0 / s) * np.exp(1j * sol.tau(t))
        q, dq = sol.profile(rho), sol.profile.derivative(rho)
        psi_t = phase * (-dlog_L / s * q - dlog_L * rho * dq + 1j / L**2 * q)
    else:
        raise ValueError(f"unknown time_derivative {time_derivative!r}")
    return np.abs(1j * psi_t + psi_xx + np.abs(psi) ** (2 * sol.sigma) * psi)


def residual_check(sol: SelfSimilarSolution, t: float, h: float, *, core: float = 10.0,
                   dt_ratio: float = 0.1, time_derivative: str = "fd") -> float:
    """Max NLS residual of psi over the core |x| <= core * L(t) (d = 1).

    The time step for the centred difference is ``dt_ratio * h * L(t)^2``,
    which tracks the L^-2 growth of the solution's temporal frequencies, so
    the whole residual is O(h^2).
    """
    L = sol.L(t)
    dt = dt_ratio * h * L**2
    if t - dt < 0 or t + dt >= sol.Tc:
        raise DomainError(f"t={t!r} too close to 0 or Tc for time step {dt!r}")
    n = int(math.floor(core * L / h))
    x = h * np.arange(-n, n + 1)
    return float(np.max(nls_residual(sol, t, x, h, dt, time_derivative)))


def blowup_norm(sol: SelfSimilarSolution, t: float, p: float, *, volume_factor: bool = True) -> float:
    """||psi(t)||_p from the scaling law.

    With ``volume_factor`` (default) this is the exact change of variables
    L^(d/p - 1/sigma) ||Q||_p; without it, the bare ||Q||_p / L^(1/sigma).
    The two agree for p = inf. ||Q||_p is a quadrature over the stored
    profile, i.e. truncated at rho_max.
    """
    d = sol.profile.params.d
    if p <= p_star(sol.sigma, d):
        raise NormDivergenceError(f"||Q||_p is infinite for p={p!r} <= p*={p_star(sol.sigma, d)!r}")
    L = sol.L(t)
    qnorm = lp_norm_profile(sol.profile, p)
    exponent = -1.0 / sol.sigma
    if volume_factor and not math.isinf(p):
        exponent += d / p
    return qnorm * L**exponent
