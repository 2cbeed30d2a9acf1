"""Far-field (large rho) behaviour of profile solutions.

For 1 < sigma*d < 2 every profile behaves like c1*Q1 + c2*Q2 at infinity, with

    Q1 = rho^(-i/a - 1/sigma),
    Q2 = exp(-i a rho^2 / 2) * rho^(i/a - d + 1/sigma).

Q2 decays more slowly and oscillates ever faster, so |Q| = O(rho^(-d + 1/sigma)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, FitError, PreconditionError
from .profile_ode import ProfileParams, RadialProfile

MIN_WINDOW_NODES = 8
MIN_WINDOW_START = 5.0
DEFAULT_WINDOW_FRACTION = 0.6

CONVERGING = "converging"
DIVERGING = "diverging"
INCONCLUSIVE = "inconclusive"


def wkb_basis(params: ProfileParams, rho):
    """Leading-order far-field solutions (q1, q2) at ``rho`` (scalar or array)."""
    r = np.asarray(rho, dtype=float)
    if np.any(~(r > 0)):
        raise DomainError("wkb_basis requires rho > 0")
    a, s, d = params.a, params.sigma, params.d
    log_r = np.log(r)
    q1 = np.exp((-1j / a - 1.0 / s) * log_r)
    q2 = np.exp(-0.5j * a * r * r + (1j / a - d + 1.0 / s) * log_r)
    if q1.ndim == 0:
        return complex(q1), complex(q2)
    return q1, q2


@dataclass(frozen=True)
class FarFieldFit:
    c1: complex
    c2: complex
    window: tuple[float, float]
    residual: float

    def to_json(self) -> dict:
        return {
            "c1_re": self.c1.real,
            "c1_im": self.c1.imag,
            "c2_re": self.c2.real,
            "c2_im": self.c2.imag,
            "window_lo": self.window[0],
            "window_hi": self.window[1],
            "residual": self.residual,
        }


def default_window(profile: RadialProfile) -> tuple[float, float]:
    return DEFAULT_WINDOW_FRACTION * profile.rho_max, profile.rho_max


def _window_mask(profile: RadialProfile, window) -> np.ndarray:
    lo, hi = window
    if not (profile.rho[0] < lo < hi <= profile.rho_max):
        raise PreconditionError(
            f"window {window!r} must satisfy rho0 < lo < hi <= rho_max={profile.rho_max!r}"
        )
    return (profile.rho >= lo) & (profile.rho <= hi)


def fit_far_field(profile: RadialProfile, window=None) -> FarFieldFit:
    """Least-squares coefficients of q ~ c1*Q1 + c2*Q2 over the window nodes.

    The residual is the relative root-mean-square misfit
    ||q - c1 Q1 - c2 Q2|| / ||q|| over the window (0 for a zero profile).
    """
    if window is None:
        window = default_window(profile)
    lo, hi = float(window[0]), float(window[1])
    if lo < MIN_WINDOW_START:
        raise PreconditionError(f"window start {lo!r} is below {MIN_WINDOW_START} (far-field fit)")
    mask = _window_mask(profile, (lo, hi))
    n = int(mask.sum())
    if n < MIN_WINDOW_NODES:
        raise PreconditionError(f"window holds {n} nodes, need at least {MIN_WINDOW_NODES}")

    rho, q = profile.rho[mask], profile.q[mask]
    q1, q2 = wkb_basis(profile.params, rho)
    A = np.column_stack((q1, q2))
    coef, _, rank, _ = np.linalg.lstsq(A, q, rcond=None)
    if rank < 2:
        raise FitError(f"rank-deficient far-field system on window {(lo, hi)!r}")

    qnorm = np.linalg.norm(q)
    residual = float(np.linalg.norm(A @ coef - q) / qnorm) if qnorm > 0 else 0.0
    return FarFieldFit(complex(coef[0]), complex(coef[1]), (lo, hi), residual)


def envelope(rho: np.ndarray, amp: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Upper envelope of an oscillating modulus, taken at its local maxima.

    A modulus without interior extrema (a pure power law, say) is its own
    envelope and is returned unchanged.
    """
    inner = amp[1:-1]
    is_max = (inner > amp[:-2]) & (inner >= amp[2:])
    if is_max.any():
        idx = np.flatnonzero(is_max) + 1
        return rho[idx], amp[idx]
    is_min = (inner < amp[:-2]) & (inner <= amp[2:])
    if is_min.any():
        return rho[:0], amp[:0]
    return rho, amp


def decay_exponent(profile: RadialProfile, window=None) -> float:
    """Log-log slope of the envelope of |q| over the window."""
    if window is None:
        window = default_window(profile)
    mask = _window_mask(profile, window)
    r_env, a_env = envelope(profile.rho[mask], np.abs(profile.q[mask]))
    keep = a_env > 0
    r_env, a_env = r_env[keep], a_env[keep]
    if r_env.size < 3:
        raise FitError(f"only {r_env.size} envelope points in window {tuple(window)!r}")
    slope, _ = np.polyfit(np.log(r_env), np.log(a_env), 1)
    return float(slope)


@dataclass(frozen=True)
class IntegrabilityReport:
    p: float
    checkpoints: tuple[float, ...]
    partial_integrals: tuple[float, ...]
    increment_ratios: tuple[float, ...]
    verdict: str


def lp_integrability_check(
    profile: RadialProfile,
    p: float,
    *,
    n_increments: int = 2,
    converge_below: float = 0.9,
    diverge_above: float = 0.99,
) -> IntegrabilityReport:
    """Trend test for finiteness of int |q|^p rho^(d-1) drho.

    Partial integrals are taken at dyadic checkpoints rho_max / 2^k. The
    verdict looks at the last ``n_increments`` increments: every ratio of
    consecutive increments below ``converge_below`` means geometric decay
    (converging), every ratio above ``diverge_above`` means diverging, and
    anything else is inconclusive. This is a heuristic, not a proof.
    """
    if not p > 1:
        raise PreconditionError(f"p must exceed 1, got {p!r}")
    if profile.rho_max < 20:
        raise PreconditionError(f"profile must reach rho >= 20, got {profile.rho_max!r}")

    rho, d = profile.rho, profile.params.d
    integrand = np.abs(profile.q) ** p * rho ** (d - 1)
    cumulative = np.concatenate(([0.0], np.cumsum(0.5 * np.diff(rho) * (integrand[1:] + integrand[:-1]))))

    checkpoints = []
    c = profile.rho_max
    while c >= 1.0:
        checkpoints.append(c)
        c /= 2
    checkpoints = checkpoints[::-1]
    partial = np.interp(checkpoints, rho, cumulative)
    increments = np.diff(partial)[-n_increments:]
    ratios = increments[1:] / increments[:-1]

    if np.all(ratios < converge_below):
        verdict = CONVERGING
    elif np.all(ratios > diverge_above):
        verdict = DIVERGING
    else:
        verdict = INCONCLUSIVE
    return IntegrabilityReport(
        float(p),
        tuple(float(x) for x in checkpoints),
        tuple(float(x) for x in partial),
        tuple(float(x) for x in ratios),
        verdict,
    )


def lp_norm_profile(profile: RadialProfile, p: float) -> float:
    """||Q||_p over R^d, truncated at rho_max; p = inf gives max |Q|.

    Simpson's rule on each integrator step, with the midpoint value taken
    from the Hermite interpolant.
    """
    if math.isinf(p):
        return float(max(np.abs(profile.q).max(), abs(profile.params.q0)))
    d = profile.params.d
    sphere = 2 * math.pi ** (d / 2) / math.gamma(d / 2)
    rho = np.concatenate(([0.0], profile.rho))
    mid = 0.5 * (rho[1:] + rho[:-1])

    def f(r, q):
        return np.abs(q) ** p * r ** (d - 1)

    ends = f(rho, np.concatenate(([profile.params.q0], profile.q)))
    integral = np.sum(np.diff(rho) / 6 * (ends[:-1] + 4 * f(mid, profile(mid)) + ends[1:]))
    return float((sphere * integral) ** (1.0 / p))
