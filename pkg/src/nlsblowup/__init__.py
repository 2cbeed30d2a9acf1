"""Explicit singular self-similar solutions of the subcritical NLS."""

__version__ = "0.1.0"

from .asymptotics import FarFieldFit, decay_exponent, fit_far_field, lp_integrability_check, wkb_basis
from .diagnostics import ConservedQuantities, blowup_implication_check, hamiltonian, lp_norm, mass, p_star
from .nls_solver import FieldState, SimulationConfig, compare_with_analytic, init_from_profile, run, step
from .profile_ode import ProfileParams, RadialProfile, integrate_profile, taylor_start
from .selfsimilar import (
    SelfSimilarSolution,
    blowup_norm,
    evaluate_psiQ,
    phase_tau,
    residual_check,
    scale_L,
)
from .shooting import ShootOptions, ShootResult, objective, shoot
