"""Exception types raised across the package."""


class NLSBlowupError(Exception):
    """Base class for all package errors."""


class ParameterError(NLSBlowupError, ValueError):
    """Invalid problem parameters (e.g. sigma*d outside (1, 2), q0 == 0)."""


class DomainError(NLSBlowupError, ValueError):
    """Argument outside the domain of a closed-form expression."""


class PreconditionError(NLSBlowupError, ValueError):
    """Input does not satisfy an operation's precondition."""


class IntegrationError(NLSBlowupError, RuntimeError):
    """The profile integrator could not reach the requested radius."""

    def __init__(self, message: str, rho: float):
        super().__init__(f"{message} (reached rho={rho:.17g})")
        self.rho = rho


class FitError(NLSBlowupError, RuntimeError):
    """A least-squares or envelope fit is degenerate."""


class ExtrapolationError(NLSBlowupError, ValueError):
    """Evaluation requested beyond the stored profile."""


class CoverageError(NLSBlowupError, ValueError):
    """Profile does not cover the simulation domain."""


class NormDivergenceError(NLSBlowupError, ValueError):
    """Requested L^p norm is infinite for the profile (p <= p*)."""


class BlowupDetected(NLSBlowupError, RuntimeError):
    """The PDE solution became non-finite or exceeded the blowup threshold.

    This is the expected outcome of long runs near the collapse time, so
    callers usually catch it and stop the simulation cleanly.
    """

    def __init__(self, t: float, linf: float):
        super().__init__(f"blowup detected at t={t:.17g}, max|psi|={linf:.17g}")
        self.t = t
        self.linf = linf
