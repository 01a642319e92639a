"""Exception hierarchy for the solver.

Every failure mode callers are expected to handle gets its own class so that
sweeps can record machine-readable status codes (the class name) per point.
"""

from __future__ import annotations


class GPScatterError(Exception):
    """Base class for all errors raised by this package."""


# --- parameter / algebra errors -------------------------------------------

class NegativeRadicand(GPScatterError):
    """An asymptotic wavenumber radicand mu - g*density is negative.

    Signals an evanescent or otherwise unphysical asymptotic channel.  Callers
    must surface this; it is never silently clamped.
    """


class DomainError(GPScatterError):
    """An argument is outside the mathematical domain of a closed form."""


class EmptyRange(GPScatterError):
    """A requested index range contains no admissible entries."""


# --- integrator errors ------------------------------------------------------

class IntegrationError(GPScatterError):
    """Base class for adaptive-integration failures."""


class StepLimitExceeded(IntegrationError):
    """The integrator exhausted its step budget before reaching the target."""


class StepUnderflow(IntegrationError):
    """The required step fell below min_step: stiffness or solution blow-up."""


class NonFiniteState(IntegrationError):
    """The integration state became NaN or infinite."""


# --- amplitude-extraction errors -------------------------------------------

class EvanescentLocal(GPScatterError):
    """The local wavenumber radicand mu - g*|psi|^2 is negative at the
    extraction point, so no local plane-wave decomposition exists."""


class ClosedIncomingChannel(GPScatterError):
    """The incoming-amplitude quadratic has no real non-negative root: no
    incoming plane wave can carry the required flux."""


class DegenerateAmplitude(GPScatterError):
    """The extracted incoming amplitude is exactly zero; the transmission
    coefficient is undefined."""


# --- resonance-search errors ------------------------------------------------

class NotResonant(GPScatterError):
    """A check that requires unit transmission was invoked away from it."""


class NoResonanceInBracket(GPScatterError):
    """Bracketed maximization found no transmission peak reaching unity
    within tolerance inside the requested interval."""


class SolveFailure(GPScatterError):
    """A scattering sub-problem failed; carries the underlying cause."""

    def __init__(self, message: str, cause: Exception | None = None):
        super().__init__(message)
        self.cause = cause


# --- time-dependent solver errors -------------------------------------------

class GridTooCoarse(GPScatterError):
    """The grid or time step violates the propagation preconditions."""


class UnstableStep(GPScatterError):
    """The propagated norm grew beyond what source influx can account for."""


class NoSteadyState(GPScatterError):
    """t_final was reached before the windowed downstream density converged.

    Expected near strongly bistable or dynamically unstable regimes.
    """


# --- CLI / config errors ------------------------------------------------------

class ConfigError(GPScatterError):
    """A run configuration is malformed (unknown keys, bad types, ...)."""
