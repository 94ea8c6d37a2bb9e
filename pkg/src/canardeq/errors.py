"""Exception hierarchy shared across the toolkit."""

from __future__ import annotations


class ToolError(Exception):
    """Base class for all computation errors raised by this package."""


class InvalidInputError(ToolError):
    """Arguments are outside the domain an operation is defined on."""


class SingularEvaluationError(ToolError):
    """Evaluation at eps = 0 of a field carrying 1/eps terms."""


class DivergedError(ToolError):
    """Map iteration left the |z| <= 1e10 guard region.

    Carries the step index at which the guard tripped and the partial
    trajectory computed up to that point.
    """

    def __init__(self, step_index, trajectory=None):
        super().__init__(f"trajectory diverged at step {step_index}")
        self.step_index = step_index
        self.trajectory = trajectory


class SingularStepError(ToolError):
    """Kahan linear system (Id - (h/2) Df) became numerically singular."""

    def __init__(self, step_index, determinant):
        super().__init__(
            f"singular Kahan step at index {step_index} (det={determinant})"
        )
        self.step_index = step_index
        self.determinant = determinant


class SolverStallError(ToolError):
    """Adaptive reference solver failed to reach the end of the span."""

    def __init__(self, message, last_time=None, last_state=None):
        super().__init__(message)
        self.last_time = last_time
        self.last_state = last_state


class BracketingError(ToolError):
    """A root bracket could not be established (parameters outside regime)."""


class QuadratureError(ToolError):
    """Adaptive quadrature failed to converge; carries the best estimate."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class DegenerateFitError(ToolError):
    """Convergence-order fit attempted on errors at rounding level."""


class EscapeError(ToolError):
    """A trajectory left the tracked region before the requested end time."""

    def __init__(self, message, escape_time=None):
        super().__init__(message)
        self.escape_time = escape_time
