"""Exception types shared across the package."""

from __future__ import annotations


class HierargError(Exception):
    """Base class for all package-specific failures."""


class GridSizeError(HierargError):
    """Grid sizing violated (non power-of-two interval count, too coarse, mismatch)."""


class DomainError(HierargError):
    """Input left the mathematical domain of an operation (e.g. alpha*w >= 1)."""


class UnboundedOrbitError(DomainError):
    """Requested a closed-orbit quantity for an unbounded phase-plane orbit."""


class NoBranchError(HierargError):
    """No equilibrium branch exists at the requested (alpha, j)."""


class AccuracyError(HierargError):
    """A computed object failed its internal accuracy verification."""


class BlowUpError(HierargError):
    """Flow amplitude crossed the blow-up threshold."""

    def __init__(self, t: float, x: float, value: float, threshold: float):
        self.t = t
        self.x = x
        self.value = value
        self.threshold = threshold
        super().__init__(
            f"blow-up at t={t:.6g}: |v|={value:.3e} > {threshold:.3e} near x={x:.6g}"
        )


class EstimationError(HierargError):
    """Decay-rate estimation failed (non-monotone tail or no linear regime)."""


class UnresolvedSpectrumError(HierargError):
    """Eigenvalue counts disagree between grid resolutions."""


class IdentityViolationError(HierargError):
    """An algebraic identity residual exceeded its tolerance."""

    def __init__(self, message: str, worst_x: float, residual: float):
        self.worst_x = worst_x
        self.residual = residual
        super().__init__(f"{message}: residual {residual:.3e} at x={worst_x:.6g}")


class PropertyViolationError(HierargError):
    """A monotonicity/positivity property check failed (build-failing)."""


class TruncationError(HierargError):
    """Charge-sequence tail mass above tolerance; a larger truncation is needed."""


class ResummationError(HierargError):
    """The two theta-kernel representations disagree beyond tolerance."""


class ConvergenceFailureError(HierargError):
    """A convergence study produced non-decreasing gaps."""

    def __init__(self, message: str, table=None):
        self.table = table
        super().__init__(message)
