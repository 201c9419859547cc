"""Exception types shared across the package."""


class ShockfrontError(Exception):
    """Base class for all package-specific errors."""


class ValidityExceeded(ShockfrontError):
    """|psi| lies outside the declared validity bound of the metric law."""


class SignatureLost(ShockfrontError):
    """Metric is no longer Lorentzian (-,+,+) at the requested state."""


class SingularMetric(ShockfrontError):
    """Matrix inversion failed: determinant below the singularity floor."""


class DegenerateTimeComponent(ShockfrontError):
    """(g^-1)^00 >= 0 somewhere on the validity range; cannot normalize."""


class DegenerateCharacteristic(ShockfrontError):
    """Eikonal quadratic has no positive root (b^2 + c <= 0)."""


class NonpositiveMu(ShockfrontError):
    """Inverse foliation density came out <= 0: shock crossed or data corrupt."""


class FrameDegenerate(ShockfrontError):
    """Null-frame identity residuals exceed 10x the requested tolerance."""


class NoShockPredicted(ShockfrontError):
    """Transversal derivative coefficient is nonnegative everywhere."""


class FluidValidity(ShockfrontError):
    """Fluid state outside validity: sigma <= 0, |v| >= cbar, or sigma range."""


class PhysicalityViolated(ShockfrontError):
    """A positivity condition on the fluid Lagrangian fails."""


class RootBracketFailure(ShockfrontError):
    """Monotone scalar solve could not bracket a root in the validity range."""


class CFLViolation(ShockfrontError):
    """Adaptive time step underflow (dt < 1e-9)."""


class SupportViolation(ShockfrontError):
    """Initial data nonzero outside the unit slab [0,1] x T."""


class InterpolationOutOfDomain(ShockfrontError):
    """Requested interpolation point lies outside the grid."""


class HierarchyUnsatisfied(ShockfrontError):
    """Measured transversal-smallness ratios exceed their declared multiples."""


class ParseError(ShockfrontError):
    """Config file could not be parsed."""


class ValidationError(ShockfrontError):
    """Config value missing or out of range; message names the key."""
