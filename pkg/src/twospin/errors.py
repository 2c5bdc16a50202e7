"""Exception hierarchy for the twospin package."""


class TwoSpinError(Exception):
    """Base class for all errors raised by this package."""


class NonHermitianInput(TwoSpinError):
    """A matrix that must be Hermitian exceeds the Hermiticity tolerance."""


class OutOfRange(TwoSpinError):
    """A sampled profile was evaluated outside its knot span."""


class NoClosedForm(TwoSpinError):
    """No closed-form propagator exists for the requested configuration."""


class NoConvergence(TwoSpinError):
    """The step-halving integrator hit its minimum step before converging."""


class DegenerateDenominator(TwoSpinError):
    """A closed-form denominator vanished; callers normally fall back."""


class ZeroDriveFrequency(TwoSpinError):
    """A rotating-field construction requires a nonzero drive frequency."""


class NotAnEigenpair(TwoSpinError):
    """The supplied (lambda, C) pair does not annihilate the stationary matrix."""


class ClosedFormMismatch(TwoSpinError):
    """Two algebraically equivalent closed forms disagreed numerically."""


class SchemaError(TwoSpinError):
    """A problem file failed schema validation."""
