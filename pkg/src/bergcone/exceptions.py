"""Exception types raised across the package."""


class DimensionError(ValueError):
    """A point does not have the ambient dimension of its cone."""


class NotInConeError(ValueError):
    """A point that must lie in the open cone does not."""


class DivergentIntegralError(ArithmeticError):
    """An integral required to be finite diverges for the given exponents."""


class QuadratureError(ArithmeticError):
    """Quadrature failed to reach the requested accuracy."""


class PreconditionError(ValueError):
    """Parameters fall outside the hypotheses an operation requires."""


class InfeasibleCertificateError(RuntimeError):
    """No witness satisfies the test-function constraints."""


class CertificateError(ArithmeticError):
    """A certificate failed numerical verification."""
