"""Exception types shared across the package."""


class HeleShawError(Exception):
    """Base class for all errors raised by this package."""


class InvalidLawError(HeleShawError):
    """A constitutive law violates its structural hypotheses."""


class ConfigError(HeleShawError):
    """A configuration file or experiment spec failed validation."""


class MeshError(HeleShawError):
    """Mesh/field mismatch or an unsupported mesh operation."""


class BlowUpError(HeleShawError):
    """A time step produced non-finite values."""

    def __init__(self, field_name, t):
        self.field_name = field_name
        self.t = t
        super().__init__(f"non-finite values in field '{field_name}' at t={t:.6g}")


class SolverError(HeleShawError):
    """An iterative solver (shooting/bisection) failed to converge."""


class CheckFailure(HeleShawError):
    """A --check validation did not meet its tolerance."""
