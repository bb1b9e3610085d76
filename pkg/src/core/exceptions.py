"""Error types raised by glstool.

Numerical preconditions raise ``DomainError`` (a ``ValueError``), so callers
that only care about bad input can keep catching ``ValueError``.
"""


class GLSToolError(Exception):
    """Base class for every error raised by this package."""


class DomainError(GLSToolError, ValueError):
    """An argument lies outside the domain of the operation."""


class BracketError(DomainError):
    """The root-finding bracket does not contain a sign change."""


class SingularMatrixError(DomainError):
    """A dilation matrix is singular; V_A is only defined for det(A) != 0."""


class ConstructionError(GLSToolError):
    """A composite object (e.g. the piecewise psi-tilde) could not be built."""


class RelationUndefinedError(GLSToolError):
    """The order psi1 << psi2 is undefined because psi2 stays bounded."""


class UnsupportedConfigurationError(GLSToolError):
    """The requested norm has no backend able to evaluate it."""


class ConfigError(GLSToolError, ValueError):
    """Invalid configuration value or experiment file."""


class ReportWriteError(GLSToolError):
    """A report file could not be written."""


class IntegrationError(GLSToolError):
    """An adaptive integral did not reach its tolerance within the subdivision limit."""
