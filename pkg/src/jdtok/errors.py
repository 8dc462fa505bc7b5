"""Exception types shared across the package.

The CLI maps these onto distinct exit codes (see ``jdtok.cli``), so library
code should pick the subclass that matches the failure, not bare ValueError:
configuration problems, malformed containers, and semantically invalid data
are different failures to a caller scripting the tool.
"""


class ConfigError(ValueError):
    """A configuration value or file is invalid."""


class FormatError(ValueError):
    """A binary container (feature or token file) is structurally malformed."""


class ValidationError(ValueError):
    """Structurally valid data violates a semantic constraint."""
