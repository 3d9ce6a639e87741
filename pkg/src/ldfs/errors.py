"""Error taxonomy shared across the toolkit.

The CLI maps each category to a distinct exit code, so everything raised out
of library code should be one of these (or a subclass).
"""


class LdfsError(Exception):
    """Base class for all toolkit errors."""

    category = "error"


class InputError(LdfsError):
    """Malformed or inconsistent input data (files, records, keys)."""

    category = "input"


class ConfigError(LdfsError):
    """Invalid parameter or configuration value."""

    category = "config"


class BackendError(LdfsError):
    """An embedding or scoring backend failed."""

    category = "backend"


class TransportError(BackendError):
    """Could not reach a remote backend (connection refused, timeout, ...)."""


class ProtocolError(BackendError):
    """A remote backend answered, but not with a valid protocol response."""
