"""Error types shared across the cluster manager.

Every error carries a short machine-readable ``code`` (stable, kebab-case)
and the HTTP status the API layer maps it to.
"""


class GantryError(Exception):
    http_status = 500

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


class ValidationError(GantryError):
    """Malformed input: bad sizes, bad parameter strings, broken invariants."""

    http_status = 400


class UnknownEntityError(GantryError):
    """A named node, instance, job, OS, field, ... does not exist."""

    http_status = 404


class PreconditionError(GantryError):
    """The operation is well-formed but the cluster state forbids it."""

    http_status = 409


class DaemonUnreachable(GantryError):
    """Client-side: the daemon did not answer at the configured address."""

    http_status = 503

    def __init__(self, message: str):
        super().__init__("daemon-unreachable", message)
