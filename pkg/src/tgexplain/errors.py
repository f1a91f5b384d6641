"""Exception types shared across the package."""


class TgExplainError(Exception):
    """Base class for package errors."""


class DataError(TgExplainError):
    """Malformed or inconsistent input data (bad rows, unknown ids, ...)."""


class OracleError(TgExplainError):
    """The black-box model failed to produce a usable prediction."""


class BridgeError(OracleError):
    """Wire-protocol failure while talking to an out-of-process model."""
