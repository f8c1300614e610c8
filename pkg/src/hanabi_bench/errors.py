"""Exception hierarchy shared across the package."""


class HanabiError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(HanabiError):
    """Invalid game configuration, unknown agent name, or bad policy file."""


class GameStateError(HanabiError):
    """An operation was used on a state it does not apply to."""


class IllegalMoveError(HanabiError):
    """A move failed legality validation; the state is unchanged."""


class ConsistencyError(HanabiError):
    """Internal bookkeeping produced an impossible belief state."""


class PolicyError(HanabiError):
    """A policy failed to produce a move for a non-terminal observation."""


class ProtocolError(HanabiError):
    """A bridge session violated the wire protocol."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
