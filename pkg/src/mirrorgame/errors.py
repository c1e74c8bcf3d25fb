"""Exception hierarchy shared by the engine, planners and the CLI."""


class MirrorGameError(Exception):
    """Base class for all package errors."""


class ConfigError(MirrorGameError, ValueError):
    """Bad parameters: strategy specs, game sizes, adversary constants."""


class IllegalMoveError(MirrorGameError, ValueError):
    """A number outside {1, ..., 2n} or a move after the game is over."""


class BudgetExceeded(MirrorGameError, RuntimeError):
    """An exhaustive enumeration would exceed its node budget."""


class InvariantViolation(MirrorGameError, AssertionError):
    """An internal invariant that the strategy relies on was broken."""
