"""Exception hierarchy shared by every module."""


class MaxMinError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInstanceError(MaxMinError, ValueError):
    pass


class DegenerateInstanceError(MaxMinError, ValueError):
    """The optimal subtree is not unique, so gaps are not all positive."""


class InvalidParameterError(MaxMinError, ValueError):
    pass


class InvalidBudgetError(MaxMinError, ValueError):
    pass


class BudgetExceededError(MaxMinError, RuntimeError):
    pass


class UnavailableMeanError(MaxMinError, ValueError):
    pass


class InconsistencyError(MaxMinError, ValueError):
    pass


class InsufficientDataError(MaxMinError, ValueError):
    pass


class ConfigError(MaxMinError, ValueError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
