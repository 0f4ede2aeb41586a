"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument violates a documented precondition."""


class ParseError(Exception):
    """A scenario file is missing or malformed; the message carries file/line."""


class ConsistencyError(Exception):
    """Scenario files disagree about the instance set."""


class EmptyScenarioError(Exception):
    """A filtering step removed every instance."""


class UndefinedMetric(Exception):
    """A rank-correlation metric has no defined value (e.g. all-tied ranking)."""


class ModelFormatError(Exception):
    """A saved model file has an unknown format or version."""
