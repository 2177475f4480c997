"""Exception types raised by the engine."""


class AinftyError(Exception):
    pass


class ValidationError(AinftyError, ValueError):
    """An instance (or document) violates a structural invariant."""


class InvalidSet(AinftyError, ValueError):
    """A set refers to atoms that are not part of the instance."""


class UncoveredAtom(AinftyError, ValueError):
    pass


class ZeroWeightBase(AinftyError, ValueError):
    """A condition that divides by w(B) met a basis element with w(B) = 0."""

    def __init__(self, condition, base_name):
        super().__init__(f"{condition}: w(B) = 0 on basis element {base_name!r}")
        self.condition = condition
        self.base_name = base_name


class StrategyInfeasible(AinftyError, ValueError):
    pass


class ParameterError(AinftyError, ValueError):
    pass


class ProfileError(AinftyError):
    """An evaluator failed at one level of a family profile."""

    def __init__(self, level, error):
        super().__init__(f"level n={level}: {error}")
        self.level = level
        self.error = error
