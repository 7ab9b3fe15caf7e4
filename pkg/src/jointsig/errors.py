"""Exception hierarchy for jointsig."""


class JointSigError(Exception):
    """Base class for all library errors."""


class ModelError(JointSigError, ValueError):
    """Invalid structure, model or model file."""


class UnassignedComponent(ModelError, KeyError):
    def __init__(self, name):
        super().__init__(f"component {name!r} has no state assigned")
        self.name = name

    def __str__(self):
        return self.args[0]


class CoherenceError(ModelError):
    pass


class NonMonotone(CoherenceError):
    def __init__(self, lower, upper):
        self.lower = frozenset(lower)
        self.upper = frozenset(upper)
        super().__init__(
            "structure is not monotone: functions with "
            f"{sorted(self.lower)} but fails with {sorted(self.upper)}"
        )


class BoundaryViolation(CoherenceError):
    pass


class UnknownComponent(ModelError):
    pass


class UnknownType(ModelError):
    pass


class UnknownSystem(ModelError):
    pass


class DuplicateSystemName(ModelError):
    pass


class WrongArity(ModelError):
    pass


class TooLarge(JointSigError):
    pass


class InfeasibleLevels(JointSigError, ValueError):
    pass


class InfeasibleQuery(InfeasibleLevels):
    pass


class LevelOutOfRange(JointSigError, ValueError):
    pass


class NegativeTime(JointSigError, ValueError):
    pass


class InvalidDistribution(ModelError):
    pass


class ConditioningOnNullEvent(JointSigError, ZeroDivisionError):
    pass


class InvalidTimeOrder(JointSigError, ValueError):
    pass
