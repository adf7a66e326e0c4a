"""Exception hierarchy.

Every error raised by the library derives from :class:`NewcombBellError`,
which is itself a :class:`ValueError` so callers validating input can catch
either.
"""


class NewcombBellError(ValueError):
    pass


class DegenerateDistribution(NewcombBellError):
    pass


class InvalidMass(NewcombBellError):
    pass


class SupportMismatch(NewcombBellError):
    pass


class MissingValue(NewcombBellError, KeyError):
    pass


class UnknownAction(NewcombBellError, KeyError):
    pass


class UnknownOutcome(NewcombBellError, KeyError):
    pass


class NoHypotheses(NewcombBellError):
    pass


class NoJointPrior(NewcombBellError):
    pass


class InvalidProbability(NewcombBellError):
    pass


class InvalidCredence(NewcombBellError):
    pass


class InvalidState(NewcombBellError):
    pass


class SettingsMismatch(NewcombBellError):
    pass


class InvalidConfig(NewcombBellError):
    pass
