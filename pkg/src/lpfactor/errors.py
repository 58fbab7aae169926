"""Exception types raised by the factorization laboratory."""


class LabError(Exception):
    """Base class for engine failures (CLI exit code 2)."""


class RankDeficient(LabError):
    pass


class PivotInstability(LabError):
    """Row reduction met a pivot too small to trust."""


class DegenerateInstance(LabError):
    pass


class DegenerateInput(LabError):
    pass


class NotFound(LabError):
    """No sampled sign vector met the requested bound."""


class Infeasible(LabError):
    pass


class AllDrawsFailed(LabError):
    pass
