"""Exception hierarchy shared by the scheduling and analysis modules."""


class DynCCError(Exception):
    """Base class for all errors raised by dyncc."""


class ParameterError(DynCCError, ValueError):
    """Invalid system parameters or operation arguments."""


class SnapshotError(DynCCError, ValueError):
    """Inconsistent user/profile bookkeeping (duplicate join, absent leave)."""


class UnsupportedRegimeError(DynCCError):
    """The requested schedule cannot be generated for these parameters."""


class InfeasibleAssignmentError(DynCCError):
    """No decodable packet assignment exists for the virtual index sets."""


class SuppressionBudgetError(DynCCError):
    """A stream needs nulling at more than alpha - 1 users."""


class NoFeasibleDistributionError(DynCCError):
    """No profile-length vector matches the requested spread."""
