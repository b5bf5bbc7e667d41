"""Exception hierarchy shared by every permchan module."""


class PermchanError(Exception):
    """Base class for all errors raised by permchan."""


class ChannelError(PermchanError, ValueError):
    """A matrix failed to validate as a row-stochastic channel."""


class NegativeEntry(ChannelError):
    def __init__(self, row, col, value):
        self.row, self.col, self.value = row, col, value
        super().__init__(f"negative entry {value!r} at row {row}, column {col}")


class RowSumMismatch(ChannelError):
    def __init__(self, row, deviation):
        self.row, self.deviation = row, deviation
        super().__init__(f"row {row} sums to 1{deviation:+.3g}")


class DegenerateShape(ChannelError):
    pass


class ParameterOutOfRange(PermchanError, ValueError):
    pass


class AlphabetMismatch(PermchanError, ValueError):
    pass


class SingularChannel(PermchanError, ValueError):
    pass


class NotStrictlyPositive(PermchanError, ValueError):
    pass


class MinorizationViolated(PermchanError, ValueError):
    def __init__(self, x, z, deficit):
        self.x, self.z, self.deficit = x, z, deficit
        super().__init__(
            f"P(z={z}|x={x}) falls short of eta*Q(z) by {deficit:.3g}")


class SolverFailure(PermchanError, RuntimeError):
    """The LP solver stopped for a reason other than (in)feasibility."""


class RankDeficientSubset(PermchanError, RuntimeError):
    pass


class ConfigMismatch(PermchanError, ValueError):
    pass


class MessageCountOverflow(PermchanError, OverflowError):
    pass


class NotPermutationMatrix(PermchanError, ValueError):
    pass


class InstanceTooLarge(PermchanError, ValueError):
    pass


class SchemeChannelMismatch(PermchanError, ValueError):
    pass


class LikelihoodDegenerate(UserWarning):
    """Every candidate message assigns zero probability to the observation."""
