"""Exception types raised by wdsub."""


class WdsubError(ValueError):
    """Base class for all wdsub errors."""


class InvalidLengthError(WdsubError):
    pass


class InvalidParameterError(WdsubError):
    pass


class InvalidBlockError(WdsubError):
    pass


class InvalidBandwidthError(WdsubError):
    pass


class InvalidProbabilityError(WdsubError):
    pass


class QuantileOutOfRangeError(WdsubError):
    """The requested level is never reached by the curve on its grid."""


class DegenerateScaleError(WdsubError):
    """The two pinning quantiles coincide, so no finite scale exists."""


class ExperimentFailedError(RuntimeError):
    """Too many Monte Carlo replications failed."""

    def __init__(self, failed, total, failures=()):
        self.failed = failed
        self.total = total
        self.failures = list(failures)
        super().__init__(f"{failed} of {total} replications failed (limit 1%)")
