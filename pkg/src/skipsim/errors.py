"""Exception and warning types shared across the package."""


class SkipsimError(Exception):
    """Base class for all skipsim errors."""


class EmptyTaskSetError(SkipsimError):
    """A task set must contain at least one task."""


class InvalidWcetError(SkipsimError):
    """Worst-case execution time must satisfy 0 < wcet <= period."""


class InvalidSkipFactorError(SkipsimError):
    """Skip factor must be an integer >= 2, or infinity for no skips."""


class ConfigError(SkipsimError):
    """Invalid generator or experiment configuration."""


class UnknownLevelError(SkipsimError):
    """Speed level is not one of the configured processor levels."""


class InfeasibleNominalSpeedError(SkipsimError):
    """No configured speed level can guarantee the mandatory workload."""


class InfeasibleRedLoadError(SkipsimError):
    """Some red job cannot meet its deadline even when run as late as possible."""


class StaleEdlError(SkipsimError):
    """A latest-start schedule was consulted after a missed recompute trigger."""


class MalformedTraceError(SkipsimError):
    """Trace slices do not tile the horizon, or outcome records are inconsistent."""


class ZeroBaselineError(SkipsimError):
    """Energy normalization against a zero-energy baseline."""


class HyperperiodAlignmentWarning(UserWarning):
    """Simulation horizon is not a multiple of the hyperperiod; skip patterns may not close."""
