"""Exception types shared across the pipeline."""


class NuggetError(Exception):
    """Base class for all errors raised by this package."""


class MalformedIR(NuggetError):
    """Input IR violates the supported textual subset."""


class UnknownBlock(NuggetError):
    """A bb_id does not exist in the module's block table."""


class BadMagic(NuggetError):
    """Profile file does not start with the expected magic."""


class CorruptRecord(NuggetError):
    """A profile record violates an invariant."""

    def __init__(self, interval_id, reason):
        super().__init__(f"interval {interval_id}: {reason}")
        self.interval_id = interval_id
        self.reason = reason


class BlockTableMismatch(NuggetError):
    """Profile references blocks outside the supplied block table."""


class IndexOutOfRange(NuggetError):
    """Interval index is outside the profile set."""


class EmptyPool(NuggetError):
    """No candidate intervals to select from."""


class NTooLarge(NuggetError):
    """Requested sample count is outside [1, pool size]."""


class KOutOfRange(NuggetError):
    """Requested cluster count is outside [1, number of points]."""


class SingleCluster(NuggetError):
    """Silhouette is undefined for fewer than two clusters."""


class ToolchainFailure(NuggetError):
    """An external toolchain command is missing or exited nonzero."""


class NonZeroExit(NuggetError):
    """A timed workload exited with a nonzero status."""


class MissingRoi(NuggetError):
    """A chosen interval has no usable ROI measurement."""


class ZeroTruth(NuggetError):
    """Prediction error is undefined for a zero ground truth."""


class WorkloadMismatch(NuggetError):
    """Speedup comparison requires reports for the same workload and selection."""
