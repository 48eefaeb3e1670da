"""Exception hierarchy shared by all orderflow modules."""


class OrderflowError(Exception):
    """Base class for every error raised by this package."""


class CapExceededError(OrderflowError, ValueError):
    """A size cap (enumeration, network or path count) would be exceeded."""

    def __init__(self, what, value, cap):
        self.what = what
        self.value = value
        self.cap = cap
        super().__init__(f"{what}: {value} exceeds the configured cap {cap}")


class NotAnOrderError(OrderflowError, ValueError):
    """The relation is not an order of the requested kind."""


class InternalVerificationError(OrderflowError, RuntimeError):
    """A constructed object failed its own post-condition check."""


class InvalidPathError(OrderflowError, ValueError):
    """A sequence of arcs is not a source-sink path of the network."""


class ArcNotInNetworkError(OrderflowError, KeyError):
    """The requested arc does not belong to the network."""


class DimensionMismatchError(OrderflowError, ValueError):
    """A vector does not have the length its network or pair space requires."""


class NonFiniteObjectiveError(OrderflowError, FloatingPointError):
    """Objective value or gradient became NaN or infinite at a guarded point."""


class IncompatibleDataError(OrderflowError, ValueError):
    """Choice data that the requested model cannot produce."""


class DegeneratePriorError(OrderflowError, ZeroDivisionError):
    """No prior sample fell inside the model, so the Bayes factor is undefined."""

    def __init__(self, prior_hits, posterior_hits, sample_count):
        self.prior_hits = prior_hits
        self.posterior_hits = posterior_hits
        self.sample_count = sample_count
        super().__init__(
            f"prior proportion is 0/{sample_count}; posterior proportion is "
            f"{posterior_hits}/{sample_count}; the ratio is undefined"
        )
