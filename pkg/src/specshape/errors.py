"""Error taxonomy shared across the toolkit."""


class NumericalError(RuntimeError):
    """A solver failed to converge or to bracket a root."""


class SearchFailure(NumericalError):
    """A grid/Newton search terminated without locating its target."""


class PropertyViolation(RuntimeError):
    """A numerically-verified mathematical property failed; flags a numerics bug."""


class PreconditionError(ValueError):
    """Inputs violate a documented precondition."""


class InvalidDomainError(ValueError):
    """A domain description is empty, self-intersecting, or otherwise unusable."""


class OutOfDomainError(ValueError):
    """A query point lies outside the meshed domain."""


class RemeshRequest(NumericalError):
    """Clipping or decomposition degenerated; the caller should refine and retry."""


class UnreliableSampling(NumericalError):
    """Sampling resolution is insufficient for a reliable integer answer."""


class RetryWithNewValue(NumericalError):
    """The chosen probe value appears non-regular; retry with a different one."""
