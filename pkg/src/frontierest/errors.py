"""Exception hierarchy for frontierest."""


class FrontierestError(Exception):
    """Base class for every error raised by this package."""


class InvalidDimensionError(FrontierestError, ValueError):
    pass


class UnsupportedDimensionError(InvalidDimensionError):
    pass


class UndefinedDirectionError(FrontierestError, ValueError):
    pass


class InvalidIntensityError(FrontierestError, ValueError):
    pass


class OutOfRangeError(FrontierestError, ValueError):
    pass


class IntegrationError(FrontierestError, RuntimeError):
    pass


class FrontierEvaluationError(FrontierestError, ValueError):
    pass


class OutOfDomainError(FrontierestError, ValueError):
    pass


class InvalidPartitionError(FrontierestError, ValueError):
    pass


class DegenerateWeightsError(FrontierestError, ValueError):
    pass


class DegenerateEstimateError(FrontierestError, ValueError):
    pass


class UndefinedIntervalError(FrontierestError, ValueError):
    pass


class EmptyCellError(FrontierestError):
    """Some partition cells contain no sample point.

    The global intensity estimator divides by every cell count, so the
    estimate is undefined; lowering ``k_n`` usually fixes it.
    """

    def __init__(self, n_empty, k_n):
        self.n_empty = int(n_empty)
        self.k_n = int(k_n)
        super().__init__(
            f"{self.n_empty} of {self.k_n} cells are empty; try a smaller k_n"
        )
