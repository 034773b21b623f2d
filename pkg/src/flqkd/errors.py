"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input violates a documented precondition or parameter invariant."""


class InvalidAlphabetError(DomainError):
    """Constellation alphabet size K is below 2."""


class NoCorrelationError(DomainError):
    """Alice's reference arm shows no excess coincidences; the intrusion
    estimator is undefined for these counts."""


class GridRangeError(DomainError):
    """A tabulated-bound query falls outside the grid hull (no extrapolation)."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance.

    Carries the achieved row-sum defect in ``achieved``.
    """

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved tolerance {achieved:.3e})")
        self.achieved = achieved


class SweepPointError(RuntimeError):
    """A sweep point failed; tags the offending (L, K) pair."""

    def __init__(self, L: float, K: int, cause: Exception):
        super().__init__(f"sweep point (L={L:g} km, K={K}) failed: {cause}")
        self.L = L
        self.K = K
        self.cause = cause
