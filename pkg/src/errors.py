from typing import Any, Dict

import numpy as np


def jsonable(value: Any) -> Any:
    """
    Plain JSON types; non-finite floats become null
    """

    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        value = value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value


class WeakKamError(Exception):
    """
    Root of every error raised by the toolkit
    """

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.context = context

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": type(self).__name__,
            "message": str(self),
            "context": jsonable(self.context),
        }


class EvaluationError(WeakKamError):
    def __init__(self, x: Any, p: Any):
        super().__init__(f"non-finite Hamiltonian value at x={x}, p={p}", x=x, p=p)


class DomainError(WeakKamError):
    pass


class CoercivityError(WeakKamError):
    def __init__(self, x: Any, bound: float):
        super().__init__(f"search bound {bound} too small at x={x}", x=x, bound=bound)


class EmptySublevel(WeakKamError):
    def __init__(self, x: float, a: float, min_value: float):
        super().__init__(f"empty sublevel at x={x}: level {a} < min {min_value}",
                         x=x, a=a, min_value=min_value)
        self.x = x
        self.a = a
        self.min_value = min_value


class UnboundedSearch(WeakKamError):
    pass


class ClassificationError(WeakKamError):
    def __init__(self, message: str, constants: Dict[str, float]):
        super().__init__(message, constants=constants)
        self.constants = constants


class CaseError(WeakKamError):
    pass


class InternalError(WeakKamError):
    pass


class ConfigError(WeakKamError):
    pass


class ConvergenceError(WeakKamError):
    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message, residual=residual, iterations=iterations)
        self.residual = residual
        self.iterations = iterations


class EnvelopeError(WeakKamError):
    pass


class ConditionUUnverifiable(UserWarning):
    """
    u0_H was emitted from the inf-formula without a sufficient condition for (U)
    """


class TruncationWarning(UserWarning):
    """
    An optimal curve hit the domain boundary before the discount mass was exhausted
    """
