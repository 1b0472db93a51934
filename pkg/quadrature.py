"""
Double-exponential (tanh-sinh) quadrature on a finite interval.

Integrands are evaluated in gap coordinates: they receive the distances of each
node from the left and from the right endpoint, computed without cancellation,
so endpoint singularities like d**-0.5 can be factored out exactly by the caller.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from config import config
from errors import QuadratureFailure
from logger import FieldLogger

logger = FieldLogger.get_logger("quadrature")

_PI_OVER_2 = np.pi / 2.0

# beyond |t| = 4.5 the weights are below 1e-55
T_MAX = 4.5
MIN_LEVEL = 3

GapIntegrand = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    level: int
    evaluations: int


def _nodes(t: np.ndarray, length: float):
    """Gap distances and dx/dt for the abscissae t"""
    v = _PI_OVER_2 * np.sinh(t)
    cosh_v = np.cosh(v)
    # 1 + tanh(v) = e^v / cosh(v), 1 - tanh(v) = e^-v / cosh(v)
    d_left = 0.5 * length * np.exp(v) / cosh_v
    d_right = 0.5 * length * np.exp(-v) / cosh_v
    jacobian = 0.5 * length * _PI_OVER_2 * np.cosh(t) / cosh_v ** 2
    return d_left, d_right, jacobian


def _weighted_sum(integrand: GapIntegrand, t: np.ndarray, length: float) -> float:
    d_left, d_right, jacobian = _nodes(t, length)
    values = np.asarray(integrand(d_left, d_right), dtype=float)
    return float(np.sum(jacobian * values))


def tanh_sinh(
    integrand: GapIntegrand,
    length: float,
    tol: Optional[float] = None,
    max_level: Optional[int] = None,
    relative: bool = False,
) -> QuadratureResult:
    """
    Integrate ``integrand(d_left, d_right)`` over an interval of ``length``.

    The step in t starts at 1 and halves per level; only the new odd nodes are
    evaluated at each level. The error estimate is the difference between the
    last two levels and must fall below ``tol``, or below ``tol * max(1, |I|)``
    when ``relative`` is set.

    Raises:
        QuadratureFailure: bound not met by ``max_level`` or non-finite values
    """
    tol = config.QUAD_TOL if tol is None else tol
    max_level = config.QUAD_MAX_LEVEL if max_level is None else max_level

    if length == 0.0:
        return QuadratureResult(0.0, 0.0, 0, 0)
    if length < 0.0:
        raise QuadratureFailure(f"interval length must be non-negative, got {length!r}")

    step = 1.0
    count = int(T_MAX / step)
    t = np.arange(-count, count + 1) * step
    estimate = step * _weighted_sum(integrand, t, length)
    evaluations = t.size
    error = np.inf

    for level in range(1, max_level + 1):
        step *= 0.5
        odd = np.arange(1, 2 * int(T_MAX / step) + 2, 2)
        odd = odd[odd * step <= T_MAX]
        t = np.concatenate((-odd[::-1], odd)) * step

        previous = estimate
        estimate = 0.5 * previous + step * _weighted_sum(integrand, t, length)
        evaluations += t.size
        error = abs(estimate - previous)

        if not np.isfinite(estimate):
            raise QuadratureFailure(f"non-finite quadrature value at level {level}", level=level)

        bound = tol * max(1.0, abs(estimate)) if relative else tol
        if level >= MIN_LEVEL and error <= bound:
            logger.debug(f"tanh-sinh converged: level={level} evaluations={evaluations} error={error:.2e}")
            return QuadratureResult(estimate, error, level, evaluations)

    raise QuadratureFailure(
        f"tanh-sinh error {error:.3e} above {tol:.1e} after {max_level} levels",
        error=error,
        level=max_level,
    )


def integrate(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, **kwargs) -> QuadratureResult:
    """Ordinary integral of f over [a, b] (b >= a)"""
    return tanh_sinh(lambda d_left, d_right: f(a + d_left), b - a, **kwargs)
