"""
Stationary points of a discretized radial action.

phi is piecewise linear on the grid r_0 < ... < r_N. On element e the slope
s_e = (phi_{e+1} - phi_e) / h_e is constant, and the element action is the
trapezoid rule of w(r) L(r, phi, s_e) over its two end nodes. The discrete
Euler-Lagrange system (gradient of the action in the interior node values)
is tridiagonal; damped Newton with scipy's banded solver finds its root.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.linalg import solve_banded

from config import config
from errors import DomainError, DomainViolationError, NoConvergenceError
from logger import FieldLogger

logger = FieldLogger.get_logger("variational_solver")


def radial_weight(r: np.ndarray) -> np.ndarray:
    """r^2 volume factor of spherical symmetry"""
    return r * r


class LagrangianDensity:
    """
    L(r, phi, dphi) with partial derivatives, evaluated elementwise on arrays.

    Subclasses that ignore phi only override the dphi derivatives.
    """

    def value(self, r, phi, dphi):
        raise NotImplementedError

    def d_phi(self, r, phi, dphi):
        return np.zeros_like(dphi)

    def d_dphi(self, r, phi, dphi):
        raise NotImplementedError

    def d_phi_phi(self, r, phi, dphi):
        return np.zeros_like(dphi)

    def d_phi_dphi(self, r, phi, dphi):
        return np.zeros_like(dphi)

    def d_dphi_dphi(self, r, phi, dphi):
        raise NotImplementedError

    def in_domain(self, dphi) -> np.ndarray:
        return np.isfinite(dphi)


class QuadraticDensity(LagrangianDensity):
    """L = dphi^2 / 2, the linear radial problem"""

    def value(self, r, phi, dphi):
        return 0.5 * dphi * dphi

    def d_dphi(self, r, phi, dphi):
        return dphi

    def d_dphi_dphi(self, r, phi, dphi):
        return np.ones_like(dphi)

    def __repr__(self) -> str:
        return "QuadraticDensity()"


class StrictRadialDensity(LagrangianDensity):
    """L = sqrt(1 - sign * dphi^2), the square-root Lagrangian of a static radial field"""

    def __init__(self, sign: int):
        if sign not in (1, -1):
            raise DomainError(f"sign must be +1 or -1, got {sign!r}")
        self.sign = sign

    def _radicand(self, dphi):
        return 1.0 - self.sign * dphi * dphi

    def value(self, r, phi, dphi):
        return np.sqrt(self._radicand(dphi))

    def d_dphi(self, r, phi, dphi):
        return -self.sign * dphi / np.sqrt(self._radicand(dphi))

    def d_dphi_dphi(self, r, phi, dphi):
        return -self.sign / self._radicand(dphi) ** 1.5

    def in_domain(self, dphi) -> np.ndarray:
        return np.isfinite(dphi) & (self._radicand(dphi) > 0.0)

    def __repr__(self) -> str:
        return f"StrictRadialDensity(sign={self.sign})"


@dataclass(frozen=True)
class ActionProblem:
    """Grid, density, Dirichlet boundary values and the measure factor"""

    grid: np.ndarray
    density: LagrangianDensity
    left: float
    right: float
    weight: Callable[[np.ndarray], np.ndarray] = field(default=radial_weight)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        object.__setattr__(self, "grid", grid)
        if grid.ndim != 1 or grid.size < 3:
            raise DomainError(f"an action problem needs at least 3 nodes, got shape {grid.shape}")
        if np.any(np.diff(grid) <= 0.0):
            raise DomainError("grid nodes must be strictly increasing")
        if not (math.isfinite(self.left) and math.isfinite(self.right)):
            raise DomainError("boundary values must be finite")

    @property
    def nodes(self) -> int:
        return self.grid.size

    def initial_guess(self) -> np.ndarray:
        """Linear interpolation of the boundary values"""
        r = self.grid
        return self.left + (self.right - self.left) * (r - r[0]) / (r[-1] - r[0])

    def with_boundary(self, phi: np.ndarray) -> np.ndarray:
        phi = np.array(phi, dtype=float)
        if phi.shape != self.grid.shape:
            raise DomainError(f"node values must have shape {self.grid.shape}, got {phi.shape}")
        phi[0], phi[-1] = self.left, self.right
        return phi


def _elements(p: ActionProblem, phi: np.ndarray):
    r = p.grid
    h = np.diff(r)
    slope = np.diff(phi) / h
    a = 0.5 * h * p.weight(r[:-1])
    b = 0.5 * h * p.weight(r[1:])
    return r, h, slope, a, b


def _check_domain(p: ActionProblem, slope: np.ndarray):
    ok = p.density.in_domain(slope)
    if not np.all(ok):
        e = int(np.argmin(ok))
        raise DomainViolationError(
            f"slope {slope[e]!r} on element [{p.grid[e]!r}, {p.grid[e + 1]!r}] leaves the density's domain",
            element=e,
            slope=float(slope[e]),
        )


def discrete_action(p: ActionProblem, phi: np.ndarray) -> float:
    """Sum over elements of the trapezoid rule of w L"""
    phi = np.asarray(phi, dtype=float)
    if phi.shape != p.grid.shape:
        raise DomainError(f"node values must have shape {p.grid.shape}, got {phi.shape}")
    r, _, slope, a, b = _elements(p, phi)
    _check_domain(p, slope)
    L = p.density
    return float(np.sum(a * L.value(r[:-1], phi[:-1], slope) + b * L.value(r[1:], phi[1:], slope)))


def action_gradient(p: ActionProblem, phi: np.ndarray) -> np.ndarray:
    """dS/dphi_i at every node (boundary entries included)"""
    phi = np.asarray(phi, dtype=float)
    r, h, slope, a, b = _elements(p, phi)
    _check_domain(p, slope)
    L = p.density
    left_nodes, right_nodes = (r[:-1], phi[:-1]), (r[1:], phi[1:])

    flux = (a * L.d_dphi(*left_nodes, slope) + b * L.d_dphi(*right_nodes, slope)) / h
    grad = np.zeros_like(phi)
    grad[:-1] += a * L.d_phi(*left_nodes, slope) - flux
    grad[1:] += b * L.d_phi(*right_nodes, slope) + flux
    return grad


def action_hessian_bands(p: ActionProblem, phi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Diagonal and off-diagonal of the tridiagonal Hessian of the action"""
    phi = np.asarray(phi, dtype=float)
    r, h, slope, a, b = _elements(p, phi)
    L = p.density
    left_nodes, right_nodes = (r[:-1], phi[:-1]), (r[1:], phi[1:])

    stiffness = (a * L.d_dphi_dphi(*left_nodes, slope) + b * L.d_dphi_dphi(*right_nodes, slope)) / h ** 2
    mixed_left = a * L.d_phi_dphi(*left_nodes, slope) / h
    mixed_right = b * L.d_phi_dphi(*right_nodes, slope) / h

    diag = np.zeros_like(phi)
    diag[:-1] += a * L.d_phi_phi(*left_nodes, slope) - 2.0 * mixed_left + stiffness
    diag[1:] += b * L.d_phi_phi(*right_nodes, slope) + 2.0 * mixed_right + stiffness
    off = mixed_left - mixed_right - stiffness
    return diag, off


def flux_profile(p: ActionProblem, phi: np.ndarray) -> np.ndarray:
    """Discrete first integral per element; constant across the grid at a stationary point"""
    phi = np.asarray(phi, dtype=float)
    r, h, slope, a, b = _elements(p, phi)
    _check_domain(p, slope)
    L = p.density
    return (a * L.d_dphi(r[:-1], phi[:-1], slope) + b * L.d_dphi(r[1:], phi[1:], slope)) / h


def _merit(p: ActionProblem, phi: np.ndarray) -> float:
    return float(np.max(np.abs(action_gradient(p, phi)[1:-1])))


def solve_stationary(
    p: ActionProblem,
    init: Optional[np.ndarray] = None,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    max_halvings: Optional[int] = None,
) -> np.ndarray:
    """
    Node values at which the interior action gradient vanishes.

    Damped Newton on the interior nodes: each step is halved until the
    iterate stays in the density's domain and the gradient max-norm drops.
    Raises DomainViolationError when the start or every trial step leaves
    the domain, NoConvergenceError when the budget runs out.
    """
    tol = config.NEWTON_TOL if tol is None else tol
    max_iter = config.NEWTON_MAX_ITER if max_iter is None else max_iter
    max_halvings = config.NEWTON_MAX_HALVINGS if max_halvings is None else max_halvings

    phi = p.with_boundary(p.initial_guess() if init is None else init)
    merit = _merit(p, phi)

    for iteration in range(max_iter + 1):
        if merit <= tol:
            logger.debug(f"stationary point after {iteration} Newton steps (|grad| = {merit:.3e})")
            return phi
        if iteration == max_iter:
            break

        grad = action_gradient(p, phi)[1:-1]
        diag, off = action_hessian_bands(p, phi)
        bands = np.zeros((3, grad.size))
        bands[0, 1:] = off[1:-1]
        bands[1] = diag[1:-1]
        bands[2, :-1] = off[1:-1]
        step = solve_banded((1, 1), bands, -grad)

        scale = 1.0
        left_domain = True
        for _ in range(max_halvings + 1):
            trial = phi.copy()
            trial[1:-1] += scale * step
            if np.all(p.density.in_domain(np.diff(trial) / np.diff(p.grid))):
                left_domain = False
                trial_merit = _merit(p, trial)
                if trial_merit < merit:
                    phi, merit = trial, trial_merit
                    break
            scale *= 0.5
        else:
            if left_domain:
                raise DomainViolationError(
                    f"every damped Newton step left the density's domain at iteration {iteration}",
                    iteration=iteration,
                )
            raise NoConvergenceError(
                f"line search stalled at |grad| = {merit:.3e} (iteration {iteration})",
                iteration=iteration,
                gradient_norm=merit,
            )

    raise NoConvergenceError(
        f"no stationary point within {max_iter} Newton steps (|grad| = {merit:.3e})",
        iteration=max_iter,
        gradient_norm=merit,
    )


def gradient_check(p: ActionProblem, phi: np.ndarray, step: float = 1e-6) -> float:
    """Max difference between the analytic gradient and central differences of the action, over max(|grad|, 1)"""
    phi = np.asarray(phi, dtype=float)
    analytic = action_gradient(p, phi)
    numeric = np.empty_like(phi)
    for i in range(phi.size):
        shift = np.zeros_like(phi)
        shift[i] = step
        numeric[i] = (discrete_action(p, phi + shift) - discrete_action(p, phi - shift)) / (2.0 * step)
    return float(np.max(np.abs(analytic - numeric)) / max(np.max(np.abs(analytic)), 1.0))


def discrete_energy(p: ActionProblem, phi: np.ndarray) -> float:
    """Static energy -4 pi S: T00 = -L for a time-independent field"""
    return -4.0 * math.pi * discrete_action(p, phi)
