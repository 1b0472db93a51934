"""
Static spherically symmetric scalar field.

Weak solution c0 + c1/r of the linear radial equation, the strict radial
solution of the square-root Lagrangian with its singular shell, the residual
operators of the radial equations, and energy accounting. ``sign`` is the sign
under the square root: +1 gives sqrt(r^4 + c1^2), -1 gives sqrt(r^4 - c1^2)
and a field-free shell r <= sqrt(|c1|).
"""

import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from config import config
from errors import DomainError, IndefiniteMetricError, SingularShellError
from logger import FieldLogger
from quadrature import QuadratureResult, integrate, tanh_sinh

logger = FieldLogger.get_logger("scalar_field")

UPPER = 1
LOWER = -1
SIGN_NAMES = {"upper": UPPER, "lower": LOWER}

# r**4 and c1**2 overflow a double beyond these
MAX_RADIUS = sys.float_info.max ** 0.25
MAX_CHARGE = sys.float_info.max ** 0.5


@dataclass(frozen=True)
class RadialProblem:
    """Sign choice, integration constants and radial domain"""

    sign: int
    c0: float
    c1: float
    r_min: float
    r_max: float

    def __post_init__(self):
        if self.sign not in (UPPER, LOWER):
            raise DomainError(f"sign must be +1 or -1, got {self.sign!r}")
        if not all(math.isfinite(v) for v in (self.c0, self.c1, self.r_min, self.r_max)):
            raise DomainError("radial problem fields must be finite")
        if self.r_min < 0.0:
            raise DomainError(f"r_min must be non-negative, got {self.r_min!r}")
        if abs(self.c1) >= MAX_CHARGE:
            raise DomainError(f"|c1| must be below {MAX_CHARGE:.3e}, got {self.c1!r}")
        if self.r_max >= MAX_RADIUS:
            raise DomainError(f"r_max must be below {MAX_RADIUS:.3e}, got {self.r_max!r}")
        if self.r_max <= self.r_min:
            raise DomainError(f"r_max ({self.r_max!r}) must exceed r_min ({self.r_min!r})")
        if self.has_shell and self.r_min <= self.shell_radius:
            raise SingularShellError(self.r_min, self.shell_radius)

    @classmethod
    def from_sign_name(cls, name: str, c0: float, c1: float, r_min: float, r_max: float) -> "RadialProblem":
        if name not in SIGN_NAMES:
            raise DomainError(f"sign must be one of {sorted(SIGN_NAMES)}, got {name!r}")
        return cls(SIGN_NAMES[name], c0, c1, r_min, r_max)

    @property
    def shell_radius(self) -> float:
        return math.sqrt(abs(self.c1))

    @property
    def has_shell(self) -> bool:
        return self.sign == LOWER and self.c1 != 0.0


@dataclass(frozen=True)
class RadialSolution:
    """Sampled radial profile (r, phi, dphi) on a strictly increasing grid"""

    r: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    sign_convention: int
    quadrature_error_bound: float = 0.0

    def __post_init__(self):
        if not (self.r.shape == self.phi.shape == self.dphi.shape) or self.r.ndim != 1:
            raise DomainError("r, phi and dphi must be 1-d arrays of equal length")
        if self.r.size > 1 and np.any(np.diff(self.r) <= 0.0):
            raise DomainError("radial samples must be strictly increasing")

    @property
    def samples(self) -> List[Tuple[float, float, float]]:
        return list(zip(self.r.tolist(), self.phi.tolist(), self.dphi.tolist()))

    def __len__(self) -> int:
        return self.r.size


def _check_radius(p: RadialProblem, r: float):
    if not r > 0.0:
        raise DomainError(f"radius must be positive, got {r!r}")
    if not r < MAX_RADIUS:
        raise DomainError(f"radius must be finite and below {MAX_RADIUS:.3e}, got {r!r}")
    if p.has_shell and r <= p.shell_radius:
        raise SingularShellError(r, p.shell_radius)


def _radicand(p: RadialProblem, r: float) -> float:
    """r^4 + sign*c1^2; the lower sign is factored around the shell radius"""
    if p.sign == UPPER:
        return r ** 4 + p.c1 ** 2
    r0 = p.shell_radius
    return (r - r0) * (r + r0) * (r * r + r0 * r0)


def weak_radial(p: RadialProblem, r: float) -> Tuple[float, float]:
    """phi = c0 + c1/r and its derivative"""
    if not r > 0.0:
        raise DomainError(f"radius must be positive, got {r!r}")
    return p.c0 + p.c1 / r, -p.c1 / r ** 2


def strict_radial_derivative(p: RadialProblem, r: float) -> float:
    """dphi/dr = -c1 / sqrt(r^4 + sign*c1^2)"""
    _check_radius(p, r)
    if p.c1 == 0.0:
        return 0.0
    return -p.c1 / math.sqrt(_radicand(p, r))


def _strict_integral(p: RadialProblem, r: float) -> QuadratureResult:
    """c1 * integral from r to infinity of ds / sqrt(s^4 + sign*c1^2)"""
    c1 = p.c1
    c1_sq = c1 * c1

    if p.sign == UPPER:
        # s = 1/u maps [r, inf) onto (0, 1/r]
        return tanh_sinh(lambda u, _: c1 / np.sqrt(1.0 + c1_sq * u ** 4), 1.0 / r)

    r0 = p.shell_radius
    split = 2.0 * r0
    tail_start = max(r, split)
    half_tol = 0.5 * config.QUAD_TOL
    tail = tanh_sinh(lambda u, _: c1 / np.sqrt(1.0 - c1_sq * u ** 4), 1.0 / tail_start, tol=half_tol)
    if r >= split:
        return tail

    offset = r - r0

    def near(d_left, d_right):
        gap = offset + d_left
        s = r + d_left
        return c1 / np.sqrt(gap * (s + r0) * (s * s + r0 * r0))

    inner = tanh_sinh(near, split - r, tol=half_tol)
    return QuadratureResult(
        inner.value + tail.value,
        inner.error + tail.error,
        max(inner.level, tail.level),
        inner.evaluations + tail.evaluations,
    )


def strict_radial_phi_with_error(p: RadialProblem, r: float) -> Tuple[float, float]:
    """Strict field value and the quadrature error estimate"""
    _check_radius(p, r)
    if p.c1 == 0.0:
        return p.c0, 0.0
    result = _strict_integral(p, r)
    return p.c0 + result.value, result.error


def strict_radial_phi(p: RadialProblem, r: float) -> float:
    """phi = c0 + c1 * integral_r^inf ds / sqrt(s^4 + sign*c1^2)"""
    return strict_radial_phi_with_error(p, r)[0]


def shell_potential(p: RadialProblem) -> float:
    """Finite limit of the strict field at the shell r -> sqrt(|c1|)+ (lower sign)"""
    if not p.has_shell:
        raise DomainError("shell potential requires the lower sign and c1 != 0")
    c1 = p.c1
    r0 = p.shell_radius

    def near(d_left, d_right):
        s = r0 + d_left
        return c1 / np.sqrt(d_left * (s + r0) * (s * s + r0 * r0))

    half_tol = 0.5 * config.QUAD_TOL
    inner = tanh_sinh(near, r0, tol=half_tol)
    tail = tanh_sinh(lambda u, _: c1 / np.sqrt(1.0 - c1 * c1 * u ** 4), 0.5 / r0, tol=half_tol)
    return p.c0 + inner.value + tail.value


def _centered_derivative(r: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Three-point derivative on a nonuniform grid at interior nodes (exact for quadratics)"""
    h_minus = r[1:-1] - r[:-2]
    h_plus = r[2:] - r[1:-1]
    return (
        h_minus ** 2 * f[2:] - h_plus ** 2 * f[:-2] + (h_plus ** 2 - h_minus ** 2) * f[1:-1]
    ) / (h_plus * h_minus * (h_plus + h_minus))


def _max_flux_derivative(profile: RadialSolution, flux: np.ndarray) -> float:
    if len(profile) < 3:
        raise DomainError("residual needs at least 3 samples")
    return float(np.max(np.abs(_centered_derivative(profile.r, flux))))


def strict_ode_residual(p: RadialProblem, profile: RadialSolution) -> float:
    """max |d/dr[r^2 phi' / sqrt(1 - sign*phi'^2)]| over interior samples"""
    radicand = 1.0 - p.sign * profile.dphi ** 2
    bad = np.flatnonzero(radicand <= 0.0)
    if bad.size:
        i = int(bad[0])
        raise IndefiniteMetricError(
            f"1 - sign*phi'^2 = {radicand[i]!r} at r = {profile.r[i]!r}",
            location=float(profile.r[i]),
            radicand=float(radicand[i]),
        )
    flux = profile.r ** 2 * profile.dphi / np.sqrt(radicand)
    return _max_flux_derivative(profile, flux)


def weak_ode_residual(profile: RadialSolution) -> float:
    """max |d/dr[r^2 phi']| over interior samples (linear radial equation)"""
    return _max_flux_derivative(profile, profile.r ** 2 * profile.dphi)


def second_order_ode_residual(p: RadialProblem, profile: RadialSolution) -> float:
    """max |d/dr[r^2 (sign + phi'^2/2) phi']|, the radial equation of the expanded Lagrangian"""
    flux = profile.r ** 2 * (p.sign + 0.5 * profile.dphi ** 2) * profile.dphi
    return _max_flux_derivative(profile, flux)


def energy_density_t00(p: RadialProblem, r: float) -> float:
    """T00 = -r^2 / sqrt(r^4 + sign*c1^2)"""
    _check_radius(p, r)
    if p.c1 == 0.0:
        return -1.0
    return -r * r / math.sqrt(_radicand(p, r))


def partial_energy(p: RadialProblem, r_outer: float) -> float:
    """Integral of T00 * 4 pi r^2 dr from r_min to r_outer"""
    if r_outer < p.r_min:
        raise DomainError(f"r_outer ({r_outer!r}) must not be below r_min ({p.r_min!r})")
    if r_outer == p.r_min:
        return 0.0
    if p.c1 == 0.0:
        return -4.0 * math.pi / 3.0 * (r_outer ** 3 - p.r_min ** 3)

    c1_sq = p.c1 ** 2
    if p.sign == UPPER:
        result = integrate(
            lambda r: -4.0 * np.pi * r ** 4 / np.sqrt(r ** 4 + c1_sq), p.r_min, r_outer, relative=True
        )
    else:
        r0 = p.shell_radius
        offset = p.r_min - r0

        def density(d_left, d_right):
            r = p.r_min + d_left
            return -4.0 * np.pi * r ** 4 / np.sqrt((offset + d_left) * (r + r0) * (r * r + r0 * r0))

        result = tanh_sinh(density, r_outer - p.r_min, relative=True)
    return result.value


def radial_grid(r_min: float, r_max: float, nodes: int, geometric: bool = True) -> np.ndarray:
    """Strictly increasing grid with exact endpoints; log-spaced by default"""
    if nodes < 2:
        raise DomainError(f"a radial grid needs at least 2 nodes, got {nodes}")
    if not r_max > r_min:
        raise DomainError(f"r_max ({r_max!r}) must exceed r_min ({r_min!r})")
    if geometric:
        if r_min <= 0.0:
            raise DomainError("geometric grids need r_min > 0")
        grid = np.geomspace(r_min, r_max, nodes)
    else:
        grid = np.linspace(r_min, r_max, nodes)
    grid[0], grid[-1] = r_min, r_max
    return grid


def _strict_chunk(p: RadialProblem, chunk: np.ndarray):
    rows = [strict_radial_phi_with_error(p, float(r)) for r in chunk]
    dphi = [strict_radial_derivative(p, float(r)) for r in chunk]
    return [row[0] for row in rows], dphi, max((row[1] for row in rows), default=0.0)


def radial_profile(
    p: RadialProblem,
    nodes: int,
    strict: bool = True,
    geometric: bool = True,
    workers: Optional[int] = None,
) -> RadialSolution:
    """
    Sample the strict (or weak) solution on a radial grid over [r_min, r_max].

    Nodes are partitioned into contiguous chunks evaluated on a thread pool of
    ``workers`` (FWL_THREADS by default); every node is computed independently,
    so the result does not depend on the partition.
    """
    grid = radial_grid(p.r_min, p.r_max, nodes, geometric)

    if not strict:
        phi, dphi = zip(*(weak_radial(p, float(r)) for r in grid))
        return RadialSolution(grid, np.array(phi), np.array(dphi), p.sign)

    workers = config.THREADS if workers is None else workers
    chunks = np.array_split(grid, max(1, min(workers, nodes)))
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        results = list(executor.map(lambda chunk: _strict_chunk(p, chunk), chunks))

    phi = np.concatenate([np.asarray(res[0], dtype=float) for res in results])
    dphi = np.concatenate([np.asarray(res[1], dtype=float) for res in results])
    error_bound = max(res[2] for res in results)
    logger.debug(f"radial profile: {nodes} nodes, {len(chunks)} chunks, quadrature error <= {error_bound:.2e}")
    return RadialSolution(grid, phi, dphi, p.sign, error_bound)
