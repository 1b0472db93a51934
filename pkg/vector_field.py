"""
Covariant vector field A_i as a metric perturbation.

Field strength, the scalar L_A, the two symmetric tensors h1/h2 and their
chi-blend, Maxwell and Lorenz-gauge residuals, sources built from a scalar
field, and the combined electromagnetic/gravitational perturbations. All
quantities are pointwise in x with eta = diag(+1, -1, -1, -1), light speed
from LIGHT_SPEED.
"""

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from analytic_field import CovectorField, ScalarField
from config import config
from errors import DomainError, IndefiniteMetricError
from tensor_core import ETA_DIAG, SymTensor2

ETA = np.diag(ETA_DIAG)

Covector = Union[CovectorField, Sequence[float], np.ndarray]


@dataclass(frozen=True)
class BlendSpec:
    """chi(x) mixing h1 and h2; constant in [0, 1] or a scalar field"""

    chi: Union[float, ScalarField] = None

    def __post_init__(self):
        if self.chi is None:
            object.__setattr__(self, "chi", config.CHI_DEFAULT)
        if not isinstance(self.chi, ScalarField) and not 0.0 <= float(self.chi) <= 1.0:
            raise DomainError(f"constant chi must lie in [0, 1], got {self.chi!r}")

    def value(self, x: Sequence[float]) -> float:
        if isinstance(self.chi, ScalarField):
            return self.chi.value(x)
        return float(self.chi)


def _covector_value(j: Covector, x: Sequence[float]) -> np.ndarray:
    if isinstance(j, CovectorField):
        return j.value(x)
    j = np.asarray(j, dtype=float)
    if j.shape != (4,):
        raise DomainError(f"covector must have 4 components, got shape {j.shape}")
    return j


def _light_speed(c: Optional[float]) -> float:
    return config.LIGHT_SPEED if c is None else c


def field_strength(A: CovectorField, x: Sequence[float]) -> np.ndarray:
    """F_ij = d_i A_j - d_j A_i"""
    J = A.jacobian(x)
    return J - J.T


def scalar_la(A: CovectorField, x: Sequence[float]) -> float:
    """L_A = eta^ij eta^km F_ik F_jm"""
    F = field_strength(A, x)
    return float(np.einsum("i,k,ik->", ETA_DIAG, ETA_DIAG, F * F))


def scalar_la_expanded(A: CovectorField, x: Sequence[float]) -> float:
    """L_A = 2 eta^ij eta^km (d_i A_k d_j A_m - d_i A_k d_m A_j), from derivatives directly"""
    J = A.jacobian(x)
    weights = np.outer(ETA_DIAG, ETA_DIAG)
    return float(2.0 * (np.sum(weights * J * J) - np.sum(weights * J * J.T)))


def _h1_matrix(J: np.ndarray) -> np.ndarray:
    return 2.0 * J @ ETA @ J.T - J @ ETA @ J - J.T @ ETA @ J.T


def _h2_matrix(J: np.ndarray) -> np.ndarray:
    return 2.0 * J.T @ ETA @ J - J.T @ ETA @ J.T - J @ ETA @ J


def _symmetric(matrix: np.ndarray) -> SymTensor2:
    # products above are symmetric up to rounding
    return SymTensor2.from_dense(matrix, symmetrize=True)


def h1_tensor(A: CovectorField, x: Sequence[float]) -> SymTensor2:
    """h1_ij = eta^km (2 d_i A_k d_j A_m - d_i A_k d_m A_j - d_k A_i d_j A_m)"""
    return _symmetric(_h1_matrix(A.jacobian(x)))


def h2_tensor(A: CovectorField, x: Sequence[float]) -> SymTensor2:
    """h2_ij = eta^km (2 d_k A_i d_m A_j - d_k A_i d_j A_m - d_i A_k d_m A_j)"""
    return _symmetric(_h2_matrix(A.jacobian(x)))


def blended_h(A: CovectorField, blend: BlendSpec, x: Sequence[float]) -> SymTensor2:
    """chi h1 + (1 - chi) h2"""
    chi = blend.value(x)
    J = A.jacobian(x)
    return _symmetric(chi * _h1_matrix(J) + (1.0 - chi) * _h2_matrix(J))


def gauge_defect(A: CovectorField, f: ScalarField, x: Sequence[float]) -> SymTensor2:
    """
    Change of h1 under A -> A + df: F eta S - S eta F with S the Hessian of f.

    h2 changes by the negative, so h1 + h2 and the chi = 1/2 blend are invariant.
    """
    F = field_strength(A, x)
    S = f.hessian(x)
    return _symmetric(F @ ETA @ S - S @ ETA @ F)


def trace(h: SymTensor2) -> float:
    """eta^ij h_ij"""
    return float(np.dot(ETA_DIAG, np.diag(h.matrix())))


def maxwell_residual(A: CovectorField, x: Sequence[float]) -> np.ndarray:
    """eta^ij d_i d_j A_k - d_k(eta^ij d_i A_j) for each k"""
    H = A.second(x)
    box = np.einsum("i,iik->k", ETA_DIAG, H)
    divergence_gradient = np.einsum("i,kii->k", ETA_DIAG, H)
    return box - divergence_gradient


def lorenz_gauge_residual(A: CovectorField, x: Sequence[float]) -> float:
    """eta^ij d_i A_j"""
    return float(np.dot(ETA_DIAG, np.diag(A.jacobian(x))))


def source_tensor(A: CovectorField, j: Covector, x: Sequence[float], c: Optional[float] = None) -> SymTensor2:
    """(16 pi / c) (A_i j_j + A_j j_i) / 2"""
    a = A.value(x)
    current = _covector_value(j, x)
    factor = 16.0 * math.pi / _light_speed(c)
    return SymTensor2.from_matrix(factor * 0.5 * (np.outer(a, current) + np.outer(current, a)))


def current_from_scalar(phi: ScalarField, q: Optional[float], x: Sequence[float]) -> np.ndarray:
    """j_i = q d_i phi"""
    q = config.CHARGE_Q if q is None else q
    return q * phi.gradient(x)


def current_field(phi: ScalarField, q: Optional[float] = None) -> CovectorField:
    """j_i = q d_i phi as a covector field"""
    q = config.CHARGE_Q if q is None else q
    return phi.gradient_field() if q == 1.0 else phi.scaled(q).gradient_field()


def continuity_residual(phi: ScalarField, q: Optional[float], x: Sequence[float]) -> float:
    """eta^ij d_j j_i for j = q d phi, i.e. q box(phi)"""
    q = config.CHARGE_Q if q is None else q
    return float(q * np.dot(ETA_DIAG, np.diag(phi.hessian(x))))


def sourced_maxwell_residual(
    A: CovectorField, j: Covector, x: Sequence[float], c: Optional[float] = None
) -> np.ndarray:
    """Maxwell operator minus (4 pi / c) j_k; equals box A_k - (4 pi / c) j_k in Lorenz gauge"""
    return maxwell_residual(A, x) - 4.0 * math.pi / _light_speed(c) * _covector_value(j, x)


def scalar_l1(phi: ScalarField, x: Sequence[float]) -> float:
    """eta^ij d_i phi d_j phi"""
    g = phi.gradient(x)
    return float(np.dot(ETA_DIAG, g * g))


def scalar_lagrangian(phi: ScalarField, sign: int, x: Sequence[float]) -> float:
    """sqrt(1 + sign L1) for the perturbation h_ij = sign d_i phi d_j phi"""
    radicand = 1.0 + sign * scalar_l1(phi, x)
    if radicand < 0.0:
        raise IndefiniteMetricError(
            f"1 + sign*L1 = {radicand!r} < 0", location=tuple(np.asarray(x, dtype=float)), radicand=radicand
        )
    return math.sqrt(radicand)


def grav_tensor(phis: Iterable[Tuple[ScalarField, int]], x: Sequence[float]) -> SymTensor2:
    """sum_a eps_a d_i phi_a d_j phi_a"""
    total = np.zeros((4, 4))
    for phi, eps in phis:
        g = phi.gradient(x)
        total += eps * np.outer(g, g)
    return SymTensor2.from_matrix(total)


def maxwell_tensor(
    A: CovectorField, j: Covector, blend: BlendSpec, x: Sequence[float], c: Optional[float] = None
) -> SymTensor2:
    """h^(A) + h^(j): the weak electromagnetic field with a given source"""
    return blended_h(A, blend, x) + source_tensor(A, j, x, c)


def unified_tensor(
    A: CovectorField,
    blend: BlendSpec,
    phis: Iterable[Tuple[ScalarField, int]],
    x: Sequence[float],
    mu: Optional[float] = None,
    gamma: Optional[float] = None,
) -> SymTensor2:
    """mu h^(A) + gamma h^(grav)"""
    mu = config.MU if mu is None else mu
    gamma = config.GAMMA if gamma is None else gamma
    return blended_h(A, blend, x) * mu + grav_tensor(phis, x) * gamma
