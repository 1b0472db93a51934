"""
Weak-field algebra of a symmetric rank-2 perturbation over the Minkowski background.

The metric is g_ij = eta_ij + h_ij with eta = diag(+1, -1, -1, -1). The field
Lagrangian is sqrt(-det g) (overall constant fixed to 1); this module evaluates it
from the unexpanded determinant and through its first- and second-order expansions in h.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from config import config
from errors import IndefiniteMetricError
from logger import FieldLogger
from symtensor import SymmetricTensor

logger = FieldLogger.get_logger("tensor_core")

DIM = 4
ETA_DIAG = np.array([1.0, -1.0, -1.0, -1.0])
ETA_DIAG.setflags(write=False)

# (i, j) pairs of the six 2x2 principal minors; time-paired minors enter L2 with a minus sign
MINOR_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def minkowski_metric() -> np.ndarray:
    """eta_ij as a dense 4x4 array (its inverse has the same table)"""
    return np.diag(ETA_DIAG)


class SymTensor2(SymmetricTensor):
    """Symmetric 4x4 perturbation h_ij (10 independent components)"""

    __slots__ = ()

    def __init__(self, data: Sequence[float] = None):
        super().__init__(2, DIM, data)

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, atol: float = 0.0) -> "SymTensor2":
        return cls.from_dense(np.asarray(matrix, dtype=float), atol=atol)

    @classmethod
    def zeros(cls) -> "SymTensor2":
        return cls()

    def h(self, i: int, j: int) -> float:
        return self[(i, j)]

    def matrix(self) -> np.ndarray:
        return self.to_dense()

    def scaled(self, factor: float) -> "SymTensor2":
        return self * factor


@dataclass(frozen=True)
class Lagrangian2Report:
    """Exact and expanded values of the determinant Lagrangian for one h"""

    l1: float
    l2: float
    exact_neg_det: float
    l_first_order: float
    l_second_order: float
    l_exact: Optional[float]

    @property
    def indefinite(self) -> bool:
        return self.l_exact is None

    def to_dict(self) -> dict:
        return {
            "l1": self.l1,
            "l2": self.l2,
            "exact_neg_det": self.exact_neg_det,
            "l_first_order": self.l_first_order,
            "l_second_order": self.l_second_order,
            "l_exact": self.l_exact,
            "indefinite": self.indefinite,
        }


def _det4(a: np.ndarray) -> float:
    """Cofactor (Laplace) expansion of a 4x4 determinant along its first two rows"""
    s0 = a[0, 0] * a[1, 1] - a[1, 0] * a[0, 1]
    s1 = a[0, 0] * a[1, 2] - a[1, 0] * a[0, 2]
    s2 = a[0, 0] * a[1, 3] - a[1, 0] * a[0, 3]
    s3 = a[0, 1] * a[1, 2] - a[1, 1] * a[0, 2]
    s4 = a[0, 1] * a[1, 3] - a[1, 1] * a[0, 3]
    s5 = a[0, 2] * a[1, 3] - a[1, 2] * a[0, 3]

    c5 = a[2, 2] * a[3, 3] - a[3, 2] * a[2, 3]
    c4 = a[2, 1] * a[3, 3] - a[3, 1] * a[2, 3]
    c3 = a[2, 1] * a[3, 2] - a[3, 1] * a[2, 2]
    c2 = a[2, 0] * a[3, 3] - a[3, 0] * a[2, 3]
    c1 = a[2, 0] * a[3, 2] - a[3, 0] * a[2, 2]
    c0 = a[2, 0] * a[3, 1] - a[3, 0] * a[2, 1]

    return float(s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0)


def exact_neg_det(h: SymTensor2) -> float:
    """-det(eta + h) from the unexpanded determinant; 1 for h = 0"""
    return -_det4(minkowski_metric() + h.matrix())


def l1(h: SymTensor2) -> float:
    """L1 = eta^ij h_ij = h00 - h11 - h22 - h33"""
    return h.h(0, 0) - h.h(1, 1) - h.h(2, 2) - h.h(3, 3)


def l2(h: SymTensor2) -> float:
    """Quadratic part of -det(eta + h), written out term by term"""
    h00, h11, h22, h33 = h.h(0, 0), h.h(1, 1), h.h(2, 2), h.h(3, 3)
    h01, h02, h03 = h.h(0, 1), h.h(0, 2), h.h(0, 3)
    h12, h13, h23 = h.h(1, 2), h.h(1, 3), h.h(2, 3)
    # exactly rounded whatever the term order
    return math.fsum((
        -(h00 * h11), -(h00 * h22), -(h00 * h33),
        h11 * h22, h11 * h33, h22 * h33,
        -(h12 * h12), -(h13 * h13), -(h23 * h23),
        h01 * h01, h02 * h02, h03 * h03,
    ))


def _l2_products(h: SymTensor2):
    """Signed products of L2, one diagonal pair and one off-diagonal square per minor"""
    for i, j in MINOR_PAIRS:
        sign = -1.0 if i == 0 else 1.0
        yield sign * (h.h(i, i) * h.h(j, j))
        yield -sign * (h.h(i, j) * h.h(i, j))


def l2_minors(h: SymTensor2) -> float:
    """L2 as the signed sum of the six 2x2 principal minors of h"""
    return math.fsum(_l2_products(h))


def l2_term_scale(h: SymTensor2) -> float:
    """Sum of absolute values of the products entering L2 (scale for relative comparisons)"""
    return sum(abs(h.h(i, i) * h.h(j, j)) + h.h(i, j) ** 2 for i, j in MINOR_PAIRS)


def second_order_lagrangian_density(h: SymTensor2) -> float:
    """L1 + L2 - L1^2/4, the Lagrangian the second-order field equations come from"""
    first = l1(h)
    return first + l2(h) - 0.25 * first ** 2


def weakness(h: SymTensor2) -> float:
    """max |h_ij|; accuracy claims hold for weakness(h) <= WEAK_FIELD_LIMIT"""
    return h.max_abs()


def lagrangian_report(h: SymTensor2, strict: bool = False) -> Lagrangian2Report:
    """
    Exact determinant Lagrangian next to its first- and second-order expansions.

    When -det(g) < 0 the exact Lagrangian is unavailable: the report carries
    l_exact=None (expansions still filled), or IndefiniteMetricError is raised
    with strict=True.
    """
    first = l1(h)
    second = l2(h)
    neg_det = exact_neg_det(h)

    l_exact = None
    if neg_det >= 0.0:
        l_exact = float(np.sqrt(neg_det))
    elif strict:
        raise IndefiniteMetricError(
            f"-det(g) = {neg_det!r} < 0: metric is not Lorentzian", radicand=neg_det
        )
    else:
        logger.warning(f"indefinite metric: -det(g) = {neg_det:.6e}; exact Lagrangian unavailable")

    if weakness(h) > config.WEAK_FIELD_LIMIT:
        logger.debug(f"h outside weak-field regime (max |h| = {weakness(h):.3e})")

    return Lagrangian2Report(
        l1=first,
        l2=second,
        exact_neg_det=neg_det,
        l_first_order=1.0 + 0.5 * first,
        l_second_order=1.0 + 0.5 * first + 0.5 * (second - 0.25 * first ** 2),
        l_exact=l_exact,
    )


def random_weak_tensor(rng: np.random.Generator, max_abs: float) -> SymTensor2:
    """Random h with entries uniform in [-1, 1], rescaled so that max |h_ij| == max_abs"""
    raw = rng.uniform(-1.0, 1.0, size=10)
    return SymTensor2(raw * (max_abs / np.max(np.abs(raw))))
