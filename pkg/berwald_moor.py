"""
Fourth-order (Berwald-Moor, H4) metric algebra in the physical basis.

The fourth power of the length element is the product of four linear forms
of the displacement. Its rank-4 metric tensor is assembled as

    g_ijkl = sym(eta_ij eta_kl) + 1/3 g'_ijkl - 2/3 G_ijkl

and is its own inverse table: the indicatrix in momentum space uses the same
components. Weak fields enter as symmetric rank-4 perturbations h_ijkl whose
first-order Lagrangian is the full contraction g^ijkl h_ijkl.
"""

import functools
import math
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from analytic_field import CovectorField, ScalarField
from config import config
from errors import DomainError, NullOrSpacelikeError
from logger import FieldLogger
from symtensor import SymmetricTensor
from tensor_core import DIM, ETA_DIAG, minkowski_metric
from vector_field import BlendSpec, Covector, _covector_value, _light_speed, blended_h

logger = FieldLogger.get_logger("berwald_moor")

# rows are the coefficients of the four linear forms whose product is ds^4
SIGN_ROWS = np.array(
    [
        [1.0, 1.0, 1.0, 1.0],
        [1.0, 1.0, -1.0, -1.0],
        [1.0, -1.0, 1.0, -1.0],
        [1.0, -1.0, -1.0, 1.0],
    ]
)
SIGN_ROWS.setflags(write=False)


class SymTensor4(SymmetricTensor):
    """Fully symmetric 4x4x4x4 tensor (35 independent components)"""

    __slots__ = ()

    def __init__(self, data: Sequence[float] = None):
        super().__init__(4, DIM, data)

    @classmethod
    def zeros(cls) -> "SymTensor4":
        return cls()


def _vector(v: Sequence[float]) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (DIM,):
        raise DomainError(f"H4 vector must have 4 components, got shape {v.shape}")
    return v


# length elements

def bm_length4(v: Sequence[float]) -> float:
    """(ds_H4)^4 as the product of the four linear forms"""
    return float(np.prod(SIGN_ROWS @ _vector(v)))


def expanded_length4(v: Sequence[float]) -> float:
    """(ds_H4)^4 written out as a quartic polynomial"""
    x0, x1, x2, x3 = _vector(v)
    return (
        x0 ** 4 + x1 ** 4 + x2 ** 4 + x3 ** 4
        + 8.0 * x0 * x1 * x2 * x3
        - 2.0 * (x0 * x1) ** 2 - 2.0 * (x0 * x2) ** 2 - 2.0 * (x0 * x3) ** 2
        - 2.0 * (x1 * x2) ** 2 - 2.0 * (x1 * x3) ** 2 - 2.0 * (x2 * x3) ** 2
    )


def minkowski_length4(v: Sequence[float]) -> float:
    """(eta_ij dx^i dx^j)^2"""
    v = _vector(v)
    return float(np.dot(ETA_DIAG, v * v)) ** 2


def length4_difference(v: Sequence[float]) -> float:
    """8 dx0 dx1 dx2 dx3 - 4[(dx1 dx2)^2 + (dx1 dx3)^2 + (dx2 dx3)^2], the H4 excess over Minkowski"""
    x0, x1, x2, x3 = _vector(v)
    return 8.0 * x0 * x1 * x2 * x3 - 4.0 * ((x1 * x2) ** 2 + (x1 * x3) ** 2 + (x2 * x3) ** 2)


def length_scale(v: Sequence[float]) -> float:
    """(sum |v_i|)^4, a bound on every quartic monomial of v"""
    return float(np.sum(np.abs(_vector(v)))) ** 4


# metric tensor pieces

@functools.lru_cache(maxsize=None)
def g_prime() -> SymTensor4:
    """1 where all four indices differ, 0 elsewhere"""
    return SymTensor4.from_function(4, DIM, lambda ms: 1.0 if len(set(ms)) == 4 else 0.0)


@functools.lru_cache(maxsize=None)
def big_g() -> SymTensor4:
    """1 on every arrangement of {a, a, b, b} with a != b spatial, 0 elsewhere"""

    def entry(ms: Tuple[int, ...]) -> float:
        paired = ms[0] == ms[1] and ms[2] == ms[3] and ms[1] != ms[2]
        return 1.0 if paired and 0 not in ms else 0.0

    return SymTensor4.from_function(4, DIM, entry)


@functools.lru_cache(maxsize=None)
def eta_squared() -> SymTensor4:
    """Full symmetrization of eta_ij eta_kl"""
    eta = minkowski_metric()
    return SymTensor4.symmetrized_outer(eta, eta)


@functools.lru_cache(maxsize=None)
def build_g4() -> SymTensor4:
    """g_ijkl = sym(eta eta) + g'/3 - 2G/3; contracts with dx^4 to the product form"""
    return eta_squared() + g_prime() * (1.0 / 3.0) - big_g() * (2.0 / 3.0)


@functools.lru_cache(maxsize=None)
def indicatrix_tensor() -> SymTensor4:
    """g^ijkl read off the momentum-space product of linear forms"""
    return SymTensor4.symmetrized_outer(*SIGN_ROWS)


@functools.lru_cache(maxsize=None)
def metric_trace() -> np.ndarray:
    """T_ij = g_ijkl eta^kl"""
    return np.einsum("ijkl,kl->ij", build_g4().to_dense(), minkowski_metric())


# generic order-n Finsler operations

def finsler_length(g: SymmetricTensor, v: Sequence[float]) -> float:
    """ds = (g_{i1..in} dx^i1 .. dx^in)^(1/n) for a positive contraction"""
    value = g.contract(v)
    if value <= 0.0:
        raise NullOrSpacelikeError(f"length form is {value!r} <= 0", length4=value)
    return value ** (1.0 / g.order)


def momenta_order_n(g: SymmetricTensor, v: Sequence[float]) -> np.ndarray:
    """p_i = g_{i j2..jn} dx^j2 .. dx^jn / (g dx..dx)^((n-1)/n)"""
    value = g.contract(v)
    if value <= 0.0:
        raise NullOrSpacelikeError(f"length form is {value!r} <= 0", length4=value)
    return g.contract_all_but_one(v) / value ** ((g.order - 1) / g.order)


def indicatrix_tangent_residual(g_up: SymmetricTensor, p: Sequence[float], mu: float = 1.0) -> float:
    """g^{i1..in} p_i1 .. p_in - mu^n"""
    return g_up.contract(p) - mu ** g_up.order


# H4 instances

def generalized_momenta(v: Sequence[float]) -> np.ndarray:
    """p_i = d(ds)/d(dx^i) for a timelike H4 vector"""
    v = _vector(v)
    length4 = bm_length4(v)
    if length4 <= 0.0:
        raise NullOrSpacelikeError(f"(ds_H4)^4 = {length4!r} <= 0: no generalized momenta", length4=length4)
    return build_g4().contract_all_but_one(v) / length4 ** 0.75


def bm_length(v: Sequence[float]) -> float:
    """ds_H4"""
    length4 = bm_length4(v)
    if length4 <= 0.0:
        raise NullOrSpacelikeError(f"(ds_H4)^4 = {length4!r} <= 0", length4=length4)
    return length4 ** 0.25


def indicatrix_residual(p: Sequence[float]) -> float:
    """Product of the four linear forms of p, minus 1"""
    return float(np.prod(SIGN_ROWS @ _vector(p))) - 1.0


def indicatrix_residual_contracted(p: Sequence[float]) -> float:
    """g^ijkl p_i p_j p_k p_l - 1"""
    return indicatrix_tangent_residual(indicatrix_tensor(), _vector(p))


def l1_fourth_order(h: SymTensor4) -> float:
    """g^ijkl h_ijkl"""
    return build_g4().inner(h)


# weak-field perturbations

def em_fourth_order(A: CovectorField, blend: BlendSpec, x: Sequence[float]) -> SymTensor4:
    """
    Electromagnetic h_ijkl = sym((C h C)_ij eta_kl) with h the chi-blend of h1, h2.

    C = diag(sqrt(eta_ii / T_ii)) undoes the trace T_ij = g_ijkl eta^kl, so that
    g^ijkl h_ijkl equals eta^ij h_ij = L_A.
    """
    h = blended_h(A, blend, x).matrix()
    c = np.sqrt(ETA_DIAG / np.diag(metric_trace()))
    return SymTensor4.symmetrized_outer(c[:, None] * h * c[None, :], minkowski_metric())


def source_fourth_order_raw(A: CovectorField, j: Covector, x: Sequence[float], c: Optional[float] = None) -> np.ndarray:
    """(16 pi / c)(1/6)(2 A_i j_j g_kl - A_i g_jk j_l - j_i g_jk A_l) before symmetrization"""
    a = A.value(x)
    current = _covector_value(j, x)
    eta = minkowski_metric()
    raw = (
        2.0 * np.einsum("i,j,kl->ijkl", a, current, eta)
        - np.einsum("i,jk,l->ijkl", a, eta, current)
        - np.einsum("i,jk,l->ijkl", current, eta, a)
    )
    return 16.0 * math.pi / _light_speed(c) / 6.0 * raw


def source_fourth_order(A: CovectorField, j: Covector, x: Sequence[float], c: Optional[float] = None) -> SymTensor4:
    """The source term symmetrized in all indices; its three pieces cancel identically"""
    return SymTensor4.from_dense(source_fourth_order_raw(A, j, x, c), symmetrize=True)


def currents_from_psis(psis: Iterable[ScalarField], charges: Iterable[float], x: Sequence[float]) -> np.ndarray:
    """j_i = sum_b q_b d_i psi_b"""
    psis, charges = list(psis), list(charges)
    if len(psis) != len(charges):
        raise DomainError(f"{len(psis)} fields but {len(charges)} charges")
    total = np.zeros(DIM)
    for psi, q in zip(psis, charges):
        total += q * psi.gradient(x)
    return total


def grav_fourth_order(
    phis: Iterable[Tuple[ScalarField, int]],
    psis: Iterable[Tuple[ScalarField, int]],
    x: Sequence[float],
) -> SymTensor4:
    """sum_a eps_a dphi_a^4 + sum_b eps_b sym(dpsi_b dpsi_b eta)"""
    total = SymTensor4.zeros()
    for phi, eps in phis:
        g = phi.gradient(x)
        total = total + SymTensor4.symmetrized_outer(g, g, g, g) * eps
    eta = minkowski_metric()
    for psi, eps in psis:
        g = psi.gradient(x)
        total = total + SymTensor4.symmetrized_outer(np.outer(g, g), eta) * eps
    return total


def maxwell_fourth_order(A: CovectorField, blend: BlendSpec, j: Covector, x: Sequence[float]) -> SymTensor4:
    """h^(A) plus the symmetrized source term"""
    return em_fourth_order(A, blend, x) + source_fourth_order(A, j, x)


def combined_fourth_order(
    A: CovectorField,
    blend: BlendSpec,
    phis: Iterable[Tuple[ScalarField, int]],
    psis: Iterable[Tuple[ScalarField, int]],
    x: Sequence[float],
    charges: Optional[Sequence[float]] = None,
    mu: Optional[float] = None,
    gamma: Optional[float] = None,
) -> SymTensor4:
    """
    mu h^(Max) + gamma h^(grav).

    The Maxwell source is built from the psi fields: j_i = sum_b q_b d_i psi_b,
    every charge defaulting to CHARGE_Q.
    """
    mu = config.MU if mu is None else mu
    gamma = config.GAMMA if gamma is None else gamma
    phis, psis = list(phis), list(psis)
    if charges is None:
        charges = [config.CHARGE_Q] * len(psis)
    j = currents_from_psis([psi for psi, _ in psis], charges, x)
    return maxwell_fourth_order(A, blend, j, x) * mu + grav_fourth_order(phis, psis, x) * gamma
