"""
Fully symmetric tensors of any order over an n-dimensional space.

Components are stored once per index multiset {i1 <= i2 <= ... <= im}; a
multiplicity table (m! / prod(multiplicities!)) turns multiset sums into full
index contractions. Tensors are immutable after construction.
"""

import functools
import itertools
import math
from typing import Callable, Iterable, Sequence, Tuple

import numpy as np

from errors import DomainError


@functools.lru_cache(maxsize=None)
def multiset_table(order: int, dim: int) -> Tuple[Tuple[Tuple[int, ...], ...], np.ndarray, np.ndarray, np.ndarray]:
    """
    Multiset bookkeeping for (order, dim).

    Returns:
        multisets: sorted index tuples, in storage order
        exponents: (M, dim) integer array, exponents[a, i] = count of i in multiset a
        weights: (M,) number of index tuples that sort to each multiset
        positions: (dim**order,) storage position of every flat index tuple
    """
    multisets = tuple(itertools.combinations_with_replacement(range(dim), order))
    lookup = {ms: pos for pos, ms in enumerate(multisets)}

    exponents = np.zeros((len(multisets), dim), dtype=int)
    for pos, ms in enumerate(multisets):
        for i in ms:
            exponents[pos, i] += 1

    weights = np.array(
        [math.factorial(order) // math.prod(math.factorial(int(c)) for c in row) for row in exponents],
        dtype=float,
    )

    positions = np.array(
        [lookup[tuple(sorted(idx))] for idx in itertools.product(range(dim), repeat=order)],
        dtype=int,
    )

    for arr in (exponents, weights, positions):
        arr.setflags(write=False)
    return multisets, exponents, weights, positions


class SymmetricTensor:
    """Fully symmetric tensor with multiset storage"""

    __slots__ = ("order", "dim", "_data")

    def __init__(self, order: int, dim: int, data: Iterable[float] = None):
        if order < 1 or dim < 1:
            raise DomainError(f"order and dim must be positive, got order={order}, dim={dim}")
        multisets = multiset_table(order, dim)[0]
        if data is None:
            values = np.zeros(len(multisets))
        else:
            values = np.array(data, dtype=float)
            if values.shape != (len(multisets),):
                raise DomainError(
                    f"expected {len(multisets)} independent components for order={order}, dim={dim}, "
                    f"got shape {values.shape}"
                )
        values.setflags(write=False)
        self.order = order
        self.dim = dim
        self._data = values

    # construction helpers

    @classmethod
    def _wrap(cls, order: int, dim: int, data: np.ndarray) -> "SymmetricTensor":
        obj = object.__new__(cls)
        SymmetricTensor.__init__(obj, order, dim, data)
        return obj

    def _like(self, data: np.ndarray) -> "SymmetricTensor":
        return type(self)._wrap(self.order, self.dim, data)

    @classmethod
    def from_function(cls, order: int, dim: int, fn: Callable[[Tuple[int, ...]], float]) -> "SymmetricTensor":
        """Build from a function of the sorted multiset"""
        multisets = multiset_table(order, dim)[0]
        return cls._wrap(order, dim, np.array([fn(ms) for ms in multisets], dtype=float))

    @classmethod
    def from_dense(cls, array: np.ndarray, symmetrize: bool = False, atol: float = 0.0) -> "SymmetricTensor":
        """
        Build from a dense (dim,)*order array.

        With symmetrize=True the array is averaged over all index permutations;
        otherwise it must already be symmetric within ``atol``.
        """
        array = np.asarray(array, dtype=float)
        order = array.ndim
        dim = array.shape[0]
        if array.shape != (dim,) * order:
            raise DomainError(f"dense array must be hypercubic, got shape {array.shape}")

        multisets, _, weights, positions = multiset_table(order, dim)
        if symmetrize:
            sums = np.bincount(positions, weights=array.ravel(), minlength=len(weights))
            return cls._wrap(order, dim, sums / weights)

        tensor = cls._wrap(order, dim, np.array([array[ms] for ms in multisets]))
        deviation = np.max(np.abs(tensor.to_dense() - array))
        if deviation > atol:
            raise DomainError(f"array is not symmetric (max deviation {deviation:.3e})")
        return tensor

    @classmethod
    def symmetrized_outer(cls, *factors: np.ndarray) -> "SymmetricTensor":
        """Full symmetrization of the outer product of vectors and matrices"""
        dense = np.asarray(factors[0], dtype=float)
        for factor in factors[1:]:
            dense = np.multiply.outer(dense, np.asarray(factor, dtype=float))
        return cls.from_dense(dense, symmetrize=True)

    # access

    def _position(self, index: Sequence[int]) -> int:
        if len(index) != self.order:
            raise DomainError(f"expected {self.order} indices, got {len(index)}")
        if any(i < 0 or i >= self.dim for i in index):
            raise DomainError(f"index {tuple(index)} out of range for dim={self.dim}")
        key = tuple(sorted(index))
        multisets = multiset_table(self.order, self.dim)[0]
        return multisets.index(key)

    def __getitem__(self, index: Sequence[int]) -> float:
        return float(self._data[self._position(index)])

    @property
    def components(self) -> np.ndarray:
        """Independent components in storage order (read-only)"""
        return self._data

    @property
    def multisets(self) -> Tuple[Tuple[int, ...], ...]:
        return multiset_table(self.order, self.dim)[0]

    def to_dense(self) -> np.ndarray:
        positions = multiset_table(self.order, self.dim)[3]
        return self._data[positions].reshape((self.dim,) * self.order)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self._data))) if self._data.size else 0.0

    # contractions

    def contract(self, v: Sequence[float]) -> float:
        """T_{i1..im} v^i1 ... v^im"""
        v = self._vector(v)
        _, exponents, weights, _ = multiset_table(self.order, self.dim)
        monomials = np.prod(np.power(v, exponents), axis=1)
        return float(np.dot(weights * self._data, monomials))

    def contract_all_but_one(self, v: Sequence[float]) -> np.ndarray:
        """T_{i j2..jm} v^j2 ... v^jm, as the scaled gradient of the contraction"""
        v = self._vector(v)
        _, exponents, weights, _ = multiset_table(self.order, self.dim)
        scaled = weights * self._data
        out = np.empty(self.dim)
        for i in range(self.dim):
            reduced = exponents.copy()
            reduced[:, i] = np.maximum(reduced[:, i] - 1, 0)
            monomials = exponents[:, i] * np.prod(np.power(v, reduced), axis=1)
            out[i] = np.dot(scaled, monomials)
        return out / self.order

    def inner(self, other: "SymmetricTensor") -> float:
        """Full contraction T^{i1..im} S_{i1..im}"""
        self._check_compatible(other)
        weights = multiset_table(self.order, self.dim)[2]
        return float(np.dot(weights * self._data, other._data))

    def _vector(self, v: Sequence[float]) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise DomainError(f"vector must have shape ({self.dim},), got {v.shape}")
        return v

    # arithmetic

    def _check_compatible(self, other: "SymmetricTensor"):
        if not isinstance(other, SymmetricTensor):
            raise TypeError(f"expected SymmetricTensor, got {type(other).__name__}")
        if (self.order, self.dim) != (other.order, other.dim):
            raise DomainError(
                f"incompatible tensors: ({self.order}, {self.dim}) vs ({other.order}, {other.dim})"
            )

    def __add__(self, other: "SymmetricTensor") -> "SymmetricTensor":
        self._check_compatible(other)
        return self._like(self._data + other._data)

    def __sub__(self, other: "SymmetricTensor") -> "SymmetricTensor":
        self._check_compatible(other)
        return self._like(self._data - other._data)

    def __mul__(self, scalar: float) -> "SymmetricTensor":
        return self._like(self._data * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "SymmetricTensor":
        return self._like(-self._data)

    def allclose(self, other: "SymmetricTensor", rtol: float = 0.0, atol: float = 0.0) -> bool:
        self._check_compatible(other)
        return bool(np.allclose(self._data, other._data, rtol=rtol, atol=atol))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(order={self.order}, dim={self.dim}, max_abs={self.max_abs():.3e})"
