#!/usr/bin/env python3
"""
Unit tests for multiset-stored symmetric tensors
Run with: pytest test_symtensor.py -v
"""

import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose

from errors import DomainError
from symtensor import SymmetricTensor, multiset_table


def naive_contract(dense, v):
    total = 0.0
    for idx in itertools.product(range(len(v)), repeat=dense.ndim):
        term = dense[idx]
        for i in idx:
            term *= v[i]
        total += term
    return total


class TestMultisetTable:
    """Test multiset bookkeeping"""

    def test_component_counts(self):
        """Order 2 and 4 over 4 dimensions store 10 and 35 components"""
        assert len(multiset_table(2, 4)[0]) == 10
        assert len(multiset_table(4, 4)[0]) == 35

    def test_weights_cover_all_index_tuples(self):
        """Multiplicity weights add up to dim**order"""
        for order, dim in [(2, 4), (3, 3), (4, 4)]:
            weights = multiset_table(order, dim)[2]
            assert weights.sum() == dim ** order

    def test_known_weights(self):
        """4!/(2!2!) = 6 for {0,0,1,1}; 24 for {0,1,2,3}"""
        multisets, _, weights, _ = multiset_table(4, 4)
        assert weights[multisets.index((0, 0, 1, 1))] == 6
        assert weights[multisets.index((0, 1, 2, 3))] == 24
        assert weights[multisets.index((2, 2, 2, 2))] == 1


class TestSymmetricTensor:
    """Test storage, access and contraction"""

    def test_any_permutation_reads_same_component(self):
        """Accessor is invariant under index permutations"""
        tensor = SymmetricTensor.from_function(4, 4, lambda ms: sum((k + 1) * i for k, i in enumerate(ms)))
        for perm in itertools.permutations((0, 1, 1, 3)):
            assert tensor[perm] == tensor[(0, 1, 1, 3)]

    def test_contract_matches_naive_sum_exactly(self, rng):
        """Integer components: multiset contraction equals the 256-term loop exactly"""
        for _ in range(20):
            data = rng.integers(-5, 6, size=35)
            v = rng.integers(-3, 4, size=4).astype(float)
            tensor = SymmetricTensor(4, 4, data)
            assert tensor.contract(v) == naive_contract(tensor.to_dense(), v)

    def test_contract_all_but_one_matches_einsum(self, rng):
        """Partial contraction equals the dense einsum"""
        tensor = SymmetricTensor(4, 4, rng.integers(-5, 6, size=35))
        v = rng.uniform(-1.0, 1.0, size=4)
        expected = np.einsum("ijkl,j,k,l->i", tensor.to_dense(), v, v, v)
        assert_allclose(tensor.contract_all_but_one(v), expected, rtol=1e-13, atol=1e-13)

    def test_euler_relation(self, rng):
        """v . (T v^(m-1)) == T v^m"""
        tensor = SymmetricTensor(3, 4, rng.uniform(-1.0, 1.0, size=20))
        v = rng.uniform(-1.0, 1.0, size=4)
        assert np.dot(v, tensor.contract_all_but_one(v)) == pytest.approx(tensor.contract(v), abs=1e-14)

    def test_inner_matches_dense(self, rng):
        """Weighted inner product equals the full dense contraction"""
        a = SymmetricTensor(4, 4, rng.uniform(-1.0, 1.0, size=35))
        b = SymmetricTensor(4, 4, rng.uniform(-1.0, 1.0, size=35))
        assert a.inner(b) == pytest.approx(float(np.sum(a.to_dense() * b.to_dense())), rel=1e-13)

    def test_from_dense_rejects_asymmetric(self):
        """Non-symmetric input is refused unless symmetrize=True"""
        array = np.zeros((4, 4))
        array[0, 1] = 1.0
        with pytest.raises(DomainError):
            SymmetricTensor.from_dense(array)

        tensor = SymmetricTensor.from_dense(array, symmetrize=True)
        assert tensor[(0, 1)] == 0.5

    def test_from_dense_keeps_symmetric_values_exact(self):
        """Already-symmetric arrays are stored without averaging"""
        array = np.full((4, 4, 4), 0.1)
        tensor = SymmetricTensor.from_dense(array)
        assert np.all(tensor.components == 0.1)

    def test_symmetrized_outer(self):
        """sym(a x b) has components (a_i b_j + a_j b_i)/2"""
        a = np.array([1.0, 2.0, 0.0, 0.0])
        b = np.array([0.0, 3.0, 0.0, 1.0])
        tensor = SymmetricTensor.symmetrized_outer(a, b)
        assert tensor[(0, 1)] == pytest.approx(1.5)
        assert tensor[(1, 1)] == pytest.approx(6.0)
        assert tensor[(1, 3)] == pytest.approx(1.0)

    def test_immutable(self):
        """Stored components are read-only"""
        tensor = SymmetricTensor(2, 4)
        with pytest.raises(ValueError):
            tensor.components[0] = 1.0

    def test_arithmetic_and_shape_checks(self):
        """Addition requires matching order and dimension"""
        a = SymmetricTensor(2, 4, np.ones(10))
        b = SymmetricTensor(2, 4, np.arange(10))
        assert_allclose((a + b).components, 1.0 + np.arange(10))
        assert_allclose((2 * a - b).components, 2.0 - np.arange(10))
        with pytest.raises(DomainError):
            a + SymmetricTensor(2, 3)

    def test_wrong_component_count(self):
        """Data length must match the multiset count"""
        with pytest.raises(DomainError):
            SymmetricTensor(2, 4, np.ones(9))
