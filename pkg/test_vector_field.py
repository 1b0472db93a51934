#!/usr/bin/env python3
"""
Unit tests for analytic fields and the vector-field perturbation
Run with: pytest test_vector_field.py -v
"""

import itertools
import math

import numpy as np
import pytest
import sympy as sp
from numpy.testing import assert_allclose

from analytic_field import (
    COVECTOR_FAMILIES,
    GAUGE_FUNCTIONS,
    CovectorField,
    ScalarField,
    X0,
    X1,
    X2,
    X3,
    covector_family,
    fd_jacobian,
    plane_wave,
    random_polynomial_covector,
    scalar_family,
)
from errors import DomainError, IndefiniteMetricError
from tensor_core import ETA_DIAG
from vector_field import (
    BlendSpec,
    blended_h,
    continuity_residual,
    current_field,
    current_from_scalar,
    field_strength,
    gauge_defect,
    grav_tensor,
    h1_tensor,
    h2_tensor,
    lorenz_gauge_residual,
    maxwell_residual,
    maxwell_tensor,
    scalar_l1,
    scalar_la,
    scalar_la_expanded,
    scalar_lagrangian,
    source_tensor,
    sourced_maxwell_residual,
    trace,
    unified_tensor,
)


def brute_force_h1(J):
    """Index loop over eta^km (2 J_ik J_jm - J_ik J_mj - J_ki J_jm)"""
    out = np.zeros((4, 4))
    for i, j, k in itertools.product(range(4), repeat=3):
        m = k
        out[i, j] += ETA_DIAG[k] * (2 * J[i, k] * J[j, m] - J[i, k] * J[m, j] - J[k, i] * J[j, m])
    return out


def brute_force_la(F):
    """All 256 index combinations of eta^ij eta^km F_ik F_jm"""
    eta = np.diag(ETA_DIAG)
    total = 0.0
    for i, j, k, m in itertools.product(range(4), repeat=4):
        total += eta[i, j] * eta[k, m] * F[i, k] * F[j, m]
    return total


class TestAnalyticField:
    """Test exact derivatives of the built-in families"""

    def test_mixed_partials_symmetric(self, sample_points):
        """d_i d_j f == d_j d_i f on sampled points"""
        for name in COVECTOR_FAMILIES:
            A = covector_family(name)
            for x in sample_points[:10]:
                H = A.second(x)
                assert_allclose(H, H.transpose(1, 0, 2), rtol=0, atol=0)

    def test_jacobian_matches_finite_differences(self, sample_points):
        """Symbolic J agrees with central differences"""
        A = covector_family("mixed-wave")
        for x in sample_points[:5]:
            assert_allclose(A.jacobian(x), fd_jacobian(A, x), atol=1e-8)

    def test_plane_wave_values(self):
        """amplitude * sin(k.x)"""
        wave = plane_wave([1.0, -1.0, 0.0, 0.0], amplitude=2.0)
        x = np.array([0.3, 0.1, 0.0, 0.0])
        assert wave.value(x) == pytest.approx(2.0 * math.sin(0.2))
        assert_allclose(wave.gradient(x), 2.0 * math.cos(0.2) * np.array([1.0, -1.0, 0.0, 0.0]))

    def test_unknown_family(self):
        """Unknown names raise a domain error"""
        with pytest.raises(DomainError):
            covector_family("nope")
        with pytest.raises(DomainError):
            scalar_family("nope")

    def test_point_shape(self):
        """Points need four coordinates"""
        with pytest.raises(DomainError):
            ScalarField(X0).value([0.0, 1.0])


class TestFieldStrength:
    """Test F_ij"""

    def test_gradient_field_is_closed(self, sample_points):
        """A = df gives F = 0 exactly"""
        A = ScalarField(X0 ** 2 * X1 + sp.sin(X2 * X3)).gradient_field()
        for x in sample_points[:20]:
            assert np.all(field_strength(A, x) == 0.0)

    def test_null_wave_at_origin(self, origin):
        """A_2 = sin(x0 - x1): F_02 = 1, F_12 = -1"""
        F = field_strength(covector_family("null-wave"), origin)
        expected = np.zeros((4, 4))
        expected[0, 2], expected[2, 0] = 1.0, -1.0
        expected[1, 2], expected[2, 1] = -1.0, 1.0
        assert_allclose(F, expected, atol=0)

    def test_linear_field(self, sample_points):
        """A_1 = x0 has constant F_01 = 1"""
        for x in sample_points[:5]:
            assert field_strength(covector_family("linear"), x)[0, 1] == 1.0

    def test_antisymmetry(self, sample_points):
        """F + F^T == 0 exactly"""
        A = covector_family("cubic")
        for x in sample_points[:20]:
            F = field_strength(A, x)
            assert np.all(F + F.T == 0.0)


class TestScalarLA:
    """Test L_A and its two computation paths"""

    def test_known_values(self, origin, sample_points):
        """Gradient field 0, A_1 = x0 gives -2, null wave 0"""
        assert scalar_la(ScalarField(X0 * X1).gradient_field(), origin) == 0.0
        assert scalar_la(covector_family("linear"), origin) == -2.0
        for x in sample_points[:10]:
            assert scalar_la(covector_family("null-wave"), x) == pytest.approx(0.0, abs=1e-15)

    def test_matches_brute_force(self, sample_points):
        """Contraction equals the 256-term loop"""
        A = covector_family("quadratic")
        for x in sample_points[:10]:
            assert scalar_la(A, x) == pytest.approx(brute_force_la(field_strength(A, x)), rel=1e-13, abs=1e-13)

    def test_two_paths_agree(self, sample_points):
        """F contraction and derivative form agree"""
        for name in COVECTOR_FAMILIES:
            A = covector_family(name)
            for x in sample_points[:20]:
                la = scalar_la(A, x)
                assert scalar_la_expanded(A, x) == pytest.approx(la, rel=1e-13, abs=1e-13)


class TestSymmetricTensors:
    """Test h1, h2 and the blend"""

    def test_zero_field(self, origin):
        """A = 0 gives zero tensors"""
        assert h1_tensor(CovectorField.zero(), origin).max_abs() == 0.0
        assert h2_tensor(CovectorField.zero(), origin).max_abs() == 0.0

    def test_h1_brute_force(self, sample_points):
        """h1 equals the explicit index loop"""
        A = covector_family("cubic")
        for x in sample_points[:10]:
            assert_allclose(h1_tensor(A, x).matrix(), brute_force_h1(A.jacobian(x)), rtol=1e-13, atol=1e-13)

    def test_linear_field_values(self, origin):
        """A_1 = x0: h1 = diag(-2, 0, 0, 0), h2 = diag(0, 2, 0, 0)"""
        A = covector_family("linear")
        expected_h1 = brute_force_h1(A.jacobian(origin))
        assert_allclose(h1_tensor(A, origin).matrix(), expected_h1, atol=0)
        assert_allclose(expected_h1, np.diag([-2.0, 0.0, 0.0, 0.0]), atol=0)
        assert_allclose(h2_tensor(A, origin).matrix(), np.diag([0.0, 2.0, 0.0, 0.0]), atol=0)

    def test_trace_identity(self, sample_points):
        """eta^ij h_ij == L_A for h1, h2 and any chi"""
        for name in COVECTOR_FAMILIES:
            A = covector_family(name)
            for x in sample_points[:20]:
                la = scalar_la(A, x)
                tolerance = 1e-12 * max(1.0, abs(la))
                assert abs(trace(h1_tensor(A, x)) - la) <= tolerance
                assert abs(trace(h2_tensor(A, x)) - la) <= tolerance
                for chi in (0.0, 0.5, 1.0):
                    assert abs(trace(blended_h(A, BlendSpec(chi), x)) - la) <= tolerance

    def test_blend_endpoints(self, sample_points):
        """chi = 1 gives h1, chi = 0 gives h2"""
        A = covector_family("quadratic")
        x = sample_points[0]
        assert blended_h(A, BlendSpec(1.0), x).allclose(h1_tensor(A, x))
        assert blended_h(A, BlendSpec(0.0), x).allclose(h2_tensor(A, x))

    def test_field_blend(self, sample_points):
        """chi may be a scalar field"""
        A = covector_family("cubic")
        chi = ScalarField(sp.Rational(1, 2) + X0 / 4)
        x = sample_points[3]
        value = chi.value(x)
        expected = h1_tensor(A, x) * value + h2_tensor(A, x) * (1.0 - value)
        assert blended_h(A, BlendSpec(chi), x).allclose(expected, atol=1e-12)

    def test_default_chi(self):
        """Default blend uses CHI_DEFAULT"""
        assert BlendSpec().value(np.zeros(4)) == 0.5
        with pytest.raises(DomainError):
            BlendSpec(1.5)


class TestGaugeInvariance:
    """Test A -> A + df over every family and gauge function"""

    def test_invariants(self, sample_points):
        """F, L_A, traces, h1 + h2 and the chi = 1/2 blend are unchanged"""
        half = BlendSpec(0.5)
        for family, gauge in itertools.product(COVECTOR_FAMILIES, GAUGE_FUNCTIONS):
            A = covector_family(family)
            shifted = A.gauge_shifted(GAUGE_FUNCTIONS[gauge]())
            for x in sample_points:
                scale = max(1.0, float(np.max(np.abs(shifted.jacobian(x)))) ** 2)
                assert np.max(np.abs(field_strength(A, x) - field_strength(shifted, x))) <= 1e-12
                assert abs(scalar_la(A, x) - scalar_la(shifted, x)) <= 1e-12 * scale
                assert abs(trace(h1_tensor(A, x)) - trace(h1_tensor(shifted, x))) <= 1e-12 * scale
                assert abs(trace(h2_tensor(A, x)) - trace(h2_tensor(shifted, x))) <= 1e-12 * scale
                assert blended_h(A, half, x).allclose(blended_h(shifted, half, x), atol=1e-12 * scale)

    def test_h1_change_closed_form(self, sample_points):
        """h1(A + df) - h1(A) == F eta S - S eta F; h2 changes by the negative"""
        for family, gauge in itertools.product(COVECTOR_FAMILIES, GAUGE_FUNCTIONS):
            A = covector_family(family)
            f = GAUGE_FUNCTIONS[gauge]()
            shifted = A.gauge_shifted(f)
            for x in sample_points[:20]:
                scale = max(1.0, float(np.max(np.abs(shifted.jacobian(x)))) ** 2)
                defect = gauge_defect(A, f, x)
                assert (h1_tensor(shifted, x) - h1_tensor(A, x)).allclose(defect, atol=1e-12 * scale)
                assert (h2_tensor(shifted, x) - h2_tensor(A, x)).allclose(-defect, atol=1e-12 * scale)

    def test_known_defect(self, origin):
        """A_1 = x0 with f = x0 x1 changes h1 by diag(-2, -2, 0, 0)"""
        defect = gauge_defect(covector_family("linear"), ScalarField(X0 * X1), origin)
        assert_allclose(defect.matrix(), np.diag([-2.0, -2.0, 0.0, 0.0]), atol=0)


class TestMaxwell:
    """Test Maxwell and Lorenz residuals"""

    def test_null_wave(self, sample_points):
        """Null plane wave in Lorenz gauge is a free solution"""
        A = covector_family("null-wave")
        for x in sample_points:
            assert np.max(np.abs(maxwell_residual(A, x))) <= 1e-12
            assert lorenz_gauge_residual(A, x) == 0.0

    def test_quadratic_potential(self, sample_points):
        """A_1 = (x0)^2 gives residual (0, 2, 0, 0)"""
        A = CovectorField([0, X0 ** 2, 0, 0])
        assert_allclose(maxwell_residual(A, sample_points[0]), [0.0, 2.0, 0.0, 0.0], atol=0)

    def test_pure_gauge(self, sample_points):
        """A = df solves the free equations"""
        for gauge in GAUGE_FUNCTIONS.values():
            A = gauge().gradient_field()
            for x in sample_points[:10]:
                assert np.max(np.abs(maxwell_residual(A, x))) <= 1e-12

    def test_lorenz_values(self, rng):
        """A_0 = x0 gives 1; polynomial against the symbolic divergence"""
        assert lorenz_gauge_residual(CovectorField([X0, 0, 0, 0]), np.zeros(4)) == 1.0
        A = random_polynomial_covector(rng)
        divergence = sum(sign * sp.diff(a, c) for sign, a, c in zip((1, -1, -1, -1), A.components, (X0, X1, X2, X3)))
        point = np.array([0.2, -0.4, 0.6, 0.1])
        expected = float(divergence.subs(dict(zip((X0, X1, X2, X3), point))))
        assert lorenz_gauge_residual(A, point) == pytest.approx(expected, abs=1e-12)


class TestSources:
    """Test currents, source tensors and continuity"""

    def test_source_tensor(self, origin):
        """A_0 = j_0 = 1 gives h_00 = 16 pi, zero off-diagonals"""
        A = CovectorField([1, 0, 0, 0])
        h = source_tensor(A, [1.0, 0.0, 0.0, 0.0], origin)
        assert h.h(0, 0) == pytest.approx(16 * math.pi)
        assert h.h(0, 1) == 0.0 and h.h(2, 3) == 0.0
        assert source_tensor(A, np.zeros(4), origin).max_abs() == 0.0

    def test_source_tensor_symmetric(self, sample_points):
        """h_ij == h_ji for arbitrary potential and current"""
        A = covector_family("cubic")
        j = covector_family("quadratic")
        dense = source_tensor(A, j, sample_points[0]).matrix()
        assert np.array_equal(dense, dense.T)

    def test_current_values(self, origin):
        """Constant phi gives no current; phi = x0, q = 2 gives (2, 0, 0, 0)"""
        assert np.all(current_from_scalar(ScalarField(sp.Integer(3)), 1.0, origin) == 0.0)
        assert_allclose(current_from_scalar(ScalarField(X0), 2.0, origin), [2.0, 0.0, 0.0, 0.0])

    def test_continuity_for_wave_solution(self, sample_points):
        """box(phi) = 0 makes the current conserved"""
        for name in ("wave", "oblique-wave"):
            phi = scalar_family(name)
            for x in sample_points[:20]:
                assert abs(continuity_residual(phi, 2.0, x)) <= 1e-12

    def test_continuity_detects_non_solution(self, sample_points):
        """A non-wave field violates continuity"""
        phi = scalar_family("bump")
        assert max(abs(continuity_residual(phi, 1.0, x)) for x in sample_points[:10]) > 1e-3

    def test_sourced_system(self, sample_points):
        """Lorenz-gauge A with box A = 4 pi j solves the sourced equations for j = d phi"""
        phi = ScalarField(X0 * X1)
        j = current_field(phi, 1.0)
        A = CovectorField([-sp.Rational(2, 3) * sp.pi * X1 ** 3, sp.Rational(2, 3) * sp.pi * X0 ** 3, 0, 0])
        for x in sample_points[:10]:
            assert lorenz_gauge_residual(A, x) == 0.0
            assert continuity_residual(phi, 1.0, x) == 0.0
            assert_allclose(sourced_maxwell_residual(A, j, x), 0.0, atol=1e-12)

    def test_sourced_residual_detects_missing_source(self, sample_points):
        """A free wave does not solve the sourced equations"""
        j = current_field(ScalarField(X0 * X1), 1.0)
        x = sample_points[0]
        residual = sourced_maxwell_residual(covector_family("null-wave"), j, x)
        assert_allclose(residual, -4 * math.pi * j.value(x), atol=1e-12)


class TestCombinedTensors:
    """Test gravitational and combined perturbations"""

    def test_grav_tensor(self, origin):
        """eps d phi d phi summed over fields"""
        h = grav_tensor([(ScalarField(X0), 1), (ScalarField(X1), -1)], origin)
        assert_allclose(h.matrix(), np.diag([1.0, -1.0, 0.0, 0.0]))
        assert grav_tensor([], origin).max_abs() == 0.0

    def test_unified_linearity(self, sample_points):
        """mu h^(A) + gamma h^(grav)"""
        A = covector_family("quadratic")
        phis = [(scalar_family("wave"), 1)]
        x = sample_points[1]
        blend = BlendSpec(0.5)
        combined = unified_tensor(A, blend, phis, x, mu=2.0, gamma=3.0)
        expected = blended_h(A, blend, x) * 2.0 + grav_tensor(phis, x) * 3.0
        assert combined.allclose(expected, atol=1e-14)
        assert unified_tensor(A, blend, phis, x, mu=0.0, gamma=0.0).max_abs() == 0.0

    def test_maxwell_tensor(self, sample_points):
        """h^(Max) = h^(A) + h^(j)"""
        A = covector_family("cubic")
        j = [0.1, 0.2, 0.0, -0.3]
        x = sample_points[2]
        blend = BlendSpec(0.5)
        expected = blended_h(A, blend, x) + source_tensor(A, j, x)
        assert maxwell_tensor(A, j, blend, x).allclose(expected, atol=0)


class TestScalarLagrangian:
    """Test the single scalar-field Lagrangian"""

    def test_l1(self, origin):
        """eta^ij d_i phi d_j phi"""
        assert scalar_l1(ScalarField(X0), origin) == 1.0
        assert scalar_l1(ScalarField(X0 + X1), origin) == 0.0
        assert scalar_l1(ScalarField(2 * X3), origin) == -4.0

    def test_lagrangian(self, origin):
        """sqrt(1 +- L1) with indefinite radicand rejected"""
        assert scalar_lagrangian(ScalarField(sp.Integer(0)), 1, origin) == 1.0
        assert scalar_lagrangian(ScalarField(X1 / 2), 1, origin) == pytest.approx(math.sqrt(0.75))
        with pytest.raises(IndefiniteMetricError):
            scalar_lagrangian(ScalarField(2 * X1), 1, origin)
