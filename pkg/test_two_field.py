#!/usr/bin/env python3
"""
Unit tests for the coupled two-field system
Run with: pytest test_two_field.py -v
"""

import math

import numpy as np
import pytest
import sympy as sp

from analytic_field import X0, X1, X2, X3, ScalarField, plane_wave
from config import config
from errors import BlowupError, CFLViolationError, DomainError, IndefiniteMetricError
from tensor_core import l1, l2_minors, l2_term_scale
from two_field import (
    FieldPair,
    MODES,
    TwoFieldState,
    evolve_coupled,
    gaussian_pulse,
    linear_energy,
    linear_residuals,
    metric_perturbation,
    standing_wave,
    strict_residual_at,
    strict_residuals,
    strict_two_field_lagrangian,
    superposition_defect,
    traveling_pulses,
    two_field_l1,
    two_field_l2,
)


def crossing_waves(amplitude, eps_phi=1, eps_psi=1, cells=64, levels=40):
    """phi = a sin(x - t), psi = a cos(2(x + t)) sampled at dt = dx"""
    h = 2.0 * math.pi / cells
    return TwoFieldState.from_functions(
        lambda t, x: amplitude * np.sin(x - t),
        lambda t, x: amplitude * np.cos(2.0 * (x + t)),
        levels=levels,
        cells=cells,
        dt=h,
        dx=h,
        eps_phi=eps_phi,
        eps_psi=eps_psi,
    )


class TestPointwise:
    """Test L1, L2 and the strict Lagrangian at spacetime points"""

    def test_coordinate_fields(self, origin):
        """phi = x0, psi = x1 gives L1 = 0 and L2 = -eps_phi eps_psi"""
        for eps_phi, eps_psi in [(1, 1), (-1, -1)]:
            pair = FieldPair(ScalarField(X0), ScalarField(X1), eps_phi, eps_psi)
            assert two_field_l1(pair, origin) == 0.0
            assert two_field_l2(pair, origin) == -eps_phi * eps_psi
        mixed = FieldPair(ScalarField(X0), ScalarField(X1), 1, -1)
        assert two_field_l1(mixed, origin) == 2.0
        assert two_field_l2(mixed, origin) == 1.0

    def test_l2_matches_principal_minors(self, rng):
        """L2 from the field brackets equals the minor form of h at 1000 points"""
        pair = FieldPair(
            plane_wave([1.0, 0.5, -0.3, 0.2], amplitude=0.4),
            ScalarField(0.2 * X0 * X2 + 0.1 * X1 ** 2 - 0.3 * X3),
            eps_phi=1,
            eps_psi=-1,
        )
        for x in rng.uniform(-1.0, 1.0, size=(1000, 4)):
            h = metric_perturbation(pair, x)
            scale = max(l2_term_scale(h), 1e-300)
            assert abs(two_field_l2(pair, x) - l2_minors(h)) <= 1e-12 * scale
            assert two_field_l1(pair, x) == pytest.approx(l1(h), abs=1e-14)

    def test_field_exchange_symmetry(self, rng):
        """Swapping (phi, eps_phi) with (psi, eps_psi) leaves L1 and L2 unchanged"""
        pair = FieldPair(ScalarField(X0 * X1 + X3), ScalarField(X2 ** 2 - X0), eps_phi=-1, eps_psi=1)
        for x in rng.uniform(-1.0, 1.0, size=(20, 4)):
            assert two_field_l1(pair.swapped(), x) == pytest.approx(two_field_l1(pair, x), abs=1e-14)
            assert two_field_l2(pair.swapped(), x) == pytest.approx(two_field_l2(pair, x), abs=1e-14)

    def test_negative_radicand_raises(self, origin):
        """A steep timelike field with eps = -1 has no real strict Lagrangian"""
        pair = FieldPair(ScalarField(2 * X0), ScalarField(0), eps_phi=-1)
        with pytest.raises(IndefiniteMetricError) as exc_info:
            strict_two_field_lagrangian(pair, origin)
        assert exc_info.value.radicand == -3.0

    def test_sign_validation(self):
        """eps must be +1 or -1"""
        with pytest.raises(DomainError):
            FieldPair(ScalarField(X0), ScalarField(X1), eps_phi=0)


class TestSymbolicResiduals:
    """Test the strict equations on analytic fields"""

    def test_constant_gradients_solve(self, origin):
        """Linear fields solve the strict equations"""
        pair = FieldPair(ScalarField(X0 / 3), ScalarField(X1 / 2 + X2 / 5))
        assert strict_residual_at(pair, origin) == (0.0, 0.0)

    def test_single_null_wave_solves(self):
        """A lone null wave is an exact strict solution"""
        pair = FieldPair(ScalarField(0.3 * sp.sin(X0 - X1)), ScalarField(0))
        r_phi, r_psi = strict_residual_at(pair, [0.2, -0.4, 0.1, 0.0])
        assert abs(r_phi) < 1e-14
        assert r_psi == 0.0

    def test_exchange_symmetry(self):
        """Swapping the fields swaps the variational residuals"""
        pair = FieldPair(ScalarField(0.3 * X0 * X1), ScalarField(0.2 * X2 * X0 + 0.1 * X1 ** 2), eps_phi=-1)
        x = [0.3, 0.2, -0.5, 0.1]
        r_phi, r_psi = strict_residual_at(pair, x)
        s_phi, s_psi = strict_residual_at(pair.swapped(), x)
        assert s_phi == pytest.approx(r_psi, rel=1e-10, abs=1e-14)
        assert s_psi == pytest.approx(r_phi, rel=1e-10, abs=1e-14)

    def test_printed_form_differs_only_for_negative_eps_phi(self):
        """The printed psi equation uses +1 where the variational one uses eps_phi"""
        x = [0.3, 0.2, -0.5, 0.1]
        fields = (ScalarField(0.3 * X0 * X1), ScalarField(0.2 * X2 * X0 + 0.1 * X1 ** 2))
        plus = FieldPair(*fields, eps_phi=1)
        minus = FieldPair(*fields, eps_phi=-1)
        assert strict_residual_at(plus, x, "printed") == strict_residual_at(plus, x, "variational")
        printed = strict_residual_at(minus, x, "printed")
        variational = strict_residual_at(minus, x, "variational")
        assert printed[0] == variational[0]
        assert printed[1] != pytest.approx(variational[1], rel=1e-6)

    def test_unknown_form(self, origin):
        """Only the variational and printed forms exist"""
        with pytest.raises(DomainError):
            strict_residual_at(FieldPair(ScalarField(X0), ScalarField(X1)), origin, form="guessed")


class TestGridResiduals:
    """Test discrete residuals of sampled solutions"""

    def test_linear_residual_vanishes_on_crossing_waves(self):
        """Sampled traveling waves solve the centered wave equation exactly at dt = dx"""
        r_phi, r_psi = linear_residuals(crossing_waves(0.1))
        assert np.max(np.abs(r_phi)) < 1e-10
        assert np.max(np.abs(r_psi)) < 1e-10

    def test_strict_residual_is_cubic(self):
        """Halving the amplitude reduces the strict residual about eightfold"""
        big = np.max(np.abs(strict_residuals(crossing_waves(0.1))[0]))
        small = np.max(np.abs(strict_residuals(crossing_waves(0.05))[0]))
        assert big > 1e-6
        assert 1.0 / 10.0 <= small / big <= 1.0 / 6.0

    def test_residual_shapes(self):
        """Residuals live on interior nodes"""
        s = crossing_waves(0.1, levels=5, cells=16)
        for residual in linear_residuals(s) + strict_residuals(s):
            assert residual.shape == (3, 14)

    def test_printed_equals_variational_for_positive_eps_phi(self):
        """With eps_phi = +1 both forms give identical residuals"""
        s = crossing_waves(0.1, eps_psi=-1)
        for a, b in zip(strict_residuals(s, "printed"), strict_residuals(s, "variational")):
            assert np.array_equal(a, b)

    def test_needs_three_levels(self):
        """Two levels carry no second time derivative"""
        with pytest.raises(DomainError):
            linear_residuals(traveling_pulses(0.1, 0.1))


class TestEvolution:
    """Test leapfrog evolution in both modes"""

    def test_standing_wave(self):
        """One period of sin(x) cos(t) is reproduced to within 1%"""
        s = standing_wave()
        evolved = evolve_coupled(s, 249, mode="linear")
        assert evolved.time == pytest.approx(2.0 * math.pi)
        x = np.arange(s.cells) * s.dx
        exact = np.sin(x) * np.cos(evolved.time)
        assert np.max(np.abs(evolved.phi[-1] - exact)) < 0.01
        assert np.max(np.abs(evolved.psi[-1])) == 0.0

    def test_linear_superposition(self):
        """Linear evolution is linear to rounding"""
        a = traveling_pulses(0.2, 0.0)
        b = traveling_pulses(0.0, 0.2)
        assert superposition_defect(a, b, 100, mode="linear") <= 1e-10

    def test_strict_superposition_defect_is_cubic(self):
        """Colliding pulses interact at third order in the amplitude"""
        big = superposition_defect(traveling_pulses(0.2, 0.0), traveling_pulses(0.0, 0.2), 100, mode="strict")
        small = superposition_defect(traveling_pulses(0.1, 0.0), traveling_pulses(0.0, 0.1), 100, mode="strict")
        assert small > 0.0
        assert 6.0 <= big / small <= 10.0

    def test_strict_approaches_linear_at_small_amplitude(self):
        """At amplitude 1e-3 the strict step deviates from the linear step by at most 1e-8"""
        s = traveling_pulses(1e-3, 1e-3)
        steps = 20
        strict = evolve_coupled(s, steps, mode="strict")
        linear = evolve_coupled(s, steps, mode="linear")
        assert (strict - linear).norm() <= 1e-8 * steps
        assert np.max(np.abs(strict.phi - linear.phi)) <= 1e-8 * steps

    @pytest.mark.parametrize("mode", MODES)
    def test_self_convergence_is_second_order(self, mode):
        """Halving dx and dt cuts the change in the solution about fourfold"""
        length, final_time = 20.0, 5.0

        def run(cells):
            dx = length / cells
            dt = 0.5 * dx
            s = TwoFieldState.from_functions(
                gaussian_pulse(0.2, -4.0, 1.0, +1),
                gaussian_pulse(0.2, 4.0, 1.0, -1),
                levels=2,
                cells=cells,
                dt=dt,
                dx=dx,
                x0=-0.5 * length,
            )
            evolved = evolve_coupled(s, round(final_time / dt) - 1, mode=mode)
            assert evolved.time == pytest.approx(final_time)
            return np.stack([evolved.phi[-1], evolved.psi[-1]])

        coarse, medium, fine = run(200), run(400), run(800)
        first = np.max(np.abs(coarse - medium[:, ::2]))
        second = np.max(np.abs(medium[:, ::2] - fine[:, ::4]))
        assert 3.0 <= first / second <= 5.0

    def test_energy_conserved(self):
        """The staggered energy is constant under linear evolution"""
        s = traveling_pulses(0.3, 0.2)
        before = linear_energy(s)
        after = linear_energy(evolve_coupled(s, 150, mode="linear"))
        assert after == pytest.approx(before, rel=1e-10)

    def test_history(self):
        """keep_history stores every time level"""
        evolved = evolve_coupled(traveling_pulses(0.1, 0.1), 7, keep_history=True)
        assert evolved.levels == 9
        assert evolve_coupled(traveling_pulses(0.1, 0.1), 7).levels == 2

    def test_reflective_matches_periodic_away_from_edges(self):
        """Boundary handling is invisible while the data vanish near the edges"""
        periodic = traveling_pulses(0.1, 0.1, center_phi=9.0, center_psi=11.0)
        reflective = TwoFieldState(periodic.phi, periodic.psi, periodic.dt, periodic.dx, boundary="reflective")
        for mode in ("linear", "strict"):
            a = evolve_coupled(periodic, 10, mode)
            b = evolve_coupled(reflective, 10, mode)
            assert np.max(np.abs(a.phi - b.phi)) < 1e-12

    def test_constant_state_is_static(self):
        """Constant fields stay put with either boundary"""
        for boundary in ("periodic", "reflective"):
            s = TwoFieldState(np.full((2, 10), 0.5), np.full((2, 10), -0.25), 0.05, 0.1, boundary=boundary)
            evolved = evolve_coupled(s, 5, mode="strict")
            assert np.allclose(evolved.phi, 0.5, rtol=0, atol=1e-15)
            assert np.allclose(evolved.psi, -0.25, rtol=0, atol=1e-15)

    def test_cfl_violation(self):
        """dt above the CFL limit is refused"""
        with pytest.raises(CFLViolationError):
            evolve_coupled(traveling_pulses(0.1, 0.1, dt=0.1), 1)

    def test_blowup(self, mocker):
        """Fields beyond BLOWUP_LIMIT stop the run"""
        mocker.patch.object(config, "BLOWUP_LIMIT", 0.5)
        with pytest.raises(BlowupError) as exc_info:
            evolve_coupled(traveling_pulses(1.0, 0.0), 3)
        assert exc_info.value.details["step"] == 1

    def test_indefinite_metric(self):
        """A steep timelike field with eps_phi = -1 breaks the strict system"""
        s = TwoFieldState.from_functions(
            lambda t, x: 2.0 * t + 0.0 * x,
            lambda t, x: 0.0 * (t + x),
            levels=3,
            cells=10,
            dt=0.05,
            dx=0.1,
            eps_phi=-1,
        )
        with pytest.raises(IndefiniteMetricError):
            evolve_coupled(s, 1, mode="strict")
        with pytest.raises(IndefiniteMetricError):
            strict_residuals(s)

    def test_bad_arguments(self):
        """Unknown modes and mismatched states are rejected"""
        s = traveling_pulses(0.1, 0.1)
        with pytest.raises(DomainError):
            evolve_coupled(s, 1, mode="nonlinear")
        with pytest.raises(DomainError):
            s + traveling_pulses(0.1, 0.1, cells=100)
        with pytest.raises(DomainError):
            TwoFieldState(np.zeros((2, 10)), np.zeros((2, 10)), 0.1, 0.1, boundary="absorbing")
