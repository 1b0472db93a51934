#!/usr/bin/env python3
"""
Identity verification suites
Checks every algebraic identity the lab relies on against seeded samples.
"""

import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import sympy as sp

import berwald_moor
import tensor_core
import two_field
import vector_field
from analytic_field import COVECTOR_FAMILIES, GAUGE_FUNCTIONS, X0, X1, X2, X3, CovectorField, ScalarField, plane_wave
from analytic_field import random_polynomial_covector
from config import config
from errors import FieldLabError
from logger import FieldLogger, log_suite_result
from seeding import make_rng, sample_points

logger = FieldLogger.get_logger("verify")

H4_FAMILIES = ("h4-length-forms", "h4-minkowski-excess", "h4-indicatrix", "h4-euler", "h4-homogeneity")


@dataclass(frozen=True)
class SuiteResult:
    """Max residual of one identity suite against its threshold"""

    suite: str
    residual: float
    threshold: float
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and math.isfinite(self.residual) and self.residual <= self.threshold

    def to_dict(self) -> Dict[str, Any]:
        # NaN and inf residuals are written as null
        residual = self.residual if math.isfinite(self.residual) else None
        record = {"suite": self.suite, "residual": residual, "threshold": self.threshold, "pass": self.passed}
        if self.error is not None:
            record["error"] = self.error
        return record


def _jacobian_scale(A: CovectorField, x) -> float:
    return max(1.0, float(np.sum(A.jacobian(x) ** 2)))


def h4_family_residuals(samples: int, seed: Optional[int] = None) -> Dict[str, float]:
    """Max residual of each H4 identity family over seeded vectors in [-1, 1]^4"""
    vectors = sample_points(samples, "h4", seed)
    g = berwald_moor.build_g4()
    worst = dict.fromkeys(H4_FAMILIES, 0.0)

    for v in vectors:
        scale = berwald_moor.length_scale(v)
        if scale == 0.0:
            continue
        product = berwald_moor.bm_length4(v)
        forms = max(abs(berwald_moor.expanded_length4(v) - product), abs(g.contract(v) - product))
        worst["h4-length-forms"] = max(worst["h4-length-forms"], forms / scale)

        excess = product - berwald_moor.minkowski_length4(v) - berwald_moor.length4_difference(v)
        worst["h4-minkowski-excess"] = max(worst["h4-minkowski-excess"], abs(excess) / scale)

        # momenta only on timelike vectors away from the null cone
        if product < 1e-3 * scale:
            continue
        p = berwald_moor.generalized_momenta(v)
        indicatrix = max(
            abs(berwald_moor.indicatrix_residual(p)), abs(berwald_moor.indicatrix_residual_contracted(p))
        )
        worst["h4-indicatrix"] = max(worst["h4-indicatrix"], indicatrix)

        ds = berwald_moor.bm_length(v)
        worst["h4-euler"] = max(worst["h4-euler"], abs(float(np.dot(p, v)) - ds) / ds)

        drift = np.max(np.abs(berwald_moor.generalized_momenta(2.0 * v) - p)) / np.max(np.abs(p))
        worst["h4-homogeneity"] = max(worst["h4-homogeneity"], float(drift))

    return worst


class IdentityVerifier:
    """Run identity suites and collect their residuals"""

    def __init__(self, samples: int = 1000, seed: Optional[int] = None):
        self.samples = samples
        self.seed = config.DEFAULT_SEED if seed is None else seed
        self.results: List[SuiteResult] = []

    def check(self, suite: str, residual: float, threshold: float) -> bool:
        """Record a suite result"""
        result = SuiteResult(suite, float(residual), threshold)
        self.results.append(result)
        log_suite_result(suite, result.residual, threshold, result.passed)
        return result.passed

    def _rng(self, suite: str) -> np.random.Generator:
        return make_rng(suite, self.seed)

    def _points(self, suite: str, cap: Optional[int] = None) -> np.ndarray:
        count = self.samples if cap is None else min(self.samples, cap)
        return sample_points(count, suite, self.seed)

    def verify_determinant_expansion(self):
        """Explicit L2 against the signed principal minors"""
        rng = self._rng("det-expansion")
        worst = 0.0
        for _ in range(self.samples):
            h = tensor_core.random_weak_tensor(rng, 0.05)
            difference = abs(tensor_core.l2(h) - tensor_core.l2_minors(h))
            worst = max(worst, difference / max(tensor_core.l2_term_scale(h), 1e-300))
        self.check("det-expansion", worst, 1e-12)

    def verify_second_order_error(self):
        """Second-order Lagrangian error falls eightfold when h is halved"""
        rng = self._rng("det-second-order")
        ratios = []
        for _ in range(self.samples):
            h = tensor_core.random_weak_tensor(rng, 0.05)
            full = tensor_core.lagrangian_report(h)
            half = tensor_core.lagrangian_report(h * 0.5)
            if full.indefinite or half.indefinite:
                continue
            error_full = abs(full.l_exact - full.l_second_order)
            if error_full == 0.0:
                continue
            ratios.append(abs(half.l_exact - half.l_second_order) / error_full)
        median = float(np.median(ratios)) if ratios else math.inf
        # median ratio must lie in [1/10, 1/6]
        self.check("det-second-order", abs(median - 2.0 / 15.0), 1.0 / 30.0)

    def verify_gauge_invariance(self):
        """F, L_A, the traces and h1 + h2 survive A -> A + df; h1 changes by the closed form"""
        points = self._points("gauge-invariance", cap=100)
        worst = 0.0
        for family in COVECTOR_FAMILIES.values():
            A = family()
            for gauge in GAUGE_FUNCTIONS.values():
                f = gauge()
                B = A.gauge_shifted(f)
                for x in points:
                    scale = max(_jacobian_scale(A, x), _jacobian_scale(B, x))
                    h1_a, h1_b = vector_field.h1_tensor(A, x), vector_field.h1_tensor(B, x)
                    h2_a, h2_b = vector_field.h2_tensor(A, x), vector_field.h2_tensor(B, x)
                    changes = [
                        np.max(np.abs(vector_field.field_strength(B, x) - vector_field.field_strength(A, x))),
                        abs(vector_field.scalar_la(B, x) - vector_field.scalar_la(A, x)),
                        abs(vector_field.trace(h1_b) - vector_field.trace(h1_a)),
                        abs(vector_field.trace(h2_b) - vector_field.trace(h2_a)),
                        ((h1_b + h2_b) - (h1_a + h2_a)).max_abs(),
                        ((h1_b - h1_a) - vector_field.gauge_defect(A, f, x)).max_abs(),
                    ]
                    worst = max(worst, max(changes) / scale)
        self.check("gauge-invariance", worst, 1e-12)

    def verify_trace_identity(self):
        """eta^ij h_ij = L_A for chi in {0, 1/2, 1}"""
        points = self._points("trace-identity", cap=100)
        worst = 0.0
        for family in COVECTOR_FAMILIES.values():
            A = family()
            for x in points:
                la = vector_field.scalar_la(A, x)
                for chi in (0.0, 0.5, 1.0):
                    h = vector_field.blended_h(A, vector_field.BlendSpec(chi), x)
                    worst = max(worst, abs(vector_field.trace(h) - la) / _jacobian_scale(A, x))
        self.check("trace-identity", worst, 1e-12)

    def verify_maxwell_null_wave(self):
        """A null plane wave in Lorenz gauge solves the free Maxwell equations"""
        A = CovectorField([0, 0, sp.sin(X0 - X1), 0], label="null wave")
        worst = 0.0
        for x in self._points("maxwell-null-wave", cap=100):
            worst = max(
                worst,
                float(np.max(np.abs(vector_field.maxwell_residual(A, x)))),
                abs(vector_field.lorenz_gauge_residual(A, x)),
            )
        self.check("maxwell-null-wave", worst, 1e-12)

    def verify_two_field_minors(self):
        """Two-field L2 from brackets against the minor form of h"""
        pair = two_field.FieldPair(
            plane_wave([1.0, 0.5, -0.3, 0.2], amplitude=0.4),
            ScalarField(0.2 * X0 * X2 + 0.1 * X1 ** 2 - 0.3 * X3),
            eps_phi=1,
            eps_psi=-1,
        )
        worst = 0.0
        for x in self._points("two-field-minors"):
            h = two_field.metric_perturbation(pair, x)
            difference = abs(two_field.two_field_l2(pair, x) - tensor_core.l2_minors(h))
            worst = max(worst, difference / max(tensor_core.l2_term_scale(h), 1e-300))
        self.check("two-field-minors", worst, 1e-12)

    def verify_h4(self):
        """Product, polynomial and tensor forms of the H4 length and the momentum identities"""
        thresholds = {
            "h4-length-forms": 1e-12,
            "h4-minkowski-excess": 1e-12,
            "h4-indicatrix": 1e-10,
            "h4-euler": 1e-12,
            "h4-homogeneity": 1e-12,
        }
        for family, residual in h4_family_residuals(self.samples, self.seed).items():
            self.check(family, residual, thresholds[family])

    def verify_h4_self_duality(self):
        """The momentum-space tensor has the metric's component table"""
        difference = (berwald_moor.indicatrix_tensor() - berwald_moor.build_g4()).max_abs()
        self.check("h4-self-duality", difference, 1e-15)

    def verify_h4_em_trace(self):
        """g^ijkl h^(A)_ijkl = L_A for random polynomial fields"""
        rng = self._rng("h4-em-trace")
        points = self._points("h4-em-trace", cap=100)
        worst = 0.0
        for _ in range(5):
            A = random_polynomial_covector(rng, degree=3, terms=5)
            for x in points:
                h = berwald_moor.em_fourth_order(A, vector_field.BlendSpec(), x)
                difference = abs(berwald_moor.l1_fourth_order(h) - vector_field.scalar_la(A, x))
                worst = max(worst, difference / _jacobian_scale(A, x))
        self.check("h4-em-trace", worst, 1e-10)

    def suites(self) -> List[Tuple[str, Callable[[], None]]]:
        return [
            ("det-expansion", self.verify_determinant_expansion),
            ("det-second-order", self.verify_second_order_error),
            ("gauge-invariance", self.verify_gauge_invariance),
            ("trace-identity", self.verify_trace_identity),
            ("maxwell-null-wave", self.verify_maxwell_null_wave),
            ("two-field-minors", self.verify_two_field_minors),
            ("h4", self.verify_h4),
            ("h4-self-duality", self.verify_h4_self_duality),
            ("h4-em-trace", self.verify_h4_em_trace),
        ]

    def run_all_checks(self) -> bool:
        """Run every suite; a suite that raises is recorded as failed"""
        logger.info(f"Starting identity verification (samples={self.samples}, seed={self.seed:#x})")
        for name, suite in self.suites():
            try:
                suite()
            except FieldLabError as e:
                logger.error(f"suite {name} raised {e.code}: {e}")
                self.results.append(SuiteResult(name, math.inf, 0.0, error=e.code))
        passed = all(result.passed for result in self.results)
        logger.info(f"Verification {'PASSED' if passed else 'FAILED'}: "
                    f"{sum(r.passed for r in self.results)}/{len(self.results)} suites")
        return passed

    def generate_report(self) -> List[Dict[str, Any]]:
        return [result.to_dict() for result in self.results]
