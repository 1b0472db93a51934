"""
Analytic test fields on 4-dimensional spacetime.

Fields are sympy expressions in the coordinates x0..x3; exact first and second
partial derivatives are taken symbolically once and lambdified to numpy, so
identity checks never depend on finite-difference step sizes.
"""

from typing import Callable, Dict, Sequence

import numpy as np
import sympy as sp

from errors import DomainError

COORDS = sp.symbols("x0:4", real=True)
X0, X1, X2, X3 = COORDS


def _point(x: Sequence[float]) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (4,):
        raise DomainError(f"spacetime point must have 4 coordinates, got shape {x.shape}")
    return x


def _lambdify(expr) -> Callable:
    return sp.lambdify(COORDS, expr, modules="numpy")


class ScalarField:
    """Scalar field f(x) with exact gradient and Hessian"""

    arity = "scalar"

    def __init__(self, expr, label: str = ""):
        self.expr = sp.sympify(expr)
        self.label = label or str(self.expr)
        gradient = [sp.diff(self.expr, c) for c in COORDS]
        hessian = [[sp.diff(g, c) for c in COORDS] for g in gradient]
        self._value = _lambdify(self.expr)
        self._gradient = _lambdify(gradient)
        self._hessian = _lambdify(hessian)

    def value(self, x: Sequence[float]) -> float:
        return float(self._value(*_point(x)))

    def gradient(self, x: Sequence[float]) -> np.ndarray:
        """d_i f"""
        return np.array(self._gradient(*_point(x)), dtype=float)

    def hessian(self, x: Sequence[float]) -> np.ndarray:
        """d_i d_j f"""
        return np.array(self._hessian(*_point(x)), dtype=float)

    def gradient_field(self) -> "CovectorField":
        """d_i f as a covector field"""
        return CovectorField([sp.diff(self.expr, c) for c in COORDS], label=f"grad({self.label})")

    def __add__(self, other: "ScalarField") -> "ScalarField":
        return ScalarField(self.expr + other.expr, label=f"{self.label} + {other.label}")

    def scaled(self, factor: float) -> "ScalarField":
        return ScalarField(sp.Float(factor) * self.expr, label=f"{factor}*({self.label})")

    def __repr__(self) -> str:
        return f"ScalarField({self.label})"


class CovectorField:
    """Covector field A_k(x) with J[i, k] = d_i A_k and H[i, j, k] = d_i d_j A_k"""

    arity = "covector"

    def __init__(self, components: Sequence, label: str = ""):
        if len(components) != 4:
            raise DomainError(f"covector field needs 4 components, got {len(components)}")
        self.components = tuple(sp.sympify(c) for c in components)
        self.label = label or str(list(self.components))
        jacobian = [[sp.diff(a, c) for a in self.components] for c in COORDS]
        second = [[[sp.diff(a, ci, cj) for a in self.components] for cj in COORDS] for ci in COORDS]
        self._value = _lambdify(list(self.components))
        self._jacobian = _lambdify(jacobian)
        self._second = _lambdify(second)

    @classmethod
    def zero(cls) -> "CovectorField":
        return cls([0, 0, 0, 0], label="0")

    def value(self, x: Sequence[float]) -> np.ndarray:
        return np.array(self._value(*_point(x)), dtype=float)

    def jacobian(self, x: Sequence[float]) -> np.ndarray:
        return np.array(self._jacobian(*_point(x)), dtype=float)

    def second(self, x: Sequence[float]) -> np.ndarray:
        return np.array(self._second(*_point(x)), dtype=float)

    def gauge_shifted(self, f: ScalarField) -> "CovectorField":
        """A + df"""
        return CovectorField(
            [a + sp.diff(f.expr, c) for a, c in zip(self.components, COORDS)],
            label=f"{self.label} + grad({f.label})",
        )

    def __add__(self, other: "CovectorField") -> "CovectorField":
        return CovectorField(
            [a + b for a, b in zip(self.components, other.components)],
            label=f"{self.label} + {other.label}",
        )

    def __repr__(self) -> str:
        return f"CovectorField({self.label})"


def fd_jacobian(field: CovectorField, x: Sequence[float], step: float = 1e-5) -> np.ndarray:
    """Central-difference J[i, k]; cross-check only"""
    x = _point(x)
    out = np.empty((4, 4))
    for i in range(4):
        shift = np.zeros(4)
        shift[i] = step
        out[i] = (field.value(x + shift) - field.value(x - shift)) / (2.0 * step)
    return out


def plane_wave(k: Sequence[float], amplitude: float = 1.0, phase: float = 0.0) -> ScalarField:
    """amplitude * sin(k . x + phase) with k . x = sum k_i x^i"""
    argument = sum(sp.Float(ki) * c for ki, c in zip(k, COORDS)) + sp.Float(phase)
    return ScalarField(sp.Float(amplitude) * sp.sin(argument), label=f"{amplitude}*sin(k.x), k={list(k)}")


def polynomial(coefficients: Dict[Sequence[int], float], label: str = "") -> ScalarField:
    """Sum of c * x0^a0 x1^a1 x2^a2 x3^a3 for {(a0, a1, a2, a3): c}"""
    expr = sp.Integer(0)
    for exponents, coefficient in coefficients.items():
        monomial = sp.Integer(1)
        for c, power in zip(COORDS, exponents):
            monomial *= c ** int(power)
        expr += sp.nsimplify(coefficient) * monomial
    return ScalarField(expr, label=label)


def random_polynomial(rng: np.random.Generator, degree: int = 3, terms: int = 6) -> ScalarField:
    """Polynomial with small integer coefficients and random monomials of total degree <= degree"""
    coefficients = {}
    for _ in range(terms):
        exponents = np.zeros(4, dtype=int)
        for _ in range(int(rng.integers(0, degree + 1))):
            exponents[int(rng.integers(0, 4))] += 1
        coefficients[tuple(exponents)] = coefficients.get(tuple(exponents), 0) + int(rng.integers(-3, 4))
    return polynomial(coefficients, label="random polynomial")


def random_polynomial_covector(rng: np.random.Generator, degree: int = 3, terms: int = 6) -> CovectorField:
    return CovectorField(
        [random_polynomial(rng, degree, terms).expr for _ in range(4)],
        label="random polynomial covector",
    )


# built-in covector families
COVECTOR_FAMILIES: Dict[str, Callable[[], CovectorField]] = {
    "linear": lambda: CovectorField([0, X0, 0, 0], label="A_1 = x0"),
    "null-wave": lambda: CovectorField([0, 0, sp.sin(X0 - X1), 0], label="A_2 = sin(x0 - x1)"),
    "quadratic": lambda: CovectorField(
        [X1 * X2, X0 ** 2, X3 - X0 * X2, X1 * X3], label="quadratic polynomial"
    ),
    "cubic": lambda: CovectorField(
        [X0 * X1 * X2, X1 ** 3 - X3, X0 ** 2 * X3, X2 * X3 ** 2 + X0], label="cubic polynomial"
    ),
    "mixed-wave": lambda: CovectorField(
        [sp.Rational(3, 10) * sp.cos(X0 + X2), 0, X1 * X3, sp.Rational(1, 2) * sp.sin(2 * X0 - X1 + X3)],
        label="mixed trigonometric",
    ),
}

# polynomial gauge functions of degree <= 3
GAUGE_FUNCTIONS: Dict[str, Callable[[], ScalarField]] = {
    "x0*x1": lambda: ScalarField(X0 * X1),
    "x0^2-x3^2": lambda: ScalarField(X0 ** 2 - X3 ** 2),
    "x1*x2*x3": lambda: ScalarField(X1 * X2 * X3),
    "x0^3+x0*x2^2": lambda: ScalarField(X0 ** 3 + X0 * X2 ** 2),
    "1+x0-2x1x2+x3^3": lambda: ScalarField(1 + X0 - 2 * X1 * X2 + X3 ** 3),
}

# scalar wave solutions (box phi = 0) and non-solutions
SCALAR_FAMILIES: Dict[str, Callable[[], ScalarField]] = {
    "wave": lambda: ScalarField(sp.sin(X0 - X1), label="sin(x0 - x1)"),
    "oblique-wave": lambda: ScalarField(
        sp.cos(sp.Rational(5, 1) * X0 - 3 * X2 - 4 * X3), label="cos(5x0 - 3x2 - 4x3)"
    ),
    "time": lambda: ScalarField(X0, label="x0"),
    "bump": lambda: ScalarField(sp.exp(-(X1 ** 2 + X2 ** 2)) * X0, label="x0 exp(-x1^2 - x2^2)"),
}


def covector_family(name: str) -> CovectorField:
    if name not in COVECTOR_FAMILIES:
        raise DomainError(f"unknown covector family {name!r}; choose from {sorted(COVECTOR_FAMILIES)}")
    return COVECTOR_FAMILIES[name]()


def scalar_family(name: str) -> ScalarField:
    if name not in SCALAR_FAMILIES:
        raise DomainError(f"unknown scalar family {name!r}; choose from {sorted(SCALAR_FAMILIES)}")
    return SCALAR_FAMILIES[name]()
