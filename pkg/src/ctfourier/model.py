"""Chebli-Trimeche weight families.

A model bundles the weight ``A`` of the half-line hypergroup, its
logarithmic derivative ``A'/A`` and the scalar constants consumed
downstream: the growth rate ``rho``, the origin exponent ``alpha`` and the
two constants ``a`` and ``K`` of the two-regime c-function estimate.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import HypothesisError

RealFunc = Callable[[np.ndarray], np.ndarray]

# estimation point and tolerance for rho-hat
RHO_PROBE_X = 80.0
RHO_TOL = 0.03


class Family(str, enum.Enum):
    BESSEL_KINGMAN = "bessel-kingman"
    JACOBI = "jacobi"
    CUSTOM = "custom"


@dataclass(frozen=True)
class HypergroupModel:
    family: Family
    alpha: float
    rho: float
    a_exponent: float
    K_crossover: float
    weight: RealFunc = field(repr=False, compare=False)
    log_deriv: RealFunc = field(repr=False, compare=False)
    beta: Optional[float] = None
    # analytic d/dx (A'/A); None means central differences
    log_deriv_prime: Optional[RealFunc] = field(default=None, repr=False, compare=False)
    # B(x) ~ origin_slope * x near 0, feeds the x^4 Frobenius coefficient
    origin_slope: Optional[float] = None
    name: str = ""

    @property
    def key(self) -> tuple:
        """Hashable identity used for caching derived tables."""
        if self.family is Family.CUSTOM:
            return (self.family.value, self.name, self.alpha, self.rho, id(self.weight))
        return (self.family.value, self.alpha, self.beta)

    def with_crossover(self, K: float) -> "HypergroupModel":
        from dataclasses import replace

        if not K > 0:
            raise HypothesisError(f"K_crossover must be positive, got {K}")
        return replace(self, K_crossover=float(K))


def make_bessel_kingman(alpha: float) -> HypergroupModel:
    """Bessel-Kingman hypergroup with ``A(x) = x**(2*alpha+1)``."""
    alpha = float(alpha)
    if not alpha > -0.5:
        raise HypothesisError(f"Bessel-Kingman requires alpha > -1/2, got {alpha}")
    e = 2.0 * alpha + 1.0

    def weight(x):
        return np.power(x, e)

    def log_deriv(x):
        return e / np.asarray(x, dtype=float)

    def log_deriv_prime(x):
        return -e / np.asarray(x, dtype=float) ** 2

    return HypergroupModel(
        family=Family.BESSEL_KINGMAN,
        alpha=alpha,
        rho=0.0,
        a_exponent=alpha,
        K_crossover=1.0,
        weight=weight,
        log_deriv=log_deriv,
        log_deriv_prime=log_deriv_prime,
        origin_slope=0.0,
        name=f"bessel-kingman(alpha={alpha:g})",
    )


def make_jacobi(alpha: float, beta: float) -> HypergroupModel:
    """Jacobi hypergroup with ``A(x) = sinh(x)**(2a+1) * cosh(x)**(2b+1)``.

    The small-frequency exponent is fixed at ``a = 1/2``, the value forced by
    ``|c(lambda)|**-1 ~ |lambda|`` near zero.
    """
    alpha, beta = float(alpha), float(beta)
    if not (alpha >= beta >= -0.5) or alpha == -0.5:
        raise HypothesisError(
            f"Jacobi requires alpha >= beta >= -1/2 and alpha != -1/2, got ({alpha}, {beta})"
        )
    es, ec = 2.0 * alpha + 1.0, 2.0 * beta + 1.0

    def weight(x):
        x = np.asarray(x, dtype=float)
        return np.sinh(x) ** es * np.cosh(x) ** ec

    def log_deriv(x):
        x = np.asarray(x, dtype=float)
        return es / np.tanh(x) + ec * np.tanh(x)

    def log_deriv_prime(x):
        x = np.asarray(x, dtype=float)
        return -es / np.sinh(x) ** 2 + ec / np.cosh(x) ** 2

    return HypergroupModel(
        family=Family.JACOBI,
        alpha=alpha,
        beta=beta,
        rho=alpha + beta + 1.0,
        a_exponent=0.5,
        K_crossover=1.0,
        weight=weight,
        log_deriv=log_deriv,
        log_deriv_prime=log_deriv_prime,
        # coth x = 1/x + x/3 + ..., tanh x = x + ...
        origin_slope=es / 3.0 + ec,
        name=f"jacobi(alpha={alpha:g},beta={beta:g})",
    )


def make_custom(
    weight: RealFunc,
    log_deriv: RealFunc,
    alpha: float,
    rho: float,
    a_exponent: float,
    K_crossover: float,
    name: str = "custom",
) -> HypergroupModel:
    """Wrap caller-supplied ``A`` and ``A'/A``; axioms are checked by :func:`validate_axioms`."""
    return HypergroupModel(
        family=Family.CUSTOM,
        alpha=float(alpha),
        rho=float(rho),
        a_exponent=float(a_exponent),
        K_crossover=float(K_crossover),
        weight=weight,
        log_deriv=log_deriv,
        name=name,
    )


def custom_from_form(form: str, alpha: float, beta: Optional[float] = None,
                     rho: Optional[float] = None, a: Optional[float] = None,
                     K: float = 1.0) -> HypergroupModel:
    """Build a custom model from one of the named expression forms.

    ``power``: ``A = x**(2 alpha + 1)``; ``sinh-cosh``: ``A = sinh**(2 alpha + 1) cosh**(2 beta + 1)``.
    """
    alpha = float(alpha)
    if form == "power":
        e = 2 * alpha + 1
        return make_custom(
            lambda x: np.power(x, e),
            lambda x: e / np.asarray(x, dtype=float),
            alpha,
            0.0 if rho is None else rho,
            alpha if a is None else a,
            K,
            name=f"custom-power(alpha={alpha:g})",
        )
    if form == "sinh-cosh":
        beta = -0.5 if beta is None else float(beta)
        es, ec = 2 * alpha + 1, 2 * beta + 1
        return make_custom(
            lambda x: np.sinh(x) ** es * np.cosh(x) ** ec,
            lambda x: es / np.tanh(x) + ec * np.tanh(x),
            alpha,
            (es + ec) / 2 if rho is None else rho,
            0.5 if a is None else a,
            K,
            name=f"custom-sinh-cosh(alpha={alpha:g},beta={beta:g})",
        )
    raise HypothesisError(f"unknown custom weight form {form!r}")


def log_deriv_prime(model: HypergroupModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if model.log_deriv_prime is not None:
        return model.log_deriv_prime(x)
    h = 1e-5 * np.maximum(1.0, x)
    return (model.log_deriv(x + h) - model.log_deriv(x - h)) / (2 * h)


def g_function(model: HypergroupModel, x) -> np.ndarray:
    """``G = (A'/A)**2 / 4 + (A'/A)' / 2 - rho**2``, the Condition (P) potential."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise HypothesisError("g_function needs x > 0")
    L = model.log_deriv(x)
    return 0.25 * L * L + 0.5 * log_deriv_prime(model, x) - model.rho ** 2


def origin_slope(model: HypergroupModel) -> float:
    """Slope ``b1`` of the regular part ``A'/A - (2 alpha + 1)/x = b1 x + O(x**3)``."""
    if model.origin_slope is not None:
        return model.origin_slope
    h = 1e-2
    return float((model.log_deriv(h) - (2 * model.alpha + 1) / h) / h)


@dataclass
class AxiomCheck:
    passed: bool
    worst_x: Optional[float]
    worst_value: float
    detail: str = ""


@dataclass
class AxiomReport:
    checks: dict
    rho_hat: float
    rho_consistent: bool

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "rho_hat": self.rho_hat,
            "rho_consistent": self.rho_consistent,
            "checks": {
                k: {"passed": c.passed, "worst_x": c.worst_x, "worst_value": c.worst_value,
                    "detail": c.detail}
                for k, c in self.checks.items()
            },
        }


def _eval(func, x):
    with np.errstate(all="ignore"):
        return np.asarray(func(np.asarray(x, dtype=float)), dtype=float)


def validate_axioms(model: HypergroupModel, grid) -> AxiomReport:
    """Scan the four Chebli-Trimeche axioms on ``grid``.

    (i) ``A(0) = 0`` and ``A > 0``; (ii) ``A`` increasing; (iii) ``A'/A``
    decreasing; (iv) ``A'/A - (2 alpha + 1)/x`` bounded near 0.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise HypothesisError("validate_axioms needs a nonempty grid")
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise HypothesisError("grid must be positive and strictly increasing")

    A = _eval(model.weight, grid)
    L = _eval(model.log_deriv, grid)
    checks = {}

    A0 = float(_eval(model.weight, 0.0))
    if not np.isfinite(A0):
        A0 = float(_eval(model.weight, grid[0] * 1e-6))
    scale = max(1.0, float(np.nanmax(np.abs(A))))
    bad_pos = ~(A > 0)
    if bad_pos.any():
        i = int(np.argmax(bad_pos))
        checks["vanishing_positive"] = AxiomCheck(False, float(grid[i]), float(A[i]), "A not positive")
    else:
        ok = abs(A0) <= 1e-12 * scale
        checks["vanishing_positive"] = AxiomCheck(ok, 0.0 if not ok else None, A0, "A(0)")

    dA = np.diff(A)
    i = int(np.argmin(dA)) if dA.size else 0
    ok = bool(dA.size == 0 or (np.all(np.isfinite(dA)) and dA[i] > 0))
    checks["increasing"] = AxiomCheck(ok, float(grid[i + 1]) if dA.size else None,
                                      float(dA[i]) if dA.size else 0.0)

    dL = np.diff(L)
    tol = 1e-12 * np.maximum(1.0, np.abs(L[1:]))
    excess = dL - tol
    i = int(np.argmax(excess)) if dL.size else 0
    ok = bool(dL.size == 0 or (np.all(np.isfinite(dL)) and excess[i] <= 0))
    checks["log_deriv_decreasing"] = AxiomCheck(ok, float(grid[i + 1]) if dL.size else None,
                                                float(dL[i]) if dL.size else 0.0)

    near = grid <= 10 * grid[0]
    xs = grid[near]
    remainder = xs * np.abs(L[near] - (2 * model.alpha + 1) / xs)
    i = int(np.nanargmax(remainder))
    ok = bool(np.all(np.isfinite(remainder)) and remainder[i] < 1e-3 * max(1.0, 2 * model.alpha + 1))
    checks["origin_singularity"] = AxiomCheck(ok, float(xs[i]), float(remainder[i]),
                                              "x*|A'/A - (2a+1)/x| near 0")

    rho_hat = 0.5 * float(L[-1])
    return AxiomReport(checks, rho_hat, bool(abs(rho_hat - model.rho) <= RHO_TOL))


def estimate_rho(model: HypergroupModel, x: float = RHO_PROBE_X) -> float:
    return 0.5 * float(model.log_deriv(np.asarray(x, dtype=float)))
