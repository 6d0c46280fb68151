"""Plancherel densities ``C0 |c(lambda)|**-2`` and their calibration."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import gammaln, loggamma

from .eigenfn import EigenfunctionEvaluator
from .errors import CalibrationError, HypothesisError
from .model import Family, HypergroupModel, make_bessel_kingman, make_jacobi
from .transform import (TRANSFORM_TOL, QuadratureGrid, SpatialGrid, SpectralGrid,
                        character_table)

CALIBRATION_AGREEMENT = 1e-3
N_CROSSOVER_CANDIDATES = 32


@dataclass(frozen=True)
class SpectralDensity:
    model: HypergroupModel
    density: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    C0_calibration: float
    raw_density: Optional[Callable] = field(default=None, repr=False)


def bessel_kingman_constant(alpha: float) -> float:
    return math.exp(-2 * alpha * math.log(2.0) - 2 * gammaln(alpha + 1.0))


def density_bessel_kingman(alpha: float) -> SpectralDensity:
    """``density = lambda**(2a+1) / (2**(2a) Gamma(a+1)**2)``."""
    model = make_bessel_kingman(alpha)
    e = 2 * model.alpha + 1
    C0 = bessel_kingman_constant(model.alpha)

    def raw(lam):
        return np.abs(np.asarray(lam, dtype=float)) ** e

    return SpectralDensity(model, lambda lam: C0 * raw(lam), C0, raw)


def jacobi_c_inverse_squared(alpha: float, beta: float, lam) -> np.ndarray:
    """``|c(lambda)|**-2`` for the Jacobi c-function, via complex log-Gamma.

    ``c(l) = 2**(rho - i l) Gamma(a+1) Gamma(i l) / (Gamma((i l + rho)/2) Gamma((i l + a - b + 1)/2))``.
    """
    lam = np.abs(np.asarray(lam, dtype=float))
    rho = alpha + beta + 1.0
    zero = lam == 0
    z = 1j * np.where(zero, 1.0, lam)
    logc = (rho * math.log(2.0) + gammaln(alpha + 1.0) + loggamma(z)
            - loggamma((z + rho) / 2.0) - loggamma((z + alpha - beta + 1.0) / 2.0))
    return np.where(zero, 0.0, np.exp(-2.0 * logc.real))


def jacobi_analytic_constant(alpha: float, beta: float) -> float:
    """C0 for ``A = sinh**(2a+1) cosh**(2b+1)``; used only to cross-check calibration."""
    return 2.0 ** (2 * (alpha + beta + 1.0)) / (2 * math.pi)


def gaussian(x):
    return np.exp(-np.asarray(x) ** 2 / 2.0)


def odd_gaussian(x):
    x = np.asarray(x)
    return x * np.exp(-x ** 2)


def _plancherel_ratio(table, xgrid, lgrid, A, raw, f) -> tuple:
    fx = np.asarray(f(xgrid.nodes), dtype=float)
    norm2 = float(np.dot(xgrid.weights * A, fx * fx))
    F = table @ (xgrid.weights * A * fx)
    denom = float(np.dot(lgrid.weights * raw(lgrid.nodes), F * F))
    return norm2, denom


def calibrate(model: HypergroupModel, raw_density: Callable, f: Callable = gaussian,
              xgrid: Optional[SpatialGrid] = None, lgrid: Optional[SpectralGrid] = None,
              second: Optional[Callable] = odd_gaussian,
              ev: Optional[EigenfunctionEvaluator] = None, threads: int = 1) -> SpectralDensity:
    """Fix ``C0 = ||f||**2 / int |f_hat|**2 raw_density``.

    A second, independent test function must reproduce ``C0`` to
    :data:`CALIBRATION_AGREEMENT`; otherwise :class:`CalibrationError`.
    """
    xgrid = xgrid if xgrid is not None else SpatialGrid.default()
    lgrid = lgrid if lgrid is not None else SpectralGrid.default()
    ev = ev if ev is not None else EigenfunctionEvaluator(model, rtol=TRANSFORM_TOL,
                                                          atol=TRANSFORM_TOL)
    table = character_table(ev, xgrid, lgrid, threads)
    with np.errstate(all="ignore"):
        A = np.nan_to_num(np.asarray(model.weight(xgrid.nodes), dtype=float))

    def c0_for(func):
        norm2, denom = _plancherel_ratio(table, xgrid, lgrid, A, raw_density, func)
        if not denom > 1e-12 * norm2:
            raise CalibrationError("degenerate density: spectral energy vanishes")
        return norm2 / denom

    C0 = c0_for(f)
    if second is not None:
        C0b = c0_for(second)
        if abs(C0b - C0) > CALIBRATION_AGREEMENT * C0:
            raise CalibrationError(f"calibration not reproducible: {C0:.6g} vs {C0b:.6g}")
    return SpectralDensity(model, lambda lam: C0 * raw_density(lam), C0, raw_density)


def density_jacobi(alpha: float, beta: float, xgrid: Optional[SpatialGrid] = None,
                   lgrid: Optional[SpectralGrid] = None, threads: int = 1) -> SpectralDensity:
    model = make_jacobi(alpha, beta)

    def raw(lam):
        return jacobi_c_inverse_squared(model.alpha, model.beta, lam)

    return calibrate(model, raw, gaussian, xgrid, lgrid, threads=threads)


def default_density(model: HypergroupModel, transformer=None) -> SpectralDensity:
    if model.family is Family.BESSEL_KINGMAN:
        return density_bessel_kingman(model.alpha)
    if model.family is Family.JACOBI:
        kw = {}
        if transformer is not None:
            kw = dict(xgrid=transformer.xgrid, lgrid=transformer.lgrid,
                      threads=transformer.threads)
        sd = density_jacobi(model.alpha, model.beta, **kw)
        return SpectralDensity(model, sd.density, sd.C0_calibration, sd.raw_density)
    raise HypothesisError("custom models have no closed-form density; calibrate a raw density")


@dataclass
class ExponentFit:
    a_fit: float
    alpha_fit: float
    K_fit: float
    residual: float
    C1: float = float("nan")
    C2: float = float("nan")
    envelope_ok: bool = False

    def as_dict(self) -> dict:
        return dict(a_fit=self.a_fit, alpha_fit=self.alpha_fit, K_fit=self.K_fit,
                    residual=self.residual, C1=self.C1, C2=self.C2,
                    envelope_ok=self.envelope_ok)


def _line(x, y):
    X = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    r = y - X @ coef
    return coef[0], float(r @ r)


def fit_density_exponents(sd: SpectralDensity, lam_min: float = 1e-3, lam_max: float = 1e2,
                          n: int = 400) -> ExponentFit:
    """Two-regime log-log slope fit; slopes are ``2a+1`` and ``2 alpha + 1``.

    The crossover ``K`` is the candidate (32, log-spaced) that minimises the
    combined residual of the two straight-line fits.
    """
    lam = np.geomspace(lam_min, lam_max, n)
    d = sd.density(lam)
    if np.any(d <= 0) or not np.all(np.isfinite(d)):
        raise HypothesisError("density must be positive and finite on the fit range")
    x, y = np.log(lam), np.log(d)
    cands = np.geomspace(lam_min * 10, lam_max / 10, N_CROSSOVER_CANDIDATES)
    best = None
    for K in cands:
        left = lam <= K
        s1, r1 = _line(x[left], y[left])
        s2, r2 = _line(x[~left], y[~left])
        if best is None or r1 + r2 < best[0]:
            best = (r1 + r2, K, s1, s2)
    res, K, s1, s2 = best
    fit = ExponentFit(float((s1 - 1) / 2), float((s2 - 1) / 2), float(K), float(res))
    C1, C2, ok = regime_constants(sd, fit.a_fit, fit.alpha_fit, fit.K_fit, lam_min, lam_max, n)
    fit.C1, fit.C2, fit.envelope_ok = C1, C2, ok
    return fit


def regime_constants(sd: SpectralDensity, a: float, alpha: float, K: float,
                     lam_min: float = 1e-3, lam_max: float = 1e2, n: int = 400):
    """Sandwich constants with ``C1**2 lam**(2a+1) <= density <= C2**2 lam**(2a+1)`` on (0, K]
    and the ``alpha`` analogue beyond; ``ok`` means ``C2/C1 < 10``."""
    lam = np.geomspace(lam_min, lam_max, n)
    d = sd.density(lam)
    power = np.where(lam <= K, lam ** (2 * a + 1), lam ** (2 * alpha + 1))
    r = np.sqrt(d / power)
    C1, C2 = float(r.min()), float(r.max())
    return C1, C2, bool(C2 / C1 < 10)


def plancherel_defect(tr, f) -> float:
    """``| ||f||_2**2 - int |f_hat|**2 dpi | / ||f||_2**2`` on the transformer's grids."""
    from .transform import lp_norm, spectral_lp_norm

    n2 = lp_norm(f, 2) ** 2
    F = tr.forward(f, check=False)
    return abs(n2 - spectral_lp_norm(F, tr.sd, 2) ** 2) / n2


def parseval_defect(tr, f1, f2) -> float:
    from .transform import lp_norm

    inner = float(np.dot(tr.xgrid.weights * tr.A, f1.values * f2.values))
    F1, F2 = tr.forward(f1, check=False), tr.forward(f2, check=False)
    spec = float(np.dot(tr.dpi, F1.values * F2.values))
    return abs(inner - spec) / (lp_norm(f1, 2) * lp_norm(f2, 2))
