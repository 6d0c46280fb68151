"""Quadrature grids, the forward/inverse hypergroup Fourier transform and weighted norms.

The transform is dense: a table of characters ``phi_lambda(x)`` on the
product of a spatial and a spectral composite Gauss-Legendre grid is built
once and reused for every forward and inverse application.
"""
from __future__ import annotations

import threading
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .eigenfn import EigenfunctionEvaluator
from .errors import HypothesisError

GL_ORDER = 16
DEFAULT_X_MAX = 12.0
DEFAULT_LAMBDA_MAX = 40.0
# 16-point Gauss-Legendre integrates cos(k x) to ~1e-16 on panels with k*h <= 8
OSCILLATION_BUDGET = 8.0
# stricter than the evaluator default so transform errors stay quadrature-limited
TRANSFORM_TOL = 1e-12


@dataclass(frozen=True)
class QuadratureGrid:
    """Nodes and weights of a quadrature rule for ``dx`` on ``[0, upper]``."""

    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    upper: float
    key: tuple = ()

    @classmethod
    def composite(cls, upper: float, panel: float, order: int = GL_ORDER,
                  levels: int = 8):
        """Gauss-Legendre panels: dyadic on ``[0, 1]``, uniform of width ``<= panel`` beyond.

        The dyadic panels resolve the ``x**(2 alpha + 1)`` behaviour at the origin.
        """
        upper, panel = float(upper), float(panel)
        if upper <= 0 or panel <= 0:
            raise ValueError("upper and panel must be positive")
        t, w = np.polynomial.legendre.leggauss(order)
        head = min(1.0, upper)
        edges = [0.0] + [head * 2.0 ** -k for k in range(levels, 0, -1)] + [head]
        if upper > 1.0:
            m = int(np.ceil((upper - 1.0) / panel - 1e-12))
            edges += list(np.linspace(1.0, upper, m + 1)[1:])
        e = np.asarray(edges)
        a, b = e[:-1], e[1:]
        nodes = ((b - a)[:, None] * (t + 1.0) / 2.0 + a[:, None]).ravel()
        weights = ((b - a)[:, None] * w / 2.0).ravel()
        return cls(nodes, weights, upper, (cls.__name__, upper, panel, order, levels))

    @property
    def size(self) -> int:
        return self.nodes.size

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


class SpatialGrid(QuadratureGrid):
    @classmethod
    def default(cls, x_max: float = DEFAULT_X_MAX, lambda_max: float = DEFAULT_LAMBDA_MAX,
                order: int = GL_ORDER, panel: Optional[float] = None):
        return cls.composite(x_max, panel or min(1.0, OSCILLATION_BUDGET / lambda_max), order)


class SpectralGrid(QuadratureGrid):
    @classmethod
    def default(cls, x_max: float = DEFAULT_X_MAX, lambda_max: float = DEFAULT_LAMBDA_MAX,
                order: int = GL_ORDER, panel: Optional[float] = None):
        return cls.composite(lambda_max, panel or min(1.0, OSCILLATION_BUDGET / x_max), order)


@dataclass(frozen=True)
class WeightedSignal:
    """Samples of ``f`` on a spatial grid; norms use the measure ``A(x) dx``."""

    grid: SpatialGrid
    values: np.ndarray = field(repr=False)
    model: object = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.nodes.shape:
            raise ValueError("signal values do not match grid")
        if not np.all(np.isfinite(v)):
            raise ValueError("signal values must be finite")
        object.__setattr__(self, "values", v)

    @classmethod
    def sample(cls, func: Callable, grid: SpatialGrid, model) -> "WeightedSignal":
        return cls(grid, np.asarray(func(grid.nodes), dtype=float), model)

    def scaled(self, c: float) -> "WeightedSignal":
        return WeightedSignal(self.grid, c * self.values, self.model)

    def __add__(self, other: "WeightedSignal") -> "WeightedSignal":
        return WeightedSignal(self.grid, self.values + other.values, self.model)

    def __sub__(self, other: "WeightedSignal") -> "WeightedSignal":
        return WeightedSignal(self.grid, self.values - other.values, self.model)


@dataclass(frozen=True)
class Spectrum:
    grid: SpectralGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.nodes.shape:
            raise ValueError("spectrum values do not match grid")
        if not np.all(np.isfinite(v)):
            raise ValueError("spectrum values must be finite")
        object.__setattr__(self, "values", v)


def _weight_on(grid: QuadratureGrid, model) -> np.ndarray:
    with np.errstate(all="ignore"):
        return np.nan_to_num(np.asarray(model.weight(grid.nodes), dtype=float))


def lp_norm(f: WeightedSignal, p: float) -> float:
    """``(sum w_i |f_i|**p A(x_i))**(1/p)``; ``p = inf`` gives ``max |f|``."""
    if p == np.inf:
        return float(np.max(np.abs(f.values)))
    if p < 1:
        raise ValueError("p must be >= 1")
    A = _weight_on(f.grid, f.model)
    return float(np.dot(f.grid.weights * A, np.abs(f.values) ** p) ** (1.0 / p))


def spectral_lp_norm(F: Spectrum, sd, p: float) -> float:
    if p == np.inf:
        return float(np.max(np.abs(F.values)))
    if p < 1:
        raise ValueError("p must be >= 1")
    d = sd.density(F.grid.nodes)
    return float(np.dot(F.grid.weights * d, np.abs(F.values) ** p) ** (1.0 / p))


_TABLES: dict = {}
_TABLES_LOCK = threading.Lock()


def character_table(ev: EigenfunctionEvaluator, xgrid: QuadratureGrid,
                    lgrid: QuadratureGrid, threads: int = 1) -> np.ndarray:
    """Cached ``phi[j, i] = phi_{lambda_j}(x_i)``; read-only."""
    key = (ev.model.key, ev.x0, ev.rtol, ev.atol, xgrid.key, lgrid.key)
    with _TABLES_LOCK:
        table = _TABLES.get(key)
    if table is None:
        table = ev.evaluate_matrix(lgrid.nodes, xgrid.nodes, threads=threads)
        table.setflags(write=False)
        with _TABLES_LOCK:
            _TABLES.setdefault(key, table)
    return table


class Transformer:
    """Forward and inverse transforms for one model on a fixed pair of grids."""

    def __init__(self, model, sd=None, xgrid: Optional[SpatialGrid] = None,
                 lgrid: Optional[SpectralGrid] = None,
                 ev: Optional[EigenfunctionEvaluator] = None, threads: int = 1):
        self.model = model
        self.xgrid = xgrid if xgrid is not None else SpatialGrid.default()
        self.lgrid = lgrid if lgrid is not None else SpectralGrid.default()
        self.ev = ev if ev is not None else EigenfunctionEvaluator(
            model, rtol=TRANSFORM_TOL, atol=TRANSFORM_TOL)
        if self.ev.model.key != model.key:
            raise HypothesisError("evaluator built for a different model")
        self.threads = threads
        self.table = character_table(self.ev, self.xgrid, self.lgrid, threads)
        self.A = _weight_on(self.xgrid, model)
        if sd is None:
            from .plancherel import default_density

            sd = default_density(model, self)
        if sd.model.key != model.key:
            raise HypothesisError("spectral density built for a different model")
        self.sd = sd
        self.dpi = self.lgrid.weights * sd.density(self.lgrid.nodes)

    def signal(self, func: Callable) -> WeightedSignal:
        return WeightedSignal.sample(func, self.xgrid, self.model)

    def forward_values(self, values: np.ndarray) -> np.ndarray:
        return self.table @ (self.xgrid.weights * self.A * values)

    def inverse_values(self, values: np.ndarray) -> np.ndarray:
        return self.table.T @ (self.dpi * values)

    def forward(self, f: WeightedSignal, check: bool = True) -> Spectrum:
        if f.grid.key != self.xgrid.key:
            raise HypothesisError("signal grid does not match transformer grid")
        if check:
            tail = abs(f.values[-1]) * self.A[-1]
            l1 = lp_norm(f, 1)
            if l1 > 0 and tail >= 1e-10 * l1:
                warnings.warn(f"signal not decayed at X_max: tail {tail:.3g}, L1 {l1:.3g}",
                              stacklevel=2)
        return Spectrum(self.lgrid, self.forward_values(f.values))

    def inverse(self, F: Spectrum, check: bool = True) -> WeightedSignal:
        if F.grid.key != self.lgrid.key:
            raise HypothesisError("spectrum grid does not match transformer grid")
        if check:
            peak = np.max(np.abs(F.values))
            if peak > 0 and abs(F.values[-1]) >= 1e-10 * peak:
                warnings.warn("spectrum not decayed at Lambda_max", stacklevel=2)
        return WeightedSignal(self.xgrid, self.inverse_values(F.values), self.model)

    def round_trip_error(self, f: WeightedSignal) -> float:
        back = self.inverse(self.forward(f, check=False), check=False)
        return lp_norm(back - f, 2) / lp_norm(f, 2)


def forward(model, sd, f: WeightedSignal, out: SpectralGrid,
            ev: EigenfunctionEvaluator) -> Spectrum:
    """``f_hat(lambda_j) = sum_i w_i f(x_i) phi_{lambda_j}(x_i) A(x_i)``."""
    if ev.model.key != model.key or f.model.key != model.key:
        raise HypothesisError("grid/evaluator model mismatch")
    return Transformer(model, sd, f.grid, out, ev).forward(f)


def inverse(model, sd, F: Spectrum, out: SpatialGrid,
            ev: EigenfunctionEvaluator) -> WeightedSignal:
    """``f(x_i) = sum_j v_j F(lambda_j) phi_{lambda_j}(x_i) density(lambda_j)``."""
    if ev.model.key != model.key:
        raise HypothesisError("grid/evaluator model mismatch")
    return Transformer(model, sd, out, F.grid, ev).inverse(F)
