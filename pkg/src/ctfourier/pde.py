"""Picard iteration for ``u_t = |B u|**p`` and ``u_tt = b(t) |B u|**p``.

Both problems are solved in integral form on a uniform time grid with the
left-endpoint rule, so iterate ``k+1`` at ``t_m`` only uses iterate ``k`` at
earlier nodes. The spatial side uses a :class:`~ctfourier.transform.Transformer`
to apply the Fourier multiplier ``B``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .errors import HypothesisError, NumericalError
from .inequalities import level_set_sup
from .transform import WeightedSignal

BLOWUP_FACTOR = 1e3


@dataclass
class PicardRun:
    kind: str
    times: np.ndarray = field(repr=False)
    states: np.ndarray = field(repr=False)
    iterations: int
    residuals: List[float]
    c: float
    T_star: float
    in_set: List[bool]
    converged: bool
    norms: List[float] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def final_values(self) -> np.ndarray:
        return self.states[-1]

    @property
    def contraction_ok(self) -> bool:
        """Residuals strictly decrease from the first one below 1."""
        r = np.asarray(self.residuals)
        below = np.nonzero(r < 1)[0]
        if below.size == 0:
            return r.size == 0
        tail = r[below[0]:]
        return bool(np.all(np.diff(tail) < 0) or np.all(tail == 0))

    def as_dict(self) -> dict:
        return dict(kind=self.kind, T=float(self.times[-1]), steps=len(self.times) - 1,
                    iterations=self.iterations, residuals=list(map(float, self.residuals)),
                    converged=self.converged, contraction_ok=self.contraction_ok,
                    c=self.c, T_star=self.T_star, in_set=list(map(bool, self.in_set)),
                    norms=list(map(float, self.norms)), meta=self.meta)


def heat_t_star(u0_norm: float, c: float, p_exp: float) -> float:
    """``sqrt(c**2 - 1) / (c**p ||u0||**(p-1))``.

    The ``p - 1`` power on ``||u0||`` is what the sufficient condition
    ``||u0||**2 + T**2 c**(2p) ||u0||**(2p) <= c**2 ||u0||**2`` actually gives.
    """
    if c < 1:
        raise HypothesisError("c must be >= 1")
    if u0_norm == 0:
        return math.inf
    return math.sqrt(c * c - 1) / (c ** p_exp * u0_norm ** (p_exp - 1))


def heat_t_star_printed(u0_norm: float, c: float, p_exp: float) -> float:
    """The printed variant with ``||u0||`` to the first power; kept for run metadata."""
    if u0_norm == 0:
        return math.inf
    return math.sqrt(c * c - 1) / (c ** p_exp * u0_norm)


def wave_t_star(u0_norm: float, u1_norm: float, b_l2: float, c: float, p_exp: float) -> float:
    """``min_k ((c-1) / (||b||**2 c**p ||u_k||**(2p-2)))**(1/3)`` over ``k = 0, 1``."""
    if c < 1:
        raise HypothesisError("c must be >= 1")
    if not b_l2 > 0:
        raise HypothesisError("||b||_{L2(0,T)} must be positive")
    out = math.inf
    for n in (u0_norm, u1_norm):
        den = b_l2 ** 2 * c ** p_exp * n ** (2 * p_exp - 2)
        if den > 0:
            out = min(out, ((c - 1) / den) ** (1 / 3))
    return out


def b_l2_norm(b_coeff: Callable, horizon: float, dt: float) -> float:
    """Left-endpoint ``||b||_{L2(0, horizon)}`` with the solver's step ``dt``."""
    n = max(1, int(round(horizon / dt)))
    h = horizon / n
    t = h * np.arange(n)
    return float(math.sqrt(h * np.sum(np.asarray(b_coeff(t), dtype=float) ** 2)))


def symbol_functional(B, tr) -> float:
    """``sup_s s * pi{|h| >= s}`` on the spectral grid (the symbol hypothesis)."""
    vals = np.abs(np.asarray(B(tr.lgrid.nodes), dtype=float))
    if not np.all(np.isfinite(vals)):
        raise HypothesisError("symbol not finite on the spectral grid")
    return level_set_sup(vals, tr.dpi, 1.0)


def _l2(tr, v):
    w = tr.xgrid.weights * tr.A
    return np.sqrt(np.einsum("i,...i->...", w, v * v))


def _picard(kind, tr, B, p_exp, base, kernel, tol, max_iters, guard, raise_on_failure):
    """Iterate ``u = base + kernel @ |B u|**p`` over the time grid."""
    hv = np.asarray(B(tr.lgrid.nodes), dtype=float)
    u = base.copy()
    residuals = []
    converged = False
    for _ in range(max_iters):
        Bu = (tr.table.T @ (tr.dpi[:, None] * hv[:, None] * (tr.table @ (
            (tr.xgrid.weights * tr.A)[:, None] * u[:-1].T)))).T
        new = base + kernel @ (np.abs(Bu) ** p_exp)
        if not np.all(np.isfinite(new)):
            raise NumericalError(f"{kind}: non-finite Picard iterate")
        res = float(np.max(_l2(tr, new - u)))
        residuals.append(res)
        u = new
        if np.max(_l2(tr, u)) > guard:
            raise NumericalError(f"{kind}: blow-up guard exceeded")
        if res < tol:
            converged = True
            break
    if not converged and raise_on_failure:
        raise NumericalError(f"{kind}: no convergence after {max_iters} iterations "
                             f"(last residual {residuals[-1]:.3g})")
    return u, residuals, converged


def solve_heat(tr, B, p_exp: float, u0: WeightedSignal, T: float, M: int, c: float = 2.0,
               tol: float = 1e-10, max_iters: int = 50, raise_on_failure: bool = True,
               blowup: float = BLOWUP_FACTOR) -> PicardRun:
    """Picard iteration for ``u(t) = u0 + int_0^t |B u|**p``; monitors ``S_c``."""
    if not p_exp > 1:
        raise HypothesisError("nonlinearity exponent must exceed 1")
    if c < 1:
        raise HypothesisError("c must be >= 1")
    functional = symbol_functional(B, tr)
    n0 = float(_l2(tr, u0.values))
    t_star = heat_t_star(n0, c, p_exp)
    beyond = T > t_star
    if beyond:
        warnings.warn(f"T={T:g} exceeds T*={t_star:g}; S_c invariance not guaranteed", stacklevel=2)
    times = np.linspace(0.0, T, M + 1)
    dt = T / M
    kernel = dt * np.tril(np.ones((M + 1, M)), -1)
    base = np.tile(u0.values, (M + 1, 1))
    guard = blowup * n0 if n0 > 0 else np.inf
    u, residuals, converged = _picard("heat", tr, B, p_exp, base, kernel, tol, max_iters,
                                      guard, raise_on_failure)
    norms = _l2(tr, u)
    in_set = list(norms <= c * n0 * (1 + 1e-12) + 1e-300)
    meta = dict(u0_norm=n0, beyond_t_star=beyond, symbol_functional=functional,
                T_star_printed=heat_t_star_printed(n0, c, p_exp), p_exp=p_exp, dt=dt)
    return PicardRun("heat", times, u, len(residuals), residuals, c, t_star, in_set,
                     converged, list(norms), meta)


def solve_wave(tr, B, p_exp: float, b_coeff: Callable, u0: WeightedSignal,
               u1: WeightedSignal, T: float, M: int, c: float = 2.0, tol: float = 1e-10,
               max_iters: int = 50, horizon: Optional[float] = None,
               raise_on_failure: bool = True, blowup: float = BLOWUP_FACTOR) -> PicardRun:
    """Picard iteration for ``u(t) = u0 + t u1 + int_0^t (t - s) b(s) |B u(s)|**p ds``.

    ``||b||_{L2}`` entering ``T*`` is evaluated on ``[0, horizon]`` (default ``T``);
    the run is inside the guaranteed window when ``T <= min(T*, horizon)``.
    """
    if not p_exp >= 1:
        raise HypothesisError("nonlinearity exponent must be >= 1")
    if c < 1:
        raise HypothesisError("c must be >= 1")
    functional = symbol_functional(B, tr)
    horizon = T if horizon is None else float(horizon)
    times = np.linspace(0.0, T, M + 1)
    dt = T / M
    bvals = np.asarray(b_coeff(times[:-1]), dtype=float)
    if np.any(bvals < 0) or not np.all(np.isfinite(bvals)):
        raise HypothesisError("b must be nonnegative and finite")
    b_l2 = b_l2_norm(b_coeff, horizon, dt)
    n0, n1 = float(_l2(tr, u0.values)), float(_l2(tr, u1.values))
    t_star = wave_t_star(n0, n1, b_l2, c, p_exp) if b_l2 > 0 else math.inf
    beyond = T > min(t_star, horizon)
    if beyond:
        warnings.warn(f"T={T:g} exceeds min(T*, horizon)={min(t_star, horizon):g}", stacklevel=2)
    lag = times[:, None] - times[None, :-1]
    kernel = np.where(lag > 0, dt * lag * bvals[None, :], 0.0)
    base = u0.values[None, :] + times[:, None] * u1.values[None, :]
    radius2 = c * (n0 ** 2 + T ** 2 * n1 ** 2)
    guard = blowup * math.sqrt(radius2) if radius2 > 0 else np.inf
    u, residuals, converged = _picard("wave", tr, B, p_exp, base, kernel, tol, max_iters,
                                      guard, raise_on_failure)
    norms = _l2(tr, u)
    in_set = list(norms ** 2 <= radius2 * (1 + 1e-12) + 1e-300)
    meta = dict(u0_norm=n0, u1_norm=n1, b_l2=b_l2, horizon=horizon, beyond_t_star=beyond,
                symbol_functional=functional, p_exp=p_exp, dt=dt)
    return PicardRun("wave", times, u, len(residuals), residuals, c, t_star, in_set,
                     converged, list(norms), meta)


@dataclass
class GlobalWaveReport:
    gamma: float
    gamma0: float
    hypothesis_ok: bool
    passed: bool
    halvings: int
    u0_norm: float
    per_T: dict
    diagnostic: str = ""

    def as_dict(self) -> dict:
        return dict(gamma=self.gamma, gamma0=self.gamma0, hypothesis_ok=self.hypothesis_ok,
                    passed=self.passed, halvings=self.halvings, u0_norm=self.u0_norm,
                    per_T=self.per_T, diagnostic=self.diagnostic)


def wave_global_check(gamma: float, b_profile: Callable, u0: WeightedSignal, tr, B,
                      p_exp: float, T_list: Sequence[float], c: float = 2.0,
                      c_b: float = 1.0, M: int = 32, tol: float = 1e-10,
                      max_halvings: int = 10) -> GlobalWaveReport:
    """Small-data global check: ``||u||**2_{Linf L2} <= c T**gamma0 ||u0||**2`` for every ``T``.

    Requires ``||b||_{L2(0,T)} <= c_b T**-gamma`` on ``T_list``; ``u0`` is halved
    until every horizon passes or ``max_halvings`` is exhausted.
    """
    if not gamma > 1.5:
        raise HypothesisError("global wave check needs gamma > 3/2")
    gamma0 = (2 * gamma - 3) / (2 * p_exp)
    T_list = [float(T) for T in T_list]
    for T in T_list:
        bn = b_l2_norm(b_profile, T, T / M)
        if bn > c_b * T ** -gamma:
            return GlobalWaveReport(gamma, gamma0, False, False, 0, float(_l2(tr, u0.values)), {},
                                    f"||b||_L2(0,{T:g})={bn:.3g} exceeds {c_b:g}*T^-{gamma:g}")
    zero = WeightedSignal(tr.xgrid, np.zeros_like(u0.values), tr.model)
    current = u0
    per_T = {}
    for halvings in range(max_halvings + 1):
        n0 = float(_l2(tr, current.values))
        per_T = {}
        ok = True
        for T in T_list:
            try:
                run = solve_wave(tr, B, p_exp, b_profile, current, zero, T, M, c, tol,
                                 raise_on_failure=True)
                sup2 = max(run.norms) ** 2
                passed = bool(sup2 <= c * T ** gamma0 * n0 ** 2 * (1 + 1e-12))
                per_T[str(T)] = dict(passed=passed, sup_norm_sq=sup2,
                                     bound=c * T ** gamma0 * n0 ** 2, iterations=run.iterations)
            except NumericalError as exc:
                passed = False
                per_T[str(T)] = dict(passed=False, error=str(exc))
            ok = ok and passed
        if ok:
            return GlobalWaveReport(gamma, gamma0, True, True, halvings, n0, per_T)
        current = current.scaled(0.5)
    return GlobalWaveReport(gamma, gamma0, True, False, max_halvings, n0, per_T,
                            "smallness scan exhausted")
