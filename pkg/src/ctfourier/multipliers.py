"""Fourier and spectral multipliers, the heat semigroup and the closed-form
spectral-multiplier bound with its heat-decay and Sobolev consequences."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .errors import HypothesisError
from .inequalities import empirical_opnorm
from .transform import WeightedSignal

SCAN_POINTS = 10_000
SCAN_RANGE = (1e-4, 1e3)
REFINE_POINTS = 1_000
# relative growth over the top decade of the scan that still counts as bounded
GROWTH_TOL = 0.01


@dataclass(frozen=True)
class Symbol:
    func: Callable = field(repr=False)
    descriptor: str = "h"

    def __call__(self, lam):
        return np.asarray(self.func(np.asarray(lam, dtype=float)), dtype=float)

    def __mul__(self, other: "Symbol") -> "Symbol":
        return Symbol(lambda lam: self(lam) * other(lam), f"({self.descriptor})*({other.descriptor})")

    def sup_on(self, grid) -> float:
        v = self(grid.nodes)
        if not np.all(np.isfinite(v)):
            raise HypothesisError(f"symbol {self.descriptor} not finite on grid")
        return float(np.max(np.abs(v)))


@dataclass(frozen=True)
class SpectralFunction:
    func: Callable = field(repr=False)
    decreasing: bool = True
    vanishing: bool = True
    descriptor: str = "phi"

    def __call__(self, u):
        return np.asarray(self.func(np.asarray(u, dtype=float)), dtype=float)

    def check(self, rho: float) -> None:
        """Verify the claimed flags on a sample; raise on contradiction."""
        u = rho ** 2 + np.geomspace(1e-6, 1e6, 400)
        v = self(u)
        if self.decreasing and np.any(np.diff(v) > 1e-14 * np.maximum(1.0, np.abs(v[:-1]))):
            raise HypothesisError(f"{self.descriptor} flagged decreasing but increases")
        if self.vanishing and abs(v[-1]) > 1e-6 * max(1.0, abs(v[0])):
            raise HypothesisError(f"{self.descriptor} flagged vanishing but phi(rho^2+1e6)={v[-1]:.3g}")


def heat_function(t: float) -> SpectralFunction:
    return SpectralFunction(lambda u: np.exp(-t * u), True, True, f"exp(-{t:g}u)")


def resolvent_power(b: float) -> SpectralFunction:
    return SpectralFunction(lambda u: (1.0 + u) ** (-b), b >= 0, b > 0, f"(1+u)^-{b:g}")


def spectral_symbol(phi: SpectralFunction, model) -> Symbol:
    """``h(lambda) = phi(lambda**2 + rho**2)``."""
    rho2 = model.rho ** 2
    return Symbol(lambda lam: phi(np.asarray(lam) ** 2 + rho2), f"{phi.descriptor}@(l^2+rho^2)")


def apply_multiplier(h, f: WeightedSignal, tr) -> WeightedSignal:
    """``T_h f = inverse(h * forward(f))``."""
    F = tr.forward(f, check=False)
    hv = np.asarray(h(tr.lgrid.nodes), dtype=float)
    return WeightedSignal(tr.xgrid, tr.inverse_values(hv * F.values), tr.model)


def heat_symbol(t: float, model) -> Symbol:
    if not t > 0:
        raise HypothesisError("heat time must be positive")
    return spectral_symbol(heat_function(t), model)


def heat_apply(t: float, f: WeightedSignal, tr) -> WeightedSignal:
    return apply_multiplier(heat_symbol(t, tr.model), f, tr)


def _branch(s, model, inv_r):
    a, al, K = model.a_exponent, model.alpha, model.K_crossover
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        low = s ** (2 * (a + 1) * inv_r)
        high = np.maximum(K ** (2 * a + 2) - K ** (2 * al + 2) + s ** (2 * (al + 1)), 0.0) ** inv_r
    return np.where(s <= K, low, high)


def _objective(phi, model, inv_r):
    rho2 = model.rho ** 2

    def g(s):
        return phi(rho2 + np.asarray(s) ** 2) * _branch(s, model, inv_r)

    return g


def _check_exponents(p, q):
    if not (1 < p <= 2 <= q < np.inf):
        raise HypothesisError("needs 1 < p <= 2 <= q < inf")
    return 1.0 / p - 1.0 / q


def spectral_bound(phi: SpectralFunction, model, p: float, q: float,
                   detail: bool = False):
    """``sup_{u > rho^2} phi(u) * B(u - rho^2)`` with the two-regime factor ``B``.

    The sup over ``u = rho^2 + s^2`` is a geometric scan of ``s`` on
    :data:`SCAN_RANGE` plus one linear refinement around the argmax.
    """
    if not (phi.decreasing and phi.vanishing):
        raise HypothesisError("spectral bound needs a decreasing phi vanishing at infinity")
    inv_r = _check_exponents(p, q)
    g = _objective(phi, model, inv_r)
    s = np.concatenate([[0.0], np.geomspace(*SCAN_RANGE, SCAN_POINTS)])
    vals = g(s)
    i = int(np.nanargmax(vals))
    lo, hi = s[max(i - 1, 0)], s[min(i + 1, s.size - 1)]
    fine = np.linspace(lo, hi, REFINE_POINTS)
    fv = g(fine)
    j = int(np.nanargmax(fv))
    best, arg = (fv[j], fine[j]) if fv[j] > vals[i] else (vals[i], s[i])
    if detail:
        return float(best), float(arg), s, vals
    return float(best)


def dense_scan_bound(phi: SpectralFunction, model, p: float, q: float,
                     n: int = 1_000_000) -> float:
    """Brute-force companion of :func:`spectral_bound` (uniform-in-log scan, no refinement)."""
    inv_r = _check_exponents(p, q)
    g = _objective(phi, model, inv_r)
    return float(np.nanmax(g(np.geomspace(*SCAN_RANGE, n))))


@dataclass
class SobolevVerdict:
    verdict: bool
    margin: float
    threshold: float
    b: float
    reason: str = ""

    def as_dict(self) -> dict:
        return dict(b=self.b, threshold=self.threshold, verdict=self.verdict,
                    margin=self.margin, reason=self.reason)


def sobolev_threshold(model, p: float, q: float) -> float:
    return (model.alpha + 1) * (1 / p - 1 / q)


def sobolev_check(b: float, model, p: float, q: float) -> SobolevVerdict:
    """Is the bound for ``phi(u) = (1+u)**-b`` finite on the scan?

    Finite means the objective grows by less than :data:`GROWTH_TOL` over the
    top decade of the scan; ``margin`` is that tolerance minus the growth.
    """
    inv_r = _check_exponents(p, q)
    thr = sobolev_threshold(model, p, q)
    if inv_r == 0:
        return SobolevVerdict(True, GROWTH_TOL, thr, b, "p = q = 2: bound is sup phi")
    phi = resolvent_power(b)
    if not phi.vanishing:
        return SobolevVerdict(False, -np.inf, thr, b, "phi does not vanish at infinity")
    g = _objective(phi, model, inv_r)
    s = np.geomspace(*SCAN_RANGE, SCAN_POINTS)
    v = g(s)
    top = s >= SCAN_RANGE[1] / 10
    growth = float(v[top].max() / v[~top].max() - 1.0)
    margin = GROWTH_TOL - growth
    return SobolevVerdict(bool(margin > 0), margin, thr, b,
                          "" if margin > 0 else "objective still growing at top of scan")


def heat_branch_thresholds(model, p: float, q: float):
    inv_r = _check_exponents(p, q)
    K = model.K_crossover
    return (model.alpha + 1) * inv_r / K, (model.a_exponent + 1) * inv_r / K


def heat_decay_bound(t: float, model, p: float, q: float):
    """Closed-form heat decay envelope: small-time power law, large-time exponential.

    Returns ``(value, branch)``. Where both branches apply the smaller value is
    used; in a gap between them the branch with the nearer threshold is extended.
    """
    inv_r = _check_exponents(p, q)
    a, al, rho = model.a_exponent, model.alpha, model.rho
    t_small, t_large = heat_branch_thresholds(model, p, q)
    small = t ** (-2 * (al + 1) * inv_r)
    large = (np.exp(-t * rho ** 2) * np.exp(-((a + 1) ** 2) / t * inv_r ** 2)
             * t ** (-2 * (a + 1) * inv_r))
    in_small, in_large = t < t_small, t >= t_large
    if in_small and in_large:
        return (small, "small") if small <= large else (large, "large")
    if in_small:
        return small, "small"
    if in_large:
        return large, "large"
    # gap: t_small <= t < t_large
    if abs(t - t_small) <= abs(t_large - t):
        return small, "gap-small"
    return large, "gap-large"


@dataclass
class HeatDecayRow:
    t: float
    empirical: float
    bound: float
    branch: str


def heat_opnorm_curve(tr, p: float, q: float, ts: Sequence[float], seed: int = 0,
                      probes: Optional[list] = None) -> List[HeatDecayRow]:
    """Empirical ``||exp(-tL)||_{p->q}`` lower bounds next to the closed-form envelope."""
    from .suite import probe_family

    ts = np.asarray(ts, dtype=float)
    if np.any(ts <= 0) or np.any(np.diff(ts) <= 0):
        raise HypothesisError("times must be positive and increasing")
    probes = probes if probes is not None else probe_family(tr, seed)
    rows = []
    for t in ts:
        emp = empirical_opnorm(heat_symbol(t, tr.model), tr, p, q, probes)
        bound, branch = heat_decay_bound(float(t), tr.model, p, q)
        rows.append(HeatDecayRow(float(t), emp, float(bound), branch))
    return rows
