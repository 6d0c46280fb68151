"""Paley, Hausdorff-Young(-Paley) and Hormander functionals, evaluated on grids.

Left and right sides are reported separately. The right side omits the
unquantified absolute constant, so ratios are tracked against a suite-wide
envelope rather than against 1.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Optional

import numpy as np

from .errors import HypothesisError
from .transform import QuadratureGrid, Spectrum, WeightedSignal, lp_norm, spectral_lp_norm

ENVELOPE = 10.0
# slack for quadrature when a sharp inequality is checked without constant
HY_SLACK = 1e-3
# panel width of the dedicated level-set grid; the bias of the discrete sup is
# about half a node spacing of density, so this keeps it near 1e-4 relative
LEVEL_SET_PANEL = 4e-3


@dataclass(frozen=True)
class WeightFunctionPsi:
    func: Callable = field(repr=False)
    descriptor: str = "psi"

    def __call__(self, lam):
        return np.asarray(self.func(np.asarray(lam, dtype=float)), dtype=float)


@dataclass
class InequalityReport:
    kind: str
    lhs: float
    rhs_core: float
    ratio: float
    inputs: dict

    def as_dict(self) -> dict:
        return asdict(self)


def _report(kind, lhs, rhs, inputs) -> InequalityReport:
    ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else np.inf)
    return InequalityReport(kind, float(lhs), float(rhs), float(ratio), inputs)


def level_set_sup(values, masses, exponent: float = 1.0) -> float:
    """``sup_t t * (sum of masses where values >= t)**exponent``.

    On a finite grid the objective is piecewise monotone in ``t`` with
    breakpoints at the attained values, so the sup is a max over them.
    """
    values = np.asarray(values, dtype=float)
    masses = np.asarray(masses, dtype=float)
    keep = values > 0
    if not keep.any():
        return 0.0
    v, m = values[keep], masses[keep]
    order = np.argsort(-v, kind="stable")
    v, cum = v[order], np.cumsum(m[order])
    # last index of each run of equal values carries the full level-set mass
    last = np.r_[v[1:] != v[:-1], True]
    return float(np.max(v[last] * cum[last] ** exponent))


@lru_cache(maxsize=16)
def _fine_grid(upper: float) -> QuadratureGrid:
    return QuadratureGrid.composite(upper, LEVEL_SET_PANEL)


def level_set_grid(grid) -> QuadratureGrid:
    """Fine composite grid on ``[0, grid.upper]`` used for level-set measures.

    Level sets only need density values, not characters, so they are measured
    on a much finer grid than the transform uses.
    """
    return _fine_grid(float(grid.upper))


def m_psi(sd, psi, grid) -> float:
    """``sup_t t * pi{psi >= t}`` with ``dpi = density dlambda`` on ``[0, grid.upper]``."""
    grid = level_set_grid(grid)
    vals = np.asarray(psi(grid.nodes), dtype=float)
    if np.any(vals <= 0):
        raise HypothesisError("psi must be positive on the spectral grid")
    masses = grid.weights * sd.density(grid.nodes)
    if not np.any(masses > 0):
        raise HypothesisError("spectral density vanishes on the grid")
    out = level_set_sup(vals, masses, 1.0)
    if not np.isfinite(out):
        raise HypothesisError("M_psi is not finite on the grid")
    return out


def _spectrum(f, tr) -> Spectrum:
    return f if isinstance(f, Spectrum) else tr.forward(f, check=False)


def paley_report(f: WeightedSignal, psi, p: float, tr) -> InequalityReport:
    """``(int |f_hat|**p psi**(2-p) dpi)**(1/p)`` against ``M_psi**((2-p)/p) ||f||_p``."""
    if not 1 < p <= 2:
        raise HypothesisError("Paley needs 1 < p <= 2")
    F = _spectrum(f, tr).values
    ps = psi(tr.lgrid.nodes)
    M = m_psi(tr.sd, psi, tr.lgrid)
    lhs = float(np.dot(tr.dpi, np.abs(F) ** p * ps ** (2 - p)) ** (1 / p))
    rhs = M ** ((2 - p) / p) * lp_norm(f, p)
    return _report("paley", lhs, rhs, dict(p=p, psi=getattr(psi, "descriptor", "psi"), M_psi=M))


def hy_report(f: WeightedSignal, p: float, tr) -> InequalityReport:
    """Hausdorff-Young: ``||f_hat||_{p'}`` against ``||f||_p`` (sharp constant 1)."""
    if not 1 <= p <= 2:
        raise HypothesisError("Hausdorff-Young needs 1 <= p <= 2")
    pp = np.inf if p == 1 else p / (p - 1)
    lhs = spectral_lp_norm(_spectrum(f, tr), tr.sd, pp)
    return _report("hy", lhs, lp_norm(f, p), dict(p=p, p_dual=pp))


def hyp_report(f: WeightedSignal, psi, p: float, b: float, tr) -> InequalityReport:
    """``(int (|f_hat| psi**(1/b - 1/p'))**b dpi)**(1/b)`` against ``M_psi**(1/b-1/p') ||f||_p``."""
    if not 1 < p <= 2:
        raise HypothesisError("HYP needs 1 < p <= 2")
    pp = p / (p - 1)
    if not p - 1e-12 <= b <= pp + 1e-12:
        raise HypothesisError(f"b={b} outside [p, p'] = [{p}, {pp}]")
    e = 1 / b - 1 / pp
    F = _spectrum(f, tr).values
    ps = psi(tr.lgrid.nodes)
    M = m_psi(tr.sd, psi, tr.lgrid)
    lhs = float(np.dot(tr.dpi, (np.abs(F) * ps ** e) ** b) ** (1 / b))
    rhs = M ** e * lp_norm(f, p)
    return _report("hyp", lhs, rhs, dict(p=p, b=b, psi=getattr(psi, "descriptor", "psi"), M_psi=M))


def hormander_bound(h, sd, grid, p: float, q: float) -> float:
    """``sup_s s * pi{|h| >= s}**(1/p - 1/q)``; equals ``sup |h|`` when ``p = q = 2``."""
    if not (1 < p <= 2 <= q < np.inf):
        raise HypothesisError("Hormander bound needs 1 < p <= 2 <= q < inf")
    grid = level_set_grid(grid)
    vals = np.abs(np.asarray(h(grid.nodes), dtype=float))
    masses = grid.weights * sd.density(grid.nodes)
    return level_set_sup(vals, masses, 1 / p - 1 / q)


def apply_symbol_values(h, values: np.ndarray, tr) -> np.ndarray:
    return tr.inverse_values(np.asarray(h(tr.lgrid.nodes), dtype=float) * tr.forward_values(values))


@dataclass
class OpNormEstimate:
    value: float
    argmax: Optional[str]
    ratios: dict


def empirical_opnorm(h, tr, p: float, q: float, probes: Optional[Iterable] = None,
                     seed: int = 0, detail: bool = False):
    """Lower bound ``max ||T f||_q / ||f||_p`` over a probe family (>= 32 probes)."""
    from .suite import probe_family

    probes = list(probes) if probes is not None else probe_family(tr, seed)
    hv = np.asarray(h(tr.lgrid.nodes), dtype=float)
    w = tr.xgrid.weights * tr.A
    best, arg, ratios = 0.0, None, {}
    for name, fv in probes:
        fp = float(np.dot(w, np.abs(fv) ** p) ** (1 / p))
        if fp == 0:
            continue
        tf = tr.inverse_values(hv * tr.forward_values(fv))
        r = float(np.dot(w, np.abs(tf) ** q) ** (1 / q)) / fp
        ratios[name] = r
        if r > best:
            best, arg = r, name
    est = OpNormEstimate(best, arg, ratios)
    return est if detail else est.value
