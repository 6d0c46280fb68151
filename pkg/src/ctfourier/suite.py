"""Named test functions and probe families shared by tests, verification and the CLI."""
from __future__ import annotations

from typing import Callable, List, Tuple

import numpy as np

from .errors import ConfigError

Named = Tuple[str, Callable]


def gaussian(sigma: float = 1.0, amp: float = 1.0, shift: float = 0.0) -> Callable:
    def f(x):
        return amp * np.exp(-((np.asarray(x) - shift) / sigma) ** 2 / 2.0)

    return f


def gaussian_suite() -> List[Named]:
    """Five smooth even test functions whose ``A``-weighted mass is negligible past x = 12
    for every built-in model with ``rho <= 3``."""
    return [
        ("gauss:0.4", gaussian(0.4)),
        ("gauss:0.5", gaussian(0.5)),
        ("gauss:0.6", gaussian(0.6)),
        ("gauss:0.7", gaussian(0.7)),
        ("x2gauss:0.5", lambda x: np.asarray(x) ** 2 * np.exp(-2.0 * np.asarray(x) ** 2)),
    ]


def named_function(spec: str) -> Callable:
    """Parse ``gaussian:sigma:amp`` (amp optional) or ``x2gauss:sigma``."""
    parts = spec.split(":")
    try:
        if parts[0] in ("gaussian", "gauss"):
            sigma = float(parts[1]) if len(parts) > 1 else 1.0
            amp = float(parts[2]) if len(parts) > 2 else 1.0
            return gaussian(sigma, amp)
        if parts[0] == "x2gauss":
            sigma = float(parts[1]) if len(parts) > 1 else 0.5
            return lambda x: np.asarray(x) ** 2 * np.exp(-np.asarray(x) ** 2 / (2 * sigma ** 2))
    except ValueError as exc:
        raise ConfigError(f"bad test function {spec!r}: {exc}") from None
    raise ConfigError(f"unknown test function {spec!r}")


def dilation_range(model, x_max: float, lambda_max: float) -> Tuple[float, float]:
    """Widths ``s`` for which ``exp(-(x/s)**2)`` is resolved by both grids."""
    s_min = 10.0 / lambda_max
    s_max = x_max / np.sqrt(2 * model.rho * x_max + 25.0)
    return s_min, s_max


def probe_family(tr, seed: int = 0, n_dilations: int = 16, n_bumps: int = 8,
                 n_random: int = 8) -> List[Tuple[str, np.ndarray]]:
    """Deterministic probes on ``tr.xgrid``: dilated Gaussians, shifted bumps and
    seeded random band-limited signals (synthesised on the spectral side)."""
    x = tr.xgrid.nodes
    s_min, s_max = dilation_range(tr.model, tr.xgrid.upper, tr.lgrid.upper)
    probes = []
    for s in np.geomspace(s_min, s_max, n_dilations):
        probes.append((f"dilation:{s:.6g}", np.exp(-(x / s) ** 2)))
    for c in np.linspace(0.5, s_max * 2.0, n_bumps):
        probes.append((f"bump:{c:.6g}", np.exp(-((x - c) / (0.5 * s_max)) ** 2)))
    rng = np.random.default_rng(seed)
    lam = tr.lgrid.nodes
    band = tr.lgrid.upper / 4.0
    for k in range(n_random):
        centres = rng.uniform(0.0, band, 4)
        amps = rng.standard_normal(4)
        F = sum(a * np.exp(-((lam - c) / 2.0) ** 2) for a, c in zip(amps, centres))
        probes.append((f"random:{seed}:{k}", tr.inverse_values(F)))
    return probes


def named_symbol(spec: str, model=None):
    """Parse a symbol descriptor into a :class:`~ctfourier.multipliers.Symbol`.

    Forms: ``resolvent:b`` for ``(1+l**2)**-b``, ``gauss:s`` for ``exp(-s l**2)``,
    ``heat:t`` for ``exp(-t (l**2 + rho**2))``, ``butter:k:n`` for
    ``1/(1+(l/k)**n)``, and the constants ``one`` and ``zero``.
    """
    from .multipliers import Symbol, heat_symbol

    parts = spec.split(":")
    try:
        args = [float(v) for v in parts[1:]]
    except ValueError as exc:
        raise ConfigError(f"bad symbol {spec!r}: {exc}") from None
    kind = parts[0]
    if kind == "resolvent" and len(args) == 1:
        b = args[0]
        return Symbol(lambda lam: (1.0 + lam ** 2) ** -b, spec)
    if kind == "gauss" and len(args) == 1:
        s = args[0]
        return Symbol(lambda lam: np.exp(-s * lam ** 2), spec)
    if kind == "heat" and len(args) == 1:
        if model is None:
            raise ConfigError("heat symbol needs a model")
        return heat_symbol(args[0], model)
    if kind == "butter" and len(args) == 2:
        k, n = args
        return Symbol(lambda lam: 1.0 / (1.0 + (lam / k) ** n), spec)
    if kind == "one" and not args:
        return Symbol(lambda lam: np.ones_like(lam), spec)
    if kind == "zero" and not args:
        return Symbol(lambda lam: np.zeros_like(lam), spec)
    raise ConfigError(f"unknown symbol {spec!r}")


# symbol suite for the multiplier envelope checks
HORMANDER_SYMBOLS = ["resolvent:1", "resolvent:1.5", "resolvent:2", "gauss:0.1", "gauss:1",
                     "butter:2:8"]
HORMANDER_PAIRS = [(4 / 3, 4.0), (1.5, 3.0), (2.0, 2.0)]


def named_coefficient(spec: str) -> Callable:
    """Time coefficients ``b(t)``: ``const:k`` or ``exp:k`` (``k exp(-t)``)."""
    parts = spec.split(":")
    try:
        k = float(parts[1]) if len(parts) > 1 else 1.0
    except ValueError as exc:
        raise ConfigError(f"bad coefficient {spec!r}: {exc}") from None
    if parts[0] == "const":
        return lambda t: np.full_like(np.asarray(t, dtype=float), k)
    if parts[0] == "exp":
        return lambda t: k * np.exp(-np.asarray(t, dtype=float))
    raise ConfigError(f"unknown coefficient {spec!r}")
