"""Characters ``phi_lambda`` of a Chebli-Trimeche hypergroup.

``phi_lambda`` solves ``u'' + (A'/A) u' + (lambda**2 + rho**2) u = 0`` with
``u(0) = 1``, ``u'(0) = 0``. The coefficient ``A'/A`` is singular at the
origin, so the solution is started from a two-term even power series at a
small ``x0`` and continued with an adaptive explicit Runge-Kutta sweep.

The sweep integrates ``v = exp(rho x) u`` instead of ``u``; ``v`` stays of
order ``1 + x`` so absolute tolerances translate into relative accuracy of
``phi_lambda`` even where it decays like ``exp(-rho x)``.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import gammaln, jv

from .errors import NumericalError
from .model import HypergroupModel, origin_slope

# batch size of frequencies per sweep; fixed so results never depend on thread count
CHUNK = 64


@dataclass(frozen=True)
class EigenfunctionEvaluator:
    model: HypergroupModel
    x0: float = 1e-3
    rtol: float = 1e-10
    atol: float = 1e-10

    def series(self, lams, x):
        """Frobenius start ``1 + c2 x**2 + c4 x**4`` and its derivative."""
        m = self.model
        mu = np.asarray(lams, dtype=float) ** 2 + m.rho ** 2
        c2 = -mu / (4.0 * (m.alpha + 1.0))
        c4 = -c2 * (mu + 2.0 * origin_slope(m)) / (8.0 * (m.alpha + 2.0))
        x = np.asarray(x, dtype=float)
        u = 1.0 + c2 * x ** 2 + c4 * x ** 4
        du = 2.0 * c2 * x + 4.0 * c4 * x ** 3
        return u, du

    def _sweep(self, lams: np.ndarray, xs: np.ndarray) -> np.ndarray:
        """Values ``phi[j, i]`` for sorted ``xs`` (all > x0), one batched sweep."""
        m = self.model
        rho = m.rho
        lam2 = lams ** 2
        n = lams.size
        u0, du0 = self.series(lams, self.x0)
        e0 = np.exp(rho * self.x0)
        y0 = np.concatenate([e0 * u0, e0 * (du0 + rho * u0)])

        def rhs(x, y):
            v, dv = y[:n], y[n:]
            L = float(m.log_deriv(x))
            return np.concatenate([dv, -(L - 2 * rho) * dv - (lam2 + 2 * rho * rho - rho * L) * v])

        if xs.size == 0:
            return np.empty((n, 0))
        sol = solve_ivp(rhs, (self.x0, float(xs[-1])), y0, method="DOP853",
                        t_eval=xs, rtol=self.rtol, atol=self.atol)
        if sol.status != 0:
            raise NumericalError(f"character sweep failed: {sol.message}")
        v = sol.y[:n]
        if not np.all(np.isfinite(v)):
            raise NumericalError("non-finite values in character sweep")
        return v * np.exp(-rho * xs)[None, :]

    def evaluate_matrix(self, lams, xs, threads: int = 1) -> np.ndarray:
        """Table ``phi[j, i] = phi_{lams[j]}(xs[i])`` for increasing ``xs``.

        Frequencies are processed in fixed chunks of :data:`CHUNK`; ``threads``
        only changes how many chunks run at once, never the result.
        """
        lams = np.abs(np.atleast_1d(np.asarray(lams, dtype=float)))
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        if np.any(xs < 0) or np.any(np.diff(xs) <= 0):
            raise ValueError("xs must be nonnegative and strictly increasing")
        near = xs <= self.x0
        out = np.empty((lams.size, xs.size))
        if near.any():
            out[:, near] = self.series(lams[:, None], xs[near][None, :])[0]
        far = xs[~near]
        chunks = [lams[i:i + CHUNK] for i in range(0, lams.size, CHUNK)]
        if threads > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(lambda c: self._sweep(c, far), chunks))
        else:
            parts = [self._sweep(c, far) for c in chunks]
        if parts:
            out[:, ~near] = np.vstack(parts)
        return out

    def evaluate_grid(self, lam: float, xs) -> np.ndarray:
        return self.evaluate_matrix([lam], xs)[0]

    def evaluate(self, lam: float, x: float) -> float:
        x = float(x)
        if x < 0:
            raise ValueError("x must be nonnegative")
        return float(self.evaluate_grid(lam, [x])[0])

    def exp_bound_check(self, lam: float, xs) -> float:
        """Empirical constant in ``|phi_lambda(x)| <= C (1 + x) exp(-rho x)``."""
        xs = np.asarray(xs, dtype=float)
        phi = self.evaluate_grid(lam, xs)
        ratio = np.abs(phi) / ((1.0 + xs) * np.exp(-self.model.rho * xs))
        worst = float(ratio.max())
        if not np.isfinite(worst):
            raise NumericalError("exponential bound ratio is not finite")
        return worst


def hankel_oracle(alpha: float, lam, x) -> np.ndarray:
    """Normalized Bessel character ``2**a Gamma(a+1) (lam x)**-a J_a(lam x)``."""
    z = np.abs(np.asarray(lam, dtype=float) * np.asarray(x, dtype=float))
    small = z < 1e-6
    zs = np.where(small, 1.0, z)
    logc = alpha * np.log(2.0) + gammaln(alpha + 1.0)
    val = np.exp(logc - alpha * np.log(zs)) * jv(alpha, zs)
    return np.where(small, 1.0 - z * z / (4.0 * (alpha + 1.0)), val)
