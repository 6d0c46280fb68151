import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gammaln

from conftest import transformer_for
from ctfourier.errors import HypothesisError
from ctfourier.eigenfn import EigenfunctionEvaluator
from ctfourier.transform import (QuadratureGrid, SpatialGrid, SpectralGrid, Spectrum,
                                 Transformer, WeightedSignal, forward, inverse, lp_norm,
                                 spectral_lp_norm)
from ctfourier.suite import gaussian, gaussian_suite


def gaussian_hat(alpha, lam):
    """Transform of exp(-x**2/2) with weight x**(2 alpha + 1): 2**a Gamma(a+1) exp(-lam**2/2)."""
    return math.exp(alpha * math.log(2) + gammaln(alpha + 1)) * np.exp(-np.asarray(lam) ** 2 / 2)


def test_composite_grid_integrates_polynomials():
    g = QuadratureGrid.composite(5.0, 0.5)
    assert g.integrate(g.nodes ** 7) == pytest.approx(5.0 ** 8 / 8, rel=1e-13)
    assert np.all(np.diff(g.nodes) > 0) and g.nodes[0] > 0 and g.nodes[-1] < 5.0


def test_grid_panel_rule():
    x = SpatialGrid.default(12.0, 40.0)
    lam = SpectralGrid.default(12.0, 40.0)
    assert x.upper == 12.0 and lam.upper == 40.0
    assert x.integrate(np.ones_like(x.nodes)) == pytest.approx(12.0, rel=1e-14)


def test_forward_closed_form_half(bk_half):
    F = bk_half.forward(bk_half.signal(gaussian(1.0)))
    sel = bk_half.lgrid.nodes <= 5
    exact = np.sqrt(np.pi / 2) * np.exp(-bk_half.lgrid.nodes[sel] ** 2 / 2)
    assert np.max(np.abs(F.values[sel] / exact - 1)) < 1e-6


@pytest.mark.parametrize("alpha", [0.0, 1.5])
def test_forward_closed_form_general_alpha(alpha):
    tr = transformer_for("bk", alpha)
    F = tr.forward(tr.signal(gaussian(1.0)))
    sel = tr.lgrid.nodes <= 5
    exact = gaussian_hat(alpha, tr.lgrid.nodes[sel])
    assert np.max(np.abs(F.values[sel] / exact - 1)) < 1e-6


def test_forward_zero(bk_half):
    z = WeightedSignal(bk_half.xgrid, np.zeros(bk_half.xgrid.size), bk_half.model)
    assert not np.any(bk_half.forward(z).values)
    assert not np.any(bk_half.inverse(Spectrum(bk_half.lgrid, np.zeros(bk_half.lgrid.size))).values)


def test_forward_at_zero_is_mass(bk_half):
    f = bk_half.signal(gaussian(0.7))
    F0 = bk_half.ev.evaluate_matrix([0.0], bk_half.xgrid.nodes)[0] @ (
        bk_half.xgrid.weights * bk_half.A * f.values)
    assert F0 == pytest.approx(bk_half.xgrid.integrate(f.values * bk_half.A), rel=1e-13)


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.5])
def test_round_trip_suite(alpha):
    tr = transformer_for("bk", alpha)
    for name, f in gaussian_suite():
        assert tr.round_trip_error(tr.signal(f)) < 1e-4, name


def test_round_trip_jacobi(jacobi_half):
    f = jacobi_half.signal(gaussian(0.5))
    assert jacobi_half.round_trip_error(f) < 1e-3


def test_lp_norm_gaussian_moment(bk_half):
    f = bk_half.signal(gaussian(1.0))
    assert lp_norm(f, 2) ** 2 == pytest.approx(np.sqrt(np.pi) / 4, rel=1e-12)
    assert lp_norm(f, np.inf) == pytest.approx(1.0, abs=1e-6)


def test_lp_norm_rejects_small_p(bk_half):
    with pytest.raises(ValueError):
        lp_norm(bk_half.signal(gaussian(1.0)), 0.5)


def test_lp_norm_grid_refinement():
    from ctfourier.model import make_bessel_kingman

    model = make_bessel_kingman(0.5)
    coarse, fine = SpatialGrid.default(), SpatialGrid.default(panel=0.1)
    for _, f in gaussian_suite():
        a = lp_norm(WeightedSignal.sample(f, coarse, model), 1.5)
        b = lp_norm(WeightedSignal.sample(f, fine, model), 1.5)
        assert abs(a - b) < 1e-6 * b


@settings(max_examples=20, deadline=None)
@given(c=st.floats(-50, 50).filter(lambda c: c == 0 or abs(c) > 1e-100), p=st.sampled_from([1.0, 4 / 3, 2.0, 3.0]))
def test_lp_norm_homogeneous(bk_half, c, p):
    f = bk_half.signal(gaussian(0.6))
    assert lp_norm(f.scaled(c), p) == pytest.approx(abs(c) * lp_norm(f, p), rel=1e-12, abs=1e-300)


def test_spectral_plancherel(bk_half):
    f = bk_half.signal(gaussian(0.6))
    F = bk_half.forward(f)
    assert spectral_lp_norm(F, bk_half.sd, 2) == pytest.approx(lp_norm(f, 2), rel=1e-3)


@pytest.mark.parametrize("p", [4 / 3, 1.5, 2.0])
def test_hausdorff_young_suite(bk_half, p):
    pp = p / (p - 1)
    for _, g in gaussian_suite():
        f = bk_half.signal(g)
        assert spectral_lp_norm(bk_half.forward(f), bk_half.sd, pp) <= (1 + 1e-3) * lp_norm(f, p)


def test_linearity(bk_half, rng):
    f, g = bk_half.signal(gaussian(0.5)), bk_half.signal(gaussian(0.7))
    a, b = rng.standard_normal(2)
    lhs = bk_half.forward(f.scaled(a) + g.scaled(b)).values
    rhs = a * bk_half.forward(f).values + b * bk_half.forward(g).values
    np.testing.assert_allclose(lhs, rhs, atol=1e-14 * np.max(np.abs(rhs)))


def test_panel_refinement_stability():
    from ctfourier.model import make_bessel_kingman

    model = make_bessel_kingman(0.5)
    base = Transformer(model)
    fine = Transformer(model, xgrid=SpatialGrid.default(panel=0.1), lgrid=base.lgrid)
    for _, f in gaussian_suite():
        a = base.forward(base.signal(f)).values
        b = fine.forward(fine.signal(f)).values
        assert np.max(np.abs(a - b)) < 1e-6 * np.max(np.abs(b))


def test_module_functions_match_transformer(bk_half):
    f = bk_half.signal(gaussian(0.6))
    F = forward(bk_half.model, bk_half.sd, f, bk_half.lgrid, bk_half.ev)
    np.testing.assert_array_equal(F.values, bk_half.forward(f).values)
    back = inverse(bk_half.model, bk_half.sd, F, bk_half.xgrid, bk_half.ev)
    np.testing.assert_array_equal(back.values, bk_half.inverse(F).values)


def test_model_mismatch_rejected(bk_half):
    from ctfourier.model import make_bessel_kingman

    other = EigenfunctionEvaluator(make_bessel_kingman(1.0))
    with pytest.raises(HypothesisError):
        forward(bk_half.model, bk_half.sd, bk_half.signal(gaussian(1.0)), bk_half.lgrid, other)


def test_tail_warning(bk_half):
    with pytest.warns(UserWarning):
        bk_half.forward(bk_half.signal(lambda x: np.ones_like(x)))
