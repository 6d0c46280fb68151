import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ctfourier.eigenfn import EigenfunctionEvaluator, hankel_oracle
from ctfourier.model import make_bessel_kingman, make_jacobi

XS = np.linspace(0.0, 10.0, 512)


def sinc_character(lam, x):
    return np.sinc(lam * np.asarray(x) / np.pi)


def jacobi_series(alpha, beta, lam, x, terms=400):
    """2F1((rho+il)/2, (rho-il)/2; alpha+1; -sinh(x)**2) summed term by term (sinh(x)**2 < 1)."""
    rho = alpha + beta + 1
    z = -np.sinh(np.asarray(x, dtype=float)) ** 2
    term = np.ones_like(z)
    total = term.copy()
    for n in range(terms):
        term = term * ((rho / 2 + n) ** 2 + lam ** 2 / 4) / ((alpha + 1 + n) * (n + 1)) * z
        total += term
    return total


@pytest.fixture(scope="module")
def ev_half():
    return EigenfunctionEvaluator(make_bessel_kingman(0.5))


def test_sinc_point(ev_half):
    assert ev_half.evaluate(2.0, 1.0) == pytest.approx(np.sin(2.0) / 2, abs=1e-8)


@pytest.mark.parametrize("lam", [0.5, 1.0, 3.0, 4.0])
def test_sinc_sweep(ev_half, lam):
    assert np.max(np.abs(ev_half.evaluate_grid(lam, XS) - sinc_character(lam, XS))) < 1e-7


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.5])
@pytest.mark.parametrize("lam", [0.5, 1.0, 4.0])
def test_hankel_oracle_agreement(alpha, lam):
    ev = EigenfunctionEvaluator(make_bessel_kingman(alpha))
    assert np.max(np.abs(ev.evaluate_grid(lam, XS) - hankel_oracle(alpha, lam, XS))) < 1e-7


@pytest.mark.parametrize("model", [make_bessel_kingman(1.0), make_jacobi(0.5, 0.5)],
                         ids=["bk", "jacobi"])
@pytest.mark.parametrize("lam", [0.0, 1.0, 10.0])
def test_normalised_at_origin(model, lam):
    assert EigenfunctionEvaluator(model).evaluate(lam, 0.0) == 1.0


def test_taylor_coefficient(ev_half):
    lam, x = 3.0, np.array([1e-4, 5e-4])
    u, _ = ev_half.series(lam, x)
    np.testing.assert_allclose(u, 1 - lam ** 2 * x ** 2 / 6, atol=1e-12)


def test_lambda_zero_constant():
    ev = EigenfunctionEvaluator(make_bessel_kingman(1.5))
    np.testing.assert_allclose(ev.evaluate_grid(0.0, XS), 1.0, atol=1e-12)


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_even_in_lambda(lam):
    ev = EigenfunctionEvaluator(make_jacobi(1.5, 0.5))
    np.testing.assert_array_equal(ev.evaluate_grid(lam, XS), ev.evaluate_grid(-lam, XS))


@pytest.mark.parametrize("lam", [0.0, 1.0, 5.0])
def test_jacobi_hypergeometric_oracle(lam):
    xs = np.linspace(0.0, 0.85, 60)
    ev = EigenfunctionEvaluator(make_jacobi(0.5, 0.5))
    assert np.max(np.abs(ev.evaluate_grid(lam, xs) - jacobi_series(0.5, 0.5, lam, xs))) < 1e-6


@pytest.mark.parametrize("model", [make_bessel_kingman(0.0), make_jacobi(0.5, 0.5),
                                   make_jacobi(1.5, -0.5)], ids=["bk0", "j55", "j15"])
def test_bounded_by_one(model):
    ev = EigenfunctionEvaluator(model)
    table = ev.evaluate_matrix([0.0, 0.3, 1.0, 7.0], XS)
    assert np.max(np.abs(table)) <= 1 + 1e-6


@pytest.mark.parametrize("model,lam", [(make_bessel_kingman(1.0), 2.0),
                                       (make_jacobi(0.5, 0.5), 1.0)])
def test_eigenvalue_residual(model, lam):
    xs = np.linspace(0.5, 8.0, 3001)
    h = xs[1] - xs[0]
    u = EigenfunctionEvaluator(model, rtol=1e-12, atol=1e-12).evaluate_grid(lam, xs)
    d1 = (u[2:] - u[:-2]) / (2 * h)
    d2 = (u[2:] - 2 * u[1:-1] + u[:-2]) / h ** 2
    res = d2 + model.log_deriv(xs[1:-1]) * d1 + (lam ** 2 + model.rho ** 2) * u[1:-1]
    assert np.max(np.abs(res)) < 1e-4 * (1 + lam ** 2)


def test_sweep_matches_pointwise():
    ev = EigenfunctionEvaluator(make_jacobi(1.5, 0.5))
    grid = ev.evaluate_grid(2.0, XS)
    for i in (0, 40, 300, 511):
        assert abs(ev.evaluate(2.0, XS[i]) - grid[i]) < 10 * ev.rtol


def test_matrix_independent_of_threads():
    ev = EigenfunctionEvaluator(make_jacobi(0.5, 0.5))
    lams = np.linspace(0, 20, 150)
    np.testing.assert_array_equal(ev.evaluate_matrix(lams, XS, threads=1),
                                  ev.evaluate_matrix(lams, XS, threads=4))


def test_exp_bound_rho_zero(ev_half):
    assert ev_half.exp_bound_check(3.0, XS) <= 1 + 1e-8


@pytest.mark.parametrize("lam", [0.0, 1.0])
def test_exp_bound_jacobi_finite(lam):
    r = EigenfunctionEvaluator(make_jacobi(0.5, 0.5)).exp_bound_check(lam, XS)
    assert np.isfinite(r) and r > 0


def test_hankel_oracle_examples():
    assert hankel_oracle(0.5, 1.0, np.pi) == pytest.approx(0.0, abs=1e-15)
    assert hankel_oracle(0.5, 2.0, 1.0) == pytest.approx(np.sin(2) / 2, rel=1e-14)
    assert hankel_oracle(0.0, 1.0, 0.0) == 1.0


@settings(max_examples=30, deadline=None)
@given(alpha=st.floats(-0.45, 4.0), z=st.floats(0.0, 30.0))
def test_hankel_oracle_bounded(alpha, z):
    assert abs(float(hankel_oracle(alpha, 1.0, z))) <= 1 + 1e-12
