import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hahnfde.errors import DomainError, GridError
from hahnfde.fraccalc import (
    Grid,
    caputo_monomial,
    check_order,
    gamma,
    interpolant_kernel_integral,
    kernel_weights,
    rl_integral,
    rl_monomial,
    weight_matrix,
)

mpmath.mp.dps = 40


def mp_rl_monomial(p, beta, t):
    return float(mpmath.gamma(p + 1) / mpmath.gamma(p + 1 + beta) * mpmath.mpf(t) ** (p + beta))


@pytest.mark.parametrize(
    "x, expected",
    [(1.0, 1.0), (0.5, 1.772453850905516), (1.25, 0.906402477055477)],
)
def test_gamma_values(x, expected):
    assert gamma(x) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
def test_gamma_domain(x):
    with pytest.raises(DomainError):
        gamma(x)


def test_gamma_against_mpmath():
    rng = np.random.default_rng(1)
    for x in rng.uniform(0.05, 20.0, 300):
        assert gamma(x) == pytest.approx(float(mpmath.gamma(x)), rel=1e-12)


@settings(max_examples=300, deadline=None)
@given(st.floats(0.1, 10.0))
def test_gamma_recurrence(x):
    assert gamma(x + 1) == pytest.approx(x * gamma(x), rel=1e-11)


@pytest.mark.parametrize("beta", [0.0, -0.1, 1.0001, math.nan])
def test_order_range(beta):
    with pytest.raises(DomainError):
        check_order(beta)


def test_grid():
    g = Grid(8)
    assert g.h == 0.125
    assert g.nodes[0] == 0.0 and g.nodes[-1] == 1.0
    np.testing.assert_allclose(np.diff(g.nodes), g.h, rtol=1e-15)
    assert g.index_of(0.375) == 3
    with pytest.raises(GridError):
        g.index_of(0.3)
    assert g.snap(0.3) == 2


def test_kernel_weight_examples():
    g = Grid(64)
    for t in (0.25, 0.5, 1.0):
        for beta in (0.2, 0.5, 1.0):
            assert kernel_weights(g, t, beta).sum() == pytest.approx(t**beta / beta, rel=1e-13)
    s = g.nodes
    assert kernel_weights(g, 1.0, 1.0) @ s == pytest.approx(0.5, rel=1e-14)
    assert kernel_weights(g, 1.0, 0.5) @ s == pytest.approx(4.0 / 3.0, rel=1e-13)
    with pytest.raises(GridError):
        kernel_weights(g, 0.3, 0.5)


def test_rl_integral_examples():
    g = Grid(64)
    one = np.ones(g.M + 1)
    for beta in (0.25, 0.5, 1.0):
        assert rl_integral(one, beta, 0.5) == pytest.approx(0.5**beta / float(mpmath.gamma(beta + 1)), rel=1e-13)
    assert rl_integral(one, 1.0, 1.0) == pytest.approx(1.0, rel=1e-14)
    assert rl_integral(g.nodes, 0.25, 1.0) == pytest.approx(float(1 / mpmath.gamma(2.25)), rel=1e-13)
    with pytest.raises(GridError):
        rl_integral(one[:-1], 0.5, 1.0, grid=g)


@pytest.mark.parametrize("M", [3, 17, 128])
@pytest.mark.parametrize("beta", [0.1, 0.25, 0.5, 0.9, 1.0])
def test_exact_for_linear_at_every_node(M, beta):
    g = Grid(M)
    for p in (0, 1):
        f = g.nodes**p
        for k, t in enumerate(g.nodes):
            assert rl_integral(f, beta, t, g) == pytest.approx(mp_rl_monomial(p, beta, t), abs=1e-12)


@pytest.mark.parametrize("beta", [0.2, 0.5, 0.8])
@pytest.mark.parametrize("alpha_shift", [0.0, 1.0])
def test_weights_match_cellwise_integration(beta, alpha_shift):
    # two independent constructions of the same product rule
    alpha = beta + alpha_shift
    g = Grid(40)
    rng = np.random.default_rng(7)
    f = rng.normal(size=g.M + 1)
    W = weight_matrix(g, alpha)
    direct = interpolant_kernel_integral(f, g, g.nodes, alpha)
    np.testing.assert_allclose(W @ f, direct, rtol=1e-12, atol=1e-13)


def test_weight_matrix_read_only_and_cached():
    W = weight_matrix(Grid(16), 0.5)
    assert W is weight_matrix(Grid(16), 0.5)
    with pytest.raises(ValueError):
        W[0, 0] = 1.0
    with pytest.raises(DomainError):
        weight_matrix(Grid(16), 0.0)


@pytest.mark.parametrize("beta", [0.25, 0.5, 0.75, 1.0])
def test_convergence_order_for_square(beta):
    exact = mp_rl_monomial(2, beta, 1.0)
    errs = []
    for M in (32, 64, 128, 256):
        g = Grid(M)
        errs.append(abs(rl_integral(g.nodes**2, beta, 1.0) - exact))
    for a, b in zip(errs, errs[1:]):
        assert a / b >= 2**1.5


def test_semigroup_smoke():
    # I^1(I^1 f)(1) = int_0^1 (1 - s) f(s) ds for f = 1 + 2s - 3s^3
    g = Grid(400)
    s = g.nodes
    f = 1 + 2 * s - 3 * s**3
    inner = np.array([rl_integral(f, 1.0, t, g) for t in s])
    lhs = rl_integral(inner, 1.0, 1.0, g)
    exact = 0.5 + 2 / 6 - 3 / 20
    assert lhs == pytest.approx(exact, abs=1e-5)
    assert rl_integral((1 - s) * f, 1.0, 1.0, g) == pytest.approx(exact, abs=1e-5)


def test_caputo_examples():
    for xi in (0.0, 0.3, 1.0, 2.5):
        assert caputo_monomial(1, 1.0, xi) == pytest.approx(1.0, rel=1e-15)
        assert caputo_monomial(0, 0.5, xi) == 0.0
    assert caputo_monomial(2, 0.25, 1.0) == pytest.approx(float(2 / mpmath.gamma(2.75)), rel=1e-14)
    with pytest.raises(DomainError):
        caputo_monomial(0.5, 0.5, 1.0)
    with pytest.raises(DomainError):
        caputo_monomial(2, 1.5, 1.0)


def test_caputo_against_definition():
    # (1/Gamma(1-beta)) int_0^xi (xi - s)^(-beta) p s^(p-1) ds by mpmath quadrature,
    # after u = (xi - s)^(1-beta) removes the endpoint singularity
    rng = np.random.default_rng(3)
    for _ in range(12):
        p = float(rng.choice([1.0, 1.5, 2.0, 3.0]))
        beta = float(rng.uniform(0.05, 0.95))
        xi = float(rng.uniform(0.1, 2.0))
        e = 1 / (1 - beta)
        top = mpmath.mpf(xi) ** (1 - beta)
        integral = e * mpmath.quad(lambda u: p * max(xi - u**e, 0) ** (p - 1), [0, top])
        expected = float(integral / mpmath.gamma(1 - beta))
        assert caputo_monomial(p, beta, xi) == pytest.approx(expected, rel=1e-10)


def test_rl_monomial_inverts_caputo():
    # I^beta applied to the Caputo derivative of s^2 returns s^2
    for beta in (0.2, 0.5, 1.0):
        xi = 0.7
        coef = caputo_monomial(2, beta, 1.0)
        assert coef * rl_monomial(2 - beta, beta, xi) == pytest.approx(xi**2, rel=1e-13)
