import dataclasses

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hahnfde.bvp import (
    BvpSpec,
    ConstantsReport,
    RhsFamily,
    bracket,
    check_existence,
    double_integral_crosscheck,
    green_apply,
    kappa,
    kappa_abs,
)
from hahnfde.errors import ConfigError, EvaluationError, SingularParameterError
from hahnfde.fraccalc import weight_matrix
from hahnfde.problems import make_spec

mpmath.mp.dps = 30


def kappa_mp(beta, mu, rho, absolute=False):
    beta, mu, rho = mpmath.mpf(beta), mpmath.mpf(mu), mpmath.mpf(rho)
    den = 2 - mu * rho**2
    terms = [
        1 / mpmath.gamma(beta + 1),
        -2 / (den * mpmath.gamma(beta + 1)),
        2 * mu * rho ** (beta + 1) / (den * mpmath.gamma(beta + 2)),
    ]
    return float(sum(abs(t) for t in terms) if absolute else sum(terms))


admissible = st.tuples(
    st.floats(0.01, 1.0), st.floats(-5.0, 5.0), st.floats(0.01, 0.99)
).filter(lambda t: abs(2 - t[1] * t[2] ** 2) > 1e-3)


def test_kappa_values():
    assert kappa(0.2, 0.5, 1 / 6) * (1 / 3) == pytest.approx(0.016, abs=1e-3)
    assert kappa(0.25, 1.0, 1 / 3) == pytest.approx(0.17187, abs=1e-3)
    assert kappa(0.25, 1.0, 1 / 3) == pytest.approx(kappa_mp(0.25, 1.0, 1 / 3), rel=1e-13)
    assert kappa_abs(1.0, 0.0, 0.5) == 2.0
    assert kappa_abs(0.25, 1.0, 1 / 3) == pytest.approx(kappa_mp(0.25, 1.0, 1 / 3, absolute=True), rel=1e-14)
    assert kappa_abs(0.25, 1.0, 1 / 3) == pytest.approx(2.508119, abs=1e-6)


@settings(max_examples=200, deadline=None)
@given(admissible)
def test_kappa_against_mpmath(params):
    assert kappa(*params) == pytest.approx(kappa_mp(*params), rel=1e-10, abs=1e-13)
    assert kappa_abs(*params) == pytest.approx(kappa_mp(*params, absolute=True), rel=1e-12)


@settings(max_examples=1000, deadline=None)
@given(admissible)
def test_kappa_abs_dominates(params):
    assert kappa_abs(*params) >= abs(kappa(*params))


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 1.0), st.floats(0.01, 0.99))
def test_kappa_vanishes_without_boundary_coupling(beta, rho):
    assert abs(kappa(beta, 0.0, rho)) <= 1e-14


def test_bracket_at_one_is_kappa():
    for params in [(0.2, 0.5, 1 / 6), (0.25, 1.0, 1 / 3), (0.7, -2.0, 0.4)]:
        assert bracket(1.0, *params) == pytest.approx(kappa(*params), rel=1e-13, abs=1e-15)


def test_singular_parameters():
    with pytest.raises(SingularParameterError):
        kappa(0.5, 8.0, 0.5)
    with pytest.raises(SingularParameterError):
        make_spec("zero", beta=0.5, mu=8.0, rho=0.5)


@pytest.mark.parametrize(
    "kw",
    [
        {"beta": 0.0},
        {"beta": 1.5},
        {"rho": 0.0},
        {"rho": 1.0},
        {"N": 0},
        {"M": 1},
        {"rho": 1e-4, "M": 16},
    ],
)
def test_spec_validation(kw):
    base = {"beta": 0.5, "mu": 0.5, "rho": 0.5, "N": 2, "M": 16}
    base.update(kw)
    N, M = base.pop("N"), base.pop("M")
    with pytest.raises(ConfigError):
        make_spec("zero", N=N, M=M, **base)


def test_existence_examples():
    r72 = check_existence(make_spec("example72", N=2, M=32))
    assert r72.product_signed == pytest.approx(0.016, abs=1e-3)
    assert r72.exists_flag and r72.unique_flag
    assert r72.G0 == pytest.approx(kappa_mp(0.2, 0.5, 1 / 6) / (1 - kappa_mp(0.2, 0.5, 1 / 6) / 3), rel=1e-12)
    assert r72.kappa_abs >= abs(r72.kappa_signed)

    r71 = check_existence(make_spec("example71", N=2, M=32))
    assert r71.exists_flag
    assert r71.product_signed == pytest.approx(0.0191, abs=1e-3)
    assert any("0.37" in a for a in r71.advisories)

    r0 = check_existence(make_spec("example72", mu=0.0, N=2, M=32))
    assert r0.product_signed == 0.0 and r0.exists_flag


def test_existence_without_uniqueness():
    rep = check_existence(make_spec("example72", mu=7.9, rho=0.5, N=2, M=32))
    assert rep.kappa_signed * rep.L >= 1
    assert not rep.unique_flag
    assert rep.G0 is None


def test_constants_report_round_trip():
    rep = check_existence(make_spec("example71", N=2, M=32))
    assert ConstantsReport.from_dict(rep.to_dict()) == rep


def test_constant_forcing_cancels_for_beta_one():
    spec = make_spec("constant", beta=1.0, mu=0.0, rho=0.5, N=3, M=32)
    out = green_apply(spec, np.zeros((3, 33)))
    np.testing.assert_allclose(out, 0.0, atol=1e-15)


@pytest.mark.parametrize("key", ["example71", "example72", "manufactured", "constant"])
def test_first_node_is_exactly_zero(key):
    spec = make_spec(key, N=5, M=64)
    rng = np.random.default_rng(0)
    out = green_apply(spec, rng.normal(size=(5, 65)))
    assert np.all(out[:, 0] == 0.0)


@pytest.mark.parametrize(
    "beta, mu, rho, tol",
    [(0.25, 1.0, 1 / 3, 2e-4), (0.5, 0.5, 0.5, 7e-4), (1.0, 0.0, 0.5, 1e-13)],
)
def test_manufactured_solution(beta, mu, rho, tol):
    spec = make_spec("manufactured", beta=beta, mu=mu, rho=rho, N=1, M=256)
    out = green_apply(spec, np.zeros((1, 257)))
    exact = spec.rhs.exact(spec.grid.nodes)
    assert np.max(np.abs(out[0] - exact)) <= tol


def test_manufactured_forcing_is_caputo_of_solution():
    from hahnfde.fraccalc import caputo_monomial

    spec = make_spec("manufactured", beta=0.3, mu=0.8, rho=0.4, N=1, M=10)
    c = spec.rhs.params["c"]
    for x in spec.grid.nodes[1:]:
        want = caputo_monomial(2, 0.3, x) - c * caputo_monomial(1, 0.3, x)
        assert spec.rhs(1, x, np.zeros(1)) == pytest.approx(want, rel=1e-13, abs=1e-15)
    # m* meets both boundary conditions with the snapped rho
    r = spec.rho_effective
    assert spec.rhs.exact(0.0) == 0.0
    assert spec.rhs.exact(1.0) == pytest.approx(0.8 * (r**3 / 3 - c * r**2 / 2), rel=1e-13)


def _random_forcing(spec, rng):
    return rng.normal(size=(spec.N, spec.M + 1))


def test_linearity_and_scaling():
    spec = make_spec("zero", beta=0.35, mu=1.3, rho=0.3, N=4, M=96)
    rng = np.random.default_rng(11)
    z = np.zeros((4, 97))
    g1, g2 = _random_forcing(spec, rng), _random_forcing(spec, rng)
    a = 0.37
    lhs = green_apply(spec, z, a * g1 + g2)
    rhs = a * green_apply(spec, z, g1) + green_apply(spec, z, g2)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12 * np.max(np.abs(rhs)))
    # powers of two scale bitwise
    np.testing.assert_array_equal(green_apply(spec, z, 4.0 * g1), 4.0 * green_apply(spec, z, g1))
    np.testing.assert_allclose(green_apply(spec, z, a * g1), a * green_apply(spec, z, g1), rtol=1e-14, atol=1e-15)


@pytest.mark.parametrize(
    "key, beta, mu, rho",
    [("example72", 0.2, 0.5, 1 / 6), ("example72", 0.5, 1.0, 0.5), ("example71", 0.25, 1.0, 1 / 3), ("example72", 1.0, 2.0, 0.5)],
)
def test_boundary_condition_consistency(key, beta, mu, rho):
    q = min(2.0, 1.0 + beta)
    discs = []
    for M in (64, 128, 256, 512):
        spec = make_spec(key, beta=beta, mu=mu, rho=rho, N=4, M=M)
        x = spec.grid.nodes
        m = np.array([np.sin(3 * x + i) + x for i in range(4)])
        F = green_apply(spec, m)
        trap = weight_matrix(spec.grid, 1.0)[spec.rho_index] @ F.T
        discs.append(np.max(np.abs(F[:, -1] - mu * trap)))
    C = discs[0] * 64**q
    for M, disc in zip((128, 256, 512), discs[1:]):
        assert disc <= 1.1 * C * M**-q


def test_rows_do_not_depend_on_truncation():
    small = make_spec("example72", N=3, M=64)
    big = dataclasses.replace(small, N=9)
    rng = np.random.default_rng(5)
    m = rng.normal(size=(9, 65))
    np.testing.assert_array_equal(green_apply(big, m)[:3], green_apply(small, m[:3]))


@pytest.mark.filterwarnings("ignore:divide by zero")
def test_nonfinite_rhs_names_component_and_node():
    fam = RhsFamily("log", lambda i, s, u: np.log(u) + 0 * i, equibound=0.0, lipschitz=0.0)
    spec = BvpSpec(0.5, 0.5, 0.5, fam, N=3, M=8)
    m = np.ones((3, 9))
    m[1, 4] = 0.0
    with pytest.raises(EvaluationError, match=r"phi_2 .* node 4"):
        green_apply(spec, m)


def test_shape_check():
    spec = make_spec("zero", N=2, M=8)
    with pytest.raises(ValueError):
        green_apply(spec, np.zeros((2, 8)))


@pytest.mark.parametrize("beta, rho", [(0.2, 0.25), (0.5, 0.5), (1.0, 0.75)])
def test_double_integral_of_one(beta, rho):
    spec = make_spec("zero", beta=beta, mu=0.5, rho=rho, N=1, M=64)
    reduced, nested = double_integral_crosscheck(spec, np.ones(65))
    exact = rho ** (beta + 1) / (beta * (beta + 1))
    assert reduced == pytest.approx(exact, rel=1e-13)
    assert nested == pytest.approx(exact, rel=1e-12)


def test_double_integral_of_identity():
    spec = make_spec("zero", beta=1.0, mu=0.5, rho=0.5, N=1, M=64)
    reduced, nested = double_integral_crosscheck(spec, spec.grid.nodes)
    assert reduced == pytest.approx(1 / 48, rel=1e-13)
    assert nested == pytest.approx(1 / 48, rel=1e-13)


def test_double_integral_against_mpmath():
    # nested integral of a smooth phi by mpmath; v = (s - n)^beta makes the inner integrand smooth
    beta, rho = 0.3, 0.4
    spec = make_spec("zero", beta=beta, mu=0.5, rho=rho, N=1, M=1000)
    f = lambda n: mpmath.cos(3 * n) + n**2
    with mpmath.workdps(20):
        inner = lambda s: mpmath.quad(lambda v: f(s - v ** (1 / beta)), [0, s**beta]) / beta
        exact = float(mpmath.quad(inner, [0, rho]))
    x = spec.grid.nodes
    reduced, nested = double_integral_crosscheck(spec, np.cos(3 * x) + x**2)
    assert reduced == pytest.approx(exact, rel=1e-5)
    assert nested == pytest.approx(reduced, abs=1e-8)
