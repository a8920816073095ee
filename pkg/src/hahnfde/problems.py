"""Registry of right-hand-side families.

``example71`` and ``example72`` are the two reference example systems,
read per component: phi_i depends on m only through m_i, and the family
index in the printed sums is identified with the component index.

``manufactured`` has the closed-form solution m*(xi) = xi**2 - c*xi in
every component.  ``zero`` and ``constant`` are trivial families.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .bvp import BvpSpec, RhsFamily
from .errors import ConfigError
from .seqspace import WeightSequence

Builder = Callable[[float, float, float, Mapping[str, float]], RhsFamily]


@dataclass(frozen=True)
class Problem:
    key: str
    beta: float
    mu: float
    rho: float
    build: Builder
    params: Mapping[str, float]
    description: str


def _example71(beta, mu, rho, params):
    def func(i, s, u):
        return np.exp(-4.0 * s) / (i + 3.0) ** 2 * np.cos(s + np.exp(2.0 * s)) * u

    return RhsFamily("example71", func, equibound=1 / 9, lipschitz=1 / 9, reference_product=0.370)


def _example72(beta, mu, rho, params):
    def func(i, s, u):
        # arctan(5 / (1 + (5i+2)(5i-3))) = arctan(5i+2) - arctan(5i-3)
        coef = np.arctan(5.0 / (1.0 + (5.0 * i + 2.0) * (5.0 * i - 3.0)))
        return coef * np.exp(-3.0 * s) * np.log(8.0 / 9.0 + np.abs(u))

    return RhsFamily("example72", func, equibound=1 / 3, lipschitz=1 / 3, reference_product=0.016)


def manufactured_constant(mu: float, rho: float) -> float:
    """c such that xi**2 - c*xi meets m(1) = mu * int_0^rho m."""
    return (1.0 - mu * rho**3 / 3.0) / (1.0 - mu * rho**2 / 2.0)


def _manufactured(beta, mu, rho, params):
    c = manufactured_constant(mu, rho)
    g2 = math.gamma(3.0 - beta)
    g1 = math.gamma(2.0 - beta)

    def func(i, s, u):
        return 2.0 * s ** (2.0 - beta) / g2 - c * s ** (1.0 - beta) / g1

    def exact(s):
        s = np.asarray(s, dtype=float)
        return s * s - c * s

    return RhsFamily("manufactured", func, equibound=0.0, lipschitz=0.0, params={"c": c}, exact=exact)


def _zero(beta, mu, rho, params):
    return RhsFamily("zero", lambda i, s, u: np.zeros_like(u), equibound=0.0, lipschitz=0.0)


def _constant(beta, mu, rho, params):
    value = float(params.get("value", 1.0))
    support = params.get("support")

    def func(i, s, u):
        out = np.full_like(u, value)
        if support is not None:
            out[i[:, 0] > support] = 0.0
        return out

    return RhsFamily("constant", func, equibound=0.0, lipschitz=0.0, params=dict(params))


PROBLEMS: dict[str, Problem] = {
    p.key: p
    for p in [
        Problem("example71", 0.25, 1.0, 1 / 3, _example71, {}, "e^(-4s)/(i+3)^2 cos(s + e^(2s)) m_i"),
        Problem("example72", 0.2, 0.5, 1 / 6, _example72, {}, "arctan(5/(1+(5i+2)(5i-3))) e^(-3s) ln(8/9 + |m_i|)"),
        Problem("manufactured", 0.5, 0.5, 0.5, _manufactured, {}, "Caputo derivative of xi^2 - c xi"),
        Problem("zero", 0.5, 0.5, 0.5, _zero, {}, "phi = 0"),
        Problem("constant", 0.5, 0.5, 0.5, _constant, {"value": 1.0, "support": None}, "phi_i = value for i <= support"),
    ]
}


def make_spec(
    key: str,
    *,
    beta: float | None = None,
    mu: float | None = None,
    rho: float | None = None,
    N: int = 20,
    M: int = 256,
    weights: WeightSequence | None = None,
    params: Mapping[str, float] | None = None,
) -> BvpSpec:
    """Build a BvpSpec for a registry entry, overriding its default parameters.

    The family is constructed with the grid-snapped rho so that manufactured
    solutions match the discretized boundary condition.
    """
    if key not in PROBLEMS:
        raise ConfigError(f"problem: unknown key {key!r}; expected one of {sorted(PROBLEMS)}")
    prob = PROBLEMS[key]
    params = dict(params or {})
    unknown = set(params) - set(prob.params)
    if unknown:
        raise ConfigError([f"problem.params.{k}: unknown parameter for {key!r}" for k in sorted(unknown)])
    beta = prob.beta if beta is None else beta
    mu = prob.mu if mu is None else mu
    rho = prob.rho if rho is None else rho
    spec = BvpSpec(beta, mu, rho, _zero(beta, mu, rho, {}), weights or WeightSequence(), N, M)
    family = prob.build(beta, mu, spec.rho_effective, params)
    return dataclasses.replace(spec, rhs=family)


def check_condition_ii(
    family: RhsFamily, N: int = 8, trials: int = 200, seed: int = 0
) -> dict[str, int]:
    """Count sampled violations of |phi_i| <= A|m_i| and |D phi_i| <= A|D m_i|.

    Samples random times in [0, 1] and random vectors of N components
    (including the zero vector).  Returns violation counts per inequality.
    """
    rng = np.random.default_rng(seed)
    A = family.equibound
    pointwise = 0
    differenced = 0
    for t in range(trials):
        m = np.zeros(N) if t == 0 else rng.uniform(-1, 1, N)
        s = rng.uniform(0, 1)
        phi = family.evaluate(np.array([s]), m[:, None])[:, 0]
        pointwise += int(np.any(np.abs(phi) > A * np.abs(m) + 1e-14))
        dphi = phi[:-1] - phi[1:]
        dm = m[:-1] - m[1:]
        differenced += int(np.any(np.abs(dphi) > A * np.abs(dm) + 1e-14))
    return {"pointwise": pointwise, "differenced": differenced, "trials": trials}
