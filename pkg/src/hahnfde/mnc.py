"""Hausdorff measure of noncompactness in h_d and Hyers-Ulam stability checks.

For a bounded set A in h_d the Hausdorff measure is the limit in k of

    sup_{m in A} sum_{n >= k} d_n |m_n - m_{n+1}|.

On finite families every tail is a finite sum, so the curve k -> tail_sup[k]
is computed exactly; only the limit needs truncating at ``k_max``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .bvp import BvpSpec, check_existence, kappa
from .errors import StabilityConditionError
from .picard import SolveReport, picard_solve
from .seqspace import HahnVector, WeightSequence, forward_difference, sup_hahn_norm

THETAS = (0.0, 0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class VectorFamily:
    """Finite collection of Hahn vectors.

    ``is_sample`` marks a prefix of an infinite generator; estimates on such
    families are lower bounds for the measure of the full set.
    """

    members: tuple[HahnVector, ...]
    rule: str = "explicit"
    J: int | None = None
    is_sample: bool = False

    def __post_init__(self):
        members = tuple(m if isinstance(m, HahnVector) else HahnVector(m) for m in self.members)
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, vectors: Iterable[Any], **kw) -> VectorFamily:
        return cls(tuple(vectors), **kw)

    def __len__(self) -> int:
        return len(self.members)

    def scaled(self, alpha: float) -> VectorFamily:
        return VectorFamily(tuple(alpha * m for m in self.members), self.rule, self.J, self.is_sample)

    def union(self, other: VectorFamily) -> VectorFamily:
        return VectorFamily(
            self.members + other.members, "union", None, self.is_sample or other.is_sample
        )


def unit_sphere_family(J: int, d: WeightSequence) -> VectorFamily:
    """{e^(j) / (d_{j-1} + d_j) : j = 1..J} with d_0 = 0; every member has norm 1."""
    dv = np.concatenate([[0.0], d.values(J)])
    members = tuple(HahnVector.unit(j) * (1.0 / (dv[j - 1] + dv[j])) for j in range(1, J + 1))
    return VectorFamily(members, rule="unit-sphere", J=J, is_sample=True)


@dataclass
class MncEstimate:
    tail_sup: np.ndarray
    limit_estimate: float
    k_max: int
    is_lower_bound: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "tail_sup": self.tail_sup.tolist(),
            "limit_estimate": self.limit_estimate,
            "k_max": self.k_max,
            "is_lower_bound": self.is_lower_bound,
        }


def tail_sums(m: HahnVector, d: WeightSequence, k_max: int) -> np.ndarray:
    """(sum_{n >= k} d_n |Delta m_n|) for k = 1..k_max."""
    terms = d.values(m.N) * np.abs(forward_difference(m))
    tails = np.cumsum(terms[::-1])[::-1]
    out = np.zeros(k_max)
    n = min(k_max, tails.size)
    out[:n] = tails[:n]
    return out


def hausdorff_mnc(family: VectorFamily, d: WeightSequence, k_max: int) -> MncEstimate:
    if k_max < 1:
        raise ValueError(f"k_max must be at least 1, got {k_max}")
    if len(family) == 0:
        raise ValueError("cannot estimate the measure of an empty family")
    sup = np.zeros(k_max)
    for m in family.members:
        np.maximum(sup, tail_sums(m, d, k_max), out=sup)
    return MncEstimate(sup, float(sup[-1]), k_max, family.is_sample)


@dataclass
class AxiomReport:
    monotone: bool
    convex: dict[float, bool]
    family_estimate: float
    subfamily_estimate: float

    @property
    def ok(self) -> bool:
        return self.monotone and all(self.convex.values())


def _leq(a: np.ndarray, b: np.ndarray, rtol: float = 1e-12) -> bool:
    scale = max(1.0, float(np.max(np.abs(b))) if b.size else 1.0)
    return bool(np.all(a <= b + rtol * scale))


def mnc_axiom_suite(
    family: VectorFamily,
    subfamily: VectorFamily,
    d: WeightSequence,
    k_max: int,
    thetas: Sequence[float] = THETAS,
) -> AxiomReport:
    """Spot-check monotonicity and convexity of the estimator at every k.

    Convexity is tested on the Minkowski combination
    theta * family + (1 - theta) * subfamily over all member pairs.
    """
    est_f = hausdorff_mnc(family, d, k_max)
    est_s = hausdorff_mnc(subfamily, d, k_max)
    convex = {}
    pairs = list(itertools.product(family.members, subfamily.members))
    for theta in thetas:
        combo = VectorFamily(tuple(theta * a + (1.0 - theta) * b for a, b in pairs))
        est_c = hausdorff_mnc(combo, d, k_max)
        convex[theta] = _leq(est_c.tail_sup, theta * est_f.tail_sup + (1.0 - theta) * est_s.tail_sup)
    return AxiomReport(
        monotone=_leq(est_s.tail_sup, est_f.tail_sup),
        convex=convex,
        family_estimate=est_f.limit_estimate,
        subfamily_estimate=est_s.limit_estimate,
    )


def hu_constants(spec: BvpSpec, L: float | None = None) -> tuple[float, float]:
    """Return (G, G0) with G0 = G / (1 - G L); L defaults to the family's Lipschitz constant."""
    if L is None:
        L = spec.rhs.lipschitz
    G = kappa(spec.beta, spec.mu, spec.rho)
    if G * L >= 1:
        raise StabilityConditionError(f"G * L = {G * L:.6g} >= 1; no Hyers-Ulam constant")
    return G, G / (1.0 - G * L)


def perturbation(shape: str, epsilon: float, N: int, nodes: np.ndarray) -> np.ndarray:
    """Per-component perturbation samples bounded by epsilon in absolute value."""
    if shape == "constant":
        row = np.full(nodes.size, epsilon)
    elif shape == "sine":
        row = epsilon * np.sin(2.0 * np.pi * nodes)
    else:
        raise ValueError(f"unknown perturbation shape {shape!r}; expected 'constant' or 'sine'")
    return np.tile(row, (N, 1))


@dataclass
class HuReport:
    epsilon: float
    shape: str
    gap: float
    G: float
    G0: float
    bound: float
    slack: float
    holds: bool
    bracket_sup: float
    unperturbed: SolveReport = field(repr=False)
    perturbed: SolveReport = field(repr=False)

    def to_dict(self, include_solutions: bool = False) -> dict[str, Any]:
        out = {
            k: getattr(self, k)
            for k in ("epsilon", "shape", "gap", "G", "G0", "bound", "slack", "holds", "bracket_sup")
        }
        out["iterations"] = [self.unperturbed.iterations, self.perturbed.iterations]
        if include_solutions:
            out["unperturbed"] = self.unperturbed.to_dict()
            out["perturbed"] = self.perturbed.to_dict()
        return out


def hu_experiment(
    spec: BvpSpec,
    epsilon: float,
    shape: str | np.ndarray = "constant",
    tol: float = 1e-12,
    max_iter: int = 500,
    slack: float = 0.1,
    unperturbed: SolveReport | None = None,
) -> HuReport:
    """Solve with and without an additive perturbation g of the right side.

    ``shape`` is ``"constant"``, ``"sine"`` or explicit samples of shape
    (N, M + 1) with |g| <= epsilon.  The gap ||m - z|| is measured in the
    C([0,1], h_d) norm and compared with G0 * epsilon * (1 + slack).  A
    violated bound is reported through ``holds``, not raised.  Pass a
    previous ``unperturbed`` solve to reuse it.
    """
    report = check_existence(spec)
    if not report.unique_flag:
        raise StabilityConditionError(f"uniqueness condition fails: kappa * L = {report.kappa_signed * report.L:.6g}")
    G, G0 = hu_constants(spec)
    nodes = spec.grid.nodes
    if isinstance(shape, str):
        label = shape
        g = perturbation(shape, epsilon, spec.N, nodes)
    else:
        label = "custom"
        g = np.asarray(shape, dtype=float)
        if np.max(np.abs(g)) > epsilon * (1 + 1e-12):
            raise ValueError(f"perturbation exceeds epsilon = {epsilon}: max |g| = {np.max(np.abs(g))}")
    z = unperturbed or picard_solve(spec, tol=tol, max_iter=max_iter)
    m = picard_solve(spec, tol=tol, max_iter=max_iter, forcing=g)
    gap = sup_hahn_norm(m.solution - z.solution, spec.weights)
    bound = G0 * epsilon
    return HuReport(
        epsilon=epsilon,
        shape=label,
        gap=gap,
        G=G,
        G0=G0,
        bound=bound,
        slack=slack,
        holds=bool(gap <= bound * (1 + slack)),
        bracket_sup=report.bracket_sup,
        unperturbed=z,
        perturbed=m,
    )
