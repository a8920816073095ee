r"""Fixed-point operator for the three-point integral boundary-value problem.

For each component i the problem

.. math::

    {}^cD^\beta m_i(\xi) = \varphi_i(\xi, m(\xi)), \quad
    m_i(0) = 0, \quad m_i(1) = \mu \int_0^\varrho m_i(s)\,ds

is equivalent to m = F m with

.. math::

    (F m)(\xi) = I^\beta\varphi(\xi)
        - \frac{2\xi}{(2 - \mu\varrho^2)\Gamma(\beta)}
          \int_0^1 (1 - s)^{\beta - 1}\varphi\,ds
        + \frac{2\mu\xi}{(2 - \mu\varrho^2)\Gamma(\beta)}
          \int_0^\varrho \varphi(n) \frac{(\varrho - n)^\beta}{\beta}\,dn.

The last term is the order-swapped form of the nested integral
:math:`\int_0^\varrho\int_0^s (s - n)^{\beta-1}\varphi(n)\,dn\,ds`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Mapping

import numpy as np

from .errors import ConfigError, EvaluationError, SingularParameterError
from .fraccalc import Grid, check_order, gamma, interpolant_kernel_integral, weight_matrix
from .seqspace import WeightSequence

#: Minimum admissible distance of mu * rho**2 from 2.
SINGULAR_TOL = 1e-9

RhsFunc = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class RhsFamily:
    """Right-hand sides phi_i(s, m) for i = 1, 2, ...

    ``func(idx, s, u)`` is vectorized: ``idx`` has shape (N, 1) and holds the
    component indices 1..N, ``s`` has shape (P,), ``u`` has shape (N, P) with
    ``u[i-1, j]`` the value of component i at ``s[j]``.  The result must
    broadcast to (N, P).

    ``equibound`` and ``lipschitz`` are the declared constants A and L of
    the family.  ``exact`` optionally gives the exact solution at points
    ``s`` (broadcast over components) and ``reference_product`` a reference
    value of kappa * A for comparison.
    """

    key: str
    func: RhsFunc = field(repr=False)
    equibound: float
    lipschitz: float
    params: Mapping[str, float] = field(default_factory=dict)
    exact: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)
    reference_product: float | None = None

    def evaluate(self, s: np.ndarray, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        idx = np.arange(1, u.shape[0] + 1)[:, None]
        out = self.func(idx, np.asarray(s, dtype=float), u)
        return np.broadcast_to(out, u.shape).astype(float, copy=True)

    def __call__(self, i: int, s: float, m: np.ndarray) -> float:
        """phi_i(s, m) where ``m`` holds the component values at time ``s``."""
        m = np.asarray(m, dtype=float).reshape(-1, 1)
        if not 1 <= i <= m.shape[0]:
            raise IndexError(f"component {i} outside 1..{m.shape[0]}")
        return float(self.evaluate(np.array([s]), m)[i - 1, 0])


@dataclass(frozen=True)
class BvpSpec:
    """A truncated problem instance: N components on a grid with M intervals."""

    beta: float
    mu: float
    rho: float
    rhs: RhsFamily
    weights: WeightSequence = field(default_factory=WeightSequence)
    N: int = 20
    M: int = 256

    def __post_init__(self):
        errors = []
        if not (0.0 < self.beta <= 1.0):
            errors.append(f"beta: must satisfy 0 < beta <= 1, got {self.beta}")
        if not (0.0 < self.rho < 1.0):
            errors.append(f"rho: must satisfy 0 < rho < 1, got {self.rho}")
        if not math.isfinite(self.mu):
            errors.append(f"mu: must be finite, got {self.mu}")
        if int(self.N) != self.N or self.N < 1:
            errors.append(f"N: must be a positive integer, got {self.N}")
        if int(self.M) != self.M or self.M < 2:
            errors.append(f"M: must be an integer >= 2, got {self.M}")
        if errors:
            raise ConfigError(errors)
        if self.rho_index == 0:
            raise ConfigError(f"rho: {self.rho} snaps to 0 on a grid with M = {self.M}; refine the grid")
        for label, r in (("rho", self.rho), ("effective rho", self.rho_effective)):
            if abs(2.0 - self.mu * r * r) <= SINGULAR_TOL:
                raise SingularParameterError(
                    f"mu * rho**2 = 2 with mu = {self.mu}, {label} = {r}; the problem is singular"
                )

    @property
    def grid(self) -> Grid:
        return Grid(self.M)

    @property
    def rho_index(self) -> int:
        """Grid index of the node nearest to rho."""
        return self.grid.snap(self.rho)

    @property
    def rho_effective(self) -> float:
        return self.rho_index / self.M


def _denominator(mu: float, rho: float) -> float:
    den = 2.0 - mu * rho * rho
    if abs(den) <= SINGULAR_TOL:
        raise SingularParameterError(f"mu * rho**2 = 2 (mu = {mu}, rho = {rho})")
    return den


def bracket(xi, beta: float, mu: float, rho: float):
    """xi^b/G(b+1) - 2xi/((2-mu rho^2)G(b+1)) + 2 mu xi rho^(b+1)/((2-mu rho^2)G(b+2)).

    At xi = 1 this is ``kappa``.  Accepts scalars or arrays.
    """
    beta = check_order(beta)
    den = _denominator(mu, rho)
    xi = np.asarray(xi, dtype=float)
    g1 = gamma(beta + 1)
    g2 = gamma(beta + 2)
    val = xi**beta / g1 - 2.0 * xi / (den * g1) + 2.0 * mu * xi * rho ** (beta + 1) / (den * g2)
    return float(val) if val.ndim == 0 else val


def kappa(beta: float, mu: float, rho: float) -> float:
    """Signed existence constant; exactly 0 when mu = 0."""
    beta = check_order(beta)
    den = _denominator(mu, rho)
    g1 = gamma(beta + 1)
    first = 1.0 / g1 - 2.0 / (den * g1)
    return first + 2.0 * mu * rho ** (beta + 1) / (den * gamma(beta + 2))


def kappa_abs(beta: float, mu: float, rho: float) -> float:
    """Term-wise absolute value of ``kappa``; a triangle-inequality-safe bound."""
    beta = check_order(beta)
    den = _denominator(mu, rho)
    g1 = gamma(beta + 1)
    return 1.0 / g1 + abs(2.0 / (den * g1)) + abs(2.0 * mu * rho ** (beta + 1) / (den * gamma(beta + 2)))


@dataclass
class ConstantsReport:
    kappa_signed: float
    kappa_abs: float
    A: float
    L: float
    product_signed: float
    product_abs: float
    exists_flag: bool
    unique_flag: bool
    G: float
    G0: float | None
    rho_requested: float
    rho_effective: float
    bracket_sup: float
    bracket_argmax: float
    G_at_endpoint: bool
    advisories: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> ConstantsReport:
        return cls(**data)


# Dense sample used to locate the supremum of the bracket over [0, 1].
_BRACKET_SAMPLES = 8193


def check_existence(spec: BvpSpec) -> ConstantsReport:
    """Evaluate the existence, uniqueness and stability constants for ``spec``.

    ``kappa`` uses the requested rho, not the grid-snapped one; it is an
    analytic quantity.  ``G`` is the bracket at xi = 1 (numerically equal to
    kappa).  ``bracket_sup`` records where the bracket actually peaks on
    [0, 1]; ``G_at_endpoint`` is False when the peak is interior.
    """
    k = kappa(spec.beta, spec.mu, spec.rho)
    ka = kappa_abs(spec.beta, spec.mu, spec.rho)
    A = spec.rhs.equibound
    L = spec.rhs.lipschitz
    xs = np.linspace(0.0, 1.0, _BRACKET_SAMPLES)
    vals = bracket(xs, spec.beta, spec.mu, spec.rho)
    j = int(np.argmax(vals))
    G = k
    G0 = G / (1.0 - G * L) if G * L < 1 else None
    advisories = []
    if spec.rhs.reference_product is not None and abs(k * A - spec.rhs.reference_product) > 1e-3:
        advisories.append(
            f"reference value of kappa*A for {spec.rhs.key!r} is {spec.rhs.reference_product}; "
            f"direct evaluation gives {k * A:.6g} (term-wise absolute variant {ka * A:.6g})"
        )
    if vals[j] > G + 1e-12:
        advisories.append(
            f"bracket peaks at xi = {xs[j]:.4g} with value {vals[j]:.6g} > G = {G:.6g}; "
            "G understates the sup-norm response"
        )
    return ConstantsReport(
        kappa_signed=k,
        kappa_abs=ka,
        A=A,
        L=L,
        product_signed=k * A,
        product_abs=ka * A,
        exists_flag=bool(k * A < 1),
        unique_flag=bool(k * L < 1),
        G=G,
        G0=G0,
        rho_requested=spec.rho,
        rho_effective=spec.rho_effective,
        bracket_sup=float(vals[j]),
        bracket_argmax=float(xs[j]),
        G_at_endpoint=bool(vals[j] <= G + 1e-12),
        advisories=advisories,
    )


def evaluate_rhs(spec: BvpSpec, m: np.ndarray, forcing: np.ndarray | None = None) -> np.ndarray:
    """phi samples on the grid, plus an optional additive ``forcing``.

    Raises EvaluationError naming the first non-finite component and node.
    """
    grid = spec.grid
    m = np.asarray(m, dtype=float)
    if m.shape != (spec.N, grid.M + 1):
        raise ValueError(f"grid function must have shape {(spec.N, grid.M + 1)}, got {m.shape}")
    phi = spec.rhs.evaluate(grid.nodes, m)
    if forcing is not None:
        phi = phi + forcing
    bad = ~np.isfinite(phi)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise EvaluationError(
            f"phi_{i + 1} is not finite at node {j} (xi = {grid.nodes[j]:.6g}): {phi[i, j]}"
        )
    return phi


def green_apply(spec: BvpSpec, m: np.ndarray, forcing: np.ndarray | None = None) -> np.ndarray:
    """Apply F to the grid function ``m`` of shape (N, M + 1).

    Components are processed one at a time with a fixed summation order,
    so each row of the result is independent of N.  Column 0 is exactly 0.
    """
    phi = evaluate_rhs(spec, m, forcing)
    grid = spec.grid
    xi = grid.nodes
    beta = spec.beta
    W = weight_matrix(grid, beta)
    full = W[grid.M]
    swapped = weight_matrix(grid, beta + 1.0)[spec.rho_index] / beta
    den = _denominator(spec.mu, spec.rho_effective)
    gb = gamma(beta)

    out = np.empty_like(phi)
    for i, p in enumerate(phi):
        local = W @ p
        boundary = (-2.0 * (full @ p) + 2.0 * spec.mu * (swapped @ p)) / den
        out[i] = (local + xi * boundary) / gb
    return out


def double_integral_crosscheck(
    spec: BvpSpec, phi: np.ndarray, quad_points: int = 12
) -> tuple[float, float]:
    """Two evaluations of int_0^rho int_0^s (s - n)^(beta-1) phi_h(n) dn ds.

    ``phi`` holds samples on the grid nodes in [0, rho_effective] (longer
    arrays are truncated).  ``reduced`` uses the order-swapped single
    integral with kernel (rho - n)^beta / beta.  ``nested`` evaluates the
    inner integral exactly at Gauss points of the outer variable; each
    outer cell is mapped by s = s_j + h u**5 to smooth the (s - s_j)^beta
    behaviour.  Both integrate the same piecewise-linear interpolant, so
    they agree up to the outer quadrature error.
    """
    grid = spec.grid
    r = spec.rho_index
    phi = np.asarray(phi, dtype=float)
    if phi.size < r + 1:
        raise ValueError(f"need {r + 1} samples on [0, rho], got {phi.size}")
    f = np.zeros(grid.M + 1)
    f[: r + 1] = phi[: r + 1]
    beta = spec.beta

    reduced = float(weight_matrix(grid, beta + 1.0)[r] @ f) / beta

    power = 5
    u, w = np.polynomial.legendre.leggauss(quad_points)
    u = 0.5 * (u + 1.0)
    w = 0.5 * w
    h = grid.h
    starts = grid.nodes[:r]
    points = (starts[:, None] + h * u[None, :] ** power).ravel()
    inner = interpolant_kernel_integral(f, grid, points, beta).reshape(r, quad_points)
    jac = h * power * u ** (power - 1)
    nested = float(np.sum(inner @ (w * jac)))
    return reduced, nested
