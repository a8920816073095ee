r"""Fractional integrals on a uniform grid over [0, 1].

The Riemann-Liouville integral

.. math::

    I^\beta f(t) = \frac{1}{\Gamma(\beta)} \int_0^t (t - s)^{\beta - 1} f(s)\,ds

is discretized by the product trapezoidal rule: ``f`` is replaced by its
piecewise-linear interpolant on the grid and the kernel moments on each
cell are integrated in closed form.  The rule is exact for piecewise-linear
``f`` and needs no special treatment of the endpoint singularity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, GridError

#: Relative tolerance used to decide whether a point lies on the grid.
GRID_ATOL = 1e-12

# Below this |x| the binomial tail series is used instead of direct powers.
_SERIES_CUTOFF = 1.0 / 16.0
_SERIES_TERMS = 14


def gamma(x: float) -> float:
    """Gamma function for x > 0."""
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"gamma is only defined here for finite x > 0, got {x}")
    return math.gamma(x)


def check_order(beta: float) -> float:
    beta = float(beta)
    if not (0.0 < beta <= 1.0):
        raise DomainError(f"fractional order must satisfy 0 < beta <= 1, got {beta}")
    return beta


@dataclass(frozen=True)
class Grid:
    """Uniform grid xi_j = j / M, j = 0..M."""

    M: int

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise DomainError(f"grid needs a positive integer number of intervals, got {self.M}")
        object.__setattr__(self, "M", int(self.M))

    @property
    def h(self) -> float:
        return 1.0 / self.M

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.M + 1) / self.M

    def index_of(self, point: float) -> int:
        """Index j with xi_j == point; raises GridError otherwise."""
        j = round(point * self.M)
        if not (0 <= j <= self.M) or abs(j - point * self.M) > GRID_ATOL * self.M:
            raise GridError(f"{point!r} is not a node of the grid with M = {self.M}")
        return j

    def snap(self, point: float) -> int:
        """Index of the node nearest to ``point`` (clamped into the grid)."""
        return int(min(max(round(point * self.M), 0), self.M))


def _binomial_tail(gam: float, x: np.ndarray) -> np.ndarray:
    """(1 + x)**gam - 1 - gam*x, accurate for small |x|."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) <= _SERIES_CUTOFF
    xs = x[small]
    acc = np.zeros_like(xs)
    coef = gam * (gam - 1.0) / 2.0
    power = xs * xs
    for j in range(2, _SERIES_TERMS + 2):
        acc += coef * power
        coef *= (gam - j) / (j + 1)
        power = power * xs
    out[small] = acc
    xl = x[~small]
    out[~small] = (1.0 + xl) ** gam - 1.0 - gam * xl
    return out


@lru_cache(maxsize=32)
def _weight_matrix(M: int, alpha: float) -> np.ndarray:
    # Row k holds the weights for the upper limit xi_k.  With gam = alpha + 1
    # and h**alpha / (alpha * gam) factored out, the interior weights are
    # second differences of n**gam and the j = 0 weight is
    # (k-1)**gam - (k-1-alpha) * k**alpha.  Both are evaluated through the
    # binomial tail to avoid cancellation for large n.
    gam = alpha + 1.0
    n = np.arange(1, M + 1, dtype=float)
    inv = 1.0 / n
    interior = n**gam * (_binomial_tail(gam, inv) + _binomial_tail(gam, -inv))
    first = n**gam * _binomial_tail(gam, -inv)

    c = np.empty(M + 1)
    c[0] = 1.0
    c[1:] = interior
    k = np.arange(M + 1)[:, None]
    j = np.arange(M + 1)[None, :]
    W = np.where((j >= 1) & (j <= k), c[np.clip(k - j, 0, M)], 0.0)
    W[1:, 0] = first
    W *= (1.0 / M) ** alpha / (alpha * gam)
    W.flags.writeable = False
    return W


def weight_matrix(grid: Grid, alpha: float) -> np.ndarray:
    """Lower-triangular (M+1, M+1) matrix of product-trapezoidal weights.

    ``weight_matrix(grid, alpha)[k] @ f`` equals the integral of
    ``(xi_k - s)**(alpha - 1) * f_h(s)`` over ``[0, xi_k]`` where ``f_h`` is
    the piecewise-linear interpolant of the samples ``f``.  ``alpha`` may be
    any positive exponent; values above 1 give a nonsingular kernel.
    Results are cached per (M, alpha) and returned read-only.
    """
    alpha = float(alpha)
    if not alpha > 0:
        raise DomainError(f"kernel exponent must be positive, got {alpha}")
    return _weight_matrix(grid.M, alpha)


def kernel_weights(grid: Grid, upper: float, beta: float) -> np.ndarray:
    """Weights w_j with sum_j w_j f(xi_j) = int_0^upper (upper-s)^(beta-1) f_h(s) ds."""
    beta = check_order(beta)
    k = grid.index_of(upper)
    return np.array(weight_matrix(grid, beta)[k])


def rl_integral(f: np.ndarray, beta: float, upper: float, grid: Grid | None = None) -> float:
    """Riemann-Liouville integral of the sampled function ``f`` at a grid node.

    ``f`` holds samples at all M + 1 nodes; when ``grid`` is omitted it is
    inferred from the sample count.
    """
    f = np.asarray(f, dtype=float)
    if grid is None:
        grid = Grid(f.size - 1)
    if f.shape != (grid.M + 1,):
        raise GridError(f"expected {grid.M + 1} samples, got shape {f.shape}")
    w = kernel_weights(grid, upper, beta)
    return float(w @ f) / gamma(beta)


def interpolant_kernel_integral(
    f: np.ndarray, grid: Grid, x: np.ndarray, alpha: float
) -> np.ndarray:
    """int_0^x (x - s)^(alpha-1) f_h(s) ds for arbitrary points ``x`` in [0, 1].

    Evaluated cell by cell from closed-form moments, so it needs no grid
    alignment of ``x``.  Cost is O(len(x) * M).
    """
    f = np.asarray(f, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))[:, None]
    s = grid.nodes
    left = s[None, :-1]
    right = s[None, 1:]
    slope = np.diff(f) / grid.h

    b = np.clip(x - left, 0.0, None)
    a = np.clip(x - right, 0.0, None)
    A = (b**alpha - a**alpha) / alpha
    C = (b ** (alpha + 1) - a ** (alpha + 1)) / (alpha + 1)
    # f_h(s) = f_i + slope_i (s - s_i) and s - s_i = b - u with u = x - s
    cell = f[None, :-1] * A + slope[None, :] * (b * A - C)
    return cell.sum(axis=1)


def caputo_monomial(p: float, beta: float, xi: float) -> float:
    """Caputo derivative of order beta of xi**p.

    ``p = 0`` is accepted as the constant function, whose derivative is 0.
    Otherwise p >= 1 is required.
    """
    beta = check_order(beta)
    if p == 0:
        return 0.0
    if p < 1:
        raise DomainError(f"caputo_monomial needs p >= 1 (or p = 0), got {p}")
    if xi < 0:
        raise DomainError(f"xi must be nonnegative, got {xi}")
    if xi == 0.0:
        return 0.0 if p > beta else gamma(p + 1)
    return gamma(p + 1) / gamma(p + 1 - beta) * xi ** (p - beta)


def rl_monomial(p: float, beta: float, xi: float) -> float:
    """Closed form I^beta[s**p](xi) = Gamma(p+1)/Gamma(p+1+beta) xi**(p+beta)."""
    return gamma(p + 1) / gamma(p + 1 + beta) * xi ** (p + beta)
