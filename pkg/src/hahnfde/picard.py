"""Picard iteration for the truncated system, plus truncation and grid studies."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping

import numpy as np

from .bvp import BvpSpec, green_apply
from .errors import DivergenceError, EvaluationError
from .seqspace import sup_hahn_norm

# Divergence: the step norm grew by more than this factor over the window.
DIVERGENCE_FACTOR = 10.0
DIVERGENCE_WINDOW = 5
# Ratios with a smaller denominator are excluded from the contraction estimate.
RATIO_FLOOR = 1e-14


@dataclass
class SolveReport:
    solution: np.ndarray
    iterations: int
    residual_history: list[float]
    converged: bool
    empirical_contraction: float
    final_residual: float
    tol: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "solution": self.solution.tolist(),
            "iterations": self.iterations,
            "residual_history": list(self.residual_history),
            "converged": self.converged,
            "empirical_contraction": self.empirical_contraction,
            "final_residual": self.final_residual,
            "tol": self.tol,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> SolveReport:
        data = dict(data)
        data["solution"] = np.asarray(data["solution"], dtype=float)
        return cls(**data)


def empirical_contraction(history: list[float]) -> float:
    """Largest ratio of consecutive step norms (0.0 if none is defined)."""
    ratios = [b / a for a, b in zip(history, history[1:]) if a > RATIO_FLOOR]
    return max(ratios, default=0.0)


def residual(spec: BvpSpec, m: np.ndarray, forcing: np.ndarray | None = None) -> float:
    """max over nodes of ||m - F m||_{h_d}."""
    m = np.asarray(m, dtype=float)
    return sup_hahn_norm(m - green_apply(spec, m, forcing), spec.weights)


def picard_solve(
    spec: BvpSpec,
    init: np.ndarray | None = None,
    tol: float = 1e-10,
    max_iter: int = 200,
    forcing: np.ndarray | None = None,
) -> SolveReport:
    """Iterate m <- F m from ``init`` (default zero) until the step is <= tol.

    The step is measured in the C([0,1], h_d) norm, i.e. the largest h_d
    norm over grid nodes.  ``forcing`` is added to the right-hand side
    samples at every iteration.

    Raises DivergenceError if the step grows more than tenfold over five
    iterations, EvaluationError on a non-finite iterate.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be positive, got {max_iter}")
    shape = (spec.N, spec.M + 1)
    m = np.zeros(shape) if init is None else np.array(init, dtype=float)
    if m.shape != shape:
        raise ValueError(f"initial iterate must have shape {shape}, got {m.shape}")

    history: list[float] = []
    converged = False
    for _ in range(max_iter):
        new = green_apply(spec, m, forcing)
        if not np.all(np.isfinite(new)):
            raise EvaluationError(f"iterate {len(history) + 1} is not finite")
        step = sup_hahn_norm(new - m, spec.weights)
        history.append(step)
        m = new
        if step <= tol:
            converged = True
            break
        if (
            len(history) > DIVERGENCE_WINDOW
            and step > DIVERGENCE_FACTOR * history[-1 - DIVERGENCE_WINDOW]
        ):
            raise DivergenceError(
                f"Picard iteration diverging: step {step:.3e} after {len(history)} iterations",
                history,
            )
    return SolveReport(
        solution=m,
        iterations=len(history),
        residual_history=history,
        converged=converged,
        empirical_contraction=empirical_contraction(history),
        final_residual=residual(spec, m, forcing),
        tol=tol,
    )


@dataclass
class TruncationRow:
    N: int
    norm: float
    delta: float | None
    iterations: int


def truncation_study(
    spec: BvpSpec, Ns: Iterable[int], tol: float = 1e-10, max_iter: int = 200
) -> list[TruncationRow]:
    """Solve at each truncation size and compare consecutive solutions.

    ``delta`` is the C([0,1], h_d) norm of the difference between solutions
    at consecutive sizes, restricted to their shared leading components.
    """
    Ns = list(Ns)
    if any(b < a for a, b in zip(Ns, Ns[1:])):
        raise ValueError(f"truncation sizes must be nondecreasing, got {Ns}")
    rows = []
    prev = None
    for N in Ns:
        rep = picard_solve(dataclasses.replace(spec, N=N), tol=tol, max_iter=max_iter)
        sol = rep.solution
        delta = None
        if prev is not None:
            k = min(prev.shape[0], N)
            delta = sup_hahn_norm(sol[:k] - prev[:k], spec.weights)
        rows.append(TruncationRow(N, sup_hahn_norm(sol, spec.weights), delta, rep.iterations))
        prev = sol
    return rows


@dataclass
class RefinementRow:
    M: int
    error: float
    order: float | None
    iterations: int
    reference: str = field(default="exact")


def refinement_study(
    spec: BvpSpec | Callable[[int], BvpSpec],
    Ms: Iterable[int],
    tol: float = 1e-10,
    max_iter: int = 200,
) -> list[RefinementRow]:
    """Max-abs error of the solution for each grid size, with observed orders.

    ``spec`` is either a fixed problem (re-gridded with ``M`` replaced) or a
    callable returning the problem for a given M, for families that depend
    on the snapped rho.  The error is measured against the family's exact
    solution when it has one, otherwise against the finest grid (the Ms
    must then nest).
    """
    make = spec if callable(spec) else (lambda M: dataclasses.replace(spec, M=M))
    Ms = sorted(Ms)
    sols = {}
    for M in Ms:
        sub = make(M)
        sols[M] = (sub, picard_solve(sub, tol=tol, max_iter=max_iter))

    rows = []
    finest = Ms[-1]
    for M in Ms:
        sub, rep = sols[M]
        if sub.rhs.exact is not None:
            ref = np.broadcast_to(sub.rhs.exact(sub.grid.nodes), rep.solution.shape)
            kind = "exact"
        else:
            if finest % M:
                raise ValueError(f"grid sizes must nest for a finest-grid reference: {finest} % {M} != 0")
            ref = sols[finest][1].solution[:, :: finest // M]
            kind = f"M={finest}"
        err = float(np.max(np.abs(rep.solution - ref)))
        rows.append(RefinementRow(M, err, None, rep.iterations, kind))
    for a, b in zip(rows, rows[1:]):
        if a.error > 0 and b.error > 0:
            b.order = math.log(a.error / b.error) / math.log(b.M / a.M)
    return rows
