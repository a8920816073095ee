"""JSON problem configuration.

Example::

    {"problem": "example72", "N": 20, "M": 256, "tol": 1e-10,
     "weights": {"kind": "linear"}}

``problem`` is a registry key or ``{"key": ..., "params": {...}}``.
``beta``, ``mu`` and ``rho`` default to the registry entry's values.
Unknown keys are rejected.
"""

from __future__ import annotations

import json
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .bvp import SINGULAR_TOL, BvpSpec
from .errors import ConfigError, SingularParameterError
from .problems import PROBLEMS, make_spec
from .seqspace import WeightSequence


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class WeightsConfig(_Strict):
    kind: Literal["linear", "power", "constant", "table"] = "linear"
    p: float = 1.0
    table: list[float] = Field(default_factory=list)

    def build(self) -> WeightSequence:
        return WeightSequence(self.kind, self.p, tuple(self.table))


class InlineProblem(_Strict):
    key: str
    params: dict[str, Optional[float]] = Field(default_factory=dict)


class ProblemConfig(_Strict):
    problem: Union[str, InlineProblem]
    beta: Optional[float] = None
    mu: Optional[float] = None
    rho: Optional[float] = None
    weights: WeightsConfig = Field(default_factory=WeightsConfig)
    N: int = Field(20, ge=1)
    M: int = Field(256, ge=2)
    tol: float = Field(1e-10, gt=0)
    max_iter: int = Field(200, ge=1)
    output: Literal["json", "csv"] = "json"

    @field_validator("beta")
    @classmethod
    def _beta_range(cls, v):
        if v is not None and not (0.0 < v <= 1.0):
            raise ValueError(f"must satisfy 0 < beta <= 1, got {v}")
        return v

    @field_validator("rho")
    @classmethod
    def _rho_range(cls, v):
        if v is not None and not (0.0 < v < 1.0):
            raise ValueError(f"must satisfy 0 < rho < 1, got {v}")
        return v

    @field_validator("problem")
    @classmethod
    def _known_problem(cls, v):
        key = v if isinstance(v, str) else v.key
        if key not in PROBLEMS:
            raise ValueError(f"unknown problem {key!r}; expected one of {sorted(PROBLEMS)}")
        return v

    @property
    def key(self) -> str:
        return self.problem if isinstance(self.problem, str) else self.problem.key

    @property
    def params(self) -> dict[str, float | None]:
        return {} if isinstance(self.problem, str) else dict(self.problem.params)

    def resolved(self) -> tuple[float, float, float]:
        """(beta, mu, rho) with registry defaults filled in."""
        prob = PROBLEMS[self.key]
        return (
            prob.beta if self.beta is None else self.beta,
            prob.mu if self.mu is None else self.mu,
            prob.rho if self.rho is None else self.rho,
        )

    def to_spec(self, *, N: int | None = None, M: int | None = None) -> BvpSpec:
        beta, mu, rho = self.resolved()
        return make_spec(
            self.key,
            beta=beta,
            mu=mu,
            rho=rho,
            N=self.N if N is None else N,
            M=self.M if M is None else M,
            weights=self.weights.build(),
            params=self.params,
        )


def _format_errors(exc: ValidationError) -> list[str]:
    out = []
    for err in exc.errors():
        path = ".".join(str(p) for p in err["loc"]) or "config"
        msg = err["msg"]
        if msg.startswith("Value error, "):
            msg = msg[len("Value error, "):]
        out.append(f"{path}: {msg}")
    return out


def parse_config(text: str) -> ProblemConfig:
    """Parse and validate a JSON config; the returned config always yields a valid spec.

    Raises ConfigError (listing every offending field) or
    SingularParameterError when mu * rho**2 = 2.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError("config: expected a JSON object")
    try:
        cfg = ProblemConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(_format_errors(exc)) from None
    _, mu, rho = cfg.resolved()
    if abs(2.0 - mu * rho * rho) <= SINGULAR_TOL:
        raise SingularParameterError(f"mu * rho**2 = 2 (mu = {mu}, rho = {rho}); the problem is singular")
    cfg.to_spec()
    return cfg


def load_config(path: str) -> ProblemConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    return parse_config(text)
