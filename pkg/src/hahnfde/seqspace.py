"""Arithmetic in the generalized Hahn space h_d.

Elements are finitely supported: a vector of length N stands for the
sequence (m_1, ..., m_N, 0, 0, ...).  Because h_d has the AK property this
representation is exact for the norm and for forward differences.

Indices follow the mathematical convention n = 1, 2, ...; position ``k`` of
a numpy array holds entry n = k + 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np

from .errors import ConfigError

WEIGHT_KINDS = ("linear", "power", "constant", "table")


@dataclass(frozen=True)
class WeightSequence:
    """Positive, nondecreasing weights d = (d_n), n >= 1.

    ``linear``: d_n = n.  ``power``: d_n = n**p (p >= 0).  ``constant``:
    d_n = 1.  ``table``: the listed values, extended past the end by the
    last growth ratio (clamped to at least 1 so the sequence stays
    monotone).
    """

    kind: str = "linear"
    p: float = 1.0
    table: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise ConfigError(f"weights.kind: expected one of {WEIGHT_KINDS}, got {self.kind!r}")
        if self.kind == "power" and not (np.isfinite(self.p) and self.p >= 0):
            raise ConfigError(f"weights.p: exponent must be >= 0, got {self.p}")
        if self.kind == "table":
            t = np.asarray(self.table, dtype=float)
            if t.size == 0:
                raise ConfigError("weights.table: must be non-empty")
            if not np.all(np.isfinite(t)) or np.any(t <= 0):
                raise ConfigError("weights.table: entries must be finite and positive")
            if np.any(np.diff(t) < 0):
                raise ConfigError("weights.table: entries must be nondecreasing")
            object.__setattr__(self, "table", tuple(float(v) for v in t))

    @property
    def growth(self) -> float:
        """Ratio used to extend a table past its last entry."""
        t = self.table
        if len(t) < 2:
            return 1.0
        return max(1.0, t[-1] / t[-2])

    def values(self, N: int) -> np.ndarray:
        """Return the array (d_1, ..., d_N)."""
        n = np.arange(1, N + 1, dtype=float)
        if self.kind == "linear":
            return n
        if self.kind == "power":
            return n**self.p
        if self.kind == "constant":
            return np.ones(N)
        t = np.asarray(self.table)
        if N <= t.size:
            return t[:N].copy()
        extra = t[-1] * self.growth ** np.arange(1, N - t.size + 1, dtype=float)
        return np.concatenate([t, extra])

    def __call__(self, n: int) -> float:
        if n < 1:
            raise ValueError(f"weights are indexed from n = 1, got {n}")
        return float(self.values(n)[-1])

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind}
        if self.kind == "power":
            out["p"] = self.p
        if self.kind == "table":
            out["table"] = list(self.table)
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> WeightSequence:
        unknown = set(data) - {"kind", "p", "table"}
        if unknown:
            raise ConfigError([f"weights.{k}: unknown key" for k in sorted(unknown)])
        return cls(
            kind=data.get("kind", "linear"),
            p=float(data.get("p", 1.0)),
            table=tuple(data.get("table", ())),
        )


@dataclass(frozen=True)
class HahnVector:
    """Finitely supported element (m_1, ..., m_N) of h_d."""

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if v.size == 0:
            raise ValueError("HahnVector needs at least one entry")
        if not np.all(np.isfinite(v)):
            raise ValueError("HahnVector entries must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def unit(cls, j: int, N: int | None = None) -> HahnVector:
        """The coordinate vector e^(j)."""
        v = np.zeros(max(j, N or j))
        v[j - 1] = 1.0
        return cls(v)

    @property
    def N(self) -> int:
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __len__(self) -> int:
        return self.N

    def _padded(self, other: HahnVector) -> tuple[np.ndarray, np.ndarray]:
        n = max(self.N, other.N)
        a = np.zeros(n)
        b = np.zeros(n)
        a[: self.N] = self.values
        b[: other.N] = other.values
        return a, b

    def __add__(self, other: HahnVector) -> HahnVector:
        a, b = self._padded(other)
        return HahnVector(a + b)

    def __sub__(self, other: HahnVector) -> HahnVector:
        a, b = self._padded(other)
        return HahnVector(a - b)

    def __mul__(self, alpha: float) -> HahnVector:
        return HahnVector(self.values * alpha)

    __rmul__ = __mul__

    def __neg__(self) -> HahnVector:
        return HahnVector(-self.values)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HahnVector):
            return NotImplemented
        a, b = self._padded(other)
        return bool(np.array_equal(a, b))

    def __hash__(self) -> int:
        v = np.trim_zeros(self.values, "b")
        return hash(v.tobytes())


def _as_array(m: HahnVector | Iterable[float]) -> np.ndarray:
    return np.asarray(m, dtype=float)


def forward_difference(m: HahnVector | Iterable[float]) -> np.ndarray:
    """Return (m_n - m_{n+1}) for n = 1..N, using m_{N+1} = 0."""
    v = _as_array(m)
    out = v.copy()
    out[:-1] -= v[1:]
    return out


def hahn_norm(m: HahnVector | Iterable[float], d: WeightSequence) -> float:
    """sum_n d_n |m_n - m_{n+1}|, exact for finite support."""
    delta = forward_difference(m)
    return float(np.dot(d.values(delta.size), np.abs(delta)))


def hahn_norm_columns(u: np.ndarray, d: WeightSequence) -> np.ndarray:
    """h_d norm of every column of an (N, P) array.

    Rows index the sequence position n; each column is one sequence (for a
    grid function, its value at one grid node).
    """
    u = np.asarray(u, dtype=float)
    delta = u.copy()
    delta[:-1] -= u[1:]
    return d.values(u.shape[0]) @ np.abs(delta)


def sup_hahn_norm(u: np.ndarray, d: WeightSequence) -> float:
    """Norm of C([0,1], h_d) on a grid: max over nodes of the h_d norm."""
    return float(np.max(hahn_norm_columns(u, d)))


def section(m: HahnVector | Iterable[float], r: int) -> HahnVector:
    """r-section m^[r]: the first r entries kept, the rest set to zero."""
    if r < 1:
        raise ValueError(f"section length must be positive, got {r}")
    v = _as_array(m)
    if r >= v.size:
        return HahnVector(v)
    return HahnVector(v[:r])


def ak_defect(m: HahnVector | Iterable[float], r: int, d: WeightSequence) -> float:
    """||m - m^[r]||_{h_d}; zero once r reaches the support length."""
    v = _as_array(m)
    if r >= v.size:
        return 0.0
    tail = v.copy()
    tail[:r] = 0.0
    return hahn_norm(tail, d)
