"""Exponents, p-norms, the gradient map and the semi-inner product of l^n_p."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, ShapeError


class Kind(enum.Enum):
    ONE = "1"
    FINITE = "finite"
    INFINITY = "inf"


@dataclass(frozen=True)
class PExponent:
    """The norm parameter p in [1, inf].

    ``p = 1`` and ``p = inf`` are stored as distinguished kinds; ``value`` is
    only populated for the smooth range ``1 < p < inf``.
    """

    kind: Kind
    value: float | None = None

    def __post_init__(self) -> None:
        if self.kind is Kind.FINITE:
            if self.value is None or not math.isfinite(self.value) or self.value <= 1.0:
                raise DomainError(f"finite exponent must lie in (1, inf), got {self.value!r}")
        elif self.value is not None:
            raise DomainError("ONE and INFINITY carry no numeric value")

    @classmethod
    def of(cls, p: "PLike") -> "PExponent":
        """Coerce a float, int, string (``"1"``, ``"inf"``, decimal) or exponent."""
        if isinstance(p, PExponent):
            return p
        if isinstance(p, str):
            text = p.strip().lower()
            if text in ("inf", "infinity", "oo", "∞"):
                return INFINITY
            try:
                p = float(text)
            except ValueError:
                raise DomainError(f"cannot parse exponent {p!r}") from None
        p = float(p)
        if math.isnan(p) or p < 1.0:
            raise DomainError(f"exponent must be >= 1, got {p!r}")
        if p == 1.0:
            return ONE
        if math.isinf(p):
            return INFINITY
        return cls(Kind.FINITE, p)

    @property
    def is_one(self) -> bool:
        return self.kind is Kind.ONE

    @property
    def is_infinite(self) -> bool:
        return self.kind is Kind.INFINITY

    @property
    def is_smooth(self) -> bool:
        """True for 1 < p < inf, where the norm is differentiable off the origin."""
        return self.kind is Kind.FINITE

    def require_smooth(self, what: str = "operation") -> float:
        if not self.is_smooth:
            raise DomainError(f"{what} requires a finite exponent p > 1, got p={self}")
        return self.value  # type: ignore[return-value]

    def as_float(self) -> float:
        if self.kind is Kind.ONE:
            return 1.0
        if self.kind is Kind.INFINITY:
            return math.inf
        return self.value  # type: ignore[return-value]

    def __str__(self) -> str:
        if self.kind is Kind.ONE:
            return "1"
        if self.kind is Kind.INFINITY:
            return "inf"
        v = self.value
        return str(int(v)) if v.is_integer() else repr(v)


ONE = PExponent(Kind.ONE)
INFINITY = PExponent(Kind.INFINITY)

PLike = Union[PExponent, float, int, str]


def dual_exponent(p: PLike) -> PExponent:
    """The conjugate exponent q with 1/p + 1/q = 1."""
    p = PExponent.of(p)
    if p.is_one:
        return INFINITY
    if p.is_infinite:
        return ONE
    v = p.value
    return PExponent(Kind.FINITE, v / (v - 1.0))


@dataclass(frozen=True)
class ToleranceConfig:
    residual_tol: float = 1e-10
    rank_tol: float = 1e-9
    quantization_step: float = 1e-8
    newton_max_iter: int = 200
    oracle_lambda_window: tuple[float, float] = (-4.0, 4.0)

    def __post_init__(self) -> None:
        lo, hi = self.oracle_lambda_window
        for name in ("residual_tol", "rank_tol", "quantization_step", "newton_max_iter"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be strictly positive")
        if not (lo < 0 < hi):
            raise DomainError("oracle_lambda_window must straddle 0")


DEFAULT_TOL = ToleranceConfig()


def as_vector(x) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ShapeError(f"expected a non-empty 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise DomainError("vector components must be finite")
    return v


class BasisMatrix:
    """An n x n matrix whose rows are candidate basis vectors of l^n_p.

    Immutable: the row array is stored read-only.
    """

    __slots__ = ("rows", "p")

    def __init__(self, rows, p: PLike) -> None:
        a = np.array(rows, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ShapeError(f"basis matrix must be square and non-empty, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise DomainError("basis matrix entries must be finite")
        a.setflags(write=False)
        object.__setattr__(self, "rows", a)
        object.__setattr__(self, "p", PExponent.of(p))

    def __setattr__(self, name, value):
        raise AttributeError("BasisMatrix is immutable")

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    def with_rows(self, rows) -> "BasisMatrix":
        return BasisMatrix(rows, self.p)

    def at(self, p: PLike) -> "BasisMatrix":
        return BasisMatrix(self.rows, p)

    def __array__(self, dtype=None, copy=None):
        return self.rows if dtype is None else self.rows.astype(dtype)

    def __repr__(self) -> str:
        return f"BasisMatrix(p={self.p}, rows={self.rows.tolist()})"


def p_norm(x, p: PLike) -> float:
    """(sum |x_i|^p)^(1/p); max |x_i| for p = inf; sum |x_i| for p = 1."""
    v = np.abs(as_vector(x))
    p = PExponent.of(p)
    if p.is_infinite:
        return float(v.max())
    if p.is_one:
        return float(v.sum())
    m = v.max()
    if m == 0.0:
        return 0.0
    # scaled to avoid overflow/underflow for large p
    return float(m * np.sum((v / m) ** p.value) ** (1.0 / p.value))


def row_norms(rows, p: PLike) -> np.ndarray:
    """p-norms of the rows of a 2-D array."""
    a = np.abs(np.asarray(rows, dtype=float))
    p = PExponent.of(p)
    if p.is_infinite:
        return a.max(axis=1)
    if p.is_one:
        return a.sum(axis=1)
    m = a.max(axis=1)
    safe = np.where(m > 0, m, 1.0)
    return m * np.sum((a / safe[:, None]) ** p.value, axis=1) ** (1.0 / p.value)


def _abs_pow(a: np.ndarray, e: float) -> np.ndarray:
    # |a|^e with the convention 0 -> 0, computed through the log domain
    mag = np.abs(a)
    out = np.zeros_like(mag)
    nz = mag > 0
    out[nz] = np.exp(e * np.log(mag[nz]))
    return out


def p_map_array(a, p: float) -> np.ndarray:
    """Elementwise a |a|^(p-2) for any array shape; p is a plain float."""
    a = np.asarray(a, dtype=float)
    return a * _abs_pow(a, p - 2.0)


def p_map(x, p: PLike) -> np.ndarray:
    """The gradient map x -> (x_j |x_j|^(p-2))_j, defined for finite p > 1."""
    pv = PExponent.of(p).require_smooth("p_map")
    return p_map_array(as_vector(x), pv)


def semi_inner_product(y, x, p: PLike) -> float:
    """[y, x] = sum_j y_j x_j |x_j|^(p-2) / ||x||_p^(p-2)."""
    pv = PExponent.of(p).require_smooth("semi_inner_product")
    x = as_vector(x)
    y = as_vector(y)
    if x.shape != y.shape:
        raise ShapeError("vectors must have equal length")
    nx = p_norm(x, pv)
    if nx == 0.0:
        raise DomainError("semi-inner product [y, x] is undefined for x = 0")
    return float(np.dot(y, p_map_array(x, pv)) / nx ** (pv - 2.0))


def unit_rows(rows, p: PLike) -> np.ndarray:
    """Rescale each nonzero row to unit p-norm."""
    a = np.asarray(rows, dtype=float)
    nrm = row_norms(a, p)
    nrm = np.where(nrm > 0, nrm, 1.0)
    return a / nrm[:, None]
