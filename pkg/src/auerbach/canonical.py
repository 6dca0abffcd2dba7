"""Canonical representatives of bases under signed row and column permutations."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .core import DEFAULT_TOL, BasisMatrix, ToleranceConfig
from .errors import SizeError

MAX_CANONICAL_N = 6


class Label(str, enum.Enum):
    IDENTITY = "IDENTITY"
    BLOCK_H2 = "BLOCK_H2"
    JP = "JP"
    JINF_FAMILY = "JINF_FAMILY"
    OTHER = "OTHER"
    ORTHOGONAL_GROUP = "ORTHOGONAL_GROUP"


@dataclass(frozen=True, eq=False)
class CanonicalClass:
    """Quantized orbit representative of a basis.

    ``key`` holds the representative as integer multiples of ``step``; two
    classes are equal when their keys and steps agree. ``source`` keeps the
    unquantized basis the class was computed from.
    """

    key: tuple[tuple[int, ...], ...]
    step: float
    representative: BasisMatrix
    source: BasisMatrix
    label: Label | None = None
    name: str | None = None
    info: dict = field(default_factory=dict)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CanonicalClass):
            return NotImplemented
        return self.key == other.key and self.step == other.step

    def __hash__(self) -> int:
        return hash((self.key, self.step))

    @property
    def n(self) -> int:
        return len(self.key)

    def key_array(self) -> np.ndarray:
        return np.array(self.key, dtype=np.int64)

    def close_to(self, other: "CanonicalClass", slack: int = 2) -> bool:
        """Keys agree up to ``slack`` quantization units in every entry."""
        if self.n != other.n or self.step != other.step:
            return False
        return int(np.max(np.abs(self.key_array() - other.key_array()))) <= slack

    def relabel(self, label: Label | None, name: str | None = None, **info) -> "CanonicalClass":
        merged = {**self.info, **info}
        return CanonicalClass(self.key, self.step, self.representative, self.source, label, name or self.name, merged)


def quantize(rows: np.ndarray, step: float) -> np.ndarray:
    return np.rint(np.asarray(rows, dtype=float) / step).astype(np.int64)


def canonical_form(B: BasisMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> CanonicalClass:
    """Quantize, then minimize over all 2^n n! signed column permutations.

    For each column transform the rows are sign-normalized (first nonzero
    entry positive) and sorted; the lexicographically smallest result is the
    representative.
    """
    if B.n > MAX_CANONICAL_N:
        raise SizeError(f"exact canonical form supports n <= {MAX_CANONICAL_N}, got n={B.n}")
    step = tol.quantization_step
    K = kernels.canonical_key(quantize(B.rows, step))
    rep = BasisMatrix(K * step, B.p)
    return CanonicalClass(tuple(map(tuple, K.tolist())), step, rep, B)


def same_orbit(A: BasisMatrix, B: BasisMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    if A.n != B.n:
        return False
    return canonical_form(A, tol).close_to(canonical_form(B, tol))


def row_equivalence_count(cls: CanonicalClass) -> int:
    """Number of distinct bases in the class when only row permutations and row signs are identified."""
    forms = kernels.orbit_row_forms(cls.key_array())
    return int(np.unique(forms, axis=0).shape[0])
