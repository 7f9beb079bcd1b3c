"""The contraction matrix type every routine in the package acts on."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import EigenvalueOnCircle, InvalidInput

NORM_SLACK = 1e-9
SPECTRAL_MARGIN = 1e-10


@dataclass(frozen=True, eq=False)
class ContractionOperator:
    """Square complex matrix with norm at most one and spectrum inside the disk.

    At finite dimension these are exactly the completely non-unitary
    contractions of class C0.  The minimal function is computed lazily
    and cached.
    """

    matrix: np.ndarray

    def __post_init__(self):
        a = np.array(self.matrix, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise InvalidInput(f"expected a non-empty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidInput("matrix has non-finite entries")
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)
        norm = np.linalg.norm(a, 2)
        if norm > 1 + NORM_SLACK:
            raise InvalidInput(f"operator norm {norm:.12g} exceeds 1")
        rho = np.max(np.abs(self.eigenvalues))
        if rho >= 1 - SPECTRAL_MARGIN:
            raise EigenvalueOnCircle(f"spectral radius {rho:.12g} is not below 1")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.matrix)

    @cached_property
    def minimal_function(self):
        from .calculus import minimal_function

        return minimal_function(self)

    @cached_property
    def jordan_model(self):
        from .calculus import jordan_model

        return jordan_model(self)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))


def as_matrix(t) -> np.ndarray:
    if isinstance(t, ContractionOperator):
        return t.matrix
    return np.asarray(t, dtype=complex)


def as_operator(t) -> ContractionOperator:
    return t if isinstance(t, ContractionOperator) else ContractionOperator(t)
