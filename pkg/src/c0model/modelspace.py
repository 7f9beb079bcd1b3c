"""Coordinates for the model space ``H(theta) = H^2 (-) theta H^2``.

Everything is expressed in the Takenaka-Malmquist orthonormal basis

    e_k(z) = sqrt(1 - |a_k|^2) / (1 - conj(a_k) z) * prod_{j<k} b_{a_j}(z),

built from a chosen ordering ``a_1, ..., a_N`` of the zeros of ``theta``
(repeated by multiplicity).  In that basis the compressed shift is lower
triangular, and its leading ``d x d`` block only depends on the first ``d``
zeros, which is what makes restrictions to divisor kernels exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.polynomial.polynomial as npoly
from scipy.linalg import block_diag

from .errors import DegreeZero, InvalidInput, NotARoot
from .inner import TAU_ZERO, BlaschkeProduct, RationalFunction, divides
from .operators import ContractionOperator

__all__ = [
    "ModelSpace",
    "JordanModel",
    "tm_basis",
    "jordan_block",
    "model_kernel",
    "jordan_operator",
    "divisor_first_order",
]


def _check_order(theta: BlaschkeProduct, order) -> tuple:
    if order is None:
        return theta.flat_zeros
    order = tuple(complex(a) for a in order)
    if len(order) != theta.degree or not BlaschkeProduct.from_zeros(order).same_zeros(theta):
        raise InvalidInput("ordering is not a permutation of the zeros of theta")
    return order


def divisor_first_order(theta: BlaschkeProduct, phi: BlaschkeProduct) -> tuple:
    """Zero ordering of `theta` listing the zeros of `phi` first."""
    from .inner import divide

    rest = divide(theta, phi)
    return phi.flat_zeros + rest.flat_zeros


@dataclass(frozen=True, eq=False)
class ModelSpace:
    theta: BlaschkeProduct
    zeros: tuple
    basis: tuple

    @property
    def dim(self) -> int:
        return len(self.zeros)

    def evaluate(self, z) -> np.ndarray:
        """Values ``e_k(z)``, shape ``(N,) + z.shape``."""
        z = np.asarray(z, dtype=complex)
        out = np.empty((self.dim,) + z.shape, dtype=complex)
        prod = np.ones(z.shape, dtype=complex)
        for k, a in enumerate(self.zeros):
            out[k] = np.sqrt(1 - abs(a) ** 2) / (1 - np.conj(a) * z) * prod
            prod = prod * (z - a) / (1 - np.conj(a) * z)
        return out

    def coordinates(self, f, n_points: int = 4096) -> np.ndarray:
        """Boundary inner products ``<f, e_k>`` of a callable `f`."""
        z = np.exp(2j * np.pi * np.arange(n_points) / n_points)
        return (np.asarray(f(z)) * np.conj(self.evaluate(z))).mean(axis=-1)


def tm_basis(theta: BlaschkeProduct, order=None) -> ModelSpace:
    """Takenaka-Malmquist basis of ``H(theta)`` for the given zero ordering."""
    if theta.is_constant:
        raise DegreeZero("H(theta) is trivial for constant theta")
    zeros = _check_order(theta, order)
    basis = []
    num = np.array([1.0 + 0j])
    den = np.array([1.0 + 0j])
    for a in zeros:
        c = np.sqrt(1 - abs(a) ** 2)
        basis.append(RationalFunction(c * num, npoly.polymul(den, [1.0, -np.conj(a)]), reduce=False))
        num = npoly.polymul(num, [-a, 1.0])
        den = npoly.polymul(den, [1.0, -np.conj(a)])
    return ModelSpace(theta, zeros, tuple(basis))


def _shift_matrix(zeros) -> np.ndarray:
    n = len(zeros)
    a = np.asarray(zeros, dtype=complex)
    w = np.sqrt(1 - np.abs(a) ** 2)
    m = np.diag(a).astype(complex)
    for j in range(n):
        p = 1.0 + 0j
        for i in range(j + 1, n):
            m[i, j] = w[i] * w[j] * p
            p *= -np.conj(a[i])
    return m


def jordan_block(theta: BlaschkeProduct, order=None) -> ContractionOperator:
    """Matrix of ``S(theta)`` (compressed multiplication by z) in TM coordinates.

    Entry ``(i, j)`` for ``i > j`` equals
    ``sqrt(1-|a_i|^2) sqrt(1-|a_j|^2) prod_{j<l<i} (-conj(a_l))``; the diagonal
    carries the zeros in the chosen order.
    """
    if theta.is_constant:
        raise DegreeZero("S(theta) needs a non-constant theta")
    return ContractionOperator(_shift_matrix(_check_order(theta, order)))


def model_kernel(theta: BlaschkeProduct, lam: complex, order=None) -> np.ndarray:
    """TM coordinates of ``k(z) = (1 - |lam|^2) / (1 - conj(lam) z)``.

    For a root `lam` of `theta` this kernel lies in ``H(theta)`` and
    ``<f, k / (1 - |lam|^2)> = f(lam)`` for every ``f`` in the space.
    """
    if theta.is_constant:
        raise DegreeZero("H(theta) is trivial for constant theta")
    lam = complex(lam)
    if not abs(lam) < 1 or abs(theta(lam)) >= TAU_ZERO:
        raise NotARoot(f"{lam:.6g} is not a root of theta")
    space = tm_basis(theta, order)
    return (1 - abs(lam) ** 2) * np.conj(space.evaluate(lam))


@dataclass(frozen=True)
class JordanModel:
    """Divisibility chain ``theta_0, theta_1, ...`` with ``theta_{k+1} | theta_k``."""

    blocks: tuple

    def __post_init__(self):
        blocks = tuple(self.blocks)
        object.__setattr__(self, "blocks", blocks)
        for k, b in enumerate(blocks):
            if not isinstance(b, BlaschkeProduct):
                raise InvalidInput(f"block {k} is not a BlaschkeProduct")
            if b.is_constant:
                raise InvalidInput(f"block {k} is constant")
        for k in range(len(blocks) - 1):
            if not divides(blocks[k + 1], blocks[k]):
                raise InvalidInput(f"block {k + 1} does not divide block {k}")

    @property
    def dim(self) -> int:
        return sum(b.degree for b in self.blocks)

    def same_as(self, other: "JordanModel", tol: float = TAU_ZERO) -> bool:
        return len(self.blocks) == len(other.blocks) and all(
            a.same_zeros(b, tol) for a, b in zip(self.blocks, other.blocks)
        )


def jordan_operator(model: JordanModel) -> ContractionOperator:
    """Block-diagonal ``S(theta_0) (+) S(theta_1) (+) ...``."""
    if not model.blocks:
        raise DegreeZero("empty Jordan model")
    return ContractionOperator(block_diag(*[jordan_block(b).matrix for b in model.blocks]))
