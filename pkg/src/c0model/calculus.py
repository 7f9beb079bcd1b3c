"""Rational H-infinity functional calculus on contraction matrices.

Also home to the spectral bookkeeping: minimal functions and Jordan models
are read off Weyr characteristics (nullities of ``(T - mu)^k``) computed on
the Schur block belonging to each eigenvalue cluster.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.cluster.hierarchy import linkage, to_tree
from scipy.linalg import schur, solve, subspace_angles, svd

from .errors import (
    CyclicSearchFailed,
    EigenvalueOnCircle,
    InvalidInput,
    NotADivisor,
    NotMultiplicityFree,
    SingularResolvent,
)
from .inner import BlaschkeProduct, RationalFunction, divide, divides
from .modelspace import JordanModel
from .operators import SPECTRAL_MARGIN, ContractionOperator, as_matrix

__all__ = [
    "ContractionOperator",
    "RANK_RTOL",
    "apply_function",
    "numerical_rank",
    "null_space",
    "spectral_structure",
    "minimal_function",
    "jordan_model",
    "is_cyclic",
    "krylov_ratio",
    "find_cyclic_vector",
    "kernel_of_divisor",
    "range_of_quotient",
    "principal_angle",
    "random_unit_vector",
]

RANK_RTOL = 1e-10
CYCLIC_RTOL = 1e-8
CYCLIC_DRAWS = 16


def numerical_rank(a: np.ndarray, rtol: float = RANK_RTOL, scale: float | None = None) -> int:
    s = svd(a, compute_uv=False)
    if s.size == 0:
        return 0
    ref = s[0] if scale is None else scale
    return int(np.sum(s > rtol * ref))


def null_space(a: np.ndarray, rtol: float = RANK_RTOL, dim: int | None = None) -> np.ndarray:
    """Orthonormal basis of the numerical nullspace (``dim`` forces its size)."""
    _, s, vh = svd(a)
    if dim is None:
        dim = a.shape[1] - int(np.sum(s > rtol * s[0])) if s.size and s[0] > 0 else a.shape[1]
    return vh[a.shape[1] - dim :].conj().T


# -- functional calculus ---------------------------------------------------


def _blaschke_of(theta: BlaschkeProduct, t: np.ndarray) -> np.ndarray:
    n = t.shape[0]
    eye = np.eye(n)
    out = theta.constant * eye
    for zz in theta.zeros:
        a = zz.location
        res = eye - np.conj(a) * t
        if np.linalg.cond(res) > 1e12:
            raise SingularResolvent(f"I - conj({a:.6g}) T is numerically singular")
        factor = solve(res, t - a * eye)
        for _ in range(zz.multiplicity):
            out = out @ factor
    return out


def _poly_of(coeffs, t):
    out = np.zeros_like(t)
    eye = np.eye(t.shape[0])
    for c in coeffs[::-1]:
        out = out @ t + c * eye
    return out


def apply_function(u, t) -> np.ndarray:
    """Matrix ``u(T)`` for a Blaschke product or rational function `u`.

    Blaschke factors are applied as ``(T - a)(I - conj(a) T)^{-1}``; a
    rational ``p/q`` as ``q(T)^{-1} p(T)``.
    """
    t = as_matrix(t)
    if isinstance(u, BlaschkeProduct):
        return _blaschke_of(u, t)
    u = RationalFunction.coerce(u)
    q = _poly_of(u.denominator, t)
    if np.linalg.cond(q) > 1e12:
        raise SingularResolvent("denominator of u is numerically singular at T")
    return solve(q, _poly_of(u.numerator, t))


# -- spectral structure ----------------------------------------------------


@dataclass(frozen=True)
class EigenCluster:
    """One distinct eigenvalue with its Jordan cell sizes (descending)."""

    value: complex
    cells: tuple

    @property
    def algebraic(self) -> int:
        return sum(self.cells)

    @property
    def index(self) -> int:
        return self.cells[0]


def _weyr(t: np.ndarray, members: np.ndarray, eigs: np.ndarray, rtol: float):
    """Cell sizes for the eigenvalue cluster `members`, or None if the
    cluster is not a single eigenvalue numerically."""
    a = len(members)
    chosen = set(members.tolist())

    def pick(x):
        return int(np.argmin(np.abs(eigs - x))) in chosen

    s, _, sdim = schur(t, output="complex", sort=pick)
    if sdim != a:
        return None
    t11 = s[:a, :a]
    mu = np.trace(t11) / a
    block = t11 - mu * np.eye(a)
    scale = max(1.0, np.linalg.norm(t - mu * np.eye(t.shape[0]), 2))
    nullities = [0]
    power = np.eye(a, dtype=complex)
    for k in range(1, a + 1):
        power = power @ block
        nullities.append(a - numerical_rank(power, rtol, scale**k))
        if nullities[-1] == a:
            break
    if nullities[-1] != a:
        return None
    weyr = np.diff(nullities)
    if weyr[0] < 1 or np.any(np.diff(weyr) > 0):
        return None
    cells = tuple(int(np.sum(weyr >= j)) for j in range(1, weyr[0] + 1))
    return EigenCluster(complex(mu), cells)


def spectral_structure(t, rtol: float = RANK_RTOL) -> list:
    """Distinct eigenvalues with Jordan cell sizes.

    Eigenvalues are grouped along a single-linkage dendrogram: a node is
    accepted when its Schur block minus the cluster mean has a valid Weyr
    characteristic, otherwise its children are tried.
    """
    t = as_matrix(t)
    eigs = np.linalg.eigvals(t)
    if np.max(np.abs(eigs)) >= 1 - SPECTRAL_MARGIN:
        raise EigenvalueOnCircle("an eigenvalue lies on or outside the unit circle")
    n = eigs.size
    if n == 1:
        return [EigenCluster(complex(eigs[0]), (1,))]
    root = to_tree(linkage(np.column_stack([eigs.real, eigs.imag]), method="single"))
    out = []
    stack = [root]
    while stack:
        node = stack.pop()
        members = np.array(node.pre_order())
        found = _weyr(t, members, eigs, rtol)
        if found is not None:
            out.append(found)
        elif node.is_leaf():
            raise InvalidInput("could not resolve the Jordan structure of a simple eigenvalue")
        else:
            stack.extend([node.get_right(), node.get_left()])
    out.sort(key=lambda c: (abs(c.value), np.angle(c.value)))
    return out


def minimal_function(t) -> BlaschkeProduct:
    """Canonical Blaschke product of the minimal polynomial of `t`."""
    return BlaschkeProduct.from_zeros([(c.value, c.index) for c in spectral_structure(t)])


def jordan_model(t) -> JordanModel:
    """Invariant-factor chain of ``zI - T`` with each ``(z - a)^k`` sent to ``b_a^k``."""
    clusters = spectral_structure(t)
    depth = max(len(c.cells) for c in clusters)
    blocks = []
    for j in range(depth):
        pairs = [(c.value, c.cells[j]) for c in clusters if j < len(c.cells)]
        blocks.append(BlaschkeProduct.from_zeros(pairs))
    return JordanModel(tuple(blocks))


def _is_multiplicity_free(t) -> bool:
    return all(len(c.cells) == 1 for c in spectral_structure(t))


# -- cyclic vectors ----------------------------------------------------------


def random_unit_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def krylov_ratio(t, xi) -> float:
    """``s_min / s_max`` of the column-normalized Krylov matrix of `xi`."""
    t = as_matrix(t)
    n = t.shape[0]
    cols = np.empty((n, n), dtype=complex)
    v = np.asarray(xi, dtype=complex)
    for k in range(n):
        nv = np.linalg.norm(v)
        if nv == 0:
            return 0.0
        cols[:, k] = v / nv
        v = t @ cols[:, k]
    s = svd(cols, compute_uv=False)
    return float(s[-1] / s[0])


def is_cyclic(t, xi, rtol: float = CYCLIC_RTOL) -> bool:
    return krylov_ratio(t, xi) > rtol


def find_cyclic_vector(t, seed: int = 0, draws: int = CYCLIC_DRAWS) -> np.ndarray:
    """Unit cyclic vector from seeded complex-normal draws."""
    t = as_matrix(t)
    if not _is_multiplicity_free(t):
        raise NotMultiplicityFree("Jordan model has more than one block")
    for k in range(draws):
        xi = random_unit_vector(t.shape[0], np.random.default_rng([seed, k]))
        if is_cyclic(t, xi):
            return xi
    raise CyclicSearchFailed(f"no cyclic vector in {draws} draws")


# -- invariant subspaces -----------------------------------------------------


def _kernel_dimension(clusters, phi: BlaschkeProduct) -> int:
    dim = 0
    for c in clusters:
        m = phi.multiplicity_of(c.value)
        dim += sum(min(m, s) for s in c.cells)
    return dim


def kernel_of_divisor(t, phi: BlaschkeProduct, clusters=None) -> np.ndarray:
    """Orthonormal basis (columns) of ``ker phi(T)`` for a divisor `phi` of the
    minimal function.

    The dimension comes from the Jordan structure; the basis is the matching
    set of trailing right singular vectors of ``phi(T)``.  Pass `clusters`
    (from :func:`spectral_structure`) to skip recomputing it.
    """
    t = as_matrix(t)
    if clusters is None:
        clusters = spectral_structure(t)
    theta = BlaschkeProduct.from_zeros([(c.value, c.index) for c in clusters])
    if not divides(phi, theta):
        raise NotADivisor("phi does not divide the minimal function of T")
    dim = _kernel_dimension(clusters, phi)
    if dim == 0:
        return np.zeros((t.shape[0], 0), dtype=complex)
    return null_space(apply_function(phi, t), dim=dim)


def range_of_quotient(t, phi: BlaschkeProduct) -> np.ndarray:
    """Orthonormal basis of the column space of ``(theta/phi)(T)``."""
    t = as_matrix(t)
    clusters = spectral_structure(t)
    theta = BlaschkeProduct.from_zeros([(c.value, c.index) for c in clusters])
    quotient = divide(theta, phi)
    dim = _kernel_dimension(clusters, phi)
    if dim == 0:
        return np.zeros((t.shape[0], 0), dtype=complex)
    u, _, _ = svd(apply_function(quotient, t))
    return u[:, :dim]


def principal_angle(a: np.ndarray, b: np.ndarray) -> float:
    """Largest principal angle between two column spaces (0 for two empty spaces)."""
    if a.shape[1] != b.shape[1]:
        return np.pi / 2
    if a.shape[1] == 0:
        return 0.0
    return float(np.max(subspace_angles(a, b)))
