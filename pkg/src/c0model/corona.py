"""Bezout identities for coprime finite Blaschke products and the similarity
that splits an operator along a coprime factorization of its minimal function.

For coprime ``theta1, theta2`` the solution of ``theta1 u1 + theta2 u2 = 1``
is explicit: ``u1`` is the Hermite interpolant of ``1/theta1`` at the zeros
of ``theta2`` and ``u2 = (1 - theta1 u1) / theta2`` is pole-free on the
closed disk.  Norms are measured on the circle, not estimated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import numpy.polynomial.polynomial as npoly
from scipy.linalg import block_diag, solve

from .calculus import apply_function, kernel_of_divisor, spectral_structure
from .errors import EmptySet, IllConditioned, InvalidInput, MinimalFunctionMismatch, NotCoprime
from .inner import (
    TAU_ZERO,
    BlaschkeProduct,
    RationalFunction,
    gcd,
    supnorm_boundary,
    taylor_quotient,
)
from .operators import as_matrix

__all__ = [
    "CoronaSolution",
    "ClusterSplit",
    "SplitCertificate",
    "bezout_solve",
    "disk_infimum",
    "separation_lower_bound",
    "cluster_split",
    "split_similarity",
]

RESIDUAL_TOL = 1e-8
_RESIDUAL_GRID = 16384


@dataclass(frozen=True, eq=False)
class CoronaSolution:
    u1: RationalFunction
    u2: RationalFunction
    residual: float
    norm1: float
    norm2: float
    delta: float


def disk_infimum(theta1: BlaschkeProduct, theta2: BlaschkeProduct,
                 n_radii: int = 64, n_angles: int = 512) -> float:
    """Grid estimate of ``inf |theta1| + |theta2|`` over the open disk.

    Polar grid plus every zero of either factor; always an upper estimate
    of the true infimum.
    """
    r = np.arange(n_radii) / n_radii
    t = 2 * np.pi * np.arange(n_angles) / n_angles
    z = (r[:, None] * np.exp(1j * t)[None, :]).ravel()
    extra = np.array(theta1.flat_zeros + theta2.flat_zeros, dtype=complex)
    z = np.concatenate([z, extra])
    return float(np.min(np.abs(theta1(z)) + np.abs(theta2(z))))


def _hermite_interpolant(f_num, f_den, nodes) -> np.ndarray:
    """Coefficients of the polynomial of degree < sum(mult) matching
    ``f_num / f_den`` to the given order at each ``(node, mult)``."""
    n = sum(m for _, m in nodes)
    rows = np.zeros((n, n), dtype=complex)
    rhs = np.zeros(n, dtype=complex)
    i = 0
    for mu, m in nodes:
        taylor = taylor_quotient(f_num, f_den, mu, m)
        for k in range(m):
            for j in range(k, n):
                rows[i, j] = math.comb(j, k) * mu ** (j - k)
            rhs[i] = taylor[k]
            i += 1
    return solve(rows, rhs)


def _boundary_residual(theta1, theta2, u1, u2) -> float:
    z = np.exp(2j * np.pi * np.arange(_RESIDUAL_GRID) / _RESIDUAL_GRID)
    return float(np.max(np.abs(theta1(z) * u1(z) + theta2(z) * u2(z) - 1)))


def bezout_solve(theta1: BlaschkeProduct, theta2: BlaschkeProduct) -> CoronaSolution:
    """Solve ``theta1 u1 + theta2 u2 = 1`` with rational ``u1, u2``."""
    if not gcd(theta1, theta2).is_constant:
        raise NotCoprime("theta1 and theta2 share a zero")
    gap = min(
        (abs(a - b) for a in theta1.flat_zeros for b in theta2.flat_zeros), default=np.inf
    )
    delta = disk_infimum(theta1, theta2)
    if gap < 10 * TAU_ZERO:
        raise IllConditioned(f"zero sets are {gap:.3g} apart (delta ~ {delta:.3g})")
    if theta2.is_constant:
        u1 = RationalFunction.constant(0.0)
        u2 = RationalFunction.constant(1 / theta2.constant)
    elif theta1.is_constant:
        u1 = RationalFunction.constant(1 / theta1.constant)
        u2 = RationalFunction.constant(0.0)
    else:
        r1 = theta1.to_rational()
        r2 = theta2.to_rational()
        n1, d1 = r1.numerator, r1.denominator
        n2, d2 = r2.numerator, r2.denominator
        nodes = [(zz.location, zz.multiplicity) for zz in theta2.zeros]
        c = _hermite_interpolant(d1, n1, nodes)
        u1 = RationalFunction.polynomial(c)
        top = npoly.polysub(d1, npoly.polymul(n1, c))
        quo, rem = npoly.polydiv(top, n2)
        if np.max(np.abs(rem), initial=0.0) > 1e-8 * max(1.0, np.max(np.abs(top))):
            raise IllConditioned(f"interpolation remainder {np.max(np.abs(rem)):.3g} (delta ~ {delta:.3g})")
        u2 = RationalFunction(npoly.polymul(quo, d2), d1)
    residual = _boundary_residual(theta1, theta2, u1, u2)
    if not residual < RESIDUAL_TOL:
        raise IllConditioned(f"Bezout residual {residual:.3g} (delta ~ {delta:.3g})")
    return CoronaSolution(u1, u2, residual, supnorm_boundary(u1), supnorm_boundary(u2), delta)


def _points(zs) -> list:
    if isinstance(zs, BlaschkeProduct):
        return list(zs.flat_zeros)
    return [complex(z) for z in zs]


def separation_lower_bound(e, f) -> float:
    """``(r/4)^N`` with ``r = min |e - f|`` and ``N`` the larger cardinality.

    Points are counted with multiplicity when Blaschke products are passed.
    """
    e, f = _points(e), _points(f)
    if not e or not f:
        raise EmptySet("both point sets must be non-empty")
    r = min(abs(a - b) for a in e for b in f)
    if r <= 0:
        raise InvalidInput("the two point sets intersect")
    return (r / 4) ** max(len(e), len(f))


@dataclass(frozen=True)
class ClusterSplit:
    k: int
    E: tuple
    F: tuple
    threshold: float
    anchor: complex

    @property
    def degenerate(self) -> bool:
        return not self.F


def _check_split(points, s: ClusterSplit):
    assert sorted(map(_key, s.E + s.F)) == sorted(map(_key, points)), "E, F do not partition the input"
    assert all(abs(a - s.anchor) < s.threshold for a in s.E)
    assert all(abs(a - b) >= s.threshold for a in s.E for b in s.F)


def _key(z):
    return (z.real, z.imag)


def cluster_split(zeros, eps: float) -> ClusterSplit:
    """Smallest ``k`` for which the points split cleanly around the first one.

    ``E_k`` holds the points closer than ``eps 2^{-(N+1-k)}`` to the anchor,
    ``F_k`` those at least that far from all of ``E_k``; the first ``k`` with
    nothing left over is returned.  The result is re-verified by brute force.
    """
    pts = _points(zeros)
    if not pts:
        raise EmptySet("no points to split")
    if eps <= 0:
        raise InvalidInput("eps must be positive")
    n = len(pts)
    anchor = pts[0]
    for k in range(1, n + 1):
        thr = eps * 2.0 ** (-(n + 1 - k))
        e = [a for a in pts if abs(a - anchor) < thr]
        f = [a for a in pts if all(abs(a - b) >= thr for b in e)]
        if len(e) + len(f) == n:
            split = ClusterSplit(k, tuple(e), tuple(f), thr, anchor)
            _check_split(pts, split)
            return split
    raise AssertionError("no admissible k; the combinatorial split must exist")


@dataclass(frozen=True, eq=False)
class SplitCertificate:
    corona: CoronaSolution
    basis1: np.ndarray
    basis2: np.ndarray
    block1: np.ndarray
    block2: np.ndarray
    norm_x: float
    norm_xinv: float
    bound_x: float
    residual: float
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def split_similarity(t, theta1: BlaschkeProduct, theta2: BlaschkeProduct,
                     check_minimal: bool = True):
    """Invertible ``X`` with ``X T X^{-1} = T|ker theta1(T) (+) T|ker theta2(T)``.

    ``X f = (theta2 u2)(T) f (+) (theta1 u1)(T) f`` written in orthonormal
    coordinates of the two kernels.  Returns ``(X, SplitCertificate)``.
    """
    t = as_matrix(t)
    if not gcd(theta1, theta2).is_constant:
        raise NotCoprime("theta1 and theta2 share a zero")
    theta = theta1 * theta2
    clusters = spectral_structure(t)
    minimal = BlaschkeProduct.from_zeros([(c.value, c.index) for c in clusters])
    if check_minimal and not minimal.same_zeros(theta):
        raise MinimalFunctionMismatch("minimal function of T differs from theta1 * theta2")
    sol = bezout_solve(theta1, theta2)
    k1 = kernel_of_divisor(t, theta1, clusters)
    k2 = kernel_of_divisor(t, theta2, clusters)
    a1 = apply_function(theta1, t) @ apply_function(sol.u1, t)
    a2 = apply_function(theta2, t) @ apply_function(sol.u2, t)
    x = np.vstack([k1.conj().T @ a2, k2.conj().T @ a1])
    b1 = k1.conj().T @ t @ k1
    b2 = k2.conj().T @ t @ k2
    target = block_diag(b1, b2)
    residual = float(np.linalg.norm(solve(x.T, (x @ t).T).T - target, 2))
    norm_x = float(np.linalg.norm(x, 2))
    norm_xinv = float(np.linalg.norm(np.linalg.inv(x), 2))
    bound = math.hypot(sol.norm1, sol.norm2)
    checks = {
        "norm_x": norm_x <= bound + 1e-6,
        "norm_xinv": norm_xinv <= math.sqrt(2) + 1e-9,
        "residual": residual < 1e-8,
    }
    cert = SplitCertificate(sol, k1, k2, b1, b2, norm_x, norm_xinv, bound, residual, checks)
    return x, cert
