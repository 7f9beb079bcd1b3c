"""Recognizing S(theta) up to a unitary or an explicit similarity.

* :func:`sarason_norm` -- ``||u(S(theta))||``, i.e. the distance from ``u``
  to ``theta H^inf``, with an independent Hankel-matrix oracle.
* :func:`commutant_basis` / :func:`irreducibility_check` -- commutants and
  their reducing projections, by Sylvester nullspaces.
* :func:`maximality_report` / :func:`unitary_from_maximality` -- norms of
  ``psi(T)`` over big divisors, and the explicit unitary onto ``H(theta)``
  when one of them equals 1.
* :func:`similarity_synthesize` -- recursive similarity to another operator
  with the same minimal function, splitting clusters of zeros with corona
  solutions and closing each cluster with a cyclic-vector intertwiner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag, qr, schur, solve, solve_sylvester, svd, svdvals
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.optimize import bisect

from .calculus import (
    RANK_RTOL,
    apply_function,
    is_cyclic,
    jordan_model,
    kernel_of_divisor,
    minimal_function,
    random_unit_vector,
)
from .corona import cluster_split, split_similarity
from .errors import (
    CyclicSearchFailed,
    HypothesisFailed,
    MinimalFunctionMismatch,
    NotMaximal,
    NotMultiplicityFree,
    PropertyViolation,
)
from .inner import BlaschkeProduct, RationalFunction, big_divisors, blaschke_factor, divide, enumerate_divisors
from .modelspace import jordan_block, model_kernel
from .operators import as_matrix

__all__ = [
    "sarason_norm",
    "hankel_distance",
    "commutant_basis",
    "IrreducibilityResult",
    "irreducibility_check",
    "MaximalityEntry",
    "MaximalityReport",
    "maximality_report",
    "unitary_from_maximality",
    "SimilarityCertificate",
    "clustering_radius",
    "beta_floor",
    "similarity_synthesize",
    "hypothesis_margin",
]

MAXIMALITY_TOL = 1e-8
RANK_ONE_TOL = 1e-8
HANKEL_SIZE = 512


# -- Sarason distance ----------------------------------------------------------


def sarason_norm(u, theta: BlaschkeProduct) -> float:
    """Operator norm of ``u(S(theta))``."""
    if theta.is_constant:
        return 0.0
    s = jordan_block(theta).matrix
    return float(np.linalg.norm(apply_function(u, s), 2))


def _negative_coefficients(u, theta, count: int) -> np.ndarray:
    """Fourier coefficients ``c_{-1}, ..., c_{-count}`` of ``u conj(theta)`` on the circle."""
    m = 8 * count
    z = np.exp(2j * np.pi * np.arange(m) / m)
    f = u(z) * np.conj(theta(z))
    c = np.fft.fft(f) / m
    return c[m - 1 : m - count - 1 : -1]


def _hankel_top(coeffs: np.ndarray, size: int) -> float:
    # coefficients below the FFT round-off floor are treated as zero
    big = np.abs(coeffs) > 64 * np.finfo(float).eps * max(np.max(np.abs(coeffs), initial=0.0), 1e-300)
    last = int(np.nonzero(big)[0][-1]) + 1 if np.any(big) else 0
    if last == 0:
        return 0.0
    # entries beyond the last significant coefficient vanish, so the leading block suffices
    n = min(size, last)
    idx = np.arange(n)
    h = coeffs[idx[:, None] + idx[None, :]]
    return float(svdvals(h)[0])


def hankel_distance(u, theta: BlaschkeProduct, size: int = HANKEL_SIZE, tol: float = 1e-8) -> float:
    """Largest singular value of the truncated Hankel matrix of ``u conj(theta)``.

    This is the distance from ``u`` to ``theta H^inf`` and serves as an
    oracle for :func:`sarason_norm`.  The truncation doubles until the
    estimate moves by less than `tol`.
    """
    u = RationalFunction.coerce(u)
    prev = None
    while True:
        coeffs = _negative_coefficients(u, theta, 2 * size)
        est = _hankel_top(coeffs, size)
        if prev is not None and abs(est - prev) < tol:
            return est
        prev = est
        size *= 2
        if size > 2**14:
            return est


# -- commutants ------------------------------------------------------------------


def _sylvester_rows(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    eye = np.eye(n)
    # row-major vec: vec(X A - A X) = (I kron A^T - A kron I) vec(X)
    return np.kron(eye, a.T) - np.kron(a, eye)


def commutant_basis(t, with_adjoints: bool = False, rtol: float = RANK_RTOL) -> list:
    """Frobenius-orthonormal basis of ``{X : X A = A X}`` over the generators.

    `t` is a matrix or a sequence of matrices; with `with_adjoints` the
    adjoints are added to the generating set.
    """
    gens = [as_matrix(t)] if not isinstance(t, (list, tuple)) else [as_matrix(g) for g in t]
    if with_adjoints:
        gens = gens + [g.conj().T for g in gens]
    n = gens[0].shape[0]
    r = np.zeros((0, n * n), dtype=complex)
    for g in gens:
        r = qr(np.vstack([r, _sylvester_rows(g)]), mode="r")[0][: n * n]
    _, s, vh = svd(r)
    top = s[0] if s.size and s[0] > 0 else 1.0
    rank = int(np.sum(s > rtol * top)) if s.size and s[0] > 0 else 0
    return [v.conj().reshape(n, n) for v in vh[rank:]]


@dataclass(frozen=True, eq=False)
class IrreducibilityResult:
    irreducible: bool
    witness: np.ndarray | None
    witness_residual: float
    commutant_dim: int
    reducing_dim: int
    idempotent: np.ndarray | None
    idempotent_residual: float

    @property
    def has_idempotent(self) -> bool:
        return self.idempotent is not None


def _commutator_residual(p, gens) -> float:
    return max((np.linalg.norm(p @ g - g @ p, 2) for g in gens), default=0.0)


def _eigen_groups(values: np.ndarray, gap: float) -> list:
    """Single-linkage groups of eigenvalues closer than `gap`."""
    values = np.asarray(values, dtype=complex)
    if values.size == 1:
        return [[0]]
    labels = fcluster(linkage(np.column_stack([values.real, values.imag]), "single"), gap, "distance")
    return [list(np.nonzero(labels == k)[0]) for k in np.unique(labels)]


def _riesz_projection(a: np.ndarray, cluster) -> np.ndarray:
    """Spectral idempotent of `a` for eigenvalues in `cluster` (indices into eigvals)."""
    eigs = np.linalg.eigvals(a)
    chosen = set(int(i) for i in cluster)

    def pick(x):
        return int(np.argmin(np.abs(eigs - x))) in chosen

    s, q, k = schur(a, output="complex", sort=pick)
    n = a.shape[0]
    if k in (0, n):
        return np.eye(n) if k == n else np.zeros((n, n))
    y = solve_sylvester(s[:k, :k], -s[k:, k:], -s[:k, k:])
    e = np.zeros((n, n), dtype=complex)
    e[:k, :k] = np.eye(k)
    e[:k, k:] = -y
    return q @ e @ q.conj().T


def irreducibility_check(t, seed: int = 0) -> IrreducibilityResult:
    """Decide whether ``{T}'`` is irreducible and look for idempotents in ``{T}''``.

    The commutant of ``{T}' u {T}'^*`` is the algebra of operators commuting
    with every reducing projection; it is one-dimensional exactly when
    ``{T}'`` is irreducible.  Otherwise a spectral projection of a random
    self-adjoint element of it is returned as witness.
    """
    t = as_matrix(t)
    n = t.shape[0]
    rng = np.random.default_rng(seed)
    comm = commutant_basis(t)
    reducing = commutant_basis(comm, with_adjoints=True)
    witness, wres = None, 0.0
    if len(reducing) > 1:
        h = sum(
            rng.standard_normal() * (d + d.conj().T) / 2 + rng.standard_normal() * (d - d.conj().T) / 2j
            for d in reducing
        )
        w, v = np.linalg.eigh(h)
        spread = max(w[-1] - w[0], 1e-300)
        groups = _eigen_groups(w, 1e-6 * spread)
        projs = [v[:, g] @ v[:, g].conj().T for g in groups]
        witness = max(projs, key=lambda p: np.linalg.norm(p[:, 0]))
        wres = _commutator_residual(witness, comm + [c.conj().T for c in comm])
    double = commutant_basis(comm)
    idem, ires = None, 0.0
    if len(double) > 1:
        a = sum((rng.standard_normal() + 1j * rng.standard_normal()) * d for d in double)
        eigs = np.linalg.eigvals(a)
        spread = max(np.max(np.abs(eigs - eigs.mean())), 1e-300)
        groups = _eigen_groups(eigs, 1e-6 * spread)
        if len(groups) > 1:
            p = _riesz_projection(a, groups[0])
            ires = max(_commutator_residual(p, comm), float(np.linalg.norm(p @ p - p, 2)))
            trivial = np.linalg.norm(p, 2) < 1e-8 or np.linalg.norm(p - np.eye(n), 2) < 1e-8
            if ires < 1e-6 and not trivial:
                idem = p
    return IrreducibilityResult(
        irreducible=len(reducing) == 1,
        witness=witness,
        witness_residual=float(wres),
        commutant_dim=len(comm),
        reducing_dim=len(reducing),
        idempotent=idem,
        idempotent_residual=float(ires),
    )


# -- maximality and unitary equivalence -----------------------------------------


@dataclass(frozen=True, eq=False)
class MaximalityEntry:
    psi: BlaschkeProduct
    zero: complex
    opnorm: float
    sigma2: float
    xi: np.ndarray
    cyclic: bool


@dataclass(frozen=True, eq=False)
class MaximalityReport:
    theta: BlaschkeProduct
    entries: tuple

    @property
    def best(self) -> MaximalityEntry:
        return max(self.entries, key=lambda e: e.opnorm)

    def is_maximal(self, tol: float = MAXIMALITY_TOL) -> bool:
        return 1 - self.best.opnorm < tol


def _require_multiplicity_free(t):
    if len(jordan_model(t).blocks) != 1:
        raise NotMultiplicityFree("T has no cyclic vector")


def maximality_report(t, theta: BlaschkeProduct | None = None) -> MaximalityReport:
    """``||psi(T)||``, ``sigma_2(psi(T))`` and the top right singular vector
    for every big divisor ``psi`` of the minimal function.

    If `theta` is given it must match the minimal function of `T`.
    """
    t = as_matrix(t)
    mf = minimal_function(t)
    if theta is not None and not mf.same_zeros(theta):
        raise MinimalFunctionMismatch("minimal function of T differs from theta")
    _require_multiplicity_free(t)
    entries = []
    for psi, lam in big_divisors(mf):
        _, s, vh = svd(apply_function(psi, t))
        xi = vh[0].conj()
        entries.append(
            MaximalityEntry(psi, lam, float(s[0]), float(s[1]) if s.size > 1 else 0.0, xi, is_cyclic(t, xi))
        )
    return MaximalityReport(mf, tuple(entries))


def _partial_product_basis(t: np.ndarray, xi: np.ndarray, zeros) -> np.ndarray:
    """Columns ``xi, b_{a1}(T) xi, (b_{a1} b_{a2})(T) xi, ...`` (one per zero except the last)."""
    n = t.shape[0]
    cols = [np.asarray(xi, dtype=complex)]
    for a in zeros[: n - 1]:
        cols.append(apply_function(blaschke_factor(a), t) @ cols[-1])
    return np.column_stack(cols)


def unitary_from_maximality(t, tol: float = MAXIMALITY_TOL) -> np.ndarray:
    """Unitary ``W`` with ``W T = S(theta) W`` for a maximal multiplicity-free `t`.

    With ``psi = theta / b_lam`` of norm one at ``T`` and ``xi`` its top
    right singular vector, ``W`` sends ``phi(T) xi`` to the coordinates of
    ``phi k_lam / ||k_lam||`` for the partial products ``phi`` of the zeros
    of ``psi``.  The result is checked before it is returned.
    """
    t = as_matrix(t)
    report = maximality_report(t)
    entry = report.best
    if 1 - entry.opnorm >= tol:
        raise NotMaximal(f"largest big-divisor norm is {entry.opnorm:.12g}")
    theta = report.theta
    s = jordan_block(theta).matrix
    kernel = model_kernel(theta, entry.zero)
    kernel = kernel / np.linalg.norm(kernel)
    order = entry.psi.flat_zeros
    domain = _partial_product_basis(t, entry.xi, order)
    target = _partial_product_basis(s, kernel, order)
    w = solve(domain.T, target.T).T
    check = max(
        np.linalg.norm(w.conj().T @ w - np.eye(t.shape[0]), 2),
        np.linalg.norm(w @ t - s @ w, 2),
    )
    if check >= tol:
        raise NotMaximal(f"recovered map misses unitarity/intertwining by {check:.3g}")
    return w


# -- similarity synthesis --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SimilarityCertificate:
    X: np.ndarray
    residual: float
    norm_x: float
    norm_xinv: float
    beta: float
    beta_prime: float
    trace: dict = field(default_factory=dict)

    @property
    def condition(self) -> float:
        return max(self.norm_x, self.norm_xinv)


def beta_floor(n: int) -> float:
    """Lower end of the admissible range for ``beta``."""
    if n < 2:
        return 0.0
    return (1 - 1 / (n - 1) ** 2) ** 0.25


def clustering_radius(beta: float, beta_prime: float, anchor: complex) -> float:
    """Euclidean radius around `anchor` inside which the base case applies.

    Solves ``(b' - m) b' / (1 + m) = b^2`` for the pseudo-hyperbolic radius
    ``m`` and shrinks it to a Euclidean radius using
    ``rho(a, anchor) <= |a - anchor| / ((1 - |anchor|^2) - |a - anchor|)``.
    """
    m = bisect(lambda x: (beta_prime - x) * beta_prime / (1 + x) - beta**2, 0.0, beta_prime, xtol=1e-15)
    return m * (1 - abs(anchor) ** 2) / (1 + m)


def _best_cyclic(t, psi, rng, draws):
    m = apply_function(psi, t)
    _, s, vh = svd(m)
    xi = vh[0].conj()
    if is_cyclic(t, xi):
        return xi, float(s[0])
    best, best_val = None, -1.0
    for _ in range(draws):
        v = random_unit_vector(t.shape[0], rng)
        val = float(np.linalg.norm(m @ v))
        if val > best_val and is_cyclic(t, v):
            best, best_val = v, val
    if best is None:
        raise CyclicSearchFailed("no cyclic vector found for the base case")
    return best, best_val


def _base_case(t1, t2, zeros, rng, draws):
    theta = BlaschkeProduct.from_zeros(zeros)
    anchor = zeros[-1]
    psi = divide(theta, blaschke_factor(anchor))
    xi1, v1 = _best_cyclic(t1, psi, rng, draws)
    xi2, v2 = _best_cyclic(t2, psi, rng, draws)
    order = [a for a in zeros]
    b1 = _partial_product_basis(t1, xi1, order)
    b2 = _partial_product_basis(t2, xi2, order)
    x = solve(b1.T, b2.T).T
    node = {
        "kind": "base",
        "zeros": [complex(a) for a in zeros],
        "anchor": complex(anchor),
        "psi_xi_norms": [v1, v2],
        "xi1": xi1.tolist(),
        "xi2": xi2.tolist(),
        "norm_x": float(np.linalg.norm(x, 2)),
        "norm_xinv": float(np.linalg.norm(np.linalg.inv(x), 2)),
    }
    return x, node


def _synthesize(t1, t2, zeros, beta, beta_prime, rng, draws):
    anchor = zeros[-1]
    r = clustering_radius(beta, beta_prime, anchor)
    if all(abs(a - anchor) < r for a in zeros):
        x, node = _base_case(t1, t2, zeros, rng, draws)
        node["radius"] = r
        return x, node
    split = cluster_split([anchor] + list(zeros[:-1]), r)
    theta_e = BlaschkeProduct.from_zeros(split.E)
    theta_f = BlaschkeProduct.from_zeros(split.F)
    y1, c1 = split_similarity(t1, theta_e, theta_f)
    y2, c2 = split_similarity(t2, theta_e, theta_f)
    for c in (c1, c2):
        if not c.ok:
            raise PropertyViolation(f"split certificate failed: {c.checks}")
    # order E so its last element is the anchor of the recursive call
    e_zeros = list(split.E[1:]) + [split.E[0]]
    xe, ne = _synthesize(c1.block1, c2.block1, e_zeros, beta, beta_prime, rng, draws)
    xf, nf = _synthesize(c1.block2, c2.block2, list(split.F), beta, beta_prime, rng, draws)
    x = solve(y2, block_diag(xe, xf) @ y1)
    node = {
        "kind": "split",
        "zeros": [complex(a) for a in zeros],
        "anchor": complex(anchor),
        "radius": r,
        "k": split.k,
        "threshold": split.threshold,
        "E": [complex(a) for a in split.E],
        "F": [complex(a) for a in split.F],
        "corona": {
            "residual": c1.corona.residual,
            "norm1": c1.corona.norm1,
            "norm2": c1.corona.norm2,
            "delta": c1.corona.delta,
        },
        "split_norms": [[c.norm_x, c.norm_xinv] for c in (c1, c2)],
        "children": [ne, nf],
    }
    return x, node


def similarity_synthesize(t1, t2, beta: float, beta_prime: float, seed: int = 0,
                          draws: int = 16, check_operators: bool = False) -> SimilarityCertificate:
    """Invertible ``X`` with ``X T1 = T2 X`` for multiplicity-free contractions
    sharing a minimal function.

    `beta` and `beta_prime` fix the clustering radius of the recursion; the
    result is rescaled so that ``||X|| = ||X^{-1}||``.  With
    `check_operators` the norm hypotheses on both operators are verified
    over all divisor pairs (exponential in the degree).
    """
    t1, t2 = as_matrix(t1), as_matrix(t2)
    theta = minimal_function(t1)
    if not minimal_function(t2).same_zeros(theta) or t1.shape != t2.shape:
        raise MinimalFunctionMismatch("T1 and T2 have different minimal functions")
    _require_multiplicity_free(t1)
    _require_multiplicity_free(t2)
    n = theta.degree
    if not (1 > beta_prime > beta > beta_floor(n)):
        raise HypothesisFailed(
            f"need 1 > beta' > beta > {beta_floor(n):.6g}, got beta={beta}, beta'={beta_prime}"
        )
    if check_operators:
        for t in (t1, t2):
            margin = hypothesis_margin(t, theta)
            if margin <= beta_prime:
                raise HypothesisFailed(f"operator hypothesis fails: min norm {margin:.6g} <= beta'")
    rng = np.random.default_rng(seed)
    x, trace = _synthesize(t1, t2, list(theta.flat_zeros), beta, beta_prime, rng, draws)
    norm_x = np.linalg.norm(x, 2)
    norm_xinv = np.linalg.norm(np.linalg.inv(x), 2)
    x = x * math.sqrt(norm_xinv / norm_x)
    norm_x = float(np.linalg.norm(x, 2))
    norm_xinv = float(np.linalg.norm(np.linalg.inv(x), 2))
    residual = float(np.linalg.norm(x @ t1 - t2 @ x, 2))
    if not residual < 1e-7 * max(norm_x, 1.0):
        raise PropertyViolation(f"intertwining residual {residual:.3g} too large")
    return SimilarityCertificate(x, residual, norm_x, norm_xinv, beta, beta_prime, trace)


def hypothesis_margin(t, theta: BlaschkeProduct | None = None) -> float:
    """Minimum of ``||phi(T)|ker psi(T)||`` over non-constant divisors ``psi``
    and proper divisors ``phi`` of ``psi``."""
    t = as_matrix(t)
    theta = minimal_function(t) if theta is None else theta
    best = np.inf
    for psi in enumerate_divisors(theta):
        if psi.is_constant:
            continue
        k = kernel_of_divisor(t, psi)
        for phi in enumerate_divisors(psi):
            if phi.degree == psi.degree:
                continue
            best = min(best, float(np.linalg.norm(apply_function(phi, t) @ k, 2)))
    return best
