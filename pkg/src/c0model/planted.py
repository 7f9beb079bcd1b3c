"""Seeded generators for planted test instances.

Used by the ``verify`` harness and the test suite.  Similar contractions are
produced through the Stein equation: for ``P = sum_k (J^*)^k Q J^k`` with
``Q > 0`` the matrix ``P^{1/2} J P^{-1/2}`` is a strict contraction similar
to ``J``.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_discrete_lyapunov, sqrtm
from scipy.stats import unitary_group

from .inner import BlaschkeProduct
from .modelspace import JordanModel

__all__ = [
    "random_points",
    "random_theta",
    "random_unitary",
    "unitary_conjugate",
    "stein_conjugate",
    "graded_conjugate",
    "random_jordan_chain",
    "random_rational",
]


def random_points(rng, n: int, radius: float = 0.9, min_sep: float = 0.0) -> list:
    """`n` points uniform in the disk of `radius`, pairwise at least `min_sep` apart."""
    out: list = []
    while len(out) < n:
        z = radius * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        if all(abs(z - w) >= min_sep for w in out):
            out.append(complex(z))
    return out


def random_theta(rng, n: int, radius: float = 0.9, min_sep: float = 0.0, max_mult: int = 1):
    """Random Blaschke product of degree `n` with multiplicities up to `max_mult`."""
    mults = []
    left = n
    while left:
        m = int(rng.integers(1, min(max_mult, left) + 1))
        mults.append(m)
        left -= m
    pts = random_points(rng, len(mults), radius, min_sep)
    return BlaschkeProduct.from_zeros(list(zip(pts, mults)))


def random_unitary(rng, n: int) -> np.ndarray:
    if n == 1:
        return np.exp(2j * np.pi * rng.uniform()) * np.ones((1, 1))
    return unitary_group.rvs(n, random_state=rng)


def unitary_conjugate(t: np.ndarray, rng) -> np.ndarray:
    u = random_unitary(rng, t.shape[0])
    return u @ t @ u.conj().T


def stein_conjugate(j: np.ndarray, rng, max_cond: float = 1e3, tries: int = 50):
    """Contraction ``X J X^{-1}`` with ``cond(X) <= max_cond``.

    Returns ``(T, X)``.  ``X = V P^{1/2}`` for a random unitary ``V``.
    """
    n = j.shape[0]
    for _ in range(tries):
        b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        q = b @ b.conj().T / n + 0.1 * np.eye(n)
        p = solve_discrete_lyapunov(j.conj().T, q)
        p = (p + p.conj().T) / 2
        r = sqrtm(p)
        x = random_unitary(rng, n) @ r
        if np.linalg.cond(x) <= max_cond:
            t = x @ j @ np.linalg.inv(x)
            scale = np.linalg.norm(t, 2)
            if scale > 1:
                # numerical overshoot only; the exact matrix is a strict contraction
                t = t / scale
            return t, x
    raise RuntimeError("could not draw a similarity within the condition bound")


def graded_conjugate(j: np.ndarray, rng, cond: float):
    """Contraction ``X J X^{-1}`` with ``cond(X)`` equal to `cond`.

    For lower-triangular ``J`` the grading ``D = diag(d^k)`` with
    ``d = cond^{-1/(n-1)}`` damps the entries below the diagonal, and a
    random unitary is composed on the left.  Raises ``ValueError`` when the
    result is not a strict contraction.
    """
    n = j.shape[0]
    d = cond ** (-1.0 / max(n - 1, 1))
    x = random_unitary(rng, n) @ np.diag(d ** np.arange(n))
    t = x @ j @ np.linalg.inv(x)
    if np.linalg.norm(t, 2) >= 1:
        raise ValueError(f"grading for condition {cond:g} leaves a non-contraction")
    return t, x


def random_jordan_chain(rng, total: int, radius: float = 0.9, min_sep: float = 0.1,
                        max_mult: int = 3, max_blocks: int = 3) -> JordanModel:
    """Random invariant-factor chain of total degree `total`."""
    while True:
        k = int(rng.integers(1, 4))
        pts = random_points(rng, k, radius, min_sep)
        nblocks = int(rng.integers(1, max_blocks + 1))
        # cells[i][b] = multiplicity of pts[i] in block b, non-increasing in b
        cells = []
        for _ in pts:
            sizes = sorted(rng.integers(0, max_mult + 1, size=nblocks).tolist(), reverse=True)
            sizes[0] = max(sizes[0], 1)
            cells.append(sizes)
        blocks = []
        for b in range(nblocks):
            pairs = [(p, c[b]) for p, c in zip(pts, cells) if c[b] > 0]
            if pairs:
                blocks.append(BlaschkeProduct.from_zeros(pairs))
        model = JordanModel(tuple(blocks))
        if 1 <= model.dim <= total:
            return model


def random_rational(rng, max_degree: int = 8, pole_radius: float = 1.25):
    """Random rational function with poles outside the disk of `pole_radius`."""
    from .inner import RationalFunction

    dn = int(rng.integers(0, max_degree + 1))
    dd = int(rng.integers(0, max_degree + 1))
    num = rng.standard_normal(dn + 1) + 1j * rng.standard_normal(dn + 1)
    poles = [
        (pole_radius + rng.uniform(0, 1)) * np.exp(2j * np.pi * rng.uniform()) for _ in range(dd)
    ]
    den = np.poly(poles)[::-1] if dd else np.array([1.0])
    return RationalFunction(num, den)
