"""Randomized property suite behind ``c0model verify``.

Every trial draws from its own stream ``SeedSequence(seed, spawn_key=(p, i))``
(property index ``p``, trial index ``i``), so results do not depend on the
number of worker threads.  Set ``C0M_THREADS`` to run trials concurrently.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .calculus import apply_function, jordan_model, kernel_of_divisor, spectral_structure
from .corona import bezout_solve, separation_lower_bound, split_similarity
from .equivalence import (
    beta_floor,
    hankel_distance,
    irreducibility_check,
    sarason_norm,
    similarity_synthesize,
    unitary_from_maximality,
)
from .errors import C0Error, InvalidInput
from .inner import BlaschkeProduct, big_divisors, blaschke_factor, enumerate_divisors
from .modelspace import divisor_first_order, jordan_block, jordan_operator
from .planted import (
    random_jordan_chain,
    random_points,
    random_rational,
    random_theta,
    stein_conjugate,
    unitary_conjugate,
)
from .serialize import matrix_to_dict, to_jsonable

__all__ = ["PROPERTIES", "ExperimentConfig", "TrialOutcome", "SuiteResult", "run_suite", "thread_count"]


@dataclass
class TrialOutcome:
    """Checks are ``name -> (value, limit)`` and pass when ``value < limit``."""

    n: int
    checks: dict
    case: dict
    sweep: dict | None = None


def _hausdorff(a, b) -> float:
    d = np.abs(np.asarray(a)[:, None] - np.asarray(b)[None, :])
    return float(max(d.min(axis=0).max(), d.min(axis=1).max()))


def _degree(rng, max_degree, cap):
    return int(rng.integers(1, min(max_degree, cap) + 1))


# -- one function per property ---------------------------------------------------


def annihilation(rng, max_degree):
    n = _degree(rng, max_degree, 10)
    theta = random_theta(rng, n, 0.9, min_sep=1e-3)
    s = jordan_block(theta).matrix
    return TrialOutcome(
        n,
        {
            "norm_theta_S": (float(np.linalg.norm(apply_function(theta, s), 2)), 1e-9),
            "eig_hausdorff": (_hausdorff(np.linalg.eigvals(s), theta.flat_zeros), 1e-8),
        },
        {"theta": theta},
    )


def sarason(rng, max_degree):
    n = _degree(rng, max_degree, 10)
    theta = random_theta(rng, n, 0.9, max_mult=2)
    u = random_rational(rng, 8)
    a, b = sarason_norm(u, theta), hankel_distance(u, theta)
    return TrialOutcome(n, {"sarason_vs_hankel": (abs(a - b), 1e-6)}, {"theta": theta, "u": u})


def big_divisor(rng, max_degree):
    n = _degree(rng, max_degree, 10)
    theta = random_theta(rng, n, 0.9, max_mult=3)
    s = jordan_block(theta).matrix
    gap, sigma2 = 0.0, 0.0
    for psi, _ in big_divisors(theta):
        sv = np.linalg.svd(apply_function(psi, s), compute_uv=False)
        gap = max(gap, abs(sv[0] - 1))
        sigma2 = max(sigma2, sv[1] if sv.size > 1 else 0.0)
    return TrialOutcome(n, {"norm_minus_one": (gap, 1e-9), "sigma2": (sigma2, 1e-9)}, {"theta": theta})


def _coprime_pair(rng, max_degree, cap, min_sep):
    n1, n2 = _degree(rng, max_degree, cap), _degree(rng, max_degree, cap)
    pts = random_points(rng, n1 + n2, 0.9, min_sep)
    return BlaschkeProduct.from_zeros(pts[:n1]), BlaschkeProduct.from_zeros(pts[n1:])


def corona(rng, max_degree):
    t1, t2 = _coprime_pair(rng, max_degree, 6, 0.2)
    sol = bezout_solve(t1, t2)
    bound = separation_lower_bound(t1, t2)
    return TrialOutcome(
        max(t1.degree, t2.degree),
        {"residual": (sol.residual, 1e-8), "bound_minus_delta": (bound - sol.delta, 1e-12)},
        {"theta1": t1, "theta2": t2},
    )


def split(rng, max_degree):
    t1, t2 = _coprime_pair(rng, max_degree, 5, 0.05)
    s = jordan_block(t1 * t2).matrix
    t, _ = stein_conjugate(s, rng)
    _, cert = split_similarity(t, t1, t2)
    return TrialOutcome(
        t1.degree + t2.degree,
        {
            "normXinv_minus_sqrt2": (cert.norm_xinv - np.sqrt(2), 1e-9),
            "normX_minus_bound": (cert.norm_x - cert.bound_x, 1e-6),
            "block_residual": (cert.residual, 1e-8),
        },
        {"T": matrix_to_dict(t), "theta1": t1, "theta2": t2},
    )


def unitary(rng, max_degree):
    n = _degree(rng, max_degree, 12)
    theta = random_theta(rng, n, 0.9, min_sep=0.05, max_mult=2)
    s = jordan_block(theta).matrix
    t = unitary_conjugate(s, rng)
    w = unitary_from_maximality(t)
    return TrialOutcome(
        n,
        {
            "unitarity": (float(np.linalg.norm(w.conj().T @ w - np.eye(n), 2)), 1e-8),
            "intertwining": (float(np.linalg.norm(w @ t - s @ w, 2)), 1e-8),
        },
        {"T": matrix_to_dict(t), "theta": theta},
    )


BETA_FRACTIONS = ((0.25, 0.75), (0.5, 0.9))


def similarity(rng, max_degree):
    n = _degree(rng, max_degree, 10)
    theta = random_theta(rng, n, 0.9, min_sep=0.05)
    s = jordan_block(theta).matrix
    t1, _ = stein_conjugate(s, rng)
    t2, _ = stein_conjugate(s, rng)
    fb, fbp = BETA_FRACTIONS[int(rng.integers(len(BETA_FRACTIONS)))]
    floor = beta_floor(n)
    beta, beta_prime = floor + fb * (1 - floor), floor + fbp * (1 - floor)
    cert = similarity_synthesize(t1, t2, beta, beta_prime, seed=int(rng.integers(2**31)))
    rel = cert.residual / cert.norm_x
    inv_ok = np.linalg.cond(cert.X) < 1e12
    return TrialOutcome(
        n,
        {"relative_residual": (rel, 1e-7), "invertible": (0.0 if inv_ok else 1.0, 0.5)},
        {"T1": matrix_to_dict(t1), "T2": matrix_to_dict(t2), "beta": beta, "betaPrime": beta_prime},
        {
            "N": n,
            "beta": beta,
            "betaPrime": beta_prime,
            "normX": cert.norm_x,
            "normXinv": cert.norm_xinv,
            "residual": cert.residual,
        },
    )


def jordan(rng, max_degree):
    model = random_jordan_chain(rng, min(max_degree, 10))
    t, _ = stein_conjugate(jordan_operator(model).matrix, rng)
    got = jordan_model(t)
    same_count = len(got.blocks) == len(model.blocks)
    return TrialOutcome(
        model.dim,
        {"block_count": (0.0 if same_count else 1.0, 0.5), "zeros": (0.0 if got.same_as(model, 1e-7) else 1.0, 0.5)},
        {"T": matrix_to_dict(t), "model": model},
    )


def _is_projection_witness(res, t, tol=1e-6) -> bool:
    p = res.witness
    if p is None:
        return False
    n = t.shape[0]
    return (
        np.linalg.norm(p @ p - p, 2) < tol
        and np.linalg.norm(p - p.conj().T, 2) < tol
        and np.linalg.norm(p, 2) > 0.5
        and np.linalg.norm(np.eye(n) - p, 2) > 0.5
        and res.witness_residual < tol
    )


def irreducible(rng, max_degree):
    n = _degree(rng, max_degree, 6)
    theta = random_theta(rng, n, 0.9, min_sep=0.1, max_mult=2)
    wrong = 0
    if not irreducibility_check(jordan_block(theta).matrix).irreducible:
        wrong += 1
    model = random_jordan_chain(rng, min(max_degree, 8))
    if not irreducibility_check(jordan_operator(model).matrix).irreducible:
        wrong += 1
    a, b = _coprime_pair(rng, max_degree, 3, 0.1)
    t = np.block(
        [
            [jordan_block(a).matrix, np.zeros((a.degree, b.degree))],
            [np.zeros((b.degree, a.degree)), jordan_block(b).matrix],
        ]
    )
    res = irreducibility_check(t)
    if res.irreducible or not _is_projection_witness(res, t):
        wrong += 1
    return TrialOutcome(
        n, {"misclassified": (float(wrong), 0.5)}, {"theta": theta, "model": model, "sum": [a, b]}
    )


def mobius(rng, max_degree, per_trial: int = 10):
    worst = -np.inf
    case = {}
    for _ in range(per_trial):
        n = _degree(rng, max_degree, 10)
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        t = a / np.linalg.norm(a, 2) * rng.uniform(0.2, 1.0)
        h = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        h /= np.linalg.norm(h)
        delta = float(np.linalg.norm(t @ h))
        mu = complex(*rng.standard_normal(2))
        mu = mu / abs(mu) * rng.uniform(0, delta)
        lhs = float(np.linalg.norm(apply_function(blaschke_factor(mu), t) @ h))
        gap = (delta - abs(mu)) / (1 + abs(mu)) - lhs
        if gap > worst:
            worst, case = gap, {"T": matrix_to_dict(t), "h": h, "mu": mu}
    return TrialOutcome(per_trial, {"bound_minus_norm": (worst, 1e-12)}, case)


def lattice(rng, max_degree):
    n = _degree(rng, max_degree, 8)
    theta = BlaschkeProduct.from_zeros(random_points(rng, n, 0.9, 0.05))
    s = jordan_block(theta).matrix
    divs = enumerate_divisors(theta)
    clusters = spectral_structure(s)
    kernels = [kernel_of_divisor(s, d, clusters) for d in divs]
    dim_err = max(abs(k.shape[1] - d.degree) for k, d in zip(kernels, divs))
    comps = np.array([np.eye(n) - k @ k.conj().T for k in kernels])
    # multiplicity vectors: divisibility is componentwise order
    mults = np.array([[d.multiplicity_of(z.location) for z in theta.zeros] for d in divs])
    mismatch = 0
    distinct = True
    for i, ki in enumerate(kernels):
        if ki.shape[1] == 0:
            continue
        inside = np.linalg.norm(comps @ ki, axis=(1, 2)) < 1e-7
        divisible = np.all(mults[i] <= mults, axis=1)
        mismatch += int(np.sum(inside != divisible))
        # equal kernels for different divisors of the same degree
        same = inside & (mults.sum(axis=1) == mults[i].sum())
        same[i] = False
        distinct = distinct and not same.any()
    phi = divs[int(rng.integers(len(divs)))]
    if phi.is_constant:
        block_err = 0.0
    else:
        big = jordan_block(theta, divisor_first_order(theta, phi)).matrix
        d = phi.degree
        block_err = float(np.max(np.abs(big[:d, :d] - jordan_block(phi).matrix)))
    return TrialOutcome(
        n,
        {
            "dim_mismatch": (float(dim_err), 0.5),
            "nesting_mismatch": (float(mismatch), 0.5),
            "distinct": (0.0 if distinct else 1.0, 0.5),
            "leading_block": (block_err, 1e-10),
        },
        {"theta": theta, "phi": phi},
    )


PROPERTIES = {
    "annihilation": annihilation,
    "sarason": sarason,
    "big-divisor": big_divisor,
    "corona": corona,
    "split": split,
    "unitary": unitary,
    "similarity": similarity,
    "jordan-model": jordan,
    "irreducibility": irreducible,
    "mobius": mobius,
    "lattice": lattice,
}


# -- runner ------------------------------------------------------------------------


def thread_count(default: int = 1) -> int:
    raw = os.environ.get("C0M_THREADS")
    if raw is None or raw == "":
        return default
    try:
        n = int(raw)
    except ValueError:
        raise InvalidInput(f"C0M_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InvalidInput(f"C0M_THREADS must be a positive integer, got {raw!r}")
    return n


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int
    trials: int
    max_degree: int = 12
    tolerances: dict = field(default_factory=dict)
    output: str | None = None
    properties: tuple | None = None

    def run(self, threads: int | None = None) -> "SuiteResult":
        return run_suite(self.seed, self.trials, self.max_degree, self.properties, threads, self.tolerances)


@dataclass
class SuiteResult:
    rows: list = field(default_factory=list)
    sweep: list = field(default_factory=list)
    failure: dict | None = None

    @property
    def ok(self) -> bool:
        return self.failure is None


def _run_trial(name, index, seed, trial, max_degree):
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index, trial)))
    fn = PROPERTIES[name]
    try:
        out = fn(rng, max_degree)
    except C0Error as exc:
        case = getattr(exc, "case", None)
        return None, f"{type(exc).__name__}: {exc}", case
    return out, None, None


def run_suite(seed: int, trials: int, max_degree: int = 12, properties=None,
              threads: int | None = None, tolerances=None) -> SuiteResult:
    """Run `trials` trials of each property; stop at the first failing property.

    `tolerances` maps check names to replacement limits.  Rows come back in
    (property, trial) order whatever the thread count.
    """
    tolerances = dict(tolerances or {})
    if trials < 1:
        raise InvalidInput("trials must be positive")
    if max_degree < 1:
        raise InvalidInput("max degree must be positive")
    names = list(PROPERTIES) if properties is None else list(properties)
    unknown = [p for p in names if p not in PROPERTIES]
    if unknown:
        raise InvalidInput(f"unknown propert{'ies' if len(unknown) > 1 else 'y'}: {', '.join(unknown)}")
    threads = thread_count() if threads is None else threads
    result = SuiteResult()
    order = list(PROPERTIES)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for name in names:
            index = order.index(name)
            outcomes = list(
                pool.map(lambda i: _run_trial(name, index, seed, i, max_degree), range(trials))
            )
            worst: dict = {}
            for i, (out, err, case) in enumerate(outcomes):
                failed = err
                if out is not None:
                    for check, (value, limit) in out.checks.items():
                        limit = tolerances.get(check, limit)
                        worst[check] = max(worst.get(check, -np.inf), value)
                        if not value < limit and failed is None:
                            failed = f"{check} = {value:.6g} (limit {limit:.3g})"
                    if out.sweep is not None:
                        result.sweep.append(out.sweep)
                if failed is not None:
                    result.failure = {
                        "property": name,
                        "trial": i,
                        "seed": seed,
                        "reason": failed,
                        "case": to_jsonable(out.case if out is not None else case),
                    }
                    break
            for check, value in worst.items():
                result.rows.append(
                    {"property": name, "check": check, "trials": trials, "worst": float(value)}
                )
            if result.failure is not None:
                break
    return result
