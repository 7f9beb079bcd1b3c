import numpy as np
import pytest
from scipy.linalg import block_diag

from c0model.equivalence import (
    beta_floor,
    clustering_radius,
    commutant_basis,
    hankel_distance,
    hypothesis_margin,
    irreducibility_check,
    maximality_report,
    sarason_norm,
    similarity_synthesize,
    unitary_from_maximality,
)
from c0model.errors import (
    HypothesisFailed,
    MinimalFunctionMismatch,
    NotMaximal,
    NotMultiplicityFree,
)
from c0model.inner import BlaschkeProduct, RationalFunction, blaschke_factor, divide
from c0model.modelspace import JordanModel, jordan_block, jordan_operator
from c0model.planted import (
    random_rational,
    random_theta,
    graded_conjugate,
    random_unitary,
    stein_conjugate,
    unitary_conjugate,
)


def in_span(m, basis, tol):
    a = np.array([b.ravel() for b in basis]).T
    coef, *_ = np.linalg.lstsq(a, m.ravel(), rcond=None)
    return np.linalg.norm(a @ coef - m.ravel()) < tol


# -- Sarason distance ----------------------------------------------------------------


def test_sarason_kernel_and_big_divisor():
    theta = BlaschkeProduct.from_zeros([0.3, -0.5j, (0.1, 2)])
    assert sarason_norm(theta, theta) < 1e-12
    lam = 0.3
    psi = divide(theta, blaschke_factor(lam))
    assert sarason_norm(psi, theta) == pytest.approx(1, abs=1e-12)


def test_sarason_one_dimensional():
    u = RationalFunction.polynomial([0.5, 0.5])
    theta = BlaschkeProduct.from_zeros([0.0])
    assert sarason_norm(u, theta) == pytest.approx(0.5, abs=1e-15)
    assert hankel_distance(u, theta) == pytest.approx(0.5, abs=1e-12)


def test_sarason_matches_hankel_oracle():
    rng = np.random.default_rng(0)
    for _ in range(30):
        theta = random_theta(rng, int(rng.integers(1, 11)), 0.9, max_mult=2)
        u = random_rational(rng, 8)
        assert abs(sarason_norm(u, theta) - hankel_distance(u, theta)) < 1e-6


# -- commutants and irreducibility ------------------------------------------------------


def test_commutant_dimensions():
    theta = BlaschkeProduct.from_zeros([0.2, (0.5j, 2), -0.4])
    assert len(commutant_basis(jordan_block(theta).matrix)) == theta.degree
    assert len(commutant_basis(np.diag([0.2, -0.3]))) == 2
    assert len(commutant_basis(np.zeros((2, 2)))) == 4


def test_commutant_basis_orthonormal_and_commuting():
    rng = np.random.default_rng(1)
    t, _ = stein_conjugate(jordan_block(random_theta(rng, 5)).matrix, rng)
    basis = commutant_basis(t)
    gram = np.array([[np.vdot(a, b) for b in basis] for a in basis])
    assert np.allclose(gram, np.eye(len(basis)), atol=1e-10)
    for b in basis:
        assert np.linalg.norm(b @ t - t @ b) < 1e-10


def test_jordan_blocks_irreducible():
    rng = np.random.default_rng(2)
    for _ in range(10):
        theta = random_theta(rng, int(rng.integers(1, 7)), 0.9, min_sep=0.1, max_mult=2)
        assert irreducibility_check(jordan_block(theta).matrix).irreducible


def test_jordan_operator_irreducible():
    a = 0.3 + 0.2j
    ba = BlaschkeProduct.from_zeros([a])
    res = irreducibility_check(jordan_operator(JordanModel((ba**2, ba))).matrix)
    assert res.irreducible and res.witness is None


def test_direct_sum_reducible_with_diagonal_witness():
    a, c = 0.3, -0.4j
    res = irreducibility_check(np.diag([a, c]))
    assert not res.irreducible
    assert np.allclose(res.witness, np.diag([1, 0]), atol=1e-10)
    # brute force: P commutes with the whole commutant (diagonal matrices)
    for d in ([1, 0], [0, 1]):
        assert np.allclose(res.witness @ np.diag(d), np.diag(d) @ res.witness)


def test_irreducibility_unitary_invariance():
    rng = np.random.default_rng(3)
    for k in range(50):
        if k % 2:
            theta = random_theta(rng, int(rng.integers(1, 5)), 0.9, min_sep=0.1, max_mult=2)
            t = jordan_block(theta).matrix
        else:
            a, b = random_theta(rng, 2, 0.9, 0.1), random_theta(rng, 1, 0.9, 0.1)
            t = block_diag(jordan_block(a).matrix, jordan_block(b).matrix)
        u = random_unitary(rng, t.shape[0])
        assert irreducibility_check(t).irreducible == irreducibility_check(u @ t @ u.conj().T).irreducible


def test_no_idempotents_for_single_point_spectrum():
    rng = np.random.default_rng(4)
    for _ in range(10):
        lam = 0.8 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        n = int(rng.integers(1, 6))
        t, _ = stein_conjugate(jordan_block(BlaschkeProduct.from_zeros([(lam, n)])).matrix, rng)
        assert not irreducibility_check(t).has_idempotent


def test_distinct_zeros_give_idempotent():
    res = irreducibility_check(jordan_block(BlaschkeProduct.from_zeros([0.2, -0.5])).matrix)
    assert res.has_idempotent and res.idempotent_residual < 1e-8


# -- maximality and unitary equivalence ------------------------------------------------------


def test_maximality_on_jordan_block():
    theta = BlaschkeProduct.from_zeros([0.2, (0.5j, 2), -0.6])
    report = maximality_report(jordan_block(theta).matrix)
    for e in report.entries:
        assert abs(e.opnorm - 1) < 1e-9
        assert e.sigma2 < 1e-9
        assert e.cyclic
    assert report.is_maximal()


def test_maximality_guards():
    theta = BlaschkeProduct.from_zeros([0.2, 0.5j])
    half = 0.5 * jordan_block(theta).matrix
    with pytest.raises(MinimalFunctionMismatch):
        maximality_report(half, theta)
    ba = BlaschkeProduct.from_zeros([0.4])
    with pytest.raises(NotMultiplicityFree):
        maximality_report(jordan_operator(JordanModel((ba, ba))).matrix)


def test_generic_similarity_loses_maximality():
    rng = np.random.default_rng(5)
    for _ in range(10):
        theta = random_theta(rng, 4, 0.9, min_sep=0.1)
        t, x = graded_conjugate(jordan_block(theta).matrix, rng, 10.0)
        assert np.linalg.cond(x) == pytest.approx(10.0)
        assert maximality_report(t).best.opnorm < 1 - 1e-3


def test_unitary_fixed_point():
    theta = BlaschkeProduct.from_zeros([0.2, (0.5j, 2), -0.6])
    s = jordan_block(theta).matrix
    w = unitary_from_maximality(s)
    assert np.linalg.norm(w.conj().T @ w - np.eye(4)) < 1e-10
    assert np.linalg.norm(w @ s - s @ w) < 1e-10


def test_unitary_recovery_and_involution():
    rng = np.random.default_rng(6)
    for _ in range(20):
        n = int(rng.integers(1, 13))
        theta = random_theta(rng, n, 0.9, min_sep=0.05, max_mult=2)
        s = jordan_block(theta).matrix
        u = random_unitary(rng, n)
        t = u @ s @ u.conj().T
        w = unitary_from_maximality(t)
        assert np.linalg.norm(w.conj().T @ w - np.eye(n), 2) < 1e-8
        assert np.linalg.norm(w @ t - s @ w, 2) < 1e-8
        # W U intertwines S with itself, so it lies in the commutant of S
        assert in_span(w @ u, commutant_basis(s), 1e-7)


def test_not_maximal_for_skewed_similarity():
    rng = np.random.default_rng(7)
    for _ in range(5):
        theta = random_theta(rng, 5, 0.9, min_sep=0.1)
        t, x = graded_conjugate(jordan_block(theta).matrix, rng, 1e3)
        assert np.linalg.cond(x) == pytest.approx(1e3)
        with pytest.raises(NotMaximal):
            unitary_from_maximality(t)


# -- similarity synthesis -------------------------------------------------------------------


def test_clustering_radius_solves_defining_equation():
    beta, beta_prime = 0.9, 0.97
    r = clustering_radius(beta, beta_prime, 0.0)
    m = r / (1 - r)  # invert r = m / (1 + m) at anchor 0
    assert (beta_prime - m) * beta_prime / (1 + m) == pytest.approx(beta**2, abs=1e-12)
    assert clustering_radius(beta, beta_prime, 0.5) < r


def test_beta_floor_values():
    assert beta_floor(1) == 0.0
    assert beta_floor(2) == 0.0
    assert beta_floor(3) == pytest.approx((1 - 1 / 4) ** 0.25)


def test_similarity_identity_case():
    theta = random_theta(np.random.default_rng(8), 5, 0.9, min_sep=0.1)
    s = jordan_block(theta).matrix
    floor = beta_floor(5)
    cert = similarity_synthesize(s, s, floor + 0.5 * (1 - floor), floor + 0.9 * (1 - floor))
    assert cert.residual < 1e-12
    x = cert.X / cert.X[0, 0]
    assert np.allclose(x, np.eye(5), atol=1e-10)
    assert cert.norm_x * cert.norm_xinv >= 1 - 1e-12


def test_similarity_planted():
    rng = np.random.default_rng(9)
    for _ in range(15):
        n = int(rng.integers(1, 11))
        theta = random_theta(rng, n, 0.9, min_sep=0.05)
        s = jordan_block(theta).matrix
        t1, _ = stein_conjugate(s, rng)
        t2, x0 = stein_conjugate(s, rng)
        floor = beta_floor(n)
        cert = similarity_synthesize(t1, t2, floor + 0.5 * (1 - floor), floor + 0.9 * (1 - floor))
        assert np.linalg.norm(cert.X @ t1 - t2 @ cert.X, 2) / cert.norm_x < 1e-7
        assert cert.trace["kind"] in ("base", "split")


def test_similarity_errors():
    theta = BlaschkeProduct.from_zeros([0.2, -0.4j])
    s = jordan_block(theta).matrix
    bigger = jordan_block(theta * BlaschkeProduct.from_zeros([0.6])).matrix
    with pytest.raises(MinimalFunctionMismatch):
        similarity_synthesize(s, bigger, 0.5, 0.9)
    with pytest.raises(HypothesisFailed):
        similarity_synthesize(s, s, 0.9, 0.5)


def test_hypothesis_margin_is_below_one():
    theta = BlaschkeProduct.from_zeros([0.2, -0.4j, 0.5])
    t = unitary_conjugate(jordan_block(theta).matrix, np.random.default_rng(10))
    m = hypothesis_margin(t)
    assert 0 < m <= 1 + 1e-12
