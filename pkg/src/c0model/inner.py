"""Finite Blaschke products and rational functions bounded on the disk.

A :class:`BlaschkeProduct` is stored as a unimodular constant times a product
of plain factors ``b_a(z) = (z - a) / (1 - conj(a) z)``.  Products built with
:meth:`BlaschkeProduct.from_zeros` carry the canonical constant, which makes
``theta(0) > 0`` whenever ``theta(0) != 0``; a zero at the origin contributes
a plain ``z`` factor.

All divisibility logic works on zero multisets after merging points that lie
closer than :data:`TAU_ZERO`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import numpy.polynomial.polynomial as npoly
from scipy.optimize import minimize_scalar

from .errors import DegreeZero, InvalidInput, NotADivisor, TooManyDivisors

__all__ = [
    "TAU_ZERO",
    "Zero",
    "BlaschkeProduct",
    "RationalFunction",
    "blaschke_factor",
    "normalized_factor",
    "divide",
    "lattice",
    "gcd",
    "lcm",
    "enumerate_divisors",
    "big_divisors",
    "mobius_solve",
    "supnorm_boundary",
    "supnorm_bound",
    "taylor_quotient",
]

TAU_ZERO = 1e-8
MAX_DIVISORS = 10**6
_UNIMODULAR_TOL = 1e-12
_POLE_MARGIN = 1e-8


def _sort_key(z: complex):
    # canonical order: modulus, then argument in (-pi, pi]
    return (round(abs(z), 14), round(math.atan2(z.imag, z.real), 14) if z != 0 else 0.0)


@dataclass(frozen=True)
class Zero:
    location: complex
    multiplicity: int = 1

    def __post_init__(self):
        loc = complex(self.location)
        object.__setattr__(self, "location", loc)
        if not abs(loc) < 1:
            raise InvalidInput(f"zero {loc} is not inside the open unit disk")
        if int(self.multiplicity) != self.multiplicity or self.multiplicity < 1:
            raise InvalidInput(f"multiplicity must be a positive integer, got {self.multiplicity}")
        object.__setattr__(self, "multiplicity", int(self.multiplicity))


def _merge(pairs, tol=TAU_ZERO):
    """Cluster ``(location, multiplicity)`` pairs closer than `tol`.

    Each cluster is represented by its member of largest multiplicity
    (ties go to the canonical order), so merging never moves a zero by
    rounding and the result does not depend on the input order.
    """
    pairs = [(complex(a), int(m)) for a, m in pairs if m > 0]
    clusters: list[list[tuple[complex, int]]] = []
    for a, m in pairs:
        hits = [c for c in clusters if any(abs(a - b) < tol for b, _ in c)]
        merged = [(a, m)]
        for c in hits:
            merged.extend(c)
            clusters.remove(c)
        clusters.append(merged)
    out = []
    for c in clusters:
        total = sum(m for _, m in c)
        loc = min(c, key=lambda p: (-p[1], _sort_key(p[0]), p[0].real, p[0].imag))[0]
        out.append(Zero(loc, total))
    out.sort(key=lambda zz: _sort_key(zz.location))
    return tuple(out)


def _canonical_constant(zeros) -> complex:
    c = 1.0 + 0.0j
    for zz in zeros:
        a = zz.location
        if a != 0:
            c *= (-np.conj(a) / abs(a)) ** zz.multiplicity
    return complex(c)


@dataclass(frozen=True)
class BlaschkeProduct:
    """Finite Blaschke product ``constant * prod b_a(z)**m``.

    Parameters
    ----------
    constant : complex
        Unimodular scalar multiplying the plain factors.
    zeros : tuple of Zero
        Zeros with multiplicities; merged and sorted on construction.
    """

    constant: complex = 1.0 + 0.0j
    zeros: tuple = field(default_factory=tuple)

    def __post_init__(self):
        c = complex(self.constant)
        if abs(abs(c) - 1) > _UNIMODULAR_TOL:
            raise InvalidInput(f"constant {c} is not unimodular")
        object.__setattr__(self, "constant", c)
        zs = []
        for zz in self.zeros:
            zs.append(zz if isinstance(zz, Zero) else Zero(*zz))
        object.__setattr__(self, "zeros", _merge((zz.location, zz.multiplicity) for zz in zs))

    # -- construction ------------------------------------------------------
    @classmethod
    def from_zeros(cls, points, constant=None) -> "BlaschkeProduct":
        """Build from complex points (repeat for multiplicity) or
        ``(location, multiplicity)`` pairs, with the canonical constant
        unless `constant` is given."""
        pairs = []
        for p in points:
            if isinstance(p, Zero):
                pairs.append((p.location, p.multiplicity))
            elif isinstance(p, tuple):
                pairs.append((complex(p[0]), int(p[1])))
            else:
                pairs.append((complex(p), 1))
        zeros = _merge(pairs)
        if constant is None:
            constant = _canonical_constant(zeros)
        return cls(constant, zeros)

    @classmethod
    def one(cls) -> "BlaschkeProduct":
        return cls()

    def canonical(self) -> "BlaschkeProduct":
        return BlaschkeProduct(_canonical_constant(self.zeros), self.zeros)

    # -- structure ---------------------------------------------------------
    @property
    def degree(self) -> int:
        return sum(zz.multiplicity for zz in self.zeros)

    @property
    def is_constant(self) -> bool:
        return not self.zeros

    @property
    def flat_zeros(self) -> tuple:
        """Zeros repeated by multiplicity, in canonical order."""
        return tuple(zz.location for zz in self.zeros for _ in range(zz.multiplicity))

    def multiplicity_of(self, point: complex, tol: float = TAU_ZERO) -> int:
        for zz in self.zeros:
            if abs(zz.location - point) < tol:
                return zz.multiplicity
        return 0

    def same_zeros(self, other: "BlaschkeProduct", tol: float = TAU_ZERO) -> bool:
        """True when both zero multisets coincide under tolerance matching."""
        if self.degree != other.degree or len(self.zeros) != len(other.zeros):
            return False
        return all(other.multiplicity_of(zz.location, tol) == zz.multiplicity for zz in self.zeros)

    # -- evaluation --------------------------------------------------------
    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.constant, dtype=complex)
        for zz in self.zeros:
            a = zz.location
            out = out * ((z - a) / (1 - np.conj(a) * z)) ** zz.multiplicity
        return out if out.ndim else complex(out)

    def __mul__(self, other):
        if isinstance(other, BlaschkeProduct):
            pairs = [(zz.location, zz.multiplicity) for zz in self.zeros + other.zeros]
            return BlaschkeProduct(self.constant * other.constant, _merge(pairs))
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise InvalidInput("negative powers are not inner")
        pairs = [(zz.location, zz.multiplicity * n) for zz in self.zeros]
        return BlaschkeProduct(self.constant**n, _merge(pairs))

    def to_rational(self) -> "RationalFunction":
        num = np.array([self.constant])
        den = np.array([1.0 + 0j])
        for zz in self.zeros:
            a = zz.location
            for _ in range(zz.multiplicity):
                num = npoly.polymul(num, [-a, 1.0])
                den = npoly.polymul(den, [1.0, -np.conj(a)])
        return RationalFunction(num, den, reduce=False)

    def __repr__(self):
        zs = ", ".join(f"({zz.location:.6g}, {zz.multiplicity})" for zz in self.zeros)
        return f"BlaschkeProduct(constant={self.constant:.6g}, zeros=[{zs}])"


def blaschke_factor(a: complex) -> BlaschkeProduct:
    """Plain factor ``b_a(z) = (z - a) / (1 - conj(a) z)``."""
    return BlaschkeProduct(1.0, (Zero(a, 1),))


def normalized_factor(a: complex) -> BlaschkeProduct:
    """Factor normalized to be positive at the origin; ``z`` when ``a == 0``."""
    return BlaschkeProduct.from_zeros([a])


# -- polynomial helpers --------------------------------------------------


def _trim(c, rtol=0.0):
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    scale = np.max(np.abs(c)) if c.size else 0.0
    n = c.size
    while n > 1 and abs(c[n - 1]) <= rtol * scale:
        n -= 1
    return c[:n]


def _horner(c, z):
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape, dtype=complex)
    for a in c[::-1]:
        out = out * z + a
    return out


def _shift(c, center):
    """Coefficients of p(center + w) in powers of w."""
    out = np.zeros(1, dtype=complex)
    for a in c[::-1]:
        out = npoly.polyadd(npoly.polymul(out, [center, 1.0]), [a])
    return np.asarray(out, dtype=complex)


def taylor_quotient(num, den, center: complex, order: int) -> np.ndarray:
    """Taylor coefficients of ``num / den`` about `center` (``den(center) != 0``)."""
    p = _shift(np.asarray(num, dtype=complex), center)
    q = _shift(np.asarray(den, dtype=complex), center)
    p = np.concatenate([p, np.zeros(max(0, order - p.size), dtype=complex)])[:order]
    q = np.concatenate([q, np.zeros(max(0, order - q.size), dtype=complex)])[:order]
    out = np.zeros(order, dtype=complex)
    for k in range(order):
        out[k] = (p[k] - np.dot(q[1 : k + 1], out[k - 1 :: -1][:k])) / q[0]
    return out


@dataclass(frozen=True, eq=False)
class RationalFunction:
    """Quotient of complex polynomials with no poles on the closed disk.

    Coefficients are stored in ascending degree.  Common roots of numerator
    and denominator are cancelled on construction unless ``reduce=False``.
    """

    numerator: np.ndarray
    denominator: np.ndarray
    reduce: bool = field(default=True, repr=False)

    def __post_init__(self):
        num = _trim(self.numerator)
        den = _trim(self.denominator)
        if not np.any(den):
            raise InvalidInput("denominator is identically zero")
        if self.reduce:
            num, den = _cancel_common(num, den)
        # normalize so the denominator has unit constant term when possible
        scale = den[0] if abs(den[0]) > 0 else den[np.argmax(np.abs(den))]
        if scale != 1:
            num, den = num / scale, den / scale
            if abs(den[0]) > 0:
                den[0] = 1.0  # x / x need not round to exactly 1 in complex arithmetic
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)
        roots = self.poles
        if roots.size and np.min(np.abs(roots)) <= 1 + _POLE_MARGIN:
            raise InvalidInput(
                f"pole at {roots[np.argmin(np.abs(roots))]:.6g} lies in the closed unit disk"
            )

    @classmethod
    def constant(cls, c) -> "RationalFunction":
        return cls([c], [1.0])

    @classmethod
    def polynomial(cls, coeffs) -> "RationalFunction":
        return cls(coeffs, [1.0])

    @classmethod
    def coerce(cls, u) -> "RationalFunction":
        if isinstance(u, RationalFunction):
            return u
        if isinstance(u, BlaschkeProduct):
            return u.to_rational()
        if np.isscalar(u):
            return cls.constant(u)
        raise InvalidInput(f"cannot interpret {type(u).__name__} as a rational function")

    @cached_property
    def poles(self) -> np.ndarray:
        if self.denominator.size <= 1:
            return np.zeros(0, dtype=complex)
        return npoly.polyroots(self.denominator)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = _horner(self.numerator, z) / _horner(self.denominator, z)
        return out if out.ndim else complex(out)

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        p, q = self.numerator, self.denominator
        dp, dq = npoly.polyder(p), npoly.polyder(q)
        qz = _horner(q, z)
        return (_horner(dp, z) * qz - _horner(p, z) * _horner(dq, z)) / qz**2

    def taylor(self, center: complex, order: int) -> np.ndarray:
        """First `order` Taylor coefficients about `center`."""
        return taylor_quotient(self.numerator, self.denominator, center, order)

    # -- arithmetic --------------------------------------------------------
    def __mul__(self, other):
        other = _coerce_operand(other)
        if other is NotImplemented:
            return other
        return RationalFunction(
            npoly.polymul(self.numerator, other.numerator),
            npoly.polymul(self.denominator, other.denominator),
        )

    __rmul__ = __mul__

    def __add__(self, other):
        other = _coerce_operand(other)
        if other is NotImplemented:
            return other
        num = npoly.polyadd(
            npoly.polymul(self.numerator, other.denominator),
            npoly.polymul(other.numerator, self.denominator),
        )
        return RationalFunction(num, npoly.polymul(self.denominator, other.denominator))

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.numerator, self.denominator, reduce=False)

    def __sub__(self, other):
        return self + (-_coerce_operand(other))

    def __rsub__(self, other):
        return (-self) + other

    def __repr__(self):
        return f"RationalFunction(num={np.round(self.numerator, 12)}, den={np.round(self.denominator, 12)})"


def _coerce_operand(u):
    try:
        return RationalFunction.coerce(u)
    except InvalidInput:
        return NotImplemented


def _cancel_common(num, den, tol=1e-9):
    """Deflate roots shared by numerator and denominator."""
    if den.size <= 1 or num.size <= 1:
        return num, den
    changed = True
    while changed and den.size > 1 and num.size > 1:
        changed = False
        for r in npoly.polyroots(den):
            scale = np.sum(np.abs(num) * np.abs(r) ** np.arange(num.size))
            if abs(_horner(num, r)) <= tol * scale:
                num = _trim(npoly.polydiv(num, [-r, 1.0])[0])
                den = _trim(npoly.polydiv(den, [-r, 1.0])[0])
                changed = True
                break
    return num, den


# -- lattice operations ----------------------------------------------------


def _match(theta: BlaschkeProduct, point: complex, tol=TAU_ZERO):
    best, dist = None, tol
    for i, zz in enumerate(theta.zeros):
        d = abs(zz.location - point)
        if d < dist:
            best, dist = i, d
    return best


def divide(theta: BlaschkeProduct, phi: BlaschkeProduct) -> BlaschkeProduct:
    """Return ``theta / phi``; raise :class:`NotADivisor` unless ``phi | theta``."""
    mults = [zz.multiplicity for zz in theta.zeros]
    for zz in phi.zeros:
        i = _match(theta, zz.location)
        if i is None or mults[i] < zz.multiplicity:
            raise NotADivisor(f"zero {zz.location:.6g} (mult {zz.multiplicity}) does not divide")
        mults[i] -= zz.multiplicity
    zeros = tuple(Zero(zz.location, m) for zz, m in zip(theta.zeros, mults) if m > 0)
    return BlaschkeProduct(theta.constant / phi.constant, zeros)


def divides(phi: BlaschkeProduct, theta: BlaschkeProduct) -> bool:
    try:
        divide(theta, phi)
    except NotADivisor:
        return False
    return True


def _aligned(theta1, theta2, tol=TAU_ZERO):
    """Union of zero locations with multiplicities from each argument."""
    locs = [zz.location for zz in theta1.zeros]
    m1 = [zz.multiplicity for zz in theta1.zeros]
    m2 = [0] * len(locs)
    for zz in theta2.zeros:
        i = _match(theta1, zz.location, tol)
        if i is None:
            locs.append(zz.location)
            m1.append(0)
            m2.append(zz.multiplicity)
        else:
            m2[i] += zz.multiplicity
    return locs, m1, m2


def lattice(theta1: BlaschkeProduct, theta2: BlaschkeProduct):
    """Greatest common inner divisor and least common inner multiple."""
    locs, m1, m2 = _aligned(theta1, theta2)
    g = BlaschkeProduct.from_zeros([(a, min(p, q)) for a, p, q in zip(locs, m1, m2)])
    l = BlaschkeProduct.from_zeros([(a, max(p, q)) for a, p, q in zip(locs, m1, m2)])
    return g, l


def gcd(*thetas: BlaschkeProduct) -> BlaschkeProduct:
    out = thetas[0].canonical()
    for t in thetas[1:]:
        out = lattice(out, t)[0]
    return out


def lcm(*thetas: BlaschkeProduct) -> BlaschkeProduct:
    out = thetas[0].canonical()
    for t in thetas[1:]:
        out = lattice(out, t)[1]
    return out


def enumerate_divisors(theta: BlaschkeProduct, limit: int = MAX_DIVISORS) -> list:
    """All inner divisors of `theta` (canonical), one per sub-multiset of zeros."""
    count = math.prod(zz.multiplicity + 1 for zz in theta.zeros)
    if count > limit:
        raise TooManyDivisors(f"{count} divisors exceed the limit {limit}")
    ranges = [range(zz.multiplicity + 1) for zz in theta.zeros]
    out = []
    for exps in itertools.product(*ranges):
        out.append(
            BlaschkeProduct.from_zeros([(zz.location, e) for zz, e in zip(theta.zeros, exps) if e])
        )
    return out


def big_divisors(theta: BlaschkeProduct) -> list:
    """Pairs ``(theta / b_a, a)``, one for each distinct zero ``a``."""
    if theta.is_constant:
        raise DegreeZero("a constant has no big divisors")
    out = []
    for zz in theta.zeros:
        pairs = [(w.location, w.multiplicity - (w is zz)) for w in theta.zeros]
        out.append((BlaschkeProduct.from_zeros([p for p in pairs if p[1] > 0]), zz.location))
    return out


def mobius_solve(lam: complex, mu: complex) -> complex:
    """Point ``z = b_mu(lam)``, so that ``b_z o b_mu`` vanishes at `lam`."""
    if not (abs(lam) < 1 and abs(mu) < 1):
        raise InvalidInput("both points must lie in the open disk")
    return complex((lam - mu) / (1 - np.conj(mu) * lam))


# -- boundary norms --------------------------------------------------------


def _boundary_abs(u, t):
    return np.abs(u(np.exp(1j * t)))


def _grid_sup(u, tol=1e-9, n0=4096, nmax=2**20):
    n = n0
    t = 2 * np.pi * np.arange(n) / n
    vals = _boundary_abs(u, t)
    est = vals.max()
    while n < nmax:
        n *= 2
        t = 2 * np.pi * np.arange(n) / n
        vals = _boundary_abs(u, t)
        new = vals.max()
        if abs(new - est) < tol:
            est = new
            break
        est = new
    return est, t, vals


def supnorm_boundary(u) -> float:
    """Supremum of ``|u|`` on the unit circle (the H-infinity norm).

    Starts from a 4096-point grid, doubles it until successive maxima agree
    to 1e-9 and polishes the best few grid maxima with a bounded scalar search.
    """
    u = RationalFunction.coerce(u)
    est, t, vals = _grid_sup(u)
    h = 2 * np.pi / t.size
    for k in np.argsort(vals)[-4:]:
        res = minimize_scalar(
            lambda s: -_boundary_abs(u, s),
            bounds=(t[k] - h, t[k] + h),
            method="bounded",
            options={"xatol": 1e-13},
        )
        est = max(est, -float(res.fun))
    return float(est)


def supnorm_bound(u) -> float:
    """Certified upper bound: grid maximum plus half a grid step times the
    derivative bound ``sup |u'|`` (itself padded by a factor 2)."""
    u = RationalFunction.coerce(u)
    est = supnorm_boundary(u)
    n = 2**16
    t = 2 * np.pi * np.arange(2 * n) / (2 * n)
    dmax = np.abs(u.derivative(np.exp(1j * t))).max()
    return float(est + 2 * dmax * np.pi / n)
