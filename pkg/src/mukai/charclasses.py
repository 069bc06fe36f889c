"""Characteristic classes and formal series operations on cohomology classes.

The positive-degree part of any class is nilpotent, so inverse, square root,
exponential and logarithm are finite sums evaluated exactly.  The square
root is the binomial series, which is the unique square root with constant
term 1 and is therefore automatically multiplicative.

K-theory expressions (KExpr) are formal combinations of line bundles, the
tangent bundle and the structure sheaf under sum, tensor, dual, shift and
external tensor; their Chern characters are evaluated homomorphically.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

from .coeffs import GaussRat, ONE, ZERO, coerce, i_power
from .cohomology import CohClass, Space, product, pullback
from .errors import BidegreeError, ConstantTermError, SpaceMismatchError

# A kernel is nothing more than a class on a product space.
Kernel = CohClass


# -- formal series on nilpotent parts -------------------------------------------


def _nilpotent_part(u: CohClass, expected: GaussRat) -> CohClass:
    if u.constant_term() != expected:
        raise ConstantTermError(
            f"series operation requires constant term {expected}, "
            f"got {u.constant_term()}"
        )
    out = dict(u.coeffs)
    out.pop(u.space.unit_index, None)
    return CohClass(u.space, out)


def series_inverse(u: CohClass) -> CohClass:
    """The multiplicative inverse of a class with constant term 1."""
    m = _nilpotent_part(u, ONE)
    result = u.space.unit()
    power = u.space.unit()
    sign = 1
    while True:
        power = power * m
        if power.is_zero:
            return result
        sign = -sign
        result = result + (power if sign == 1 else -power)


def series_sqrt(u: CohClass) -> CohClass:
    """The unique square root with constant term 1, via the binomial series."""
    m = _nilpotent_part(u, ONE)
    result = u.space.unit()
    power = u.space.unit()
    k = 0
    while True:
        power = power * m
        if power.is_zero:
            return result
        k += 1
        result = result + _half_binomial(k) * power


@functools.lru_cache(maxsize=None)
def _half_binomial(k: int) -> GaussRat:
    # binomial(1/2, k) = (1/2)(1/2 - 1)...(1/2 - k + 1) / k!
    value = Fraction(1)
    for i in range(k):
        value *= Fraction(1, 2) - i
        value /= i + 1
    return GaussRat(value)


def series_exp(a: CohClass) -> CohClass:
    """exp of a class with zero constant term; a finite sum by nilpotency."""
    if a.constant_term() != ZERO:
        raise ConstantTermError(
            f"exp requires constant term 0, got {a.constant_term()}"
        )
    result = a.space.unit()
    power = a.space.unit()
    k = 0
    while True:
        power = power * a
        if power.is_zero:
            return result
        k += 1
        result = result + power / Fraction(_factorial(k))


def series_log(u: CohClass) -> CohClass:
    """log of a class with constant term 1; inverse to series_exp."""
    m = _nilpotent_part(u, ONE)
    result = u.space.zero()
    power = u.space.unit()
    k = 0
    while True:
        power = power * m
        if power.is_zero:
            return result
        k += 1
        term = power / Fraction(k)
        result = result + (term if k % 2 == 1 else -term)


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


# -- the degree twist and dualization ---------------------------------------------


def tau(v: CohClass) -> CohClass:
    """Multiply the total-degree-k component of v by i^k."""
    basis = v.space.basis
    return CohClass(
        v.space,
        {idx: c * i_power(basis[idx].degree) for idx, c in v.coeffs.items()},
    )


def ch_canonical(X: Space) -> CohClass:
    """Chern character of the canonical bundle, exp(-c1(T_X))."""
    c1 = X.tangent_chern.degree_part(2)
    return series_exp(-c1)


@functools.lru_cache(maxsize=None)
def _dual_twist(X: Space) -> CohClass:
    return series_inverse(series_sqrt(ch_canonical(X)))


def dualize(v: CohClass) -> CohClass:
    """The involution v -> tau(v) / sqrt(ch of the canonical bundle)."""
    return tau(v) * _dual_twist(v.space)


# -- Chern power sums and the Todd class -------------------------------------------


def chern_power_sums(X: Space, upto: int) -> list[CohClass]:
    """Power sums p_1 .. p_upto of the Chern roots of the tangent bundle.

    Obtained from the stored total Chern class by Newton's identities:
    p_k = sum_{i=1..k-1} (-1)^{i-1} c_i p_{k-i} + (-1)^{k-1} k c_k.
    """
    chern = [X.tangent_chern.degree_part(2 * k) for k in range(upto + 1)]
    sums: list[CohClass] = [X.zero()]
    for k in range(1, upto + 1):
        acc = X.zero()
        for i in range(1, k):
            term = chern[i] * sums[k - i]
            acc = acc + (term if i % 2 == 1 else -term)
        tail = Fraction(k) * chern[k]
        acc = acc + (tail if k % 2 == 1 else -tail)
        sums.append(acc)
    return sums


@functools.lru_cache(maxsize=None)
def _todd_log_coefficients(n: int) -> tuple[Fraction, ...]:
    """Coefficients a_1..a_n of log(x / (1 - e^{-x})) as a power series."""
    # q(x) = (1 - e^{-x}) / x has coefficients (-1)^k / (k+1)!
    q = [Fraction((-1) ** k, _factorial(k + 1)) for k in range(n + 1)]
    t = _frac_series_inverse(q)
    return tuple(_frac_series_log(t)[1:])


def _frac_series_inverse(q: list[Fraction]) -> list[Fraction]:
    n = len(q) - 1
    out = [Fraction(1) / q[0]]
    for k in range(1, n + 1):
        acc = Fraction(0)
        for j in range(1, k + 1):
            acc += q[j] * out[k - j]
        out.append(-acc / q[0])
    return out


def _frac_series_log(t: list[Fraction]) -> list[Fraction]:
    n = len(t) - 1
    m = [Fraction(0)] + [t[k] for k in range(1, n + 1)]
    out = [Fraction(0)] * (n + 1)
    power = [Fraction(1)] + [Fraction(0)] * n
    for j in range(1, n + 1):
        power = _frac_series_mul(power, m)
        sign = 1 if j % 2 == 1 else -1
        for k in range(n + 1):
            out[k] += sign * power[k] / j
    return out


def _frac_series_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    n = len(a) - 1
    out = [Fraction(0)] * (n + 1)
    for i, ai in enumerate(a):
        if not ai:
            continue
        for j in range(0, n + 1 - i):
            if b[j]:
                out[i + j] += ai * b[j]
    return out


@functools.lru_cache(maxsize=None)
def todd(X: Space) -> CohClass:
    """The Todd class of X, computed as exp(sum_k a_k p_k).

    The a_k are the power series coefficients of log(x / (1 - e^{-x})) and
    the p_k are Chern power sums, so one algorithm serves any dimension.
    """
    n = X.dim
    if n == 0:
        return X.unit()
    coeffs = _todd_log_coefficients(n)
    sums = chern_power_sums(X, n)
    acc = X.zero()
    for k in range(1, n + 1):
        acc = acc + coeffs[k - 1] * sums[k]
    return series_exp(acc)


@functools.lru_cache(maxsize=None)
def sqrt_todd(X: Space) -> CohClass:
    """The square root of the Todd class."""
    return series_sqrt(todd(X))


# -- K-theory expressions -----------------------------------------------------------


class KExpr:
    """A formal K-theory expression; subclasses are the constructors."""

    @property
    def space(self) -> Space:
        raise NotImplementedError


@dataclass(frozen=True)
class Structure(KExpr):
    """The structure sheaf of the ambient space."""

    ambient: Space

    @property
    def space(self) -> Space:
        return self.ambient


@dataclass(frozen=True)
class LineBundle(KExpr):
    """A line bundle given by its first Chern class, which must be of type (1,1)."""

    c1: CohClass

    def __post_init__(self):
        basis = self.c1.space.basis
        for idx in self.c1.coeffs:
            if (basis[idx].p, basis[idx].q) != (1, 1):
                raise BidegreeError(
                    f"line bundle class has a component of bidegree "
                    f"({basis[idx].p},{basis[idx].q}), expected (1,1)"
                )

    @property
    def space(self) -> Space:
        return self.c1.space


@dataclass(frozen=True)
class Tangent(KExpr):
    """The tangent bundle of the ambient space."""

    ambient: Space

    @property
    def space(self) -> Space:
        return self.ambient


@dataclass(frozen=True)
class Dual(KExpr):
    inner: KExpr

    @property
    def space(self) -> Space:
        return self.inner.space


@dataclass(frozen=True)
class Tensor(KExpr):
    left: KExpr
    right: KExpr

    def __post_init__(self):
        if self.left.space is not self.right.space:
            raise SpaceMismatchError("tensor factors live on different spaces")

    @property
    def space(self) -> Space:
        return self.left.space


@dataclass(frozen=True)
class Sum(KExpr):
    left: KExpr
    right: KExpr

    def __post_init__(self):
        if self.left.space is not self.right.space:
            raise SpaceMismatchError("sum terms live on different spaces")

    @property
    def space(self) -> Space:
        return self.left.space


@dataclass(frozen=True)
class Shift(KExpr):
    """Homological shift by n steps; contributes a factor (-1)^n in K-theory."""

    inner: KExpr
    n: int

    @property
    def space(self) -> Space:
        return self.inner.space


@dataclass(frozen=True)
class ExternalTensor(KExpr):
    """An external tensor product, living on the product of the two spaces."""

    left: KExpr
    right: KExpr

    @property
    def space(self) -> Space:
        return product(self.left.space, self.right.space)


def chern_character(e: KExpr) -> CohClass:
    """The exponential Chern character, evaluated homomorphically.

    ch(O) = 1, ch of a line bundle is exp(c1), ch of the tangent bundle is
    dim + sum_k p_k / k!, duals apply the degree twist, shifts contribute
    (-1)^n, and sums, tensors and external tensors map to sums and products.
    """
    if isinstance(e, Structure):
        return e.ambient.unit()
    if isinstance(e, LineBundle):
        return series_exp(e.c1)
    if isinstance(e, Tangent):
        X = e.ambient
        sums = chern_power_sums(X, X.dim)
        acc = X.scalar(X.dim)
        for k in range(1, X.dim + 1):
            acc = acc + sums[k] / Fraction(_factorial(k))
        return acc
    if isinstance(e, Dual):
        return tau(chern_character(e.inner))
    if isinstance(e, Tensor):
        return chern_character(e.left) * chern_character(e.right)
    if isinstance(e, Sum):
        return chern_character(e.left) + chern_character(e.right)
    if isinstance(e, Shift):
        sign = -1 if e.n % 2 else 1
        return sign * chern_character(e.inner)
    if isinstance(e, ExternalTensor):
        xy = e.space
        left = pullback(xy, 1, chern_character(e.left))
        right = pullback(xy, 2, chern_character(e.right))
        return left * right
    raise TypeError(f"not a K-theory expression: {e!r}")


def mukai_vector(e: KExpr) -> CohClass:
    """ch(e) twisted by the square root of the Todd class."""
    return chern_character(e) * sqrt_todd(e.space)
