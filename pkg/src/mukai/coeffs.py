"""Exact arithmetic over the Gaussian rationals Q(i), and exact linear algebra.

Every coefficient in the engine is a GaussRat.  The imaginary unit is needed
because the degree twist multiplies the total-degree-k part of a class by
i^k; keeping both parts as reduced Fractions makes every comparison a
zero-tolerance structural equality.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import SingularMatrixError


class GaussRat:
    """An element re + im*i of Q(i), both parts reduced Fractions.

    Values are immutable by convention and normalized on construction, so
    equality is structural and instances are hashable.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, float) or isinstance(im, float):
            raise TypeError("float coefficients are not exact; use Fraction or int")
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def _make(cls, re: Fraction, im: Fraction) -> "GaussRat":
        # fast path for internal arithmetic; parts must already be Fractions
        out = object.__new__(cls)
        out.re = re
        out.im = im
        return out

    # -- field operations ---------------------------------------------------

    def __add__(self, other):
        other = coerce(other)
        if other is None:
            return NotImplemented
        return GaussRat._make(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = coerce(other)
        if other is None:
            return NotImplemented
        return GaussRat._make(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = coerce(other)
        if other is None:
            return NotImplemented
        return GaussRat._make(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = coerce(other)
        if other is None:
            return NotImplemented
        norm = other.re * other.re + other.im * other.im
        if norm == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussRat._make(
            (self.re * other.re + self.im * other.im) / norm,
            (self.im * other.re - self.re * other.im) / norm,
        )

    def __rtruediv__(self, other):
        other = coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __neg__(self):
        return GaussRat._make(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return ONE / (self ** (-exponent))
        result = ONE
        base = self
        n = exponent
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conj(self) -> "GaussRat":
        return GaussRat._make(self.re, -self.im)

    # -- structure ----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __bool__(self):
        return not self.is_zero

    def __eq__(self, other):
        other = coerce(other)
        if other is None:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        # real values hash like their Fraction so mixed equality stays consistent
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussRat({self.re!r}, {self.im!r})"

    def __str__(self):
        return render_gauss(self)


def coerce(value) -> GaussRat | None:
    """Return value as a GaussRat, or None if it cannot be coerced exactly."""
    if isinstance(value, GaussRat):
        return value
    if isinstance(value, (int, Fraction)):
        return GaussRat._make(Fraction(value), Fraction(0))
    return None


ZERO = GaussRat(0)
ONE = GaussRat(1)
I = GaussRat(0, 1)

_I_POWERS = (ONE, I, GaussRat(-1), GaussRat(0, -1))


def i_power(k: int) -> GaussRat:
    """i^k for any integer k."""
    return _I_POWERS[k % 4]


def render_gauss(x: GaussRat) -> str:
    """Canonical rendering "a/b + c/d*i" with zero terms omitted."""
    if x.is_zero:
        return "0"
    parts = []
    if x.re != 0:
        parts.append(str(x.re))
    if x.im != 0:
        mag = -x.im if x.im < 0 else x.im
        if mag == 1:
            imag = "i"
        else:
            imag = f"{mag}*i"
        if not parts:
            parts.append(imag if x.im > 0 else "-" + imag)
        else:
            parts.append(("+ " if x.im > 0 else "- ") + imag)
    return " ".join(parts)


# -- exact dense linear algebra ----------------------------------------------


def solve_linear(matrix: list[list[GaussRat]], rhs: list[GaussRat]) -> list[GaussRat]:
    """Solve M x = rhs exactly by pivoted Gaussian elimination over Q(i).

    Raises SingularMatrixError carrying the rank found when M is singular.
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix must be square")
    if len(rhs) != n:
        raise ValueError("right-hand side has wrong length")
    aug = [list(row) + [rhs[i]] for i, row in enumerate(matrix)]
    _eliminate(aug, n)
    # back substitution; aug is upper triangular with nonzero diagonal
    x: list[GaussRat] = [ZERO] * n
    for row in range(n - 1, -1, -1):
        acc = aug[row][n]
        for col in range(row + 1, n):
            acc = acc - aug[row][col] * x[col]
        x[row] = acc / aug[row][row]
    return x


def invert_matrix(matrix: list[list[GaussRat]]) -> list[list[GaussRat]]:
    """Exact inverse by Gauss-Jordan elimination; raises SingularMatrixError."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix must be square")
    aug = [
        list(row) + [ONE if i == j else ZERO for j in range(n)]
        for i, row in enumerate(matrix)
    ]
    _eliminate(aug, n)
    for row in range(n - 1, -1, -1):
        pivot = aug[row][row]
        for col in range(row, 2 * n):
            aug[row][col] = aug[row][col] / pivot
        for above in range(row):
            factor = aug[above][row]
            if factor.is_zero:
                continue
            for col in range(row, 2 * n):
                aug[above][col] = aug[above][col] - factor * aug[row][col]
    return [row[n:] for row in aug]


def _eliminate(aug: list[list[GaussRat]], n: int) -> None:
    """Row-echelon reduction in place over the first n columns.

    Raises SingularMatrixError with the true rank if any pivot is missing;
    on success the first n columns form an upper triangular matrix with a
    nonzero diagonal.
    """
    width = len(aug[0]) if aug else 0
    rank = 0
    singular = False
    for col in range(n):
        pivot_row = None
        for row in range(rank, n):
            if not aug[row][col].is_zero:
                pivot_row = row
                break
        if pivot_row is None:
            singular = True
            continue
        if pivot_row != rank:
            aug[rank], aug[pivot_row] = aug[pivot_row], aug[rank]
        pivot = aug[rank][col]
        for row in range(rank + 1, n):
            factor = aug[row][col]
            if factor.is_zero:
                continue
            scale = factor / pivot
            for k in range(col, width):
                aug[row][k] = aug[row][k] - scale * aug[rank][k]
        rank += 1
    if singular:
        raise SingularMatrixError(rank, n)
    return None
