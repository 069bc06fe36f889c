"""Finite bigraded-commutative ring models of the cohomology of a compact
complex manifold.

A Space is an explicit ordered basis with structure constants.  Every basis
element carries a Hodge bidegree (p, q); multiplication respects total degree
and graded commutativity with Koszul signs; integration reads off the
coefficient of the point class, normalized so the point integrates to 1.

Sign conventions, fixed once and pinned by the invariant tests:

* Kunneth products:  (a x b) . (a' x b') = (-1)^{|b| |a'|} (a a') x (b b')
* fiber integration carries no extra sign: a class only survives the
  integral over a factor when its component there is top degree, which is
  always even, so no Koszul sign can appear
* the diagonal class is  sum_i (-1)^{|e_i|} e_i x e^i  where e^i is the
  right dual basis (integral of e_i . e^j equals delta_ij); this is the
  unique sign choice for which the diagonal acts as the identity kernel
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction

from .coeffs import GaussRat, ONE, ZERO, coerce, invert_matrix
from .errors import (
    NotAProductError,
    SingularMatrixError,
    SpaceFormatError,
    SpaceMismatchError,
)


@dataclass(frozen=True)
class BasisElement:
    """A basis class of bidegree (p, q); total degree is p + q."""

    name: str
    p: int
    q: int

    @property
    def degree(self) -> int:
        return self.p + self.q


class CohClass:
    """A cohomology class: sparse coefficient vector over a Space's basis.

    Instances are immutable by convention; all operations return new values.
    """

    __slots__ = ("space", "coeffs")

    def __init__(self, space: "Space", coeffs: dict[int, GaussRat]):
        self.space = space
        self.coeffs = {i: c for i, c in coeffs.items() if not c.is_zero}

    # -- ring operations ------------------------------------------------

    def _check_space(self, other: "CohClass") -> None:
        if self.space is not other.space:
            raise SpaceMismatchError(
                f"classes live on different spaces: "
                f"{self.space.name!r} vs {other.space.name!r}"
            )

    def __add__(self, other):
        if not isinstance(other, CohClass):
            return NotImplemented
        self._check_space(other)
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            out[i] = out.get(i, ZERO) + c
        return CohClass(self.space, out)

    def __sub__(self, other):
        if not isinstance(other, CohClass):
            return NotImplemented
        self._check_space(other)
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            out[i] = out.get(i, ZERO) - c
        return CohClass(self.space, out)

    def __neg__(self):
        return CohClass(self.space, {i: -c for i, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, CohClass):
            self._check_space(other)
            out: dict[int, GaussRat] = {}
            entries = self.space._entries
            for i, ci in self.coeffs.items():
                for j, cj in other.coeffs.items():
                    cij = ci * cj
                    for k, s in entries(i, j).items():
                        prev = out.get(k)
                        out[k] = cij * s if prev is None else prev + cij * s
            return CohClass(self.space, out)
        scalar = coerce(other)
        if scalar is None:
            return NotImplemented
        return CohClass(self.space, {i: c * scalar for i, c in self.coeffs.items()})

    def __rmul__(self, other):
        scalar = coerce(other)
        if scalar is None:
            return NotImplemented
        return self * scalar

    def __truediv__(self, other):
        scalar = coerce(other)
        if scalar is None:
            return NotImplemented
        return self * (ONE / scalar)

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        result = self.space.unit()
        for _ in range(exponent):
            result = result * self
        return result

    # -- structure --------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def items(self) -> list[tuple[int, GaussRat]]:
        """Coefficients as (basis index, value) pairs, sorted by index."""
        return sorted(self.coeffs.items())

    def coefficient(self, index: int) -> GaussRat:
        return self.coeffs.get(index, ZERO)

    def constant_term(self) -> GaussRat:
        return self.coeffs.get(self.space.unit_index, ZERO)

    def degree_part(self, k: int) -> "CohClass":
        """The component of total degree k."""
        basis = self.space.basis
        return CohClass(
            self.space,
            {i: c for i, c in self.coeffs.items() if basis[i].degree == k},
        )

    def max_degree(self) -> int:
        basis = self.space.basis
        return max((basis[i].degree for i in self.coeffs), default=0)

    def integrate(self) -> GaussRat:
        """Integral over the space: the coefficient of the point class."""
        return self.coeffs.get(self.space.point_index, ZERO)

    def __eq__(self, other):
        if not isinstance(other, CohClass):
            return NotImplemented
        return self.space is other.space and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((id(self.space), tuple(self.items())))

    def __repr__(self):
        return f"<CohClass on {self.space.name}: {self}>"

    def __str__(self):
        return render_class(self)


class Space:
    """A model of H^*(X): ordered basis, structure constants, integration,
    Hodge bidegrees, tangent Chern data and complex dimension.

    Immutable after construction apart from an internal memo table used to
    expand products on Kunneth bases lazily.
    """

    def __init__(
        self,
        name: str,
        dim: int,
        basis: list[BasisElement],
        mult: dict[tuple[int, int], dict[int, GaussRat]],
        point_index: int,
        tangent_chern: dict[int, GaussRat],
        factors: tuple["Space", "Space"] | None = None,
    ):
        self.name = name
        self.dim = dim
        self.basis = tuple(basis)
        self.point_index = point_index
        self.factors = factors
        self._mult = {k: dict(v) for k, v in mult.items() if v}

        units = [i for i, e in enumerate(self.basis) if e.p == 0 and e.q == 0]
        if len(units) != 1:
            raise SpaceFormatError(
                f"space {name!r} must have exactly one bidegree (0,0) element"
            )
        self.unit_index = units[0]

        top = self.basis[point_index]
        if top.p != dim or top.q != dim:
            raise SpaceFormatError(
                f"space {name!r}: point class must have bidegree ({dim},{dim})"
            )
        for e in self.basis:
            if e.p < 0 or e.q < 0 or e.degree > 2 * dim:
                raise SpaceFormatError(
                    f"space {name!r}: basis element {e.name!r} has an invalid bidegree"
                )

        tangent = {i: c for i, c in tangent_chern.items() if not c.is_zero}
        if tangent.get(self.unit_index) != ONE:
            raise SpaceFormatError(
                f"space {name!r}: tangent Chern class must have constant term 1"
            )
        for i in tangent:
            if self.basis[i].p != self.basis[i].q:
                raise SpaceFormatError(
                    f"space {name!r}: tangent Chern class must be of type (p,p)"
                )
        self.tangent_chern = CohClass(self, tangent)

    # -- construction helpers ----------------------------------------------

    def zero(self) -> CohClass:
        return CohClass(self, {})

    def unit(self) -> CohClass:
        return CohClass(self, {self.unit_index: ONE})

    def scalar(self, value) -> CohClass:
        c = coerce(value)
        if c is None:
            raise TypeError(f"cannot use {value!r} as a coefficient")
        return CohClass(self, {self.unit_index: c})

    def basis_class(self, index: int) -> CohClass:
        return CohClass(self, {index: ONE})

    def point_class(self) -> CohClass:
        return CohClass(self, {self.point_index: ONE})

    def from_coeffs(self, coeffs: dict[int, GaussRat]) -> CohClass:
        for i in coeffs:
            if not 0 <= i < len(self.basis):
                raise IndexError(f"basis index {i} out of range for {self.name!r}")
        return CohClass(self, coeffs)

    def basis_classes(self) -> list[CohClass]:
        return [self.basis_class(i) for i in range(len(self.basis))]

    # -- multiplication ------------------------------------------------------

    def _entries(self, i: int, j: int) -> dict[int, GaussRat]:
        """Structure constants of e_i . e_j as a sparse index -> value map."""
        hit = self._mult.get((i, j))
        if hit is not None:
            return hit
        if self.factors is None:
            return {}
        out = self._product_entries(i, j)
        self._mult[(i, j)] = out
        return out

    def _product_entries(self, i: int, j: int) -> dict[int, GaussRat]:
        X, Y = self.factors
        ny = len(Y.basis)
        ia, ib = divmod(i, ny)
        ja, jb = divmod(j, ny)
        # Koszul sign from moving the second factor of e_i past the first of e_j
        negate = (Y.basis[ib].degree & 1) and (X.basis[ja].degree & 1)
        out: dict[int, GaussRat] = {}
        for k, ca in X._entries(ia, ja).items():
            for l, cb in Y._entries(ib, jb).items():
                value = ca * cb
                out[k * ny + l] = -value if negate else value
        return out

    def intersection_matrix(self) -> list[list[GaussRat]]:
        """The Poincare pairing matrix P[i][j] = integral of e_i . e_j."""
        n = len(self.basis)
        point = self.point_index
        return [
            [self._entries(i, j).get(point, ZERO) for j in range(n)]
            for i in range(n)
        ]

    def __repr__(self):
        return f"<Space {self.name} dim={self.dim} basis={len(self.basis)}>"


# -- builders ------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def projective_space(n: int) -> Space:
    """Complex projective space of dimension n.

    Basis 1, H, ..., H^n with H^k of bidegree (k, k); the point class is H^n
    and the total tangent Chern class is (1 + H)^{n+1} truncated in degree n.
    """
    if n < 0:
        raise ValueError("dimension must be nonnegative")
    names = ["1", "H"] + [f"H^{k}" for k in range(2, n + 1)]
    basis = [BasisElement(names[k], k, k) for k in range(n + 1)]
    mult = {
        (i, j): {i + j: ONE}
        for i in range(n + 1)
        for j in range(n + 1)
        if i + j <= n
    }
    tangent = {
        k: GaussRat(_binomial(n + 1, k)) for k in range(n + 1) if _binomial(n + 1, k)
    }
    return Space(f"p{n}", n, basis, mult, n, tangent)


@functools.lru_cache(maxsize=None)
def k3() -> Space:
    """A K3 surface.

    H^2 carries the even unimodular form U + U + U + E8(-1) + E8(-1), in that
    block order.  The first hyperbolic plane is spanned by the (2,0) class
    ``sigma`` and the (0,2) class ``sigmab``; the twenty (1,1) classes
    ``l1..l20`` carry the remaining U + U + E8(-1) + E8(-1) blocks.  The
    tangent data is c1 = 0 and c2 = 24 pt.
    """
    basis = [BasisElement("1", 0, 0), BasisElement("sigma", 2, 0), BasisElement("sigmab", 0, 2)]
    basis += [BasisElement(f"l{k}", 1, 1) for k in range(1, 21)]
    basis.append(BasisElement("pt", 2, 2))
    gram = _k3_gram()
    point = 23
    mult: dict[tuple[int, int], dict[int, GaussRat]] = {}
    for k in range(24):
        mult[(0, k)] = {k: ONE}
        if k != 0:
            mult[(k, 0)] = {k: ONE}
    for i in range(22):
        for j in range(22):
            value = gram[i][j]
            if value:
                mult[(i + 1, j + 1)] = {point: GaussRat(value)}
    tangent = {0: ONE, point: GaussRat(24)}
    return Space("k3", 2, basis, mult, point, tangent)


def _k3_gram() -> list[list[int]]:
    """U + U + U + E8(-1) + E8(-1) as an exact integer Gram matrix."""
    gram = [[0] * 22 for _ in range(22)]
    for block in range(3):
        a, b = 2 * block, 2 * block + 1
        gram[a][b] = gram[b][a] = 1
    e8 = _E8_CARTAN
    for block in range(2):
        base = 6 + 8 * block
        for i in range(8):
            for j in range(8):
                gram[base + i][base + j] = -e8[i][j]
    return gram


# Cartan matrix of E8; nodes 1..7 form a chain and node 8 attaches to node 5.
_E8_CARTAN = (
    (2, -1, 0, 0, 0, 0, 0, 0),
    (-1, 2, -1, 0, 0, 0, 0, 0),
    (0, -1, 2, -1, 0, 0, 0, 0),
    (0, 0, -1, 2, -1, 0, 0, 0),
    (0, 0, 0, -1, 2, -1, 0, -1),
    (0, 0, 0, 0, -1, 2, -1, 0),
    (0, 0, 0, 0, 0, -1, 2, 0),
    (0, 0, 0, 0, -1, 0, 0, 2),
)


@functools.lru_cache(maxsize=None)
def torus(g: int) -> Space:
    """A complex torus of dimension g, as the exterior algebra on 2g
    degree-one generators a1, b1, ..., ag, bg.

    ak has bidegree (1, 0) and bk has bidegree (0, 1); the volume form
    a1*b1*...*ag*bg integrates to 1 and the tangent Chern class is trivial.
    """
    if g < 0:
        raise ValueError("genus must be nonnegative")
    gen_names = []
    gen_bidegrees = []
    for k in range(1, g + 1):
        gen_names += [f"a{k}", f"b{k}"]
        gen_bidegrees += [(1, 0), (0, 1)]
    subsets = sorted(
        itertools.chain.from_iterable(
            itertools.combinations(range(2 * g), r) for r in range(2 * g + 1)
        ),
        key=lambda s: (len(s), s),
    )
    index_of = {s: i for i, s in enumerate(subsets)}
    basis = []
    for s in subsets:
        p = sum(gen_bidegrees[k][0] for k in s)
        q = sum(gen_bidegrees[k][1] for k in s)
        name = "1" if not s else "*".join(gen_names[k] for k in s)
        basis.append(BasisElement(name, p, q))
    mult: dict[tuple[int, int], dict[int, GaussRat]] = {}
    for s in subsets:
        for t in subsets:
            if set(s) & set(t):
                continue
            sign = _shuffle_sign(s, t)
            merged = tuple(sorted(s + t))
            mult[(index_of[s], index_of[t])] = {
                index_of[merged]: ONE if sign == 1 else -ONE
            }
    point = index_of[tuple(range(2 * g))]
    return Space(f"t{g}", g, basis, mult, point, {0: ONE})


def _shuffle_sign(s: tuple[int, ...], t: tuple[int, ...]) -> int:
    """Sign of merging two disjoint ascending tuples of odd generators."""
    inversions = sum(1 for a in s for b in t if a > b)
    return -1 if inversions & 1 else 1


def _binomial(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out


# -- products and projections --------------------------------------------------


@functools.lru_cache(maxsize=None)
def product(X: Space, Y: Space) -> Space:
    """The product space X x Y with the Kunneth basis {a x b}.

    Basis order is row major in (index on X, index on Y); products are
    expanded lazily through the factors with the module-level Koszul sign.
    """
    ny = len(Y.basis)
    basis = []
    for a in X.basis:
        for b in Y.basis:
            basis.append(BasisElement(f"p1({a.name})*p2({b.name})", a.p + b.p, a.q + b.q))
    point = X.point_index * ny + Y.point_index
    tangent: dict[int, GaussRat] = {}
    for ia, ca in X.tangent_chern.coeffs.items():
        for ib, cb in Y.tangent_chern.coeffs.items():
            tangent[ia * ny + ib] = ca * cb
    return Space(
        f"{X.name} x {Y.name}",
        X.dim + Y.dim,
        basis,
        {},
        point,
        tangent,
        factors=(X, Y),
    )


def _require_product(space: Space) -> tuple[Space, Space]:
    if space.factors is None:
        raise NotAProductError(f"space {space.name!r} has no recorded factors")
    return space.factors


def pullback(xy: Space, factor: int, a: CohClass) -> CohClass:
    """Pull a class back along the projection onto the given factor (1 or 2)."""
    X, Y = _require_product(xy)
    ny = len(Y.basis)
    if factor == 1:
        if a.space is not X:
            raise SpaceMismatchError("class does not live on the first factor")
        return CohClass(xy, {i * ny + Y.unit_index: c for i, c in a.coeffs.items()})
    if factor == 2:
        if a.space is not Y:
            raise SpaceMismatchError("class does not live on the second factor")
        return CohClass(xy, {X.unit_index * ny + i: c for i, c in a.coeffs.items()})
    raise ValueError("factor must be 1 or 2")


def pushforward(xy: Space, factor: int, a: CohClass) -> CohClass:
    """Integrate a class over the other factor; the given factor survives.

    Only terms whose integrated component is the point class contribute, and
    those are of even degree, so the operation carries no Koszul sign.
    """
    X, Y = _require_product(xy)
    if a.space is not xy:
        raise SpaceMismatchError("class does not live on the product")
    ny = len(Y.basis)
    out: dict[int, GaussRat] = {}
    if factor == 1:
        for idx, c in a.coeffs.items():
            ia, ib = divmod(idx, ny)
            if ib == Y.point_index:
                out[ia] = out.get(ia, ZERO) + c
        return CohClass(X, out)
    if factor == 2:
        for idx, c in a.coeffs.items():
            ia, ib = divmod(idx, ny)
            if ia == X.point_index:
                out[ib] = out.get(ib, ZERO) + c
        return CohClass(Y, out)
    raise ValueError("factor must be 1 or 2")


# -- Poincare duality and the diagonal ------------------------------------------


@functools.lru_cache(maxsize=None)
def _pairing_inverse(X: Space) -> tuple[tuple[GaussRat, ...], ...]:
    try:
        inverse = invert_matrix(X.intersection_matrix())
    except SingularMatrixError as err:
        raise SpaceFormatError(
            f"space {X.name!r} violates Poincare duality: "
            f"pairing matrix has rank {err.rank} < {err.size}"
        ) from err
    return tuple(tuple(row) for row in inverse)


def poincare_dual_basis(X: Space) -> list[tuple[CohClass, CohClass]]:
    """Pairs (e_i, e^i) with integral of e_i . e^j equal to delta_ij.

    Writing P for the pairing matrix, e^j has coefficient vector the j-th
    column of P^{-1}.
    """
    inverse = _pairing_inverse(X)
    n = len(X.basis)
    pairs = []
    for j in range(n):
        dual = CohClass(X, {k: inverse[k][j] for k in range(n)})
        pairs.append((X.basis_class(j), dual))
    return pairs


@functools.lru_cache(maxsize=None)
def diagonal_class(X: Space) -> CohClass:
    """The class of the diagonal in X x X, acting as the identity kernel.

    Equals sum_i (-1)^{|e_i|} e_i x e^i; the signs are forced by the
    identity  pushforward_2(pullback_1(a) . diagonal) = a.
    """
    xx = product(X, X)
    n = len(X.basis)
    out: dict[int, GaussRat] = {}
    for i, (_, dual) in enumerate(poincare_dual_basis(X)):
        negate = X.basis[i].degree & 1
        for k, c in dual.coeffs.items():
            out[i * n + k] = -c if negate else c
    return CohClass(xx, out)


def diagonal_pushforward(a: CohClass) -> CohClass:
    """Push a class forward along the diagonal embedding, as a kernel on X x X.

    By the projection formula this is pullback_1(a) . diagonal.
    """
    X = a.space
    xx = product(X, X)
    return pullback(xx, 1, a) * diagonal_class(X)


# -- validation ------------------------------------------------------------------


def validate_space(space: Space, check_associativity: bool = True) -> None:
    """Check the ring invariants; raises SpaceFormatError on violation.

    Covers degree additivity, graded commutativity, unit behavior,
    optionally associativity on all basis triples, and invertibility of the
    Poincare pairing.
    """
    n = len(space.basis)
    unit = space.unit_index
    for i in range(n):
        for j in range(n):
            entry = space._entries(i, j)
            degree = space.basis[i].degree + space.basis[j].degree
            for k, c in entry.items():
                if space.basis[k].degree != degree:
                    raise SpaceFormatError(
                        f"product e_{i}.e_{j} has a term of degree "
                        f"{space.basis[k].degree}, expected {degree}"
                    )
            flipped = space._entries(j, i)
            negate = (space.basis[i].degree & 1) and (space.basis[j].degree & 1)
            expected = {k: (-c if negate else c) for k, c in entry.items()}
            if flipped != expected:
                raise SpaceFormatError(
                    f"products e_{i}.e_{j} and e_{j}.e_{i} violate graded commutativity"
                )
        if space._entries(unit, i) != {i: ONE}:
            raise SpaceFormatError(f"unit does not act as identity on e_{i}")
    if check_associativity:
        classes = space.basis_classes()
        for a in classes:
            for b in classes:
                ab = a * b
                for c in classes:
                    if (ab * c) != (a * (b * c)):
                        raise SpaceFormatError(
                            "multiplication is not associative on basis triples"
                        )
    _pairing_inverse(space)


# -- rendering --------------------------------------------------------------------


def term_expression(space: Space, index: int) -> str:
    """An expression string that evaluates to the given basis element."""
    if space.factors is not None:
        X, Y = space.factors
        ia, ib = divmod(index, len(Y.basis))
        return f"p1({term_expression(X, ia)})*p2({term_expression(Y, ib)})"
    return space.basis[index].name


def render_class(a: CohClass) -> str:
    """Deterministic rendering that reparses to an equal class."""
    if a.is_zero:
        return "0"
    parts: list[str] = []
    for index, value in a.items():
        if index == a.space.unit_index:
            _append_term(parts, value, None)
        else:
            _append_term(parts, value, term_expression(a.space, index))
    return " ".join(parts)


def _append_term(parts: list[str], value: GaussRat, name: str | None) -> None:
    first = not parts
    if name is None:
        text = str(value)
        if not first:
            text = "+ " + text if not text.startswith("-") else "- " + text[1:]
        parts.append(text)
        return
    if value.is_real:
        mag = value.re if value.re > 0 else -value.re
        sign = value.re < 0
        head = name if mag == 1 else f"{mag}*{name}"
    else:
        stripped = str(value).replace(" ", "")
        sign = False
        head = f"({stripped})*{name}"
    if first:
        parts.append("-" + head if sign else head)
    else:
        parts.append(("- " if sign else "+ ") + head)


def describe_space(space: Space) -> str:
    """A table of the basis with bidegrees, plus the tangent Chern class."""
    lines = [f"space {space.name}  (dim {space.dim})"]
    lines.append("idx  p  q  name")
    for i, e in enumerate(space.basis):
        lines.append(f"{i:>3}  {e.p}  {e.q}  {e.name}")
    lines.append(f"point index: {space.point_index}")
    lines.append(f"c(T) = {space.tangent_chern}")
    return "\n".join(lines)
