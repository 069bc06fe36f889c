"""Cohomological integral transforms, kernel composition, adjoint kernels,
and the verification harness for the identities they satisfy.

A kernel mu on X x Y induces the transform  v -> pushforward_Y(pullback_X(v) . mu).
Kernels compose through the triple product (X x Y) x Z, and every identity
checked here is an exact equality in Q(i).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction

from .coeffs import GaussRat, ONE
from .cohomology import (
    CohClass,
    Space,
    diagonal_class,
    product,
    pullback,
    pushforward,
)
from .charclasses import (
    KExpr,
    Kernel,
    ch_canonical,
    chern_character,
    mukai_vector,
    series_inverse,
    series_sqrt,
    tau,
)
from .pairing import column_projection, mukai_pairing
from .errors import SpaceMismatchError


def apply_transform(xy: Space, mu: Kernel, v: CohClass) -> CohClass:
    """The transform with kernel mu, from the first factor to the second."""
    if mu.space is not xy:
        raise SpaceMismatchError("kernel does not live on the given product")
    return pushforward(xy, 2, pullback(xy, 1, v) * mu)


def apply_transform_backward(xy: Space, mu: Kernel, w: CohClass) -> CohClass:
    """The transform with kernel mu read in the opposite direction, from the
    second factor to the first."""
    if mu.space is not xy:
        raise SpaceMismatchError("kernel does not live on the given product")
    return pushforward(xy, 1, pullback(xy, 2, w) * mu)


def compose_kernels(mu: Kernel, nu: Kernel) -> Kernel:
    """The convolution nu o mu of kernels mu on X x Y and nu on Y x Z.

    Both kernels are pulled to (X x Y) x Z, multiplied there, and pushed to
    X x Z by integrating out the middle factor.
    """
    X, Y = _factors(mu.space)
    Y2, Z = _factors(nu.space)
    if Y is not Y2:
        raise SpaceMismatchError(
            f"middle spaces differ: {Y.name!r} vs {Y2.name!r}"
        )
    xyz = product(mu.space, Z)
    lifted_mu = pullback(xyz, 1, mu)
    lifted_nu = _pull_back_pair(xyz, nu)
    combined = lifted_mu * lifted_nu
    return _push_to_outer(xyz, combined, product(X, Z))


def _factors(space: Space) -> tuple[Space, Space]:
    if space.factors is None:
        raise SpaceMismatchError(f"space {space.name!r} is not a product")
    return space.factors


def _pull_back_pair(xyz: Space, nu: Kernel) -> CohClass:
    """Pull a kernel on Y x Z back along (X x Y) x Z -> Y x Z.

    A Kunneth term b x c lifts to (1 x b) x c; pullbacks are ring maps so no
    sign appears.
    """
    xy, Z = xyz.factors
    X, Y = xy.factors
    n_y = len(Y.basis)
    n_z = len(Z.basis)
    unit_x = X.unit_index
    out = {}
    for idx, c in nu.coeffs.items():
        ib, ic = divmod(idx, n_z)
        lifted = (unit_x * n_y + ib) * n_z + ic
        out[lifted] = c
    return CohClass(xyz, out)


def _push_to_outer(xyz: Space, a: CohClass, xz: Space) -> CohClass:
    """Integrate out the middle factor of (X x Y) x Z.

    Only terms whose Y component is the point class survive, and those are
    even, so the fiber integration is sign free.
    """
    xy, Z = xyz.factors
    X, Y = xy.factors
    n_y = len(Y.basis)
    n_z = len(Z.basis)
    out: dict[int, GaussRat] = {}
    for idx, c in a.coeffs.items():
        iab, ic = divmod(idx, n_z)
        ia, ib = divmod(iab, n_y)
        if ib != Y.point_index:
            continue
        target = ia * n_z + ic
        prev = out.get(target)
        out[target] = c if prev is None else prev + c
    return CohClass(xz, out)


# -- adjoint kernels ---------------------------------------------------------------


def left_adjoint_kernel(e: Kernel) -> Kernel:
    """The kernel of the left adjoint transform, read from Y to X.

    For e on X x Y this is
    (-1)^{dim Y} tau(e) . pull_2(sqrt ch omega_Y) / pull_1(sqrt ch omega_X).
    """
    xy = e.space
    X, Y = _factors(xy)
    numer = pullback(xy, 2, series_sqrt(ch_canonical(Y)))
    denom = pullback(xy, 1, series_sqrt(ch_canonical(X)))
    twist = numer * series_inverse(denom)
    out = tau(e) * twist
    return -out if Y.dim % 2 else out


def right_adjoint_kernel(e: Kernel) -> Kernel:
    """The kernel of the right adjoint transform, the mirror of the left case
    with the roles of the factors exchanged."""
    xy = e.space
    X, Y = _factors(xy)
    numer = pullback(xy, 1, series_sqrt(ch_canonical(X)))
    denom = pullback(xy, 2, series_sqrt(ch_canonical(Y)))
    twist = numer * series_inverse(denom)
    out = tau(e) * twist
    return -out if X.dim % 2 else out


# -- verification reports -----------------------------------------------------------


@dataclass
class VerificationReport:
    """Outcome of one exact property sweep."""

    check: str
    space_names: list[str]
    kernel_description: str
    cases_total: int
    cases_failed: int
    first_failure: str | None

    @property
    def ok(self) -> bool:
        return self.cases_failed == 0

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "space_names": self.space_names,
            "kernel_description": self.kernel_description,
            "cases_total": self.cases_total,
            "cases_failed": self.cases_failed,
            "first_failure": self.first_failure,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


class _Sweep:
    """Accumulates case outcomes and keeps the first failure witness."""

    def __init__(self):
        self.total = 0
        self.failed = 0
        self.first_failure: str | None = None

    def case(self, ok: bool, witness: str) -> None:
        self.total += 1
        if not ok:
            self.failed += 1
            if self.first_failure is None:
                self.first_failure = witness

    def report(self, check: str, spaces: list[Space], kernel: str) -> VerificationReport:
        return VerificationReport(
            check=check,
            space_names=[s.name for s in spaces],
            kernel_description=kernel,
            cases_total=self.total,
            cases_failed=self.failed,
            first_failure=self.first_failure,
        )


def verify_adjointness(
    X: Space, Y: Space, e: Kernel, description: str | None = None
) -> VerificationReport:
    """Check <v, transform_e(w)>_Y = <transform_{e*}(v), w>_X on all basis pairs."""
    xy = product(X, Y)
    if e.space is not xy:
        raise SpaceMismatchError("kernel does not live on X x Y")
    e_star = left_adjoint_kernel(e)
    images_fwd = [apply_transform(xy, e, w) for w in X.basis_classes()]
    images_bwd = [apply_transform_backward(xy, e_star, v) for v in Y.basis_classes()]
    sweep = _Sweep()
    for j, v in enumerate(Y.basis_classes()):
        for i, w in enumerate(X.basis_classes()):
            lhs = mukai_pairing(v, images_fwd[i])
            rhs = mukai_pairing(images_bwd[j], w)
            sweep.case(
                lhs == rhs,
                f"v={Y.basis[j].name}, w={X.basis[i].name}: "
                f"<v, Phi w> = {lhs}, <Psi v, w> = {rhs}",
            )
    return sweep.report("adjointness", [X, Y], description or str(e))


def verify_isometry(
    X: Space,
    Y: Space,
    e: Kernel,
    e_inv: Kernel,
    description: str | None = None,
) -> VerificationReport:
    """Check that e and e_inv are two-sided inverses under composition and
    that the induced transform preserves the Mukai pairing."""
    desc = description or str(e)
    sweep = _Sweep()
    on_xx = compose_kernels(e, e_inv)
    on_yy = compose_kernels(e_inv, e)
    if on_xx != diagonal_class(X) or on_yy != diagonal_class(Y):
        sweep.case(False, "not an equivalence: kernel inverse check failed")
        return sweep.report("isometry", [X, Y], desc)
    xy = product(X, Y)
    images = [apply_transform(xy, e, w) for w in X.basis_classes()]
    for i, v in enumerate(X.basis_classes()):
        for j, w in enumerate(X.basis_classes()):
            lhs = mukai_pairing(images[i], images[j])
            rhs = mukai_pairing(v, w)
            sweep.case(
                lhs == rhs,
                f"v={X.basis[i].name}, w={X.basis[j].name}: "
                f"<Phi v, Phi w> = {lhs}, <v, w> = {rhs}",
            )
    return sweep.report("isometry", [X, Y], desc)


def functoriality_check(
    X: Space, Y: Space, Z: Space, e1: KExpr, e2: KExpr
) -> VerificationReport:
    """Check that the transform of the composed Mukai-vector kernels equals
    the composition of the individual transforms, on every basis class."""
    k1 = mukai_vector(e1)
    k2 = mukai_vector(e2)
    sweep = _Sweep()
    _composition_cases(sweep, X, Y, Z, [(k1, k2)], check_identities=False)
    return sweep.report("functoriality", [X, Y, Z], f"{k1} ; {k2}")


def verify_composition(
    X: Space,
    Y: Space,
    Z: Space,
    pairs: list[tuple[Kernel, Kernel]],
    description: str = "random kernels",
) -> VerificationReport:
    """Check the composition law on every basis class, plus the identity
    kernel laws, for each pair (mu on X x Y, nu on Y x Z)."""
    sweep = _Sweep()
    _composition_cases(sweep, X, Y, Z, pairs, check_identities=True)
    return sweep.report("composition", [X, Y, Z], description)


def verify_associativity(
    X: Space,
    Y: Space,
    Z: Space,
    W: Space,
    triples: list[tuple[Kernel, Kernel, Kernel]],
    description: str = "random kernels",
) -> VerificationReport:
    """Check (kappa o nu) o mu = kappa o (nu o mu) for kernel triples on
    X x Y, Y x Z and Z x W."""
    sweep = _Sweep()
    for index, (mu, nu, kappa) in enumerate(triples):
        left = compose_kernels(mu, compose_kernels(nu, kappa))
        right = compose_kernels(compose_kernels(mu, nu), kappa)
        sweep.case(
            left == right,
            f"triple {index}: nested compositions differ: {left} vs {right}",
        )
    return sweep.report("associativity", [X, Y, Z, W], description)


def _composition_cases(sweep, X, Y, Z, pairs, check_identities):
    xy = product(X, Y)
    yz = product(Y, Z)
    xz = product(X, Z)
    for index, (mu, nu) in enumerate(pairs):
        composed = compose_kernels(mu, nu)
        for i, v in enumerate(X.basis_classes()):
            direct = apply_transform(xz, composed, v)
            chained = apply_transform(yz, nu, apply_transform(xy, mu, v))
            sweep.case(
                direct == chained,
                f"pair {index}, v={X.basis[i].name}: "
                f"composed transform gives {direct}, chained gives {chained}",
            )
        if check_identities:
            sweep.case(
                compose_kernels(diagonal_class(X), mu) == mu,
                f"pair {index}: left identity law fails",
            )
            sweep.case(
                compose_kernels(mu, diagonal_class(Y)) == mu,
                f"pair {index}: right identity law fails",
            )


def verify_identity_kernel(X: Space) -> VerificationReport:
    """Check that the diagonal kernel induces the identity transform in both
    directions, on every basis class."""
    xx = product(X, X)
    delta = diagonal_class(X)
    sweep = _Sweep()
    for i, v in enumerate(X.basis_classes()):
        fwd = apply_transform(xx, delta, v)
        bwd = apply_transform_backward(xx, delta, v)
        name = X.basis[i].name
        sweep.case(fwd == v, f"v={name}: forward transform gives {fwd}")
        sweep.case(bwd == v, f"v={name}: backward transform gives {bwd}")
    return sweep.report("identity-kernel", [X], "diagonal")


def verify_column_preservation(
    X: Space, Y: Space, kernels: list[Kernel], description: str = "(p,p) kernels"
) -> VerificationReport:
    """Check that transforms with (p,p) kernels map each column q - p of the
    source into the same column of the target."""
    xy = product(X, Y)
    sweep = _Sweep()
    for index, e in enumerate(kernels):
        for i, v in enumerate(X.basis_classes()):
            column = X.basis[i].q - X.basis[i].p
            image = apply_transform(xy, e, v)
            ok = column_projection(image, column) == image
            sweep.case(
                ok,
                f"kernel {index}, v={X.basis[i].name} in column {column}: "
                f"image {image} leaves the column",
            )
    return sweep.report("columns", [X, Y], description)


# -- property suites over a single space ---------------------------------------------


def verify_tau_properties(space: Space, seed: int = 7, samples: int = 10) -> VerificationReport:
    """Exact sweep of the degree-twist identities on one space.

    Covers multiplicativity on basis pairs, compatibility with the square
    root, the involution law on even classes, inversion of line bundle
    characters, and, when the space is a product, commutation with pullbacks
    and the sign rule for pushforwards along both projections.
    """
    sweep = _Sweep()
    rng = random.Random(seed)
    classes = space.basis_classes()
    for i, v in enumerate(classes):
        for j, w in enumerate(classes):
            ok = tau(v * w) == tau(v) * tau(w)
            sweep.case(ok, f"tau multiplicativity fails on e_{i}, e_{j}")
    for sample in range(samples):
        u = random_class(space, rng, unit_term=True)
        ok = tau(series_sqrt(u)) == series_sqrt(tau(u))
        sweep.case(ok, f"tau does not commute with sqrt on sample {sample}: u = {u}")
    for i, e in enumerate(space.basis):
        if e.degree % 2 == 0:
            v = space.basis_class(i)
            sweep.case(tau(tau(v)) == v, f"tau is not an involution on e_{i}")
    for i, e in enumerate(space.basis):
        if (e.p, e.q) != (1, 1):
            continue
        from .charclasses import LineBundle, chern_character

        bundle = chern_character(LineBundle(space.basis_class(i)))
        inverse_bundle = chern_character(LineBundle(-space.basis_class(i)))
        sweep.case(
            tau(bundle) == inverse_bundle,
            f"tau(ch L) != ch(L^-1) for generator e_{i}",
        )
        sweep.case(
            tau(bundle) * bundle == space.unit(),
            f"tau(ch L) != ch(L)^-1 for generator e_{i}",
        )
    if space.factors is not None:
        X, Y = space.factors
        for which, factor in ((1, X), (2, Y)):
            sign = -ONE if (space.dim - factor.dim) % 2 else ONE
            for i, v in enumerate(factor.basis_classes()):
                lifted = pullback(space, which, v)
                sweep.case(
                    tau(lifted) == pullback(space, which, tau(v)),
                    f"tau does not commute with pullback {which} on e_{i}",
                )
            for i, v in enumerate(space.basis_classes()):
                lhs = pushforward(space, which, tau(v))
                rhs = sign * tau(pushforward(space, which, v))
                sweep.case(
                    lhs == rhs,
                    f"pushforward sign rule fails along projection {which} on e_{i}",
                )
    return sweep.report("tau-props", [space], "")


def verify_sqrt_properties(space: Space, seed: int = 11, samples: int = 25) -> VerificationReport:
    """Random exact sweep of square root identities on one space."""
    sweep = _Sweep()
    rng = random.Random(seed)
    sweep.case(series_sqrt(space.unit()) == space.unit(), "sqrt(1) != 1")
    for sample in range(samples):
        u = random_class(space, rng, unit_term=True)
        v = random_class(space, rng, unit_term=True)
        root = series_sqrt(u)
        sweep.case(root * root == u, f"(sqrt u)^2 != u on sample {sample}: u = {u}")
        sweep.case(
            series_sqrt(u * v) == root * series_sqrt(v),
            f"sqrt(uv) != sqrt(u) sqrt(v) on sample {sample}",
        )
    return sweep.report("sqrt-props", [space], "")


def verify_euler_mukai(space: Space, max_twist: int = 4) -> VerificationReport:
    """Check Euler pairing equals Mukai pairing of Mukai vectors for line
    bundles twisted along the first (1,1) basis direction."""
    from .charclasses import LineBundle, Structure
    from .pairing import euler_pairing

    sweep = _Sweep()
    generators = [
        i for i, e in enumerate(space.basis) if (e.p, e.q) == (1, 1)
    ]
    if not generators:
        bundles = {0: Structure(space)}
        twists = [0]
    else:
        gen = space.basis_class(generators[0])
        twists = list(range(-max_twist, max_twist + 1))
        bundles = {a: LineBundle(a * gen) for a in twists}
    vectors = {a: mukai_vector(bundles[a]) for a in twists}
    for a in twists:
        for b in twists:
            chi = euler_pairing(bundles[a], bundles[b])
            pairing = mukai_pairing(vectors[a], vectors[b])
            sweep.case(
                chi == pairing,
                f"twists ({a},{b}): chi = {chi}, Mukai pairing = {pairing}",
            )
    return sweep.report("euler", [space], "line bundle twists")


# -- deterministic random data -------------------------------------------------------


def random_class(
    space: Space,
    rng: random.Random,
    density: float = 0.7,
    unit_term: bool = False,
    pp_only: bool = False,
) -> CohClass:
    """A deterministic pseudo-random class with small rational coefficients."""
    coeffs: dict[int, GaussRat] = {}
    for i, e in enumerate(space.basis):
        if pp_only and e.p != e.q:
            continue
        if unit_term and i == space.unit_index:
            continue
        if rng.random() > density:
            continue
        num = rng.randint(-4, 4)
        den = rng.choice((1, 1, 2, 3))
        im = Fraction(rng.randint(-2, 2)) if rng.random() < 0.25 else Fraction(0)
        value = GaussRat(Fraction(num, den), im)
        if not value.is_zero:
            coeffs[i] = value
    out = CohClass(space, coeffs)
    if unit_term:
        out = out + space.unit()
    return out


def random_kernel(
    X: Space, Y: Space, rng: random.Random, pp_only: bool = False
) -> Kernel:
    return random_class(product(X, Y), rng, pp_only=pp_only)
