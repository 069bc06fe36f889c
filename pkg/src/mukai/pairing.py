"""Pairings on cohomology: the generalized Mukai pairing, the Euler pairing
via Hirzebruch-Riemann-Roch, the Weyl-operator comparison pairing, and the
column grading by q - p."""

from __future__ import annotations

from .coeffs import GaussRat, i_power
from .cohomology import CohClass
from .charclasses import KExpr, chern_character, dualize, tau, todd
from .errors import SpaceMismatchError


def mukai_pairing(v: CohClass, w: CohClass) -> GaussRat:
    """<v, w> = integral of dualize(v) . w."""
    if v.space is not w.space:
        raise SpaceMismatchError("pairing arguments live on different spaces")
    return (dualize(v) * w).integrate()


def euler_pairing(e: KExpr, f: KExpr) -> GaussRat:
    """The Euler characteristic chi(e, f), computed by Riemann-Roch as the
    integral of tau(ch e) . ch f . Td."""
    if e.space is not f.space:
        raise SpaceMismatchError("pairing arguments live on different spaces")
    return (tau(chern_character(e)) * chern_character(f) * todd(e.space)).integrate()


def weyl_operator(v: CohClass) -> CohClass:
    """Multiply each (p, q) component of v by i^{p-q}."""
    basis = v.space.basis
    return CohClass(
        v.space,
        {
            idx: c * i_power(basis[idx].p - basis[idx].q)
            for idx, c in v.coeffs.items()
        },
    )


def hodge_weyl_pairing(v: CohClass, w: CohClass) -> GaussRat:
    """The polarization-style pairing: integral of (Weyl operator of v) . w."""
    if v.space is not w.space:
        raise SpaceMismatchError("pairing arguments live on different spaces")
    return (weyl_operator(v) * w).integrate()


def column_projection(v: CohClass, column: int) -> CohClass:
    """Keep the components of v with q - p equal to the given column."""
    basis = v.space.basis
    return CohClass(
        v.space,
        {
            idx: c
            for idx, c in v.coeffs.items()
            if basis[idx].q - basis[idx].p == column
        },
    )


def columns_of(v: CohClass) -> list[int]:
    """The sorted list of columns q - p on which v has a component."""
    basis = v.space.basis
    return sorted({basis[idx].q - basis[idx].p for idx in v.coeffs})
