"""Plain-text description files for spaces.

Format, in this order, with '#' comments and blank lines ignored::

    space NAME
    dim N
    basis
    <name> <p> <q>          # one line per basis element, in index order
    mult
    <i> <j> -> <k>:<coeff>[,<k>:<coeff>...]
    point <index>
    tangent <k>:<coeff>[,<k>:<coeff>...]

Only products with i <= j are listed; the transposed entries follow from
graded commutativity.  Coefficients are scalar expressions over Q(i)
written without spaces, for example ``1``, ``-3/4`` or ``1+2*i``.  Basis
names must themselves parse, in the expression language of the loaded
space, to the basis element they label; plain identifiers always do, and
composite names like ``H^2`` or ``a1*b1`` are accepted because they
evaluate to the right class.

Loaded spaces are fully validated: degree additivity, graded commutativity,
associativity on all basis triples, unit behavior and an invertible
Poincare pairing.
"""

from __future__ import annotations

from .coeffs import GaussRat
from .cohomology import BasisElement, CohClass, Space, validate_space
from .errors import ParseError, SpaceFormatError
from . import expr


def save_space(space: Space) -> str:
    """Render a space in the description format; refuses product spaces,
    whose basis names only make sense through their factors."""
    if space.factors is not None:
        raise SpaceFormatError(
            "product spaces are not exported; save the factors and rebuild"
        )
    lines = [f"space {space.name}", f"dim {space.dim}", "basis"]
    for e in space.basis:
        lines.append(f"{e.name} {e.p} {e.q}")
    lines.append("mult")
    n = len(space.basis)
    for i in range(n):
        for j in range(i, n):
            entry = space._entries(i, j)
            if entry:
                lines.append(f"{i} {j} -> {_render_sparse(entry)}")
    lines.append(f"point {space.point_index}")
    lines.append(f"tangent {_render_sparse(space.tangent_chern.coeffs)}")
    return "\n".join(lines) + "\n"


def _render_sparse(entry: dict[int, GaussRat]) -> str:
    parts = []
    for k in sorted(entry):
        parts.append(f"{k}:{str(entry[k]).replace(' ', '')}")
    return ",".join(parts)


def _parse_sparse(text: str, lineno: int) -> dict[int, GaussRat]:
    out: dict[int, GaussRat] = {}
    for chunk in text.split(","):
        if ":" not in chunk:
            raise SpaceFormatError(
                f"line {lineno}: expected index:coeff pairs, got {chunk!r}"
            )
        index_text, coeff_text = chunk.split(":", 1)
        try:
            index = int(index_text)
            value = expr.parse_scalar(coeff_text)
        except (ValueError, ParseError) as err:
            raise SpaceFormatError(f"line {lineno}: {err}") from err
        out[index] = value
    return out


def load_space(text: str) -> Space:
    """Parse and fully validate a space description."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            lines.append((lineno, stripped))
    cursor = 0

    def take() -> tuple[int, str]:
        nonlocal cursor
        if cursor >= len(lines):
            raise SpaceFormatError("unexpected end of file")
        item = lines[cursor]
        cursor += 1
        return item

    lineno, line = take()
    if not line.startswith("space "):
        raise SpaceFormatError(f"line {lineno}: expected 'space NAME'")
    name = line[len("space "):].strip()

    lineno, line = take()
    if not line.startswith("dim "):
        raise SpaceFormatError(f"line {lineno}: expected 'dim N'")
    try:
        dim = int(line[len("dim "):])
    except ValueError as err:
        raise SpaceFormatError(f"line {lineno}: {err}") from err

    lineno, line = take()
    if line != "basis":
        raise SpaceFormatError(f"line {lineno}: expected 'basis'")
    basis: list[BasisElement] = []
    while cursor < len(lines) and lines[cursor][1] != "mult":
        lineno, line = take()
        fields = line.split()
        if len(fields) != 3:
            raise SpaceFormatError(f"line {lineno}: expected 'name p q'")
        try:
            basis.append(BasisElement(fields[0], int(fields[1]), int(fields[2])))
        except ValueError as err:
            raise SpaceFormatError(f"line {lineno}: {err}") from err
    if not basis:
        raise SpaceFormatError("space has an empty basis")
    names = [e.name for e in basis]
    if len(set(names)) != len(names):
        raise SpaceFormatError("basis names must be unique")

    lineno, line = take()
    if line != "mult":
        raise SpaceFormatError(f"line {lineno}: expected 'mult'")
    mult: dict[tuple[int, int], dict[int, GaussRat]] = {}
    while cursor < len(lines) and not lines[cursor][1].startswith("point "):
        lineno, line = take()
        if "->" not in line:
            raise SpaceFormatError(f"line {lineno}: expected 'i j -> sparse class'")
        head, tail = line.split("->", 1)
        fields = head.split()
        if len(fields) != 2:
            raise SpaceFormatError(f"line {lineno}: expected two indices before '->'")
        try:
            i, j = int(fields[0]), int(fields[1])
        except ValueError as err:
            raise SpaceFormatError(f"line {lineno}: {err}") from err
        if i > j:
            raise SpaceFormatError(
                f"line {lineno}: list only i <= j; the transpose is derived"
            )
        mult[(i, j)] = _parse_sparse(tail.strip(), lineno)

    lineno, line = take()
    if not line.startswith("point "):
        raise SpaceFormatError(f"line {lineno}: expected 'point INDEX'")
    try:
        point_index = int(line[len("point "):])
    except ValueError as err:
        raise SpaceFormatError(f"line {lineno}: {err}") from err

    lineno, line = take()
    if not line.startswith("tangent "):
        raise SpaceFormatError(f"line {lineno}: expected 'tangent SPARSE'")
    tangent = _parse_sparse(line[len("tangent "):].strip(), lineno)
    if cursor != len(lines):
        extra_lineno, extra = lines[cursor]
        raise SpaceFormatError(f"line {extra_lineno}: unexpected content {extra!r}")

    full_mult = _complete_mult(basis, mult)
    space = Space(name, dim, basis, full_mult, point_index, tangent)
    validate_space(space)
    _check_names_parse(space)
    return space


def _complete_mult(basis, mult):
    full: dict[tuple[int, int], dict[int, GaussRat]] = {}
    for (i, j), entry in mult.items():
        if not 0 <= i < len(basis) or not 0 <= j < len(basis):
            raise SpaceFormatError(f"mult entry ({i},{j}) is out of range")
        for k in entry:
            if not 0 <= k < len(basis):
                raise SpaceFormatError(f"mult entry ({i},{j}) targets index {k}")
        full[(i, j)] = entry
        if i != j:
            negate = (basis[i].degree & 1) and (basis[j].degree & 1)
            full[(j, i)] = {k: (-c if negate else c) for k, c in entry.items()}
    return full


def _check_names_parse(space: Space) -> None:
    # names double as expressions in rendered output, so they must round trip
    for index, element in enumerate(space.basis):
        if index == space.unit_index:
            continue
        try:
            value = expr.parse_class_expr(element.name, space)
        except ParseError as err:
            raise SpaceFormatError(
                f"basis name {element.name!r} does not parse: {err}"
            ) from err
        if value != space.basis_class(index):
            raise SpaceFormatError(
                f"basis name {element.name!r} does not evaluate to its element"
            )
