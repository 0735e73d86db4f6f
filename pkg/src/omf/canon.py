"""Canonical forms of orbit matrices under class-preserving permutations.

Two matrices are equivalent when one maps to the other by permuting rows of
equal block-orbit length and columns of equal point-orbit length.  The
representative is the lexicographically largest row-major image, with row
classes ordered by ascending ``Omega`` and column classes by ascending
``omega``.  Under that order rows meeting the fixed points sort first, which
is how the tables are laid out.

The search works by partition refinement: placing a row at the next position
splits every column cell by the values that row takes in it, and the best
arrangement inside a cell is the descending one.  Only rows tying for the
best image are branched on.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .design import OrbitDistribution, PartialOrbitMatrix, Row

Cells = list[list[int]]


@dataclass(frozen=True)
class EquivalenceClassKey:
    omega: tuple[int, ...]
    row_orbits: tuple[int, ...]
    matrix: tuple[Row, ...]


def _initial_cells(omega: Sequence[int]) -> Cells:
    groups: dict[int, list[int]] = {}
    for r, w in enumerate(omega):
        groups.setdefault(w, []).append(r)
    return [groups[w] for w in sorted(groups)]


def _position_classes(row_orbits: Sequence[int]) -> tuple[list[int], list[list[int]]]:
    """Row indices grouped by ascending Omega, and the class index of each position."""
    groups: dict[int, list[int]] = {}
    for i, Om in enumerate(row_orbits):
        groups.setdefault(Om, []).append(i)
    members = [groups[Om] for Om in sorted(groups)]
    pos_class = [c for c, grp in enumerate(members) for _ in grp]
    return pos_class, members


def _image(row: Row, cells: Cells) -> tuple[Row, Cells]:
    img: list[int] = []
    refined: Cells = []
    for cell in cells:
        if len(cell) == 1:
            img.append(row[cell[0]])
            refined.append(cell)
            continue
        order = sorted(cell, key=lambda c: -row[c])
        last = None
        for c in order:
            val = row[c]
            img.append(val)
            if val != last:
                refined.append([c])
                last = val
            else:
                refined[-1].append(c)
    return tuple(img), refined


def canonical_rows(
    gamma: Sequence[Row], row_orbits: Sequence[int], omega: Sequence[int]
) -> tuple[Row, ...]:
    """Lexicographically largest image of ``gamma`` (rows sorted into Omega classes)."""
    n = len(gamma)
    if n == 0:
        return ()
    pos_class, members = _position_classes(row_orbits)
    states: list[tuple[frozenset[int], Cells]] = [(frozenset(), _initial_cells(omega))]
    result: list[Row] = []
    for p in range(n):
        cls = members[pos_class[p]]
        best: Row | None = None
        nxt: dict[tuple, tuple[frozenset[int], Cells]] = {}
        for used, cells in states:
            for x in cls:
                if x in used:
                    continue
                img, refined = _image(gamma[x], cells)
                if best is not None and img < best:
                    continue
                if best is None or img > best:
                    best = img
                    nxt = {}
                nu = used | {x}
                key = (nu, tuple(tuple(sorted(c)) for c in refined))
                nxt.setdefault(key, (nu, refined))
        assert best is not None
        result.append(best)
        states = list(nxt.values())
    return tuple(result)


def is_canonical_rows(
    gamma: Sequence[Row], pos_class: Sequence[int], members: Sequence[Sequence[int]], cells: Cells
) -> bool:
    """True iff ``gamma`` already equals its canonical image.

    ``gamma`` must list rows class by class (``pos_class[p]`` is the class of
    position ``p``, ``members[c]`` its positions) and ``cells`` must be the
    column classes in order.  Stops at the first strictly larger image.
    """
    n = len(gamma)
    used = [False] * n

    def rec(p: int, cells: Cells) -> bool:
        if p == n:
            return True
        target = gamma[p]
        for x in members[pos_class[p]]:
            if used[x]:
                continue
            row = gamma[x]
            # compare the best image of row x against the target, cell by cell
            pos = 0
            cmp = 0
            for cell in cells:
                if len(cell) == 1:
                    a, b = row[cell[0]], target[pos]
                    pos += 1
                    if a != b:
                        cmp = 1 if a > b else -1
                        break
                    continue
                vals = sorted((row[c] for c in cell), reverse=True)
                for a in vals:
                    b = target[pos]
                    pos += 1
                    if a != b:
                        cmp = 1 if a > b else -1
                        break
                if cmp:
                    break
            if cmp > 0:
                return False
            if cmp < 0:
                continue
            _, refined = _image(row, cells)
            used[x] = True
            ok = rec(p + 1, refined)
            used[x] = False
            if not ok:
                return False
        return True

    return rec(0, cells)


def canonical_form(m: PartialOrbitMatrix) -> EquivalenceClassKey:
    rows = canonical_rows(m.gamma, m.row_orbits, m.dist.omega)
    return EquivalenceClassKey(
        tuple(sorted(m.dist.omega)), tuple(sorted(m.row_orbits)), rows
    )


def canonical_matrix(m: PartialOrbitMatrix) -> PartialOrbitMatrix:
    """The representative of ``m`` as a matrix with sorted orbit data."""
    key = canonical_form(m)
    dist = OrbitDistribution(key.omega, tuple(sorted(m.dist.Omega)))
    return PartialOrbitMatrix(key.matrix, dist, key.row_orbits, m.params, m.status)


def is_canonical(m: PartialOrbitMatrix) -> bool:
    if list(m.dist.omega) != sorted(m.dist.omega) or list(m.row_orbits) != sorted(m.row_orbits):
        return False
    return canonical_form(m).matrix == m.gamma
