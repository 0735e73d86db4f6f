"""Enumeration of admissible row types.

A row type fixes, for each class of equal point-orbit lengths, the multiset
of entries a row puts on that class.  Where inside a class the entries land
is left to the search.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .design import ContractError, DesignParams, OrbitDistribution, Row


@dataclass(frozen=True)
class RowType:
    classes: tuple[tuple[int, int], ...]  # (omega, number of columns), ascending omega
    entries: tuple[tuple[int, ...], ...]  # per class, non-increasing
    block_orbit_length: int

    def row(self) -> Row:
        return tuple(x for part in self.entries for x in part)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.row())) + ")"


Pin = tuple[int, int]


@dataclass(frozen=True)
class TypeQuery:
    """Row-type request; ``pinned`` maps a point-orbit length to ``(lo, hi)``.

    A bare integer pin means an exact value on every column of that class.
    """

    dist: OrbitDistribution
    block_orbit_length: int
    pinned: Mapping[int, int | Pin] = field(default_factory=dict)

    def __post_init__(self) -> None:
        pins = {}
        lengths = set(self.dist.omega)
        for w, p in dict(self.pinned).items():
            if w not in lengths:
                raise ContractError(f"pinned class {w} is not a point-orbit length")
            lo, hi = (p, p) if isinstance(p, int) else p
            if lo < 0 or hi < lo:
                raise ContractError(f"bad pin {p!r} for class {w}")
            pins[w] = (lo, hi)
        object.__setattr__(self, "pinned", pins)
        if self.block_orbit_length <= 0:
            raise ContractError("block orbit length must be positive")

    def classes(self) -> tuple[tuple[int, int], ...]:
        return tuple((w, len(cols)) for w, cols in self.dist.column_classes())

    def allowed_values(self, params: DesignParams) -> list[list[int]]:
        """Admissible entry values for each class, descending."""
        Om = self.block_orbit_length
        out = []
        for w, _n in self.classes():
            lo, hi = self.pinned.get(w, (0, params.k))
            hi = min(hi, w, params.k)
            out.append([g for g in range(hi, lo - 1, -1) if (Om * g) % w == 0])
        return out


def enumerate_types(q: TypeQuery, params: DesignParams) -> list[RowType]:
    """All row types admissible for ``q``, in descending lexicographic order."""
    q.dist.check_for(params)
    classes = q.classes()
    values = q.allowed_values(params)
    Om = q.block_orbit_length
    L = q.dist.L
    k = params.k
    quad_target = L * (params.lam * (Om - 1) + k)
    # scaled square weight per class
    qw = [Om * (L // w) for w, _n in classes]

    # capacity of everything after class c, for early cuts
    ncls = len(classes)
    sum_cap = [0] * (ncls + 1)
    quad_cap = [0] * (ncls + 1)
    for c in range(ncls - 1, -1, -1):
        top = values[c][0] if values[c] else 0
        sum_cap[c] = sum_cap[c + 1] + classes[c][1] * top
        quad_cap[c] = quad_cap[c + 1] + classes[c][1] * qw[c] * top * top

    found: list[RowType] = []
    parts: list[tuple[int, ...]] = []

    def fill_class(c: int, remaining: int, bound: int, acc: list[int], s: int, qs: int) -> None:
        if remaining == 0:
            parts.append(tuple(acc))
            walk(c + 1, s, qs)
            parts.pop()
            return
        wt = qw[c]
        for g in values[c]:
            if g > bound:
                continue
            ns, nq = s + g, qs + wt * g * g
            if ns > k or nq > quad_target:
                continue
            # the rest of this class can take at most g each
            if ns + g * (remaining - 1) + sum_cap[c + 1] < k:
                break
            if nq + wt * g * g * (remaining - 1) + quad_cap[c + 1] < quad_target:
                break
            acc.append(g)
            fill_class(c, remaining - 1, g, acc, ns, nq)
            acc.pop()

    def walk(c: int, s: int, qs: int) -> None:
        if c == ncls:
            if s == k and qs == quad_target:
                found.append(RowType(classes, tuple(parts), Om))
            return
        if not values[c]:
            return
        fill_class(c, classes[c][1], values[c][0], [], s, qs)

    walk(0, 0, 0)
    found.sort(key=RowType.row, reverse=True)
    return found


def fixed_block_types(params: DesignParams, dist: OrbitDistribution) -> list[RowType]:
    """Types of a block fixed by the whole group (block-orbit length one)."""
    if 1 not in dist.Omega:
        raise ContractError("distribution has no block orbit of length one")
    return enumerate_types(TypeQuery(dist, 1), params)


def cycle_type(t: RowType) -> str:
    """Cycle-type notation of the points on one block of a fixed-block type.

    Only meaningful for block-orbit length one: an entry ``g`` on a class of
    length ``w`` then contributes ``g // w`` full cycles (``g`` is 0 or ``w``
    unless ``w == 1``).
    """
    counts: dict[int, int] = {}
    for (w, _n), part in zip(t.classes, t.entries):
        for g in part:
            if g:
                counts[w] = counts.get(w, 0) + g // w
    sup = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")
    return "".join(f"{w}{str(n).translate(sup)}" for w, n in sorted(counts.items()))
