"""Independent ground truth for the search engine.

Nothing here uses the scaled kernel in :mod:`omf.design` or the refinement
canonizer in :mod:`omf.canon`.  Arithmetic is done with ``Fraction`` straight
from the defining equations, and equivalence is decided by trying every
permutation.  That makes everything in this module slow on purpose, so each
entry point refuses inputs above an explicit ceiling.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, permutations, product
from math import factorial, prod
from typing import Iterable, Sequence

from .design import ContractError, DesignParams, OrbitDistribution, PartialOrbitMatrix, Row
from .rowtypes import RowType, TypeQuery


class OracleRefused(RuntimeError):
    """The request is beyond the oracle's desk-scale ceiling.

    Distinct from an empty answer: a refusal says nothing about existence.
    """


class DesignConstructionError(ValueError):
    pass


DEFAULT_CEILING = 2_000_000


# ---------------------------------------------------------------- incidence


@dataclass(frozen=True)
class IncidenceStructure:
    v: int
    b: int
    incidence: tuple[tuple[int, ...], ...]  # b rows (blocks) by v columns (points)

    def __post_init__(self) -> None:
        if len(self.incidence) != self.b or any(len(r) != self.v for r in self.incidence):
            raise ContractError("incidence matrix shape does not match (b, v)")
        if any(x not in (0, 1) for r in self.incidence for x in r):
            raise ContractError("incidence entries must be 0 or 1")

    def blocks(self) -> list[frozenset[int]]:
        return [frozenset(p for p, x in enumerate(r) if x) for r in self.incidence]

    def design_violation(self, k: int, lam: int) -> str | None:
        """First failed symmetric-design condition, or ``None``."""
        blocks = self.blocks()
        for i, blk in enumerate(blocks):
            if len(blk) != k:
                return f"block {i} has {len(blk)} points, expected {k}"
        for i, j in combinations(range(self.b), 2):
            n = len(blocks[i] & blocks[j])
            if n != lam:
                return f"blocks {i} and {j} meet in {n} points, expected {lam}"
        # dual side: every pair of points lies on lam blocks
        for p, q in combinations(range(self.v), 2):
            n = sum(1 for blk in blocks if p in blk and q in blk)
            if n != lam:
                return f"points {p} and {q} lie on {n} common blocks, expected {lam}"
        return None

    def is_design(self, k: int, lam: int) -> bool:
        return self.design_violation(k, lam) is None


def from_difference_set(modulus: int, residues: Iterable[int]) -> IncidenceStructure:
    """Develop ``residues`` modulo ``modulus``: block ``j`` is ``residues + j``."""
    if modulus <= 0:
        raise ContractError("modulus must be positive")
    base = sorted({r % modulus for r in residues})
    k = len(base)
    if not 0 < k < modulus:
        raise ContractError("residue set must be a proper nonempty subset")
    rows = []
    for j in range(modulus):
        blk = {(r + j) % modulus for r in base}
        rows.append(tuple(1 if p in blk else 0 for p in range(modulus)))
    s = IncidenceStructure(modulus, modulus, tuple(rows))
    num = k * (k - 1)
    if num % (modulus - 1):
        raise DesignConstructionError(
            f"k(k-1)={num} is not divisible by v-1={modulus - 1}; no symmetric design"
        )
    problem = s.design_violation(k, num // (modulus - 1))
    if problem:
        raise DesignConstructionError(f"development of {base} mod {modulus} fails: {problem}")
    return s


@dataclass(frozen=True)
class PermAction:
    """Generators as pairs (point permutation, block permutation)."""

    generators: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]

    @classmethod
    def from_point_perms(cls, s: IncidenceStructure, perms: Sequence[Sequence[int]]) -> PermAction:
        """Derive the block permutations induced by point permutations."""
        index = {blk: i for i, blk in enumerate(s.blocks())}
        gens = []
        for perm in perms:
            perm = tuple(perm)
            bperm = []
            for blk in s.blocks():
                img = frozenset(perm[p] for p in blk)
                if img not in index:
                    raise ContractError("point permutation does not map blocks to blocks")
                bperm.append(index[img])
            gens.append((perm, tuple(bperm)))
        return cls(tuple(gens))

    def preserves(self, s: IncidenceStructure) -> bool:
        inc = s.incidence
        for pp, bp in self.generators:
            for i in range(s.b):
                for p in range(s.v):
                    if inc[i][p] != inc[bp[i]][pp[p]]:
                        return False
        return True


def _orbits(n: int, perms: Sequence[Sequence[int]]) -> list[list[int]]:
    seen = [False] * n
    out = []
    for start in range(n):
        if seen[start]:
            continue
        orb = [start]
        seen[start] = True
        for x in orb:
            for p in perms:
                y = p[x]
                if not seen[y]:
                    seen[y] = True
                    orb.append(y)
        out.append(sorted(orb))
    return out


def quotient_orbit_matrix(
    s: IncidenceStructure, a: PermAction, k: int, lam: int
) -> PartialOrbitMatrix:
    """Orbit matrix of ``s`` under the group generated by ``a``.

    Orbits are listed by ascending length (ties by smallest element).
    """
    if not a.preserves(s):
        raise ContractError("action does not preserve incidence")
    pts = _orbits(s.v, [g[0] for g in a.generators])
    blks = _orbits(s.b, [g[1] for g in a.generators])
    pts.sort(key=lambda o: (len(o), o))
    blks.sort(key=lambda o: (len(o), o))
    gamma = []
    for orb in blks:
        rep = s.incidence[orb[0]]
        gamma.append(tuple(sum(rep[p] for p in po) for po in pts))
    dist = OrbitDistribution(tuple(len(o) for o in pts), tuple(len(o) for o in blks))
    return PartialOrbitMatrix(
        tuple(gamma), dist, tuple(len(o) for o in blks), DesignParams(s.v, k, lam), "complete"
    )


# ---------------------------------------------------------------- row types


def _row_conditions(row: Sequence[int], omega: Sequence[int], Om: int, params: DesignParams) -> bool:
    if sum(row) != params.k:
        return False
    square = sum(Fraction(Om, w) * g * g for w, g in zip(omega, row))
    if square != params.lam * (Om - 1) + params.k:
        return False
    return all(Fraction(Om * g, w).denominator == 1 for g, w in zip(row, omega))


def brute_force_row_types(
    q: TypeQuery, params: DesignParams, ceiling: int = DEFAULT_CEILING
) -> list[RowType]:
    """Every per-class multiset of entries, filtered by the row conditions."""
    classes = [(w, len(cols)) for w, cols in q.dist.column_classes()]
    per_class = []
    for w, n in classes:
        lo, hi = q.pinned.get(w, (0, params.k))
        vals = range(lo, min(hi, w, params.k) + 1)
        per_class.append(list(combinations_with_replacement(vals, n)))
    size = prod(len(c) for c in per_class)
    if size > ceiling:
        raise OracleRefused(f"{size} candidate rows exceed the ceiling {ceiling}")
    omega = [w for w, n in classes for _ in range(n)]
    out = []
    for combo in product(*per_class):
        parts = tuple(tuple(sorted(c, reverse=True)) for c in combo)
        row = [x for p in parts for x in p]
        if _row_conditions(row, omega, q.block_orbit_length, params):
            out.append(RowType(tuple(classes), parts, q.block_orbit_length))
    out.sort(key=lambda t: t.row(), reverse=True)
    return out


# ---------------------------------------------------------------- naive search


def _column_perms(omega: Sequence[int]) -> list[tuple[int, ...]]:
    groups: dict[int, list[int]] = {}
    for r, w in enumerate(omega):
        groups.setdefault(w, []).append(r)
    blocks = [groups[w] for w in sorted(groups)]
    out = []
    for choice in product(*(permutations(b) for b in blocks)):
        out.append(tuple(c for part in choice for c in part))
    return out


def brute_canonical(
    gamma: Sequence[Row], row_orbits: Sequence[int], col_perms: Sequence[tuple[int, ...]]
) -> tuple[Row, ...]:
    """Largest row-major image under all class-preserving permutations.

    For a fixed column permutation the best row order is simply each row
    class sorted descending, so only column permutations are enumerated.
    """
    classes = sorted(set(row_orbits))
    best: tuple[Row, ...] | None = None
    for perm in col_perms:
        img: list[Row] = []
        for Om in classes:
            rows = [tuple(r[c] for c in perm) for r, o in zip(gamma, row_orbits) if o == Om]
            img.extend(sorted(rows, reverse=True))
        cand = tuple(img)
        if best is None or cand > best:
            best = cand
    assert best is not None
    return best


def naive_partial_matrices(
    params: DesignParams, dist: OrbitDistribution, depth: int, ceiling: int = DEFAULT_CEILING
) -> dict[int, set[tuple[Row, ...]]]:
    """Canonical keys of all valid partial matrices, per depth ``0..depth``.

    Rows follow the ascending block-orbit plan.  A prefix is valid when every
    row meets the row conditions, every pair of rows meets the pair equation,
    and the column moments stay within what a complete matrix attains:
    ``sum Omega_i g_ir <= k w_r``, ``sum Omega_i g_ir^2 <= w_r (lam w_r + k - lam)``
    and ``sum Omega_i g_ir g_is <= lam w_r w_s`` for ``r != s``.
    """
    omega = list(dist.omega)
    plan = sorted(dist.Omega)
    t = len(omega)
    k, lam = params.k, params.lam
    cperms = _column_perms(omega)
    if len(cperms) > 50_000:
        raise OracleRefused(f"{len(cperms)} column permutations exceed the oracle limit")

    size = prod(min(w, k) + 1 for w in omega)
    if size > ceiling:
        raise OracleRefused(f"{size} candidate rows exceed the ceiling {ceiling}")
    rows_for: dict[int, list[Row]] = {}
    for Om in set(plan):
        cand = product(*(range(min(w, k) + 1) for w in omega))
        rows_for[Om] = sorted(
            (r for r in cand if _row_conditions(r, omega, Om, params)), reverse=True
        )

    def pair_ok(a: Row, b: Row, Ob: int) -> bool:
        return sum(Fraction(Ob, w) * x * y for w, x, y in zip(omega, a, b)) == lam * Ob

    def moments_ok(rows: list[Row]) -> bool:
        orbs = plan[: len(rows)]
        for r in range(t):
            if sum(o * x[r] for o, x in zip(orbs, rows)) > k * omega[r]:
                return False
            if sum(o * x[r] ** 2 for o, x in zip(orbs, rows)) > omega[r] * (lam * omega[r] + k - lam):
                return False
            for q in range(r):
                if sum(o * x[r] * x[q] for o, x in zip(orbs, rows)) > lam * omega[r] * omega[q]:
                    return False
        return True

    found: dict[int, set[tuple[Row, ...]]] = {d: set() for d in range(depth + 1)}
    budget = [ceiling]

    # rows of one class are generated in non-increasing order; that only
    # removes row-order duplicates, the reduction below does the rest
    def rec(rows: list[Row]) -> None:
        budget[0] -= 1
        if budget[0] < 0:
            raise OracleRefused(f"more than {ceiling} labelled partial matrices")
        s = len(rows)
        found[s].add(brute_canonical(rows, plan[:s], cperms))
        if s == depth:
            return
        Om = plan[s]
        for row in rows_for[Om]:
            if s and plan[s - 1] == Om and row > rows[-1]:
                continue
            if not all(pair_ok(row, rows[j], plan[j]) for j in range(s)):
                continue
            rows.append(row)
            if moments_ok(rows):
                rec(rows)
            rows.pop()

    rec([])
    return found


def small_distributions(v: int, group_orders: Sequence[int], max_t: int) -> list[tuple[int, ...]]:
    """Ascending orbit-length tuples summing to ``v`` with at most ``max_t`` parts.

    Parts are divisors of one of ``group_orders``.
    """
    parts = sorted({d for n in group_orders for d in range(1, n + 1) if n % d == 0})
    out = []

    def rec(left: int, lo: int, acc: list[int]) -> None:
        if left == 0:
            out.append(tuple(acc))
            return
        if len(acc) == max_t:
            return
        for p in parts:
            if p >= lo and p <= left:
                acc.append(p)
                rec(left - p, p, acc)
                acc.pop()

    rec(v, 1, [])
    return out


def column_perm_count(omega: Sequence[int]) -> int:
    counts: dict[int, int] = {}
    for w in omega:
        counts[w] = counts.get(w, 0) + 1
    return prod(factorial(n) for n in counts.values())
