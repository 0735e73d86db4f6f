"""Orderly generation of partial and complete orbit matrices.

Rows are appended in a fixed order of block-orbit lengths (ascending, so
fixed blocks come first).  A child is kept only if it is its own canonical
image (see :mod:`omf.canon`); because a prefix of a canonical matrix is
canonical, every equivalence class at every depth is produced exactly once
and no global duplicate table is needed.  That also makes subtrees
independent, which is what the worker pool relies on.

Candidate rows are built column by column.  Inside a cell of columns that
agree on every earlier row the entries are kept non-increasing, and a new
row never exceeds the previous row of its class; both are necessary for the
child to be canonical.  Pruning while a row is filled:

* the pair equation against every earlier row, as an upper bound on the
  running prefix sum and a lower bound using the best the remaining columns
  can still add;
* column totals ``sum_i Omega_i * gamma_ir <= k * omega_r`` and the dual
  second moments ``sum_i Omega_i * gamma_ir * gamma_is <=
  omega_r * (lam * omega_s + [r == s] * (k - lam))``;
* after the row is complete, a capacity check that every column total can
  still reach ``k * omega_r`` with the rows left.  For columns of length one
  this uses the fact that later rows of the same class are lexicographically
  no larger, which forces the blocks through fixed points to the front.

When every orbit length has few enough concrete rows, candidates come from
a precomputed numpy array of all of them instead.  The rows meeting the pair
equation with the current prefix are cached along the path, so each child
only filters its parent's set by one inner product.  Both generators give
the same output.

``lookahead`` selects the completability cuts: "none" applies the prefix
conditions only, "unit" adds the capacity check with the lex bound on
columns of length one, and "full" bounds every column and adds three cuts:

* column types: the entries of each column must extend to a row type of the
  dual distribution;
* future rows: after a candidate, each unfinished class must still have as
  many compatible pool rows as it needs;
* core: the compatible rows of all unfinished classes are peeled until each
  has enough pair-equation partners in every class.

The last two need the pool.  The cuts change which partial matrices are
visited but never the complete ones.
"""
from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from itertools import product
from math import factorial, prod
from multiprocessing import get_context
from typing import Iterator, Sequence

import numpy as np

from . import canon
from .design import (
    ContractError,
    DesignParams,
    OrbitDistribution,
    PartialOrbitMatrix,
    Row,
    row_ok,
)
from .rowtypes import RowType, TypeQuery, enumerate_types

ENGINE_VERSION = "omf-1.0"
LOOKAHEAD_MODES = ("none", "unit", "full")
# largest number of concrete rows per orbit length for the vectorized pool
POOL_LIMIT = 1_000_000
# largest candidate-by-pool comparison matrix built at once
_CHUNK = 4_000_000
# largest row set peeled at a node; bigger sets only get the counting cut
CORE_LIMIT = 3_000


@dataclass(frozen=True)
class SearchSpec:
    params: DesignParams
    dist: OrbitDistribution
    prescribed_rows: tuple[Row, ...] = ()
    prescribed_orbits: tuple[int, ...] = ()
    row_orbit_plan: tuple[int, ...] = ()
    target_depth: int | None = None
    count_only: bool = False
    store_limit: int = 100_000
    dual_pairs: bool = True
    lookahead: str = "unit"

    def __post_init__(self) -> None:
        self.dist.check_for(self.params)
        if list(self.dist.omega) != sorted(self.dist.omega):
            raise ContractError("point-orbit lengths must be listed in ascending order")
        plan = tuple(sorted(self.row_orbit_plan or self.dist.Omega))
        object.__setattr__(self, "row_orbit_plan", plan)
        if sorted(plan) != sorted(self.dist.Omega):
            raise ContractError("row orbit plan must realize the block-orbit lengths")
        if self.target_depth is None:
            object.__setattr__(self, "target_depth", len(plan))
        if not 0 <= self.target_depth <= len(plan):
            raise ContractError(f"target depth {self.target_depth} outside 0..{len(plan)}")
        if self.lookahead not in LOOKAHEAD_MODES:
            raise ContractError(f"lookahead must be one of {LOOKAHEAD_MODES}")
        rows = tuple(tuple(r) for r in self.prescribed_rows)
        object.__setattr__(self, "prescribed_rows", rows)
        orbits = tuple(self.prescribed_orbits) or plan[: len(rows)]
        object.__setattr__(self, "prescribed_orbits", orbits)
        if len(orbits) != len(rows):
            raise ContractError("one orbit length is needed per prescribed row")
        if sorted(orbits) != list(plan[: len(rows)]):
            raise ContractError("prescribed rows must fill the leading (smallest) row orbits")
        if len(rows) > self.target_depth:
            raise ContractError("more prescribed rows than the target depth")

    @property
    def t(self) -> int:
        return self.dist.t


@dataclass
class SearchReport:
    counts: dict[int, int]
    matrices: list[PartialOrbitMatrix]
    truncated: bool
    stats: dict[str, int]
    workers: int = 1
    start_depth: int = 0
    target_depth: int = 0

    @property
    def terminal_count(self) -> int:
        return self.counts.get(self.target_depth, 0)

    def max_depth_reached(self) -> int:
        hit = [d for d, n in self.counts.items() if n > 0]
        return max(hit) if hit else 0

    def content_hash(self) -> str:
        h = hashlib.sha256()
        for d in sorted(self.counts):
            h.update(f"{d}:{self.counts[d]}\n".encode())
        for m in self.matrices:
            h.update(b"--\n")
            for row in m.gamma:
                h.update((" ".join(map(str, row)) + "\n").encode())
        return h.hexdigest()


class _Engine:
    """Precomputed tables for one search specification."""

    def __init__(self, spec: SearchSpec) -> None:
        self.spec = spec
        p, d = spec.params, spec.dist
        self.k, self.lam = p.k, p.lam
        self.t = t = d.t
        self.omega = d.omega
        self.w = d.weights
        self.lamL = p.lam * d.L
        self.plan = spec.row_orbit_plan
        self.dual_pairs = spec.dual_pairs
        self.lookahead = spec.lookahead

        classes = d.column_classes()
        self.cls_of = [0] * t
        self.cls_start = []
        self.cls_end = []
        for c, (_w, cols) in enumerate(classes):
            self.cls_start.append(cols[0])
            self.cls_end.append(cols[-1] + 1)
            for r in cols:
                self.cls_of[r] = c
        self.ncls = len(classes)
        self.n_unit = sum(1 for x in self.omega if x == 1)

        self.Amax = [p.k * x for x in self.omega]
        self.Bmax = [x * (p.lam * x + p.k - p.lam) for x in self.omega]
        self.Cmax = [[p.lam * a * b for b in self.omega] for a in self.omega]

        self.types: dict[int, list[RowType]] = {}
        self.trie: dict[int, dict] = {}
        self.maxent: dict[int, list[int]] = {}
        for Om in sorted(set(self.plan)):
            ts = enumerate_types(TypeQuery(d, Om), p)
            self.types[Om] = ts
            root: dict = {}
            for ty in ts:
                node = root
                for part in ty.entries:
                    node = node.setdefault(part, {})
            self.trie[Om] = root
            mx = [0] * self.ncls
            for ty in ts:
                for c, part in enumerate(ty.entries):
                    if part and part[0] > mx[c]:
                        mx[c] = part[0]
            self.maxent[Om] = mx

        # rows still to come after position s, grouped by orbit length
        self.rest: list[list[tuple[int, int]]] = []
        for s in range(len(self.plan) + 1):
            grp: dict[int, int] = {}
            for Om in self.plan[s:]:
                grp[Om] = grp.get(Om, 0) + 1
            self.rest.append(sorted(grp.items()))

        self.pos_class, members = canon._position_classes(self.plan)
        self._init_column_types(spec)
        # class members restricted to the first n positions, for each n
        self.members_at = [
            [[x for x in grp if x < n] for grp in members] for n in range(len(self.plan) + 1)
        ]
        self.cells0 = [list(range(a, b)) for a, b in zip(self.cls_start, self.cls_end)]
        self.pool = self._build_pool()
        # per depth s and orbit length: (rows[:s], pool rows meeting the pair equation with them)
        self._path: list[dict[int, tuple[tuple[Row, ...], np.ndarray]]] = [
            {} for _ in range(len(self.plan) + 1)
        ]
        self.class_sizes = _counter(self.plan)

    def _init_column_types(self, spec: SearchSpec) -> None:
        """Bitmask tables for the dual (column) type check.

        A complete matrix read column-wise, as ``Omega_i * gamma_ir / omega_r``
        grouped by row class, is a row of an orbit matrix of the dual
        distribution.  So the entries a column has collected so far must be a
        sub-multiset of one of those dual types.  ``col_compat[r][c][e][n]`` is
        the set of dual types (bitmask) holding at least ``n`` copies of ``e``
        in row class ``c``.
        """
        self.col_types = spec.lookahead == "full"
        if not self.col_types:
            return
        p = spec.params
        dual = OrbitDistribution(self.plan, spec.dist.omega)
        sizes = [n for _Om, n in sorted(_counter(self.plan).items())]
        tables: dict[int, tuple[list, int]] = {}
        for w in sorted(set(spec.dist.omega)):
            types = enumerate_types(TypeQuery(dual, w), p)
            full = (1 << len(types)) - 1
            table = []
            for c, size in enumerate(sizes):
                per_e = [[full] + [0] * size for _ in range(p.k + 1)]
                for ti, ty in enumerate(types):
                    for e, m in _counter(ty.entries[c]).items():
                        for n in range(1, m + 1):
                            per_e[e][n] |= 1 << ti
                table.append(per_e)
            tables[w] = (table, full)
        self.col_compat = [tables[w][0] for w in spec.dist.omega]
        self.col_full = [tables[w][1] for w in spec.dist.omega]

    def _column_state(self, rows: Sequence[Row]) -> tuple[list[int], list[list[int]]]:
        """Compatible dual types per column, and per-value counts in the next row's class."""
        s = len(rows)
        c_new = self.pos_class[s]
        k = self.k
        masks = []
        counts_new = []
        for r in range(self.t):
            w = self.omega[r]
            seen: dict[tuple[int, int], int] = {}
            for i, row in enumerate(rows):
                key = (self.pos_class[i], self.plan[i] * row[r] // w)
                seen[key] = seen.get(key, 0) + 1
            mask = self.col_full[r]
            tbl = self.col_compat[r]
            cn = [0] * (k + 1)
            for (c, e), n in seen.items():
                if e > k:
                    mask = 0
                    continue
                col = tbl[c][e]
                mask &= col[n] if n < len(col) else 0
                if c == c_new:
                    cn[e] = n
            masks.append(mask)
            counts_new.append(cn)
        return masks, counts_new

    # ------------------------------------------------------------------ pool

    def _build_pool(self) -> dict[int, np.ndarray] | None:
        """Every concrete row of every type, sorted ascending, if small enough.

        With a pool, children are found by vectorized filtering instead of the
        column-by-column fill.  Both produce the same candidate set.
        """
        pools = {}
        for Om, ts in self.types.items():
            total = 0
            for ty in ts:
                total += prod(_multinomial(part) for part in ty.entries)
            if total > POOL_LIMIT:
                return None
            blocks = []
            for ty in ts:
                arr = np.zeros((1, 0), dtype=np.int32)
                for part in ty.entries:
                    opts = np.array(list(_arrangements(part)), dtype=np.int32).reshape(-1, len(part))
                    arr = np.hstack(
                        [np.repeat(arr, len(opts), axis=0), np.tile(opts, (len(arr), 1))]
                    )
                blocks.append(arr)
            arr = np.vstack(blocks) if blocks else np.zeros((0, self.t), dtype=np.int32)
            arr = arr[np.lexsort(arr.T[::-1])]
            pools[Om] = arr
        return pools

    def _compatible(self, rows: tuple[Row, ...], Om: int | None = None) -> np.ndarray:
        """Pool rows of orbit length ``Om`` (default: the next one) meeting the pair equation with ``rows``.

        The pair equation does not depend on the orbit lengths, so each level
        filters its parent's set by the newest row.
        """
        s = len(rows)
        if Om is None:
            Om = self.plan[s]
        hit = self._path[s].get(Om)
        if hit is not None and hit[0] == rows:
            return hit[1]
        if s == 0:
            sub = self.pool[Om]
        else:
            sub = self._compatible(rows[:-1], Om)
            wrow = np.array([a * b for a, b in zip(self.w, rows[-1])], dtype=np.int32)
            sub = sub[sub @ wrow == self.lamL]
        self._path[s][Om] = (rows, sub)
        return sub

    def _core(self, rows: tuple[Row, ...], cur: np.ndarray) -> dict[int, np.ndarray] | None:
        """Pool rows that can still take part in a completion, per unfinished class.

        ``cur`` holds the admissible rows of the class of the next row.  A row
        needing ``m`` more partners from some class must meet the pair
        equation with at least ``m`` surviving rows of that class; rows failing
        this are peeled off until stable.  None means the node is dead.
        """
        s = len(rows)
        Om = self.plan[s]
        used = _counter(self.plan[:s])
        need = {}
        sets = {}
        for Oc, size in sorted(self.class_sizes.items()):
            if Oc < Om or size - used.get(Oc, 0) <= 0:
                continue
            need[Oc] = size - used.get(Oc, 0)
            sets[Oc] = cur if Oc == Om else self._compatible(rows, Oc)
            if len(sets[Oc]) < need[Oc]:
                return None
        total = sum(len(Y) for Y in sets.values())
        if total > CORE_LIMIT:
            return sets
        keys = list(sets)
        U = np.vstack([sets[c] for c in keys])
        cls = np.concatenate([np.full(len(sets[c]), i) for i, c in enumerate(keys)])
        # float products go through BLAS; all values are small integers
        Uf = U.astype(np.float64)
        adj = ((Uf * np.array(self.w, dtype=np.float64)) @ Uf.T == self.lamL).astype(np.float64)
        own = np.array([need[c] for c in keys])
        onehot = (cls[:, None] == np.arange(len(keys))[None, :]).astype(np.float64)
        req = own[None, :] - onehot
        alive = np.ones(len(U), dtype=bool)
        while True:
            deg = adj @ (onehot * alive[:, None])
            ok = alive & (deg >= req).all(axis=1)
            if ok.sum() == alive.sum():
                break
            alive = ok
            if (np.bincount(cls[alive], minlength=len(keys)) < own).any():
                return None
        return {c: sets[c][alive[cls == i]] for i, c in enumerate(keys)}

    def _future_rows_ok(
        self, rows: tuple[Row, ...], cand: np.ndarray, pos: np.ndarray, sets: dict[int, np.ndarray]
    ) -> np.ndarray:
        """Keep candidates that leave enough compatible rows for every unfinished class.

        After candidate ``x`` at depth ``s``, each class still needing ``m``
        rows must have at least ``m`` pool rows meeting the pair equation with
        all of ``rows`` and ``x``; in ``x``'s own class they must also come
        lexicographically below ``x`` (``pos`` is the index of ``x`` in the
        ascending set ``sets[Om]``).
        """
        s = len(rows)
        Om = self.plan[s]
        used = _counter(self.plan[: s + 1])
        wcand = cand * np.array(self.w, dtype=np.int32)
        ok = np.ones(len(cand), dtype=bool)
        for Oc, size in sorted(self.class_sizes.items()):
            need = size - used.get(Oc, 0)
            if need <= 0 or Oc < Om:
                continue
            Y = sets[Oc]
            if len(Y) < need:
                return np.zeros(len(cand), dtype=bool)
            idx = np.nonzero(ok)[0]
            step = max(1, _CHUNK // max(1, len(Y)))
            for a in range(0, len(idx), step):
                part = idx[a : a + step]
                hits = wcand[part] @ Y.T == self.lamL
                if Oc == Om:
                    hits &= np.arange(len(Y))[None, :] < pos[part][:, None]
                ok[part] = hits.sum(axis=1) >= need
            if not ok.any():
                break
        return ok

    def _pool_children(self, rows: tuple[Row, ...], stats: dict[str, int]) -> list[tuple[Row, ...]]:
        s = len(rows)
        t = self.t
        Om = self.plan[s]
        sub = self._compatible(rows)
        pos = np.arange(len(sub))
        if s and self.plan[s - 1] == Om and len(sub):
            # strictly below the previous row of the class (equality fails the pair equation)
            prev = np.array(rows[-1], dtype=np.int32)
            first = (sub != prev).argmax(axis=1)
            below = sub[pos, first] < prev[first]
            sub, pos = sub[below], pos[below]
        if not len(sub):
            return []
        sets = None
        if self.lookahead == "full":
            sets = self._core(rows, sub)
            if sets is None:
                stats["core_cut"] = stats.get("core_cut", 0) + 1
                return []
            sub = sets[Om]
            pos = np.arange(len(sub))
        keep = np.ones(len(sub), dtype=bool)
        for r in range(1, t):
            if self.cls_of[r] == self.cls_of[r - 1] and all(row[r] == row[r - 1] for row in rows):
                keep &= sub[:, r] <= sub[:, r - 1]

        A = np.zeros(t, dtype=np.int32)
        C = np.zeros((t, t), dtype=np.int32)
        for Oi, row in zip(self.plan, rows):
            v = np.array(row, dtype=np.int32)
            A += Oi * v
            C += Oi * np.outer(v, v)
        keep &= (A + Om * sub <= np.array(self.Amax)).all(axis=1)
        slack = np.array(self.Cmax, dtype=np.int32) - C
        np.fill_diagonal(slack, np.array(self.Bmax) - np.diag(C))
        if self.dual_pairs:
            keep &= (Om * sub[:, :, None] * sub[:, None, :] <= slack).all(axis=(1, 2))
        else:
            keep &= (Om * sub * sub <= np.diag(slack)).all(axis=1)
        if self.col_types:
            masks, seen = self._column_state(rows)
            c_new = self.pos_class[s]
            top = int(sub.max()) + 1
            allowed = np.zeros((t, top), dtype=bool)
            for r in range(t):
                tbl = self.col_compat[r][c_new]
                for g in range(top):
                    e = Om * g // self.omega[r]
                    if e > self.k:
                        continue
                    n = seen[r][e] + 1
                    allowed[r, g] = n < len(tbl[e]) and bool(masks[r] & tbl[e][n])
            keep &= allowed[np.arange(t), sub].all(axis=1)
        sub, pos = sub[keep], pos[keep]
        if self.lookahead == "full" and len(sub):
            fut = self._future_rows_ok(rows, sub, pos, sets)
            stats["future_cut"] = stats.get("future_cut", 0) + int(len(sub) - fut.sum())
            sub = sub[fut]

        Al = [int(a) for a in A]
        Bl = [int(b) for b in np.diag(C)]
        out = []
        for x in sub[::-1].tolist():
            new = tuple(x)
            if not self._lookahead_ok(s + 1, new, Al, Bl):
                stats["lookahead_cut"] = stats.get("lookahead_cut", 0) + 1
                continue
            child = rows + (new,)
            if self.is_canonical(child):
                out.append(child)
            else:
                stats["noncanonical"] = stats.get("noncanonical", 0) + 1
        stats["candidates"] = stats.get("candidates", 0) + len(sub)
        return out

    # ------------------------------------------------------------------ nodes

    def start_node(self) -> tuple[Row, ...]:
        spec = self.spec
        if not spec.prescribed_rows:
            return ()
        d = spec.dist
        for i, (row, Om) in enumerate(zip(spec.prescribed_rows, spec.prescribed_orbits)):
            if len(row) != self.t:
                raise ContractError(f"prescribed row {i} has {len(row)} entries")
            if not row_ok(row, spec.params, d, Om):
                raise ContractError(f"prescribed row {i} violates the row conditions")
        m = PartialOrbitMatrix(spec.prescribed_rows, d, spec.prescribed_orbits, spec.params, "partial")
        rows = canon.canonical_rows(m.gamma, m.row_orbits, d.omega)
        for i in range(len(rows)):
            for j in range(i):
                if sum(w * a * b for w, a, b in zip(self.w, rows[i], rows[j])) != self.lamL:
                    raise ContractError(f"prescribed rows {j} and {i} violate the pair condition")
        if not self._columns_ok(rows):
            raise ContractError("prescribed rows violate the column bounds")
        return rows

    def _columns_ok(self, rows: Sequence[Row]) -> bool:
        t = self.t
        for r in range(t):
            a = sum(Om * row[r] for Om, row in zip(self.plan, rows))
            b = sum(Om * row[r] * row[r] for Om, row in zip(self.plan, rows))
            if a > self.Amax[r] or b > self.Bmax[r]:
                return False
            if self.dual_pairs:
                for q in range(r):
                    c = sum(Om * row[r] * row[q] for Om, row in zip(self.plan, rows))
                    if c > self.Cmax[q][r]:
                        return False
        return True

    def is_canonical(self, rows: Sequence[Row]) -> bool:
        return canon.is_canonical_rows(
            rows, self.pos_class, self.members_at[len(rows)], self.cells0
        )

    def children(self, rows: tuple[Row, ...], stats: dict[str, int]) -> list[tuple[Row, ...]]:
        """All canonical one-row extensions of the canonical node ``rows``."""
        s = len(rows)
        if s >= len(self.plan):
            return []
        if self.pool is not None:
            return self._pool_children(rows, stats)
        t = self.t
        Om = self.plan[s]
        plan = self.plan
        k = self.k
        w = self.w
        lamL = self.lamL
        cls_of = self.cls_of
        cls_end = self.cls_end
        Amax, Bmax, Cmax = self.Amax, self.Bmax, self.Cmax
        dual_pairs = self.dual_pairs

        A = [0] * t
        B = [0] * t
        C = [[0] * t for _ in range(t)] if dual_pairs else None
        for Oi, row in zip(plan, rows):
            nz = [r for r in range(t) if row[r]]
            for r in nz:
                g = row[r]
                A[r] += Oi * g
                B[r] += Oi * g * g
                if dual_pairs:
                    Cr = C[r]
                    for q in nz:
                        Cr[q] += Oi * g * row[q]

        # a new cell starts at column r when the class changes or an earlier row differs
        cell_start = [True] * t
        for r in range(1, t):
            if cls_of[r] == cls_of[r - 1]:
                cell_start[r] = any(row[r] != row[r - 1] for row in rows)

        prev = rows[-1] if s and plan[s - 1] == Om else None
        maxent = self.maxent[Om]
        # weighted entries of earlier rows, and what the columns from r on can still add
        wg = [[w[r] * row[r] for r in range(t)] for row in rows]
        suffix = []
        for j in range(s):
            suf = [0] * (t + 1)
            acc = 0
            for r in range(t - 1, -1, -1):
                acc += wg[j][r] * maxent[cls_of[r]]
                suf[r] = acc
            suffix.append(suf)
        nz_rows_at = [[j for j in range(s) if rows[j][r]] for r in range(t)]
        col_types = self.col_types
        if col_types:
            col_mask, col_seen = self._column_state(rows)
            c_new = self.pos_class[s]
            col_tbl = [self.col_compat[r][c_new] for r in range(t)]
        omega = self.omega

        P = [0] * s
        x = [0] * t
        counts = [0] * (k + 1)
        out: list[tuple[Row, ...]] = []
        cand = 0

        def finish() -> None:
            nonlocal cand
            for j in range(s):
                if P[j] != lamL:
                    return
            cand += 1
            new = tuple(x)
            if not self._lookahead_ok(s + 1, new, A, B):
                stats["lookahead_cut"] = stats.get("lookahead_cut", 0) + 1
                return
            child = rows + (new,)
            if self.is_canonical(child):
                out.append(child)
            else:
                stats["noncanonical"] = stats.get("noncanonical", 0) + 1

        def place(r: int, node: dict, tight: bool) -> None:
            if r == t:
                finish()
                return
            c = cls_of[r]
            if r == self.cls_start[c]:
                for part, sub in node.items():
                    for g in part:
                        counts[g] += 1
                    fill(r, sub, tight)
                    for g in part:
                        counts[g] -= 1
                return
            fill(r, node, tight)

        def fill(r: int, sub: dict, tight: bool) -> None:
            # sub is the trie node to use once this column class is finished
            ub = k
            if not cell_start[r]:
                ub = x[r - 1]
            if tight and prev[r] < ub:
                ub = prev[r]
            last_in_class = r + 1 == cls_end[cls_of[r]]
            Ar, Br = A[r], B[r]
            jr = nz_rows_at[r]
            wgr = [wg[j][r] for j in jr]
            if col_types:
                mask_r, seen_r, tbl_r, w_r = col_mask[r], col_seen[r], col_tbl[r], omega[r]
            for g in range(ub, -1, -1):
                if not counts[g]:
                    continue
                if col_types:
                    e = Om * g // w_r
                    if e > k:
                        continue
                    n = seen_r[e] + 1
                    comp = tbl_r[e]
                    if n >= len(comp) or not mask_r & comp[n]:
                        continue
                if g:
                    if Ar + Om * g > Amax[r] or Br + Om * g * g > Bmax[r]:
                        continue
                    bad = False
                    for j, a in zip(jr, wgr):
                        if P[j] + a * g > lamL:
                            bad = True
                            break
                    if bad:
                        continue
                    if dual_pairs:
                        Cr = C[r]
                        Cm = Cmax[r]
                        for q in range(r):
                            xq = x[q]
                            if xq and Cr[q] + Om * xq * g > Cm[q]:
                                bad = True
                                break
                        if bad:
                            continue
                    for j, a in zip(jr, wgr):
                        P[j] += a * g
                # can every earlier row still reach its pair total?
                ok = True
                for j in range(s):
                    if P[j] + suffix[j][r + 1] < lamL:
                        ok = False
                        break
                if ok:
                    x[r] = g
                    counts[g] -= 1
                    nt = tight and g == prev[r]
                    if last_in_class:
                        place(r + 1, sub, nt)
                    else:
                        fill(r + 1, sub, nt)
                    counts[g] += 1
                    x[r] = 0
                if g:
                    for j, a in zip(jr, wgr):
                        P[j] -= a * g

        place(0, self.trie[Om], prev is not None)
        stats["candidates"] = stats.get("candidates", 0) + cand
        out.sort(reverse=True)
        return out

    def _lookahead_ok(self, depth: int, new: Row, A: list[int], B: list[int]) -> bool:
        """Can every column total still be completed by the rows after ``depth``?"""
        mode = self.lookahead
        if mode == "none":
            return True
        Om = self.plan[depth - 1]
        rest = self.rest[depth]
        t = self.t
        # later rows of the same class are lexicographically no larger: they are
        # zero before the first nonzero column z of the new row and at most new[z] at z
        z = next((r for r in range(t) if new[r]), t)
        if mode == "full":
            zero_below, bound_z = z, z < t
        else:
            zero_below, bound_z = min(z, self.n_unit), z < self.n_unit
        cls_of = self.cls_of
        for r in range(t):
            g = new[r]
            a = A[r] + Om * g
            b = B[r] + Om * g * g
            needA = self.Amax[r] - a
            needB = self.Bmax[r] - b
            if needA == 0 and needB == 0:
                continue
            capA = capB = 0
            c = cls_of[r]
            for Oj, n in rest:
                ub = self.maxent[Oj][c]
                if Oj == Om:
                    if r < zero_below:
                        ub = 0
                    elif bound_z and r == z and new[z] < ub:
                        ub = new[z]
                capA += n * Oj * ub
                capB += n * Oj * ub * ub
            if capA < needA or capB < needB:
                return False
        return True


def _merge_stats(stats: dict[str, int], other: dict[str, int]) -> None:
    for key, val in other.items():
        stats[key] = stats.get(key, 0) + val


def _dfs(
    engine: _Engine,
    root: tuple[Row, ...],
    target: int,
    store_limit: int,
    count_only: bool,
) -> tuple[dict[int, int], list[tuple[Row, ...]], bool, dict[str, int]]:
    counts: dict[int, int] = {}
    kept: list[tuple[Row, ...]] = []
    truncated = False
    stats: dict[str, int] = {"nodes": 0}
    stack: list[Iterator[tuple[Row, ...]]] = []

    def visit(node: tuple[Row, ...]) -> bool:
        nonlocal truncated
        d = len(node)
        counts[d] = counts.get(d, 0) + 1
        stats["nodes"] += 1
        if d == target:
            if not count_only:
                if len(kept) < store_limit:
                    kept.append(node)
                else:
                    truncated = True
            return False
        return True

    if visit(root):
        stack.append(iter(engine.children(root, stats)))
    while stack:
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            continue
        if visit(nxt):
            stack.append(iter(engine.children(nxt, stats)))
    return counts, kept, truncated, stats


# per-process engine cache for the worker pool
_WORKER_ENGINE: _Engine | None = None


def _worker_init(spec: SearchSpec) -> None:
    global _WORKER_ENGINE
    _WORKER_ENGINE = _Engine(spec)


def _worker_run(args: tuple[tuple[Row, ...], int, int, bool]):
    root, target, limit, count_only = args
    assert _WORKER_ENGINE is not None
    return _dfs(_WORKER_ENGINE, root, target, limit, count_only)


def default_workers() -> int:
    return max(1, int(os.environ.get("OMF_WORKERS", "1")))


def run_search(
    spec: SearchSpec, workers: int | None = None, split_depth: int | None = None
) -> SearchReport:
    """Depth-first canonical generation from the prescribed rows.

    With ``workers > 1`` the tree is expanded breadth-first to ``split_depth``
    (default: two rows past the start) and the frontier nodes are searched in
    a process pool.  Results are merged in frontier order, so the report does
    not depend on the number of workers.
    """
    workers = default_workers() if workers is None else max(1, workers)
    engine = _Engine(spec)
    root = engine.start_node()
    start = len(root)
    target = spec.target_depth
    if workers == 1:
        counts, kept, truncated, stats = _dfs(
            engine, root, target, spec.store_limit, spec.count_only
        )
    else:
        if split_depth is None:
            split_depth = min(target, start + 2)
        split_depth = max(start, min(split_depth, target))
        counts = {}
        stats = {"nodes": 0}
        frontier = [root]
        for d in range(start, split_depth):
            counts[d] = len(frontier)
            stats["nodes"] += len(frontier)
            nxt = []
            for node in frontier:
                nxt.extend(engine.children(node, stats))
            frontier = nxt
        kept = []
        truncated = False
        jobs = [(node, target, spec.store_limit, spec.count_only) for node in frontier]
        ctx = get_context("fork")
        with ctx.Pool(workers, initializer=_worker_init, initargs=(spec,)) as pool:
            for c, k_, tr, st in pool.imap(_worker_run, jobs, chunksize=1):
                for d, n in c.items():
                    counts[d] = counts.get(d, 0) + n
                _merge_stats(stats, st)
                room = spec.store_limit - len(kept)
                kept.extend(k_[:room])
                truncated = truncated or tr or len(k_) > room
    for d in range(start, target + 1):
        counts.setdefault(d, 0)
    d = spec.dist
    mats = [
        PartialOrbitMatrix(rows, d, spec.row_orbit_plan[: len(rows)], spec.params)
        for rows in sorted(kept, reverse=True)
    ]
    return SearchReport(
        dict(sorted(counts.items())), mats, truncated, stats, workers, start, target
    )


def extend_one_row(
    m: PartialOrbitMatrix, spec: SearchSpec, Omega_next: int | None = None
) -> list[PartialOrbitMatrix]:
    """Inequivalent one-row extensions of ``m`` (taken to its canonical form first)."""
    engine = _Engine(spec)
    rows = canon.canonical_rows(m.gamma, m.row_orbits, m.dist.omega)
    s = len(rows)
    if tuple(sorted(m.row_orbits)) != spec.row_orbit_plan[:s]:
        raise ContractError("matrix rows do not match the leading row orbit plan")
    if s >= len(spec.row_orbit_plan):
        return []
    if Omega_next is not None and Omega_next != spec.row_orbit_plan[s]:
        raise ContractError(
            f"next row must have orbit length {spec.row_orbit_plan[s]} under the plan"
        )
    kids = engine.children(rows, {})
    return [
        PartialOrbitMatrix(c, spec.dist, spec.row_orbit_plan[: s + 1], spec.params)
        for c in sorted(kids, reverse=True)
    ]


def max_completable_rows(spec: SearchSpec, workers: int | None = None) -> int:
    full = SearchSpec(
        spec.params,
        spec.dist,
        spec.prescribed_rows,
        spec.prescribed_orbits,
        spec.row_orbit_plan,
        len(spec.row_orbit_plan),
        True,
        0,
        spec.dual_pairs,
        spec.lookahead,
    )
    return run_search(full, workers).max_depth_reached()


def _counter(items: Sequence[int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for x in items:
        out[x] = out.get(x, 0) + 1
    return out


def _multinomial(part: Sequence[int]) -> int:
    out = factorial(len(part))
    for n in _counter(part).values():
        out //= factorial(n)
    return out


def _arrangements(part: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Distinct permutations of a multiset."""
    left = _counter(part)
    vals = sorted(left)
    acc: list[int] = []

    def rec() -> Iterator[tuple[int, ...]]:
        if len(acc) == len(part):
            yield tuple(acc)
            return
        for v in vals:
            if left[v]:
                left[v] -= 1
                acc.append(v)
                yield from rec()
                acc.pop()
                left[v] += 1

    return rec()
