"""Small groups of order 10-35 and the orbit-length distributions they allow.

Each group is held as an explicit Cayley table.  A transitive action is the
coset action on ``G/H`` for a subgroup class ``H``; an element ``g`` fixes
``|{x : x^-1 g x in H}| / |H|`` cosets.  A distribution is a multiset of such
actions whose lengths add up to ``v``; it is admissible when every element of
prime order fixes an allowed number of points in total.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Callable, Hashable, Mapping, Sequence

GROUP_NAMES = ("Z10", "D10", "Z14", "D14", "Z15", "Z21", "Frob21", "Z35")

# number of subgroups and of conjugacy classes of subgroups
KNOWN_SUBGROUP_COUNTS = {
    "Z10": (4, 4),
    "D10": (8, 4),
    "Z14": (4, 4),
    "D14": (10, 4),
    "Z15": (4, 4),
    "Z21": (4, 4),
    "Frob21": (10, 4),
    "Z35": (4, 4),
}


@dataclass(frozen=True)
class TransitiveAction:
    subgroup: frozenset[int]
    length: int
    fixed: tuple[int, ...]  # fixed cosets, indexed by element conjugacy class


@dataclass
class GroupSpec:
    name: str
    table: list[list[int]]  # table[a][b] = a*b, identity is element 0
    labels: list[Hashable] = field(default_factory=list)

    def __post_init__(self) -> None:
        n = len(self.table)
        if any(len(row) != n for row in self.table):
            raise ValueError("Cayley table is not square")
        if self.table[0] != list(range(n)) or [row[0] for row in self.table] != list(range(n)):
            raise ValueError("element 0 must be the identity")
        for row in self.table:
            if sorted(row) != list(range(n)):
                raise ValueError("Cayley table rows must be permutations")
        for a, b, c in product(range(n), repeat=3):
            if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                raise ValueError(f"{self.name}: multiplication is not associative")

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    @cached_property
    def inverse(self) -> list[int]:
        return [row.index(0) for row in self.table]

    def element_order(self, a: int) -> int:
        n, x = 1, a
        while x != 0:
            x = self.table[x][a]
            n += 1
        return n

    def conj(self, g: int, x: int) -> int:
        """``x^-1 g x``."""
        return self.table[self.table[self.inverse[x]][g]][x]

    @cached_property
    def conjugacy_classes(self) -> list[list[int]]:
        seen: set[int] = set()
        out = []
        for g in range(self.order):
            if g in seen:
                continue
            cls = sorted({self.conj(g, x) for x in range(self.order)})
            seen.update(cls)
            out.append(cls)
        return out

    def generated(self, gens: Sequence[int]) -> frozenset[int]:
        sub = {0}
        frontier = [0]
        while frontier:
            a = frontier.pop()
            for g in gens:
                b = self.table[a][g]
                if b not in sub:
                    sub.add(b)
                    frontier.append(b)
        return frozenset(sub)

    @cached_property
    def subgroups(self) -> list[frozenset[int]]:
        # every subgroup of these metacyclic groups is generated by two elements
        subs = {self.generated((a, b)) for a in range(self.order) for b in range(a, self.order)}
        return sorted(subs, key=lambda h: (len(h), sorted(h)))

    @cached_property
    def subgroup_classes(self) -> list[list[frozenset[int]]]:
        remaining = list(self.subgroups)
        out = []
        while remaining:
            h = remaining[0]
            cls = {frozenset(self.conj(a, x) for a in h) for x in range(self.order)}
            out.append(sorted(cls, key=sorted))
            remaining = [k for k in remaining if k not in cls]
        return out

    def fixed_cosets(self, h: frozenset[int], g: int) -> int:
        hits = sum(1 for x in range(self.order) if self.conj(g, x) in h)
        return hits // len(h)


def transitive_actions(g: GroupSpec) -> list[TransitiveAction]:
    """One coset action per conjugacy class of subgroups, longest orbit first."""
    out = []
    for cls in g.subgroup_classes:
        h = cls[0]
        fixed = tuple(g.fixed_cosets(h, c[0]) for c in g.conjugacy_classes)
        out.append(TransitiveAction(h, g.order // len(h), fixed))
    out.sort(key=lambda a: (-a.length, sorted(a.subgroup)))
    return out


@dataclass(frozen=True)
class FixedPointSpec:
    """Admissible numbers of fixed points for elements of each prime order."""

    per_prime_order: Mapping[int, frozenset[int]]

    def __post_init__(self) -> None:
        spec = {int(p): frozenset(int(x) for x in vals) for p, vals in dict(self.per_prime_order).items()}
        if any(not vals for vals in spec.values()):
            raise ValueError("every listed prime needs at least one admissible count")
        object.__setattr__(self, "per_prime_order", spec)

    @classmethod
    def parse(cls, text: str) -> FixedPointSpec:
        """``"2:9,13;7:2"`` -> {2: {9, 13}, 7: {2}}."""
        spec = {}
        for chunk in text.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            p, _, vals = chunk.partition(":")
            spec[int(p)] = frozenset(int(x) for x in vals.split(","))
        return cls(spec)


def _is_prime(n: int) -> bool:
    return n > 1 and all(n % d for d in range(2, int(n**0.5) + 1))


def feasible_distributions(
    g: GroupSpec, v: int, fp: FixedPointSpec
) -> list[tuple[int, ...]]:
    """Orbit-length multisets (ascending tuples) admissible for ``g`` on ``v`` points."""
    actions = transitive_actions(g)
    classes = g.conjugacy_classes
    checks = []
    for ci, cls in enumerate(classes):
        p = g.element_order(cls[0])
        if _is_prime(p) and p in fp.per_prime_order:
            checks.append((ci, fp.per_prime_order[p]))
    caps = {ci: max(vals) for ci, vals in checks}

    found: set[tuple[int, ...]] = set()
    mult = [0] * len(actions)

    def rec(a: int, left: int, fixed: list[int]) -> None:
        if any(fixed[ci] > caps[ci] for ci in caps):
            return
        if a == len(actions):
            if left == 0 and all(fixed[ci] in vals for ci, vals in checks):
                lengths = []
                for act, n in zip(actions, mult):
                    lengths += [act.length] * n
                found.add(tuple(sorted(lengths)))
            return
        act = actions[a]
        for n in range(left // act.length + 1):
            mult[a] = n
            rec(a + 1, left - n * act.length, [f + n * x for f, x in zip(fixed, act.fixed)])
        mult[a] = 0

    rec(0, v, [0] * len(classes))
    return sorted(found)


def _table(elements: list, op: Callable) -> tuple[list[list[int]], list]:
    index = {e: i for i, e in enumerate(elements)}
    return [[index[op(a, b)] for b in elements] for a in elements], elements


def cyclic(n: int) -> GroupSpec:
    table, labels = _table(list(range(n)), lambda a, b: (a + b) % n)
    return GroupSpec(f"Z{n}", table, labels)


def dihedral(order: int) -> GroupSpec:
    """Dihedral group of the given order; elements ``(rotation, flip)``."""
    m = order // 2
    elements = [(r, f) for f in (0, 1) for r in range(m)]

    def op(a, b):
        r1, f1 = a
        r2, f2 = b
        return ((r1 + (-r2 if f1 else r2)) % m, f1 ^ f2)

    table, labels = _table(elements, op)
    return GroupSpec(f"D{order}", table, labels)


def semidirect(p: int, q: int, u: int, name: str) -> GroupSpec:
    """``Z_p : Z_q`` with the generator of ``Z_q`` acting as multiplication by ``u``."""
    if pow(u, q, p) != 1:
        raise ValueError(f"{u} does not have order dividing {q} mod {p}")
    elements = [(a, b) for b in range(q) for a in range(p)]

    def op(x, y):
        a1, b1 = x
        a2, b2 = y
        return ((a1 + pow(u, b1, p) * a2) % p, (b1 + b2) % q)

    table, labels = _table(elements, op)
    return GroupSpec(name, table, labels)


def get_group(name: str) -> GroupSpec:
    builders = {
        "Z10": lambda: cyclic(10),
        "D10": lambda: dihedral(10),
        "Z14": lambda: cyclic(14),
        "D14": lambda: dihedral(14),
        "Z15": lambda: cyclic(15),
        "Z21": lambda: cyclic(21),
        "Frob21": lambda: semidirect(7, 3, 2, "Frob21"),
        "Z35": lambda: cyclic(35),
    }
    if name not in builders:
        raise KeyError(f"unknown group {name!r}; choose from {', '.join(GROUP_NAMES)}")
    return builders[name]()
