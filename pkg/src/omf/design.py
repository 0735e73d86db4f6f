"""Domain types and the exact-integer constraint kernel for orbit matrices.

Every rational coefficient ``Omega_j / omega_r`` is cleared by multiplying
through with ``L = lcm(omega)``, so each quantity returned here is a plain
``int``.  Callers compare against the matching ``*_target`` helper.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import lcm
from typing import Sequence

Row = tuple[int, ...]


class ContractError(ValueError):
    """Raised when an operation is called with shape-incompatible arguments."""


@dataclass(frozen=True)
class DesignParams:
    v: int
    k: int
    lam: int

    def __post_init__(self) -> None:
        if min(self.v, self.k, self.lam) <= 0:
            raise ContractError(f"parameters must be positive: {self}")
        if self.k >= self.v:
            raise ContractError(f"need k < v, got k={self.k}, v={self.v}")
        if self.lam * (self.v - 1) != self.k * (self.k - 1):
            raise ContractError(
                f"({self.v},{self.k},{self.lam}) is not admissible for a symmetric design"
            )

    @property
    def order(self) -> int:
        return self.k - self.lam


@dataclass(frozen=True)
class OrbitDistribution:
    """Point-orbit lengths ``omega`` and block-orbit lengths ``Omega``.

    ``Omega`` defaults to ``omega``; that is the only situation arising for
    the groups handled here.
    """

    omega: tuple[int, ...]
    Omega: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "omega", tuple(int(x) for x in self.omega))
        if not self.Omega:
            object.__setattr__(self, "Omega", self.omega)
        else:
            object.__setattr__(self, "Omega", tuple(int(x) for x in self.Omega))
        if not self.omega or min(self.omega) <= 0 or min(self.Omega) <= 0:
            raise ContractError("orbit lengths must be positive")
        if len(self.omega) != len(self.Omega):
            raise ContractError(
                f"{len(self.omega)} point orbits but {len(self.Omega)} block orbits"
            )
        if sum(self.omega) != sum(self.Omega):
            raise ContractError("point and block orbit lengths have different totals")

    @property
    def t(self) -> int:
        return len(self.omega)

    @property
    def v(self) -> int:
        return sum(self.omega)

    @property
    def L(self) -> int:
        return lcm(*self.omega)

    @property
    def weights(self) -> tuple[int, ...]:
        """``L // omega_r`` for every column."""
        L = self.L
        return tuple(L // w for w in self.omega)

    def check_for(self, params: DesignParams) -> None:
        if self.v != params.v:
            raise ContractError(f"orbit lengths sum to {self.v}, expected v={params.v}")

    def check_group_order(self, order: int) -> None:
        bad = [x for x in self.omega + self.Omega if order % x]
        if bad:
            raise ContractError(f"orbit lengths {bad} do not divide the group order {order}")

    def column_classes(self) -> list[tuple[int, list[int]]]:
        """Distinct point-orbit lengths (ascending) with the columns holding them."""
        classes: dict[int, list[int]] = {}
        for r, w in enumerate(self.omega):
            classes.setdefault(w, []).append(r)
        return sorted(classes.items())

    def shorthand(self) -> str:
        parts = []
        for w in sorted(set(self.omega)):
            n = self.omega.count(w)
            parts.append(f"{w}*{n}" if n > 1 else str(w))
        return ",".join(parts)


@dataclass(frozen=True)
class PartialOrbitMatrix:
    """An ``s x t`` block orbit matrix together with its orbit data.

    ``row_orbits[i]`` is the block-orbit length of row ``i``.  Validity is not
    enforced on construction; use :func:`omf.search.verify` for that.
    """

    gamma: tuple[Row, ...]
    dist: OrbitDistribution
    row_orbits: tuple[int, ...]
    params: DesignParams
    status: str = field(default="")

    def __post_init__(self) -> None:
        gamma = tuple(tuple(int(x) for x in row) for row in self.gamma)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "row_orbits", tuple(int(x) for x in self.row_orbits))
        if len(gamma) != len(self.row_orbits):
            raise ContractError(
                f"{len(gamma)} rows but {len(self.row_orbits)} row orbit lengths"
            )
        for i, row in enumerate(gamma):
            if len(row) != self.dist.t:
                raise ContractError(f"row {i} has {len(row)} entries, expected {self.dist.t}")
            if min(row, default=0) < 0:
                raise ContractError(f"row {i} has a negative entry")
        if not self.status:
            object.__setattr__(
                self, "status", "complete" if len(gamma) == self.dist.t else "partial"
            )
        if self.status not in ("partial", "complete"):
            raise ContractError(f"unknown status {self.status!r}")
        if self.status == "complete" and len(gamma) != self.dist.t:
            raise ContractError("a complete orbit matrix must be square")

    @property
    def s(self) -> int:
        return len(self.gamma)

    def transpose_dual(self) -> PartialOrbitMatrix:
        """Matrix of ``Omega_i * gamma_ir / omega_r`` with the distributions swapped."""
        if self.status != "complete":
            raise ContractError("transpose duality is defined for complete matrices")
        om = self.dist.omega
        dual = []
        for r in range(self.dist.t):
            row = []
            for i in range(self.s):
                num = self.row_orbits[i] * self.gamma[i][r]
                if num % om[r]:
                    raise ContractError(f"entry ({i},{r}) violates dual integrality")
                row.append(num // om[r])
            dual.append(tuple(row))
        return PartialOrbitMatrix(
            tuple(dual),
            OrbitDistribution(self.row_orbits, om),
            om,
            self.params,
        )


def _check_width(row: Sequence[int], dist: OrbitDistribution) -> None:
    if len(row) != dist.t:
        raise ContractError(f"row has {len(row)} entries, distribution has {dist.t} orbits")


def check_row_sum(
    row: Sequence[int], params: DesignParams, dist: OrbitDistribution | None = None
) -> bool:
    if dist is not None:
        _check_width(row, dist)
    if min(row, default=0) < 0:
        raise ContractError("entries must be non-negative")
    return sum(row) == params.k


def row_quadratic(row: Sequence[int], dist: OrbitDistribution, Omega_i: int) -> int:
    """``L * sum_r (Omega_i / omega_r) * gamma_ir**2``."""
    _check_width(row, dist)
    return Omega_i * sum(w * g * g for w, g in zip(dist.weights, row))


def row_quadratic_target(params: DesignParams, dist: OrbitDistribution, Omega_i: int) -> int:
    return dist.L * (params.lam * (Omega_i - 1) + params.k)


def pair_product(
    row_i: Sequence[int], row_j: Sequence[int], dist: OrbitDistribution, Omega_j: int
) -> int:
    """``L * sum_r (Omega_j / omega_r) * gamma_ir * gamma_jr``."""
    _check_width(row_i, dist)
    _check_width(row_j, dist)
    return Omega_j * sum(w * a * b for w, a, b in zip(dist.weights, row_i, row_j))


def pair_target(
    params: DesignParams, dist: OrbitDistribution, Omega_j: int, same: bool = False
) -> int:
    return dist.L * (params.lam * Omega_j + (params.k - params.lam if same else 0))


def prefix_bound_ok(
    prefix_i: Sequence[int],
    prefix_j: Sequence[int],
    dist: OrbitDistribution,
    Omega_j: int,
    params: DesignParams,
    same: bool = False,
) -> bool:
    """Inner product of two column prefixes stays within the pair bound.

    All terms are non-negative, so once the bound fails no extension of the
    prefixes can satisfy the exact pair equation.
    """
    if len(prefix_i) != len(prefix_j) or len(prefix_i) > dist.t:
        raise ContractError("prefixes must cover the same leading columns")
    w = dist.weights
    total = Omega_j * sum(w[r] * a * b for r, (a, b) in enumerate(zip(prefix_i, prefix_j)))
    return total <= pair_target(params, dist, Omega_j, same)


def dual_integrality_ok(row: Sequence[int], dist: OrbitDistribution, Omega_i: int) -> bool:
    _check_width(row, dist)
    return all((Omega_i * g) % w == 0 for g, w in zip(row, dist.omega))


def column_totals(m: PartialOrbitMatrix) -> list[int]:
    """``sum_i Omega_i * gamma_ir`` per column; a full column reaches ``k * omega_r``."""
    return [
        sum(Om * row[r] for Om, row in zip(m.row_orbits, m.gamma)) for r in range(m.dist.t)
    ]


def column_sums_ok(m: PartialOrbitMatrix) -> bool:
    k = m.params.k
    for total, w in zip(column_totals(m), m.dist.omega):
        if total > k * w:
            return False
        if m.status == "complete" and total != k * w:
            return False
    return True


def row_ok(row: Sequence[int], params: DesignParams, dist: OrbitDistribution, Omega_i: int) -> bool:
    """Row sum, row quadratic and dual integrality together."""
    return (
        check_row_sum(row, params, dist)
        and row_quadratic(row, dist, Omega_i) == row_quadratic_target(params, dist, Omega_i)
        and dual_integrality_ok(row, dist, Omega_i)
    )
