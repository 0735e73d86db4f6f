"""From-scratch validation of orbit matrices.

Deliberately shares nothing with the scaled integer kernel in
:mod:`omf.design`: every condition is recomputed here in rational arithmetic
directly from its textbook form.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .design import PartialOrbitMatrix


@dataclass(frozen=True)
class Violation:
    condition: str  # row_sum, row_square, pair, column_sum, dual_integrality, shape
    where: tuple[int, ...]
    got: Fraction | int
    expected: Fraction | int | str

    def __str__(self) -> str:
        return f"{self.condition}{list(self.where)}: got {self.got}, expected {self.expected}"


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    violations: tuple[Violation, ...]

    def __bool__(self) -> bool:
        return self.ok


def _check(m: PartialOrbitMatrix, complete: bool) -> VerifyResult:
    v, k, lam = m.params.v, m.params.k, m.params.lam
    omega = list(m.dist.omega)
    Om = list(m.row_orbits)
    g = [list(r) for r in m.gamma]
    s, t = len(g), len(omega)
    out: list[Violation] = []

    if sum(omega) != v:
        out.append(Violation("shape", (), sum(omega), v))
    if complete and s != t:
        out.append(Violation("shape", (s,), s, t))
    if any(len(r) != t for r in g):
        out.append(Violation("shape", (), "ragged", t))
        return VerifyResult(False, tuple(out))

    for i in range(s):
        if sum(g[i]) != k:
            out.append(Violation("row_sum", (i,), sum(g[i]), k))
        for r in range(t):
            if g[i][r] < 0 or g[i][r] > omega[r]:
                out.append(Violation("entry_range", (i, r), g[i][r], f"0..{omega[r]}"))
            if Fraction(Om[i] * g[i][r], omega[r]).denominator != 1:
                out.append(
                    Violation("dual_integrality", (i, r), Fraction(Om[i] * g[i][r], omega[r]), "integer")
                )

    for i in range(s):
        for j in range(i, s):
            got = sum(Fraction(Om[j], omega[r]) * g[i][r] * g[j][r] for r in range(t))
            want = lam * Om[j] + (k - lam if i == j else 0)
            if got != want:
                out.append(Violation("row_square" if i == j else "pair", (i, j), got, want))

    for r in range(t):
        total = sum(Om[i] * g[i][r] for i in range(s))
        if (complete and total != k * omega[r]) or total > k * omega[r]:
            out.append(Violation("column_sum", (r,), total, k * omega[r]))

    return VerifyResult(not out, tuple(out))


def verify_complete(m: PartialOrbitMatrix) -> VerifyResult:
    """Every orbit-matrix condition, with column sums required to be exact."""
    return _check(m, complete=True)


def verify_partial(m: PartialOrbitMatrix) -> VerifyResult:
    """Row and pair conditions on the rows present; column sums only bounded."""
    return _check(m, complete=False)


def verify(m: PartialOrbitMatrix) -> VerifyResult:
    return verify_complete(m) if m.status == "complete" else verify_partial(m)
