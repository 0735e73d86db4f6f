"""Plain-text matrix files.

Layout (ASCII, newline-terminated)::

    #121 16 2
    #omega: 1 1 7 7 7 7 7 21 21 21 21
    #Omega-per-row: 1 1 7 7 7
    4 4 1 1 1 1 1 1 1 1 1
    ...

An optional ``#Omega: ...`` line records the block-orbit distribution when
it differs from ``omega``, and ``#status: complete`` marks a square matrix
that claims completeness.  Rows are space-separated integers.
"""
from __future__ import annotations

from pathlib import Path

from .design import DesignParams, OrbitDistribution, PartialOrbitMatrix


class MatrixFormatError(ValueError):
    pass


def format_matrix(m: PartialOrbitMatrix) -> str:
    p = m.params
    lines = [f"#{p.v} {p.k} {p.lam}", "#omega: " + " ".join(map(str, m.dist.omega))]
    if m.dist.Omega != m.dist.omega:
        lines.append("#Omega: " + " ".join(map(str, m.dist.Omega)))
    lines.append("#Omega-per-row: " + " ".join(map(str, m.row_orbits)))
    lines.append(f"#status: {m.status}")
    lines += [" ".join(map(str, row)) for row in m.gamma]
    return "\n".join(lines) + "\n"


def _ints(text: str, lineno: int) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split())
    except ValueError:
        raise MatrixFormatError(f"line {lineno}: expected integers, got {text!r}") from None


def parse_matrix(text: str) -> PartialOrbitMatrix:
    header: dict[str, tuple[int, ...]] = {}
    status = ""
    params: tuple[int, ...] | None = None
    rows: list[tuple[int, ...]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if rows:
                raise MatrixFormatError(f"line {lineno}: header after matrix rows")
            key, sep, val = body.partition(":")
            if not sep:
                if params is not None:
                    raise MatrixFormatError(f"line {lineno}: duplicate parameter line")
                params = _ints(body, lineno)
                if len(params) != 3:
                    raise MatrixFormatError(f"line {lineno}: expected '#v k lambda'")
                continue
            key = key.strip()
            if key == "status":
                status = val.strip()
            elif key in ("omega", "Omega", "Omega-per-row"):
                header[key] = _ints(val, lineno)
            else:
                raise MatrixFormatError(f"line {lineno}: unknown header {key!r}")
            continue
        row = _ints(line, lineno)
        if "omega" in header and len(row) != len(header["omega"]):
            raise MatrixFormatError(
                f"line {lineno}: ragged row with {len(row)} entries, expected {len(header['omega'])}"
            )
        rows.append(row)
    if params is None:
        raise MatrixFormatError("missing '#v k lambda' header")
    for key in ("omega", "Omega-per-row"):
        if key not in header:
            raise MatrixFormatError(f"missing '#{key}:' header")
    if len(header["Omega-per-row"]) != len(rows):
        raise MatrixFormatError(
            f"{len(rows)} rows but {len(header['Omega-per-row'])} row orbit lengths"
        )
    dist = OrbitDistribution(header["omega"], header.get("Omega", ()))
    return PartialOrbitMatrix(
        tuple(rows), dist, header["Omega-per-row"], DesignParams(*params), status
    )


def write_matrix_file(m: PartialOrbitMatrix, path: str | Path) -> None:
    Path(path).write_text(format_matrix(m), encoding="ascii")


def read_matrix_file(path: str | Path) -> PartialOrbitMatrix:
    return parse_matrix(Path(path).read_text(encoding="ascii"))


def parse_matrix_set(text: str) -> list[PartialOrbitMatrix]:
    """Several matrices in one file, separated by lines holding only ``%``."""
    chunks, cur = [], []
    for line in text.splitlines():
        if line.strip() == "%":
            chunks.append("\n".join(cur))
            cur = []
        else:
            cur.append(line)
    if any(x.strip() for x in cur):
        chunks.append("\n".join(cur))
    return [parse_matrix(c) for c in chunks if c.strip()]


def format_matrix_set(ms: list[PartialOrbitMatrix]) -> str:
    return "%\n".join(format_matrix(m) for m in ms)
