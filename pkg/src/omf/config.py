"""Line-oriented run configuration.

Example::

    # Frob21 complete search
    mode=search
    v=121
    k=16
    lambda=2
    point_orbits=1,1,7*5,21*4
    target_depth=11

Blank lines and ``#`` comments are ignored; every other line is
``key=value``.  Unknown keys are rejected.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .design import ContractError, DesignParams, OrbitDistribution

MODES = ("types", "search", "feasible", "verify", "canon", "oracle")


class ConfigError(ValueError):
    def __init__(self, msg: str, lineno: int | None = None) -> None:
        self.lineno = lineno
        super().__init__(f"line {lineno}: {msg}" if lineno else msg)


@dataclass
class RunConfig:
    mode: str = "search"
    v: int = 121
    k: int = 16
    lam: int = 2
    point_orbits: tuple[int, ...] = ()
    block_orbits: tuple[int, ...] = ()
    prescribed: str = ""  # "" | "derive" | path to a matrix file
    target_depth: int | None = None
    workers: int | None = None
    store_limit: int = 100_000
    count_only: bool = False
    lookahead: str = "unit"
    split_depth: int | None = None
    out: str = ""
    # mode-specific
    group: str = ""
    fixed_points: str = ""
    block_orbit_length: int = 1
    pinned: dict[int, tuple[int, int]] = field(default_factory=dict)
    matrix: str = ""  # input file for verify/canon
    oracle: str = ""  # difference-set spec "modulus:r1,r2,..." for oracle mode

    @property
    def params(self) -> DesignParams:
        return DesignParams(self.v, self.k, self.lam)

    @property
    def dist(self) -> OrbitDistribution:
        return OrbitDistribution(self.point_orbits, self.block_orbits)


def expand_orbits(text: str) -> tuple[int, ...]:
    """``"1,1,7*5,21*4"`` -> ``(1, 1, 7, 7, 7, 7, 7, 21, 21, 21, 21)``."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            raise ValueError(f"empty entry in {text!r}")
        a, star, n = part.partition("*")
        try:
            val = int(a)
            rep = int(n) if star else 1
        except ValueError:
            raise ValueError(f"bad orbit entry {part!r}") from None
        if val <= 0 or rep <= 0:
            raise ValueError(f"orbit entries must be positive: {part!r}")
        out += [val] * rep
    return tuple(sorted(out))


def _parse_pins(text: str) -> dict[int, tuple[int, int]]:
    """``"1:1;13:0-1"`` -> {1: (1, 1), 13: (0, 1)}."""
    pins = {}
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        w, _, rng = chunk.partition(":")
        lo, dash, hi = rng.partition("-")
        pins[int(w)] = (int(lo), int(hi) if dash else int(lo))
    return pins


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_CONVERTERS = {
    "mode": str,
    "v": int,
    "k": int,
    "lambda": int,
    "point_orbits": expand_orbits,
    "block_orbits": expand_orbits,
    "prescribed": str,
    "target_depth": int,
    "workers": int,
    "store_limit": int,
    "count_only": _bool,
    "lookahead": str,
    "split_depth": int,
    "out": str,
    "group": str,
    "fixed_points": str,
    "block_orbit_length": int,
    "pinned": _parse_pins,
    "matrix": str,
    "oracle": str,
}


def parse_config(text: str) -> RunConfig:
    cfg = RunConfig()
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not eq or not key:
            raise ConfigError(f"expected key=value, got {raw.strip()!r}", lineno)
        if key not in _CONVERTERS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in seen:
            raise ConfigError(f"duplicate key {key!r} (first on line {seen[key]})", lineno)
        seen[key] = lineno
        try:
            value = _CONVERTERS[key](val)
        except ValueError as e:
            raise ConfigError(str(e), lineno) from None
        setattr(cfg, "lam" if key == "lambda" else key, value)

    if cfg.mode not in MODES:
        raise ConfigError(f"mode must be one of {', '.join(MODES)}", seen.get("mode"))
    try:
        cfg.params
    except ContractError as e:
        raise ConfigError(str(e), seen.get("v")) from None
    for key in ("point_orbits", "block_orbits"):
        orbits = getattr(cfg, key)
        if orbits and sum(orbits) != cfg.v:
            raise ConfigError(f"{key} sum to {sum(orbits)}, expected v={cfg.v}", seen[key])
    return cfg


def load_config(path: str | Path) -> RunConfig:
    return parse_config(Path(path).read_text())
