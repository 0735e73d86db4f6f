"""Command-line front end: ``omf <mode> --config FILE [--out DIR] [--workers N]``.

Exit status: 0 on success, 2 when a search or feasibility run finds
nothing (a nonexistence result, not a failure), 3 when ``verify`` rejects a
matrix, 1 on any error.  ``OMF_WORKERS`` sets the default worker count.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import canon, groups, matrixio, oracle, rowtypes, search
from .config import MODES, ConfigError, RunConfig, load_config
from .design import ContractError, PartialOrbitMatrix
from .verify import verify

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_EMPTY = 2
EXIT_INVALID = 3


def _write(out: Path | None, name: str, text: str) -> None:
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text, encoding="ascii")


def _manifest(out: Path | None, data: dict) -> dict:
    _write(out, "manifest.json", json.dumps(data, indent=2, sort_keys=True) + "\n")
    return data


def _prescribed(cfg: RunConfig) -> tuple[tuple, tuple]:
    if not cfg.prescribed or cfg.prescribed == "derive":
        return (), ()
    m = matrixio.read_matrix_file(cfg.prescribed)
    return m.gamma, m.row_orbits


def run_search_mode(cfg: RunConfig, out: Path | None, workers: int) -> tuple[int, dict]:
    rows, orbits = _prescribed(cfg)
    spec = search.SearchSpec(
        cfg.params,
        cfg.dist,
        prescribed_rows=rows,
        prescribed_orbits=orbits,
        target_depth=cfg.target_depth,
        count_only=cfg.count_only,
        store_limit=cfg.store_limit,
        lookahead=cfg.lookahead,
    )
    t0 = time.perf_counter()
    report = search.run_search(spec, workers, cfg.split_depth)
    wall = time.perf_counter() - t0
    if not cfg.count_only:
        _write(out, "matrices.txt", matrixio.format_matrix_set(report.matrices))
    manifest = _manifest(
        out,
        {
            "mode": "search",
            "engine_version": search.ENGINE_VERSION,
            "params": [cfg.v, cfg.k, cfg.lam],
            "point_orbits": list(cfg.dist.omega),
            "target_depth": report.target_depth,
            "counts": {str(d): n for d, n in report.counts.items()},
            "terminal_count": report.terminal_count,
            "max_depth_reached": report.max_depth_reached(),
            "nodes": report.stats.get("nodes", 0),
            "stats": report.stats,
            "retained": len(report.matrices),
            "truncated": report.truncated,
            "workers": report.workers,
            "wall_time_s": round(wall, 3),
            "content_hash": report.content_hash(),
        },
    )
    return (EXIT_OK if report.terminal_count else EXIT_EMPTY), manifest


def run_types_mode(cfg: RunConfig, out: Path | None) -> tuple[int, dict]:
    q = rowtypes.TypeQuery(cfg.dist, cfg.block_orbit_length, cfg.pinned)
    types = rowtypes.enumerate_types(q, cfg.params)
    _write(out, "types.txt", "".join(f"{t}\n" for t in types))
    manifest = _manifest(
        out,
        {
            "mode": "types",
            "block_orbit_length": cfg.block_orbit_length,
            "count": len(types),
            "types": [list(t.row()) for t in types],
        },
    )
    return (EXIT_OK if types else EXIT_EMPTY), manifest


def run_feasible_mode(cfg: RunConfig, out: Path | None) -> tuple[int, dict]:
    g = groups.get_group(cfg.group)
    fp = groups.FixedPointSpec.parse(cfg.fixed_points)
    dists = groups.feasible_distributions(g, cfg.v, fp)
    _write(out, "distributions.txt", "".join(",".join(map(str, d)) + "\n" for d in dists))
    manifest = _manifest(
        out,
        {"mode": "feasible", "group": g.name, "v": cfg.v, "distributions": [list(d) for d in dists]},
    )
    return (EXIT_OK if dists else EXIT_EMPTY), manifest


def _read_set(path: str) -> list[PartialOrbitMatrix]:
    if not path:
        raise ConfigError("this mode needs matrix=<file>")
    return matrixio.parse_matrix_set(Path(path).read_text(encoding="ascii"))


def run_verify_mode(cfg: RunConfig, out: Path | None) -> tuple[int, dict]:
    results = []
    for m in _read_set(cfg.matrix):
        res = verify(m)
        results.append({"status": m.status, "ok": res.ok, "violations": [str(v) for v in res.violations]})
    ok = all(r["ok"] for r in results)
    manifest = _manifest(out, {"mode": "verify", "matrices": results, "ok": ok})
    return (EXIT_OK if ok else EXIT_INVALID), manifest


def run_canon_mode(cfg: RunConfig, out: Path | None) -> tuple[int, dict]:
    ms = [canon.canonical_matrix(m) for m in _read_set(cfg.matrix)]
    _write(out, "canonical.txt", matrixio.format_matrix_set(ms))
    keys = {m.gamma for m in ms}
    manifest = _manifest(out, {"mode": "canon", "matrices": len(ms), "distinct_classes": len(keys)})
    return EXIT_OK, manifest


def run_oracle_mode(cfg: RunConfig, out: Path | None) -> tuple[int, dict]:
    """``oracle=7:0,3,5,6`` develops a difference set and quotients by translation."""
    modulus, _, res = cfg.oracle.partition(":")
    n = int(modulus)
    s = oracle.from_difference_set(n, (int(x) for x in res.split(",")))
    k = sum(s.incidence[0])
    lam = k * (k - 1) // (n - 1)
    shift = tuple((x + 1) % n for x in range(n))
    m = oracle.quotient_orbit_matrix(s, oracle.PermAction.from_point_perms(s, [shift]), k, lam)
    res_v = verify(m)
    _write(out, "orbit_matrix.txt", matrixio.format_matrix(m))
    manifest = _manifest(
        out,
        {"mode": "oracle", "design": [n, k, lam], "orbit_matrix": [list(r) for r in m.gamma], "verified": res_v.ok},
    )
    return (EXIT_OK if res_v.ok else EXIT_INVALID), manifest


def run(cfg: RunConfig, out: Path | None = None, workers: int | None = None) -> tuple[int, dict]:
    if workers is None:
        workers = cfg.workers if cfg.workers is not None else search.default_workers()
    if cfg.mode == "search":
        return run_search_mode(cfg, out, workers)
    if cfg.mode == "types":
        return run_types_mode(cfg, out)
    if cfg.mode == "feasible":
        return run_feasible_mode(cfg, out)
    if cfg.mode == "verify":
        return run_verify_mode(cfg, out)
    if cfg.mode == "canon":
        return run_canon_mode(cfg, out)
    return run_oracle_mode(cfg, out)


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="omf", description="orbit matrix search for symmetric designs")
    ap.add_argument("mode", choices=MODES)
    ap.add_argument("--config", required=True, help="key=value run specification")
    ap.add_argument("--out", help="output directory for matrices and manifest.json")
    ap.add_argument("--workers", type=int, help="worker processes (default: $OMF_WORKERS or 1)")
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args.config)
        cfg.mode = args.mode
        out = Path(args.out or cfg.out) if (args.out or cfg.out) else None
        code, manifest = run(cfg, out, args.workers)
    except (ConfigError, ContractError, matrixio.MatrixFormatError, oracle.OracleRefused, OSError, KeyError, ValueError) as e:
        print(f"omf: error: {e}", file=sys.stderr)
        return EXIT_ERROR
    print(json.dumps(manifest, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
