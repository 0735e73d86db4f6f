import pytest

import omf.search as search_mod
from omf.canon import canonical_form
from omf.design import ContractError, DesignParams, OrbitDistribution, PartialOrbitMatrix
from omf.oracle import naive_partial_matrices, small_distributions
from omf.search import SearchSpec, extend_one_row, max_completable_rows, run_search
from omf.verify import verify, verify_complete, verify_partial

from conftest import BIPLANE, dist, golden

FANO_DUAL = DesignParams(7, 4, 2)
PALEY11 = DesignParams(11, 5, 2)


def test_extend_order13_ladder():
    spec = SearchSpec(BIPLANE, dist("o13"))
    eight = golden("o13_fixed_point_blocks.txt")[0]
    (nine,) = extend_one_row(eight, spec, 13)
    assert nine.gamma[-1] == (0, 0, 0, 0, 2, 2, 2, 2, 4, 2, 2, 0, 0)
    assert canonical_form(nine) == canonical_form(golden("o13_nine_rows.txt")[0])
    assert extend_one_row(nine, spec, 13) == []
    with pytest.raises(ContractError):
        extend_one_row(eight, spec, 1)


def test_extend_trivial_single_orbit():
    spec = SearchSpec(FANO_DUAL, OrbitDistribution((7,)))
    empty = PartialOrbitMatrix((), spec.dist, (), FANO_DUAL)
    (m,) = extend_one_row(empty, spec, 7)
    assert m.gamma == ((4,),) and m.status == "complete"
    assert verify_complete(m).ok


def test_verify_reports_violations():
    m = golden("frob21_complete.txt")[0]
    assert verify_complete(m).ok
    for i, r in [(0, 0), (4, 8), (10, 10)]:
        g = [list(row) for row in m.gamma]
        g[i][r] += 1
        bad = PartialOrbitMatrix(tuple(map(tuple, g)), m.dist, m.row_orbits, m.params)
        res = verify_complete(bad)
        assert not res.ok
        kinds = {v.condition for v in res.violations}
        assert "row_sum" in kinds
        assert {"pair", "row_square"} & kinds


def test_verify_partial_allows_open_columns():
    m = golden("o13_nine_rows.txt")[0]
    assert verify_partial(m).ok
    assert verify(m).ok


def test_frob21_reports_are_sound_and_iso_free():
    r = run_search(SearchSpec(BIPLANE, dist("frob21")), workers=1)
    assert r.counts[11] == 1
    (m,) = r.matrices
    assert verify_complete(m).ok
    assert verify_complete(m.transpose_dual()).ok


def test_z15_soundness_isomorph_freeness_and_duality():
    r = run_search(SearchSpec(BIPLANE, dist("z15")), workers=1)
    assert r.terminal_count == 6
    keys = {canonical_form(m) for m in r.matrices}
    assert len(keys) == 6
    for m in r.matrices:
        assert verify_complete(m).ok
        assert verify_complete(m.transpose_dual()).ok
        assert canonical_form(m).matrix == m.gamma


def test_partial_outputs_verify():
    r = run_search(SearchSpec(BIPLANE, dist("o7"), target_depth=6), workers=1)
    for m in r.matrices:
        assert verify_partial(m).ok
    assert len({canonical_form(m) for m in r.matrices}) == len(r.matrices) == 8


def test_worker_count_does_not_change_the_report():
    spec = SearchSpec(BIPLANE, dist("z15"))
    one = run_search(spec, workers=1)
    for w in (2, 8):
        many = run_search(spec, workers=w)
        assert many.content_hash() == one.content_hash()
        assert many.counts == one.counts
    assert run_search(spec, workers=1).content_hash() == one.content_hash()


def test_prescribed_rows_are_neutral_order13():
    spec = SearchSpec(BIPLANE, dist("o13"))
    fixed = golden("o13_fixed_blocks.txt")[0]
    pres = SearchSpec(BIPLANE, dist("o13"), prescribed_rows=fixed.gamma)
    a, b = run_search(spec, workers=1), run_search(pres, workers=1)
    assert {d: n for d, n in a.counts.items() if d >= 4} == b.counts


def test_prescribed_rows_are_neutral_order7():
    spec = SearchSpec(BIPLANE, dist("o7"), target_depth=6)
    fixed = golden("o7_fixed_point_blocks.txt")[0]
    pres = SearchSpec(BIPLANE, dist("o7"), prescribed_rows=fixed.gamma[:2], target_depth=6)
    a, b = run_search(spec, workers=1), run_search(pres, workers=1)
    assert {d: n for d, n in a.counts.items() if d >= 2} == b.counts
    assert a.content_hash() != "" and [m.gamma for m in a.matrices] == [m.gamma for m in b.matrices]


def test_prescribed_rows_must_be_valid():
    bad = ((1, 1, 1, 1, 12) + (0,) * 8,)
    with pytest.raises(ContractError):
        run_search(SearchSpec(BIPLANE, dist("o13"), prescribed_rows=bad), workers=1)
    with pytest.raises(ContractError):
        SearchSpec(BIPLANE, dist("o13"), target_depth=14)
    with pytest.raises(ContractError):
        SearchSpec(BIPLANE, OrbitDistribution((13,) * 9 + (1,) * 4))


def test_store_limit_truncates_but_keeps_counting():
    r = run_search(SearchSpec(BIPLANE, dist("z15"), store_limit=2), workers=1)
    assert r.truncated and len(r.matrices) == 2 and r.terminal_count == 6


def test_max_completable_small():
    assert max_completable_rows(SearchSpec(BIPLANE, dist("frob21"))) == 11
    assert max_completable_rows(SearchSpec(FANO_DUAL, OrbitDistribution((1, 3, 3)))) == 3


def _cases():
    out = []
    for params, orders, max_t in ((FANO_DUAL, [6, 8, 12, 21], 6), (PALEY11, [10, 12, 55], 5)):
        for d in small_distributions(params.v, orders, max_t):
            if len(d) == params.v:  # trivial group: too slow for the naive reducer
                continue
            out.append((params, d))
    return out


@pytest.fixture(params=["pool", "trie"])
def generator(request, monkeypatch):
    if request.param == "trie":
        monkeypatch.setattr(search_mod, "POOL_LIMIT", 0)
    return request.param


@pytest.mark.parametrize("params,omega", _cases(), ids=lambda x: str(x))
def test_agrees_with_naive_oracle(params, omega, generator):
    d = OrbitDistribution(omega)
    t = d.t
    naive = naive_partial_matrices(params, d, t)
    plain = run_search(SearchSpec(params, d, lookahead="none"), workers=1)
    assert plain.counts == {s: len(naive[s]) for s in range(t + 1)}
    assert {m.gamma for m in plain.matrices} == naive[t]
    for mode in ("unit", "full"):
        pruned = run_search(SearchSpec(params, d, lookahead=mode), workers=1)
        assert {m.gamma for m in pruned.matrices} == naive[t]
        for m in pruned.matrices:
            assert verify_complete(m).ok


@pytest.mark.parametrize("name", ["frob21", "z15", "o13"])
def test_lookahead_modes_keep_complete_matrices(name, monkeypatch):
    def complete(mode):
        r = run_search(SearchSpec(BIPLANE, dist(name), lookahead=mode), workers=1)
        return r.terminal_count, {canonical_form(m) for m in r.matrices}

    base = complete("none")
    assert complete("unit") == base
    assert complete("full") == base
    # peeling only ever removes rows the counting cut would keep
    monkeypatch.setattr(search_mod, "CORE_LIMIT", 0)
    assert complete("full") == base


@pytest.mark.parametrize(
    "name,depth", [("frob21", None), ("z15", None), ("o13", None), ("o11", 2)]
)
def test_pool_and_trie_generators_agree(name, depth, monkeypatch):
    spec = SearchSpec(BIPLANE, dist(name), target_depth=depth)
    assert search_mod._Engine(spec).pool is not None
    pooled = run_search(spec, workers=1)
    monkeypatch.setattr(search_mod, "POOL_LIMIT", 0)
    assert search_mod._Engine(spec).pool is None
    plain = run_search(spec, workers=1)
    assert pooled.counts == plain.counts
    assert pooled.content_hash() == plain.content_hash()


@pytest.mark.parametrize("part", [(3, 1, 1, 0), (2, 2), (5,), (1, 1, 0, 0, 0)])
def test_arrangements_are_distinct_and_complete(part):
    from itertools import permutations

    got = list(search_mod._arrangements(part))
    assert len(got) == len(set(got)) == search_mod._multinomial(part)
    assert set(got) == set(permutations(part))
