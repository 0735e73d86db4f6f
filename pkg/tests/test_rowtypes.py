import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from omf.design import ContractError, DesignParams, OrbitDistribution, row_ok
from omf.oracle import OracleRefused, brute_force_row_types
from omf.rowtypes import TypeQuery, cycle_type, enumerate_types, fixed_block_types

from conftest import BIPLANE, dist

O11_TYPES = [
    (4, 3, 2, 1, 1, 1, 1, 1, 1, 1, 0),
    (4, 2, 2, 2, 2, 1, 1, 1, 1, 0, 0),
    (3, 3, 3, 2, 1, 1, 1, 1, 1, 0, 0),
    (3, 3, 2, 2, 2, 2, 1, 1, 0, 0, 0),
]
O7_TYPES = [
    (0, 0, 4) + (1,) * 12 + (0,) * 4,
    (0, 0, 3, 3) + (1,) * 10 + (0,) * 5,
    (0, 0, 3, 2, 2, 2) + (1,) * 7 + (0,) * 6,
    (0, 0) + (2,) * 6 + (1,) * 4 + (0,) * 7,
]
O5_TYPES = [
    (0, 3, 2) + (1,) * 11 + (0,) * 11,
    (0,) + (2,) * 4 + (1,) * 8 + (0,) * 12,
]

PUBLISHED_QUERIES = [
    (TypeQuery(dist("o11"), 11), O11_TYPES),
    (TypeQuery(dist("o7"), 7, {1: 0}), O7_TYPES),
    (TypeQuery(dist("o5"), 5, {1: 0}), O5_TYPES),
]


@pytest.mark.parametrize("q,expected", PUBLISHED_QUERIES, ids=["order11", "order7", "order5"])
def test_published_type_tables(q, expected):
    types = enumerate_types(q, BIPLANE)
    assert [t.row() for t in types] == expected
    for t in types:
        assert row_ok(t.row(), BIPLANE, q.dist, q.block_orbit_length)


@pytest.mark.parametrize("q,expected", PUBLISHED_QUERIES, ids=["order11", "order7", "order5"])
def test_brute_force_agrees_on_published_queries(q, expected):
    assert brute_force_row_types(q, BIPLANE) == enumerate_types(q, BIPLANE)


@pytest.mark.parametrize(
    "name,pattern",
    [("o13", "1³13¹"), ("o7", "1²7²"), ("o5", "1¹5³")],
)
def test_fixed_block_cycle_types(name, pattern):
    types = fixed_block_types(BIPLANE, dist(name))
    assert len(types) == 1
    assert cycle_type(types[0]) == pattern


def test_order13_fixed_block_row():
    (t,) = enumerate_types(TypeQuery(dist("o13"), 1, {1: (0, 1)}), BIPLANE)
    assert t.row() == (1, 1, 1, 0, 13) + (0,) * 8


def test_trivial_and_empty_queries():
    fano = DesignParams(7, 4, 2)
    (t,) = enumerate_types(TypeQuery(OrbitDistribution((7,)), 7), fano)
    assert t.row() == (4,)
    # one orbit of length 5 cannot carry k = 16 points
    d = OrbitDistribution((5, 116))
    q = TypeQuery(d, 5, {116: 0})
    assert enumerate_types(q, BIPLANE) == []
    assert brute_force_row_types(q, BIPLANE) == []


def test_pins_are_validated():
    with pytest.raises(ContractError):
        TypeQuery(dist("o7"), 7, {3: 0})
    with pytest.raises(ContractError):
        TypeQuery(dist("o7"), 7, {1: (2, 1)})


def test_oracle_ceiling_is_a_refusal():
    with pytest.raises(OracleRefused):
        brute_force_row_types(TypeQuery(dist("o5"), 5), BIPLANE, ceiling=1000)


def test_deterministic():
    q = TypeQuery(dist("o7"), 7)
    assert enumerate_types(q, BIPLANE) == enumerate_types(q, BIPLANE)


# small random distributions of (7,4,2) and (11,5,2)
@st.composite
def small_queries(draw):
    params = draw(st.sampled_from([DesignParams(7, 4, 2), DesignParams(11, 5, 2), DesignParams(16, 6, 2)]))
    parts = []
    left = params.v
    while left:
        p = draw(st.sampled_from([x for x in (1, 2, 3, 4, 5, 6) if x <= left]))
        parts.append(p)
        left -= p
    d = OrbitDistribution(tuple(sorted(parts)))
    Om = draw(st.sampled_from(sorted(set(parts))))
    return params, TypeQuery(d, Om)


@settings(max_examples=60, deadline=None)
@given(small_queries())
def test_enumeration_matches_brute_force(pq):
    params, q = pq
    try:
        brute = brute_force_row_types(q, params, ceiling=200_000)
    except OracleRefused:
        return
    assert enumerate_types(q, params) == brute
