import pytest

from omf.canon import canonical_form
from omf.design import ContractError, DesignParams, OrbitDistribution
from omf.oracle import (
    DesignConstructionError,
    IncidenceStructure,
    OracleRefused,
    PermAction,
    brute_force_row_types,
    from_difference_set,
    naive_partial_matrices,
    quotient_orbit_matrix,
)
from omf.rowtypes import TypeQuery
from omf.search import SearchSpec, run_search
from omf.verify import verify_complete

DIFFERENCE_SETS = [
    (7, (1, 2, 4), 1),
    (7, (0, 3, 5, 6), 2),
    (11, (1, 3, 4, 5, 9), 2),
    (13, (0, 1, 3, 9), 1),
    (21, (3, 6, 7, 12, 14), 1),
]


@pytest.mark.parametrize("n,res,lam", DIFFERENCE_SETS)
def test_difference_sets_develop_to_designs(n, res, lam):
    s = from_difference_set(n, res)
    assert s.is_design(len(res), lam)
    assert not s.is_design(len(res), lam + 1)


def test_non_difference_sets_are_rejected():
    with pytest.raises(DesignConstructionError):
        from_difference_set(7, (0, 1, 2))
    with pytest.raises(DesignConstructionError):
        from_difference_set(8, (0, 1, 3))
    with pytest.raises(ContractError):
        from_difference_set(5, ())


def test_incidence_shape_is_checked():
    with pytest.raises(ContractError):
        IncidenceStructure(2, 2, ((1, 0),))
    with pytest.raises(ContractError):
        IncidenceStructure(1, 1, ((2,),))


def _shift(n, step):
    return tuple((x + step) % n for x in range(n))


def _mult(n, m):
    return tuple((x * m) % n for x in range(n))


@pytest.mark.parametrize(
    "n,res,lam,perms",
    [
        (21, (3, 6, 7, 12, 14), 1, [_shift(21, 7)]),
        (21, (3, 6, 7, 12, 14), 1, [_shift(21, 3)]),
        (7, (1, 2, 4), 1, [_mult(7, 2)]),
        (11, (1, 3, 4, 5, 9), 2, [_mult(11, 3)]),
        (13, (0, 1, 3, 9), 1, [_mult(13, 3)]),
    ],
)
def test_quotients_verify_on_both_sides(n, res, lam, perms):
    s = from_difference_set(n, res)
    a = PermAction.from_point_perms(s, perms)
    m = quotient_orbit_matrix(s, a, len(res), lam)
    assert sum(m.dist.omega) == n
    assert verify_complete(m).ok
    assert verify_complete(m.transpose_dual()).ok


def test_non_automorphism_is_rejected():
    s = from_difference_set(7, (1, 2, 4))
    with pytest.raises(ContractError):
        PermAction.from_point_perms(s, [_mult(7, 3)])


@pytest.mark.parametrize(
    "n,res,lam,m",
    [(11, (1, 3, 4, 5, 9), 2, 3), (7, (1, 2, 4), 1, 2), (13, (0, 1, 3, 9), 1, 3)],
)
def test_engine_finds_the_quotient_of_a_known_design(n, res, lam, m):
    s = from_difference_set(n, res)
    q = quotient_orbit_matrix(s, PermAction.from_point_perms(s, [_mult(n, m)]), len(res), lam)
    report = run_search(SearchSpec(DesignParams(n, len(res), lam), q.dist), workers=1)
    assert canonical_form(q) in {canonical_form(x) for x in report.matrices}


def test_oracles_refuse_oversized_work():
    params = DesignParams(121, 16, 2)
    with pytest.raises(OracleRefused):
        brute_force_row_types(TypeQuery(OrbitDistribution((1,) + (15,) * 8), 1), params, ceiling=10)
    with pytest.raises(OracleRefused):
        naive_partial_matrices(params, OrbitDistribution((1,) + (15,) * 8), 1)
