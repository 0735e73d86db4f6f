import random

from hypothesis import given, settings
from hypothesis import strategies as st

from omf.canon import canonical_form, canonical_matrix, canonical_rows, is_canonical
from omf.design import DesignParams, OrbitDistribution, PartialOrbitMatrix
from omf.oracle import _column_perms, brute_canonical

from conftest import golden


def _shuffle(m: PartialOrbitMatrix, rng: random.Random) -> PartialOrbitMatrix:
    """Random class-preserving row and column permutation of ``m``."""
    cols = list(range(m.dist.t))
    for w, members in m.dist.column_classes():
        perm = members[:]
        rng.shuffle(perm)
        for a, b in zip(members, perm):
            cols[a] = b
    rows = list(range(m.s))
    by_class: dict[int, list[int]] = {}
    for i, Om in enumerate(m.row_orbits):
        by_class.setdefault(Om, []).append(i)
    for members in by_class.values():
        perm = members[:]
        rng.shuffle(perm)
        for a, b in zip(members, perm):
            rows[a] = b
    gamma = tuple(tuple(m.gamma[rows[i]][cols[r]] for r in range(m.dist.t)) for i in range(m.s))
    return PartialOrbitMatrix(gamma, m.dist, m.row_orbits, m.params, m.status)


def test_column_swap_gives_identical_key():
    m = golden("o13_nine_rows.txt")[0]
    g = [list(r) for r in m.gamma]
    for row in g:
        row[5], row[6] = row[6], row[5]
    swapped = PartialOrbitMatrix(tuple(map(tuple, g)), m.dist, m.row_orbits, m.params)
    assert canonical_form(swapped) == canonical_form(m)


def test_idempotent_and_fixed_on_canonical():
    for m in golden("o7_fixed_point_blocks.txt"):
        c = canonical_matrix(m)
        assert is_canonical(c)
        assert canonical_matrix(c) == c


def test_distinct_order7_matrices_have_distinct_keys():
    ms = golden("o7_fixed_point_blocks.txt")
    keys = {canonical_form(m) for m in ms}
    assert len(keys) == 8
    assert canonical_form(ms[0]) != canonical_form(ms[1])


def test_shuffles_share_a_key():
    rng = random.Random(7)
    for name in ("frob21_complete.txt", "z15_reconciled.txt", "o5_fixed_point_blocks.txt"):
        for m in golden(name):
            key = canonical_form(m)
            for _ in range(5):
                assert canonical_form(_shuffle(m, rng)) == key


@st.composite
def small_matrices(draw):
    omega = tuple(sorted(draw(st.lists(st.sampled_from([1, 2, 3]), min_size=2, max_size=6))))
    s = draw(st.integers(1, 5))
    orbits = tuple(sorted(draw(st.lists(st.sampled_from([1, 2]), min_size=s, max_size=s))))
    gamma = tuple(
        tuple(draw(st.integers(0, 3)) for _ in omega) for _ in range(s)
    )
    # validity is irrelevant for the canonizer; the params just need to exist
    params = DesignParams(7, 4, 2)
    dist = OrbitDistribution(omega, omega)
    return PartialOrbitMatrix(gamma, dist, orbits, params, "partial")


@settings(max_examples=200, deadline=None)
@given(small_matrices(), st.randoms(use_true_random=False))
def test_refinement_canonizer_matches_brute_force(m, rnd):
    perms = _column_perms(m.dist.omega)
    expected = brute_canonical(m.gamma, m.row_orbits, perms)
    assert canonical_rows(m.gamma, m.row_orbits, m.dist.omega) == expected
    shuffled = _shuffle(m, rnd)
    assert canonical_rows(shuffled.gamma, shuffled.row_orbits, m.dist.omega) == expected
