from __future__ import annotations

from importlib import resources

import pytest

from omf.design import DesignParams, OrbitDistribution
from omf.matrixio import parse_matrix_set

BIPLANE = DesignParams(121, 16, 2)

DIST = {
    "o13": (1,) * 4 + (13,) * 9,
    "o11": (11,) * 11,
    "o7": (1, 1) + (7,) * 17,
    "o5": (1,) + (5,) * 24,
    "frob21": (1, 1) + (7,) * 5 + (21,) * 4,
    "z15": (1,) + (15,) * 8,
    "d14a": (1, 1) + (7,) * 7 + (14,) * 5,
    "d14b": (1, 1) + (7,) * 11 + (14,) * 3,
    "d10a": (1,) + (5,) * 8 + (10,) * 8,
}


def dist(name: str) -> OrbitDistribution:
    return OrbitDistribution(DIST[name])


def golden(name: str):
    text = resources.files("omf").joinpath("golden", name).read_text(encoding="ascii")
    return parse_matrix_set(text)


GOLDEN_VALID = [
    "o13_fixed_blocks.txt",
    "o13_fixed_point_blocks.txt",
    "o13_nine_rows.txt",
    "o7_fixed_point_blocks.txt",
    "o5_fixed_point_blocks.txt",
    "frob21_complete.txt",
    "z15_reconciled.txt",
]


@pytest.fixture(scope="session")
def biplane() -> DesignParams:
    return BIPLANE
