import numpy as np
import pytest

from eestim import (
    build_crf,
    build_ising1d_periodic,
    build_ising2d,
    build_mini_ergm,
    build_vbm,
)


def rng(seed: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed)


def family_zoo(size: str = "small") -> dict:
    """One instance per model family; 'small' keeps every family at <= 4 sites."""
    if size == "small":
        y = rng(5).standard_normal((2, 2))
        return {
            "ising2d": build_ising2d(2, 2, include_field=True),
            "ising1d": build_ising1d_periodic(4),
            "vbm": build_vbm(4),
            "crf": build_crf(y, 2, 2),
            "ergm": build_mini_ergm(2),
        }
    y = rng(6).standard_normal((6, 6))
    return {
        "ising2d": build_ising2d(4, 4, include_field=True),
        "ising1d": build_ising1d_periodic(9),
        "vbm": build_vbm(7),
        "crf": build_crf(y, 6, 6),
        "ergm": build_mini_ergm(5),
    }


@pytest.fixture
def small_zoo():
    return family_zoo("small")


@pytest.fixture
def medium_zoo():
    return family_zoo("medium")
