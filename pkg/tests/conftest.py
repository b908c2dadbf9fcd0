import numpy as np
import pytest

import freesub


@pytest.fixture(scope="session")
def standard_line_measures():
    """The five line measures exercised throughout the suite."""
    return {
        "semicircle": freesub.semicircle(0, 1),
        "bernoulli": freesub.bernoulli_pm1(),
        "arcsine": freesub.arcsine(),
        "marchenko_pastur": freesub.marchenko_pastur(1.0),
        "atomic": freesub.atomic([(-2.0, 1 / 3), (0.0, 1 / 3), (1.0, 1 / 3)]),
    }


@pytest.fixture(scope="session")
def line_pairs(standard_line_measures):
    names = list(standard_line_measures)
    return [(standard_line_measures[a], standard_line_measures[b])
            for i, a in enumerate(names) for b in names[i + 1:]]


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)
