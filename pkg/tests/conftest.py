import numpy as np
import pytest

from fusionframes.frames import FusionSequence

S2 = 1 / np.sqrt(2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def two_lines():
    """span(e1) and span((1,1)/sqrt 2) in C^2 with unit weights."""
    return FusionSequence.from_bases([[[1.0], [0.0]], [[S2], [S2]]])


@pytest.fixture
def coord_split2():
    return FusionSequence.from_bases([[[1.0], [0.0]], [[0.0], [1.0]]])
