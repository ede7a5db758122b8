import numpy as np
import pytest

from rirkit import DirectedEndpoint, RoomSpec

# canonical demo geometry used across the suite
BETAS = (0.96, 0.8, 0.96, 0.9, 0.5, 0.5)
SRC_POS = (3.0, 3.0, 1.0)
MIC_POS = (1.5, 1.5, 1.0)
ANCHORS_FACING = ((3.1, 3.1, 1.0), (2.9, 3.1, 1.0))
ANCHORS_90 = ((3.1, 2.9, 1.0), (2.9, 2.9, 1.0))
ANCHORS_180 = ((2.9, 2.9, 1.0), (2.9, 3.1, 1.0))


@pytest.fixture
def room():
    return RoomSpec(4.0, 4.0, 4.0, BETAS, c=340.0, f_s=16000.0)


@pytest.fixture
def dead_room():
    # all reflections absorbed: only the direct path survives
    return RoomSpec(4.0, 4.0, 4.0, (0.0,) * 6, c=340.0, f_s=16000.0)


@pytest.fixture
def source_facing():
    return DirectedEndpoint(SRC_POS, *ANCHORS_FACING)


@pytest.fixture
def mic_endpoint():
    return DirectedEndpoint(MIC_POS, (1.5, 1.5, 0.9), (1.4, 1.5, 1.0))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
