import numpy as np
import pytest

from podvs.config import EngineConfig, FrameRGB, Resolution


@pytest.fixture
def hw80_cfg():
    return EngineConfig(resolution=Resolution.HW_80)


@pytest.fixture
def hw112_cfg():
    return EngineConfig(resolution=Resolution.HW_112)


def gray_frame(width, height, value):
    return FrameRGB.from_gray(np.full((height, width), value, dtype=np.uint8))


def random_frame(width, height, rng):
    return FrameRGB.from_planes(
        rng.integers(0, 256, size=(height, width), dtype=np.uint8),
        rng.integers(0, 256, size=(height, width), dtype=np.uint8),
        rng.integers(0, 256, size=(height, width), dtype=np.uint8),
    )
