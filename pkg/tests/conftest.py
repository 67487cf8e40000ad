import numpy as np
import pytest

from mocapcodec import MocapSequence


def make_sequence(rng, n, f, scale=1.0, smooth=False, frame_rate=None):
    """Random test sequence; smooth=True gives slowly varying rows."""
    if smooth:
        t = np.linspace(0.0, 1.0, f)
        waves = np.stack(
            [np.sin(2 * np.pi * (m + 1) * t + rng.uniform(0, 2 * np.pi)) for m in range(4)]
        )
        data = scale * rng.standard_normal((3 * n, 4)) @ waves
        data += 0.01 * scale * rng.standard_normal((3 * n, f))
    else:
        data = scale * rng.standard_normal((3 * n, f))
    return MocapSequence(n, f, data, frame_rate=frame_rate)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
