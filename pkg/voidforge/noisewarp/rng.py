# Base Gaussian noise

import numpy as np

from voidforge.errors import RangeError
from voidforge.scene.seeding import STREAM_NOISE, stream_rng


def sample_base_noise(seed, shape, t=0):
    """
    Standard normal noise for one frame.

    Each channel draws from its own Philox stream keyed by (seed, channel,
    frame), filled in row-major pixel order, so values are reproducible from
    the key alone.

    Parameters
    ----------
    seed : int
        64-bit seed.
    shape : tuple
        (h, w, C).
    t : int
        Frame index, 0 for the base frame.

    Returns
    -------
    ndarray
        (h, w, C) float32.
    """

    height, width, channels = shape
    if height < 1 or width < 1 or channels < 1:
        raise RangeError(f"noise shape must be positive, got {shape}")
    if not 0 <= t < (1 << 24):
        raise RangeError(f"frame index must lie in [0, 2**24), got {t}")

    noise = np.empty((height, width, channels), dtype=np.float32)
    for c in range(channels):
        rng = stream_rng(seed, STREAM_NOISE, (c << 24) | t)
        noise[..., c] = rng.standard_normal((height, width), dtype=np.float32)
    return noise
