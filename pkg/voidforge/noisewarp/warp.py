# Flow-warped noise volumes
#
# Frames are chained by a nearest-cell forward splat: every source pixel
# lands in round(p + uv), a destination receiving n values takes their sum
# divided by sqrt(n), and destinations receiving nothing take fresh noise.
# Sources are never duplicated, so every output value is a normalized sum of
# disjoint sets of independent normals and stays standard normal.

import logging

import numpy as np

from voidforge.buffers import FlowField
from voidforge.errors import IndivisibleResolution, RangeError, ShapeMismatch
from voidforge.noisewarp.rng import sample_base_noise

logger = logging.getLogger(__name__)


class NoiseVolume:
    """
    Temporally correlated Gaussian noise.

    Parameters
    ----------
    frames : ndarray
        (T, h, w, C) float32.
    seed : int
        Seed the volume was drawn from.
    flow_downsample : int
        Render to noise resolution factor k.
    """

    def __init__(self, frames, seed, flow_downsample=1):
        frames = np.array(frames, dtype=np.float32)
        if frames.ndim != 4:
            raise ShapeMismatch(f"noise volume must be (T, h, w, C), got {frames.shape}")
        frames.setflags(write=False)
        self.frames = frames
        self.seed = int(seed)
        self.flow_downsample = int(flow_downsample)

    @property
    def shape(self):
        return self.frames.shape

    def __len__(self):
        return self.frames.shape[0]

    def __eq__(self, other):
        return isinstance(other, NoiseVolume) and np.array_equal(self.frames, other.frames)

    __hash__ = None


def downsample_flow(flow, k):
    """
    Average flow over k x k blocks in coarse pixel units.

    Parameters
    ----------
    flow : FlowField
        Full resolution flow.
    k : int
        Block size, must divide both dimensions.

    Returns
    -------
    FlowField
        Block mean / k, valid only where the whole block is valid.
    """

    if k < 1:
        raise RangeError(f"downsample factor must be at least 1, got {k}")
    height, width = flow.height, flow.width
    if height % k or width % k:
        raise IndivisibleResolution(f"factor {k} does not divide resolution {width}x{height}")
    if k == 1:
        return flow

    blocks = flow.uv.astype(np.float64).reshape(height // k, k, width // k, k, 2)
    uv = blocks.mean(axis=(1, 3)) / k
    valid = flow.valid.reshape(height // k, k, width // k, k).all(axis=(1, 3))
    return FlowField(uv.astype(np.float32), valid)


def warp_noise(prev, flow, seed, t):
    """
    Forward splat one noise frame along a flow.

    Parameters
    ----------
    prev : ndarray
        (h, w, C) noise at frame t-1.
    flow : FlowField
        Flow at noise resolution.
    seed : int
        Seed of the fresh fill.
    t : int
        Index of the frame being produced.

    Returns
    -------
    ndarray
        (h, w, C) float32.
    """

    prev = np.asarray(prev)
    height, width, channels = prev.shape
    if (flow.height, flow.width) != (height, width):
        raise ShapeMismatch(f"flow size {flow.width}x{flow.height} != noise size {width}x{height}")

    # Destination cell of every source pixel, row-major source order
    rows, cols = np.indices((height, width))
    uv = flow.uv.astype(np.float64)
    with np.errstate(invalid="ignore"):
        dest_col = np.floor(cols + uv[..., 0] + 0.5)
        dest_row = np.floor(rows + uv[..., 1] + 0.5)
        landed = flow.valid & np.isfinite(dest_col) & np.isfinite(dest_row)
        landed &= (dest_col >= 0) & (dest_col < width) & (dest_row >= 0) & (dest_row < height)

    source = np.flatnonzero(landed)
    target = (dest_row.ravel()[source] * width + dest_col.ravel()[source]).astype(np.int64)

    # Variance preserving aggregation
    sums = np.zeros((height * width, channels), dtype=np.float64)
    np.add.at(sums, target, prev.reshape(-1, channels)[source].astype(np.float64))
    counts = np.bincount(target, minlength=height * width)

    fresh = sample_base_noise(seed, (height, width, channels), t).reshape(-1, channels)
    out = fresh.astype(np.float64)
    hit = counts > 0
    out[hit] = sums[hit] / np.sqrt(counts[hit])[:, None]
    return out.reshape(height, width, channels).astype(np.float32)


def warp_volume(flows, seed, shape, k=1):
    """
    Noise volume whose frames follow a flow sequence.

    Parameters
    ----------
    flows : sequence of FlowField
        T-1 flows at render resolution.
    seed : int
        64-bit seed.
    shape : tuple
        (T, h', w', C) of the volume, h' and w' at noise resolution.
    k : int
        Render to noise resolution factor.

    Returns
    -------
    NoiseVolume
    """

    count, height, width, channels = shape
    if len(flows) != count - 1:
        raise ShapeMismatch(f"{count} frames need {count - 1} flows, got {len(flows)}")

    frames = np.empty((count, height, width, channels), dtype=np.float32)
    frames[0] = sample_base_noise(seed, (height, width, channels))
    fresh = 0
    for t, flow in enumerate(flows):
        coarse = downsample_flow(flow, k)
        frames[t + 1] = warp_noise(frames[t], coarse, seed, t + 1)
        fresh += int(np.count_nonzero(~coarse.valid))
    logger.debug("Warped %d noise frames, %d invalid flow cells", count, fresh)
    return NoiseVolume(frames, seed, k)
