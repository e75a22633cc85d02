# Seed mixing and counter-based random streams
#
# scene_seed = splitmix64(master_seed + (scene_index + 1) * 0x9E3779B97F4A7C15)
#
# which is the (scene_index + 1)-th output of a splitmix64 generator seeded
# with master_seed. All randomness below a scene seed comes from numpy's
# Philox counter-based generator keyed by (seed, stream), so every stream is
# reproducible on its own and independent of call order.

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

# Stream ids, one per consumer
STREAM_BODIES = 1
STREAM_CAMERA = 2
STREAM_LIGHT = 3
STREAM_TARGETS = 4
STREAM_SPLIT = 5
STREAM_NOISE = 16


def splitmix64(state):
    """
    Finalize a 64-bit state with the splitmix64 avalanche function.

    Parameters
    ----------
    state : int
        Any integer, reduced modulo 2**64.

    Returns
    -------
    int
        Mixed 64-bit value.
    """

    z = state & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix_seed(master_seed, scene_index):
    """
    Combine a master seed and a scene index into a 64-bit scene seed.

    Parameters
    ----------
    master_seed : int
        Seed of the whole dataset.
    scene_index : int
        Index of the scene inside the dataset.

    Returns
    -------
    int
        The scene seed.
    """

    return splitmix64((master_seed & MASK64) + (scene_index + 1) * GOLDEN_GAMMA)


def stream_rng(seed, stream, substream=0):
    """
    Random generator keyed by (seed, stream, substream).

    Parameters
    ----------
    seed : int
        64-bit seed.
    stream : int
        Consumer id, one of the STREAM_* constants.
    substream : int
        Extra key word, e.g. a frame index.

    Returns
    -------
    numpy.random.Generator
    """

    key = np.array([seed & MASK64, ((stream & 0xFFFFFFFF) << 32) | (substream & 0xFFFFFFFF)],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def unit_interval(seed, stream):
    """ Deterministic value in [0, 1) derived from a seed """
    return splitmix64(seed ^ splitmix64(stream)) / float(1 << 64)
