# Classes that store per-pixel render outputs

import numpy as np

from voidforge.errors import ShapeMismatch


def _freeze(array):
    array = np.array(array)
    array.setflags(write=False)
    return array


class FramePacket:
    """
    Per-pixel outputs of one rendered frame.
    All arrays are (height, width, ...) and read only once built.

    Parameters
    ----------
    rgb : ndarray
        (h, w, 3) float32 shaded color in [0, 1].
    instance : ndarray
        (h, w) uint8 body id, 0 for ground and background.
    depth : ndarray
        (h, w) float64 ray distance in meters, +inf on a miss.
    shadow : ndarray
        (h, w) bool, True where the light is occluded.
    hit_offset : ndarray
        (h, w, 3) float64 hit point relative to the hit body center, the
        world point itself on the ground.
    face : ndarray
        (h, w) uint8 surface id: 0 miss, 1-6 box faces, 7 sphere, 8 ground.
    """

    def __init__(self, rgb, instance, depth, shadow, hit_offset, face):
        self.rgb = _freeze(np.asarray(rgb, dtype=np.float32))
        self.instance = _freeze(np.asarray(instance, dtype=np.uint8))
        self.depth = _freeze(np.asarray(depth, dtype=np.float64))
        self.shadow = _freeze(np.asarray(shadow, dtype=bool))
        self.hit_offset = _freeze(np.asarray(hit_offset, dtype=np.float64))
        self.face = _freeze(np.asarray(face, dtype=np.uint8))

        shape = self.instance.shape
        for name in ("depth", "shadow", "face"):
            if getattr(self, name).shape != shape:
                raise ShapeMismatch(f"{name} shape {getattr(self, name).shape} != instance shape {shape}")
        for name in ("rgb", "hit_offset"):
            if getattr(self, name).shape != shape + (3,):
                raise ShapeMismatch(f"{name} shape {getattr(self, name).shape} != {shape + (3,)}")

    @staticmethod
    def empty(height, width):
        """ Create the buffers of a frame before rendering, all pixels missing """
        return {
            "rgb": np.zeros((height, width, 3), dtype=np.float32),
            "instance": np.zeros((height, width), dtype=np.uint8),
            "depth": np.full((height, width), np.inf, dtype=np.float64),
            "shadow": np.zeros((height, width), dtype=bool),
            "hit_offset": np.zeros((height, width, 3), dtype=np.float64),
            "face": np.zeros((height, width), dtype=np.uint8),
        }

    @property
    def height(self):
        return self.instance.shape[0]

    @property
    def width(self):
        return self.instance.shape[1]

    @property
    def hit(self):
        """ Pixels whose primary ray hit a body or the ground """
        return np.isfinite(self.depth)

    @property
    def surface(self):
        """ Surface class per pixel, face * 2 + shadow bit """
        return (self.face.astype(np.uint8) * 2 + self.shadow.astype(np.uint8)).astype(np.uint8)

    def __eq__(self, other):
        return isinstance(other, FramePacket) and all(
            np.array_equal(getattr(self, name), getattr(other, name))
            for name in ("rgb", "instance", "depth", "shadow", "hit_offset", "face")
        )

    __hash__ = None


class FlowField:
    """
    Displacement of each pixel's surface point from frame t to t+1.

    Parameters
    ----------
    uv : ndarray
        (h, w, 2) float32, uv[..., 0] along columns and uv[..., 1] along rows.
    valid : ndarray
        (h, w) bool, False where the point vanishes or leaves the image.
    """

    def __init__(self, uv, valid):
        self.uv = _freeze(np.asarray(uv, dtype=np.float32))
        self.valid = _freeze(np.asarray(valid, dtype=bool))
        if self.uv.shape != self.valid.shape + (2,):
            raise ShapeMismatch(f"uv shape {self.uv.shape} does not match valid shape {self.valid.shape}")

    @staticmethod
    def zeros(height, width, valid=True):
        """ Zero flow, e.g. for a static scene under a static camera """
        return FlowField(np.zeros((height, width, 2), dtype=np.float32), np.full((height, width), valid))

    @property
    def height(self):
        return self.valid.shape[0]

    @property
    def width(self):
        return self.valid.shape[1]

    def __eq__(self, other):
        return (
            isinstance(other, FlowField)
            and np.array_equal(self.uv, other.uv)
            and np.array_equal(self.valid, other.valid)
        )

    __hash__ = None
