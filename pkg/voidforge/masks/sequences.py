# Mask sequence types

from enum import Enum, IntEnum

import numpy as np

from voidforge.errors import ShapeMismatch


class MaskRole(Enum):
    OBJECT = "ObjectMask"
    AFFECTED_ORIG = "AffectedOrig"
    AFFECTED_COUNT = "AffectedCount"
    AFFECTED_UNION = "AffectedUnion"


class Label(IntEnum):
    """ Quadmask labels and their persisted byte values """
    BLACK = 0
    DARK_GREY = 85
    LIGHT_GREY = 170
    WHITE = 255


LABEL_VALUES = tuple(int(label) for label in Label)


class BinaryMaskSeq:
    """
    A boolean mask per frame.

    Parameters
    ----------
    frames : ndarray
        (T, h, w) booleans.
    role : MaskRole
        What the mask marks.
    """

    def __init__(self, frames, role=MaskRole.AFFECTED_UNION):
        frames = np.array(frames, dtype=bool)
        if frames.ndim != 3:
            raise ShapeMismatch(f"mask sequence must be (T, h, w), got shape {frames.shape}")
        frames.setflags(write=False)
        self.frames = frames
        self.role = MaskRole(role)

    @property
    def shape(self):
        return self.frames.shape

    def __len__(self):
        return self.frames.shape[0]

    def __or__(self, other):
        _check_aligned(self, other)
        return BinaryMaskSeq(self.frames | other.frames, MaskRole.AFFECTED_UNION)

    def __eq__(self, other):
        return isinstance(other, BinaryMaskSeq) and np.array_equal(self.frames, other.frames)

    __hash__ = None

    def __repr__(self):
        return f"BinaryMaskSeq(shape={self.shape}, role={self.role.value}, set={int(self.frames.sum())})"


class QuadMask:
    """
    Per frame labels in {BLACK, DARK_GREY, LIGHT_GREY, WHITE}.

    Parameters
    ----------
    frames : ndarray
        (T, h, w) uint8 label values.
    """

    def __init__(self, frames):
        frames = np.array(frames, dtype=np.uint8)
        if frames.ndim != 3:
            raise ShapeMismatch(f"quadmask must be (T, h, w), got shape {frames.shape}")
        frames.setflags(write=False)
        self.frames = frames

    @property
    def shape(self):
        return self.frames.shape

    def __len__(self):
        return self.frames.shape[0]

    def histogram(self):
        """ Pixel count per label """
        return {label.name: int(np.count_nonzero(self.frames == label)) for label in Label}

    def __eq__(self, other):
        return isinstance(other, QuadMask) and np.array_equal(self.frames, other.frames)

    __hash__ = None


def _check_aligned(a, b):
    if a.shape != b.shape:
        raise ShapeMismatch(f"mask shapes differ: {a.shape} vs {b.shape}")
