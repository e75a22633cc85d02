# Quadmask and trimask composition

import numpy as np

from voidforge.errors import ShapeMismatch
from voidforge.masks.grid import gridify
from voidforge.masks.sequences import BinaryMaskSeq, Label, MaskRole, QuadMask


def compose_quadmask(object_mask, affected):
    """
    Four way labelling of target and affected masks.

    Parameters
    ----------
    object_mask : BinaryMaskSeq
        M_o.
    affected : BinaryMaskSeq
        M_a.

    Returns
    -------
    QuadMask
        BLACK on M_o only, DARK_GREY on both, LIGHT_GREY on M_a only, WHITE elsewhere.
    """

    if object_mask.shape != affected.shape:
        raise ShapeMismatch(f"mask shapes differ: {object_mask.shape} vs {affected.shape}")
    o = object_mask.frames
    a = affected.frames
    labels = np.full(o.shape, Label.WHITE, dtype=np.uint8)
    labels[o & ~a] = Label.BLACK
    labels[o & a] = Label.DARK_GREY
    labels[~o & a] = Label.LIGHT_GREY
    return QuadMask(labels)


def compose_trimask(object_mask):
    """ BLACK on the targets and LIGHT_GREY everywhere else """
    labels = np.where(object_mask.frames, np.uint8(Label.BLACK), np.uint8(Label.LIGHT_GREY))
    return QuadMask(labels)


def affected_union(orig, count, grid, grid_orig=True):
    """
    Affected region M_a from the original-position mask and the
    counterfactual-position mask.

    Parameters
    ----------
    orig : BinaryMaskSeq
        Affected objects at their factual positions, pixel level.
    count : BinaryMaskSeq
        Counterfactual positions, already on the grid.
    grid : int
        Cells per side.
    grid_orig : bool
        Gridify orig before the union.

    Returns
    -------
    BinaryMaskSeq
    """

    if grid_orig:
        orig = gridify(orig, grid)
    return BinaryMaskSeq((orig | count).frames, MaskRole.AFFECTED_UNION)
