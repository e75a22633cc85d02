# Coarse grid operations

import numpy as np

from voidforge.errors import RangeError
from voidforge.masks.sequences import BinaryMaskSeq, MaskRole


def cell_size(height, width, grid):
    """ Pixel size (rows, cols) of one cell, edge cells are clipped """
    if grid < 1:
        raise RangeError(f"grid must be at least 1, got {grid}")
    return -(-height // grid), -(-width // grid)


def occupied_cells(frames, grid):
    """
    Cells that contain at least one set pixel.

    Parameters
    ----------
    frames : ndarray
        (T, h, w) booleans.
    grid : int
        Cells per side.

    Returns
    -------
    ndarray
        (T, grid, grid) booleans.
    """

    frames = np.asarray(frames, dtype=bool)
    count, height, width = frames.shape
    cell_h, cell_w = cell_size(height, width, grid)
    padded = np.zeros((count, grid * cell_h, grid * cell_w), dtype=bool)
    padded[:, :height, :width] = frames
    return padded.reshape(count, grid, cell_h, grid, cell_w).any(axis=(2, 4))


def rasterize_cells(cells, height, width):
    """
    Paint (T, G, G) cell flags back to (T, h, w) pixels.
    """

    cells = np.asarray(cells, dtype=bool)
    grid = cells.shape[1]
    cell_h, cell_w = cell_size(height, width, grid)
    pixels = np.repeat(np.repeat(cells, cell_h, axis=1), cell_w, axis=2)
    return pixels[:, :height, :width]


def cell_lists(frames, grid):
    """ Per frame sorted [row, col] lists of occupied cells """
    return [[[int(r), int(c)] for r, c in zip(*np.nonzero(frame))] for frame in occupied_cells(frames, grid)]


def cells_to_flags(cell_lists_per_frame, grid):
    """ Inverse of cell_lists, (T, G, G) booleans """
    flags = np.zeros((len(cell_lists_per_frame), grid, grid), dtype=bool)
    for t, cells in enumerate(cell_lists_per_frame):
        for row, col in cells:
            flags[t, row, col] = True
    return flags


def gridify(mask, grid):
    """
    Coarsen a mask to a grid where any set pixel sets its whole cell.

    Parameters
    ----------
    mask : BinaryMaskSeq
        Mask to coarsen.
    grid : int
        Cells per side G.

    Returns
    -------
    BinaryMaskSeq
        Same role and shape, set on every occupied cell.
    """

    _, height, width = mask.shape
    return BinaryMaskSeq(rasterize_cells(occupied_cells(mask.frames, grid), height, width), mask.role)
