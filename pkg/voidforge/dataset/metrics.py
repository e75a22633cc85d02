# Fidelity metrics

import math

import numpy as np

from voidforge.errors import ShapeMismatch
from voidforge.render.utils import bilinear_taps, sample_bilinear

# Stand-in for an infinite PSNR in JSON output
PSNR_SENTINEL = 99.0


def psnr(a, b):
    """
    Peak signal to noise ratio of [0, 1] images or sequences.

    Parameters
    ----------
    a, b : ndarray
        Arrays of the same shape.

    Returns
    -------
    float
        Decibels, math.inf for identical inputs.
    """

    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeMismatch(f"psnr inputs differ in shape: {a.shape} vs {b.shape}")
    mse = float(np.mean((a - b) ** 2)) if a.size else 0.0
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def serialize_psnr(value):
    """ JSON friendly PSNR, infinity becomes the sentinel """
    return PSNR_SENTINEL if math.isinf(value) else float(value)


def mask_iou(a, b):
    """
    Intersection over union of two masks.

    Parameters
    ----------
    a, b : BinaryMaskSeq or ndarray
        Masks of the same shape.

    Returns
    -------
    float
        1.0 when both masks are empty.
    """

    a = np.asarray(getattr(a, "frames", a), dtype=bool)
    b = np.asarray(getattr(b, "frames", b), dtype=bool)
    if a.shape != b.shape:
        raise ShapeMismatch(f"mask_iou inputs differ in shape: {a.shape} vs {b.shape}")
    union = np.count_nonzero(a | b)
    if union == 0:
        return 1.0
    return np.count_nonzero(a & b) / union


def flow_warp_psnr(frame_t, frame_t1, flow, instance_t, instance_t1, surface_t, surface_t1):
    """
    PSNR of frame t against frame t+1 inverse warped along the flow.

    Only pixels whose flow is valid and whose four bilinear taps at t+1 show
    the same instance and surface class as the source pixel are compared,
    which leaves out occlusions, disocclusions and shadow edges.

    Parameters
    ----------
    frame_t, frame_t1 : ndarray
        (h, w, 3) images in [0, 1].
    flow : FlowField
        Flow from t to t+1.
    instance_t, instance_t1 : ndarray
        (h, w) instance maps.
    surface_t, surface_t1 : ndarray
        (h, w) surface classes.

    Returns
    -------
    value : float or None
        Decibels, None when no pixel qualifies.
    pixels : int
        Number of compared pixels.
    """

    height, width = flow.valid.shape
    rows, cols = np.indices((height, width))
    x = cols + 0.5 + flow.uv[..., 0].astype(np.float64)
    y = rows + 0.5 + flow.uv[..., 1].astype(np.float64)
    tap_rows, tap_cols, weights, inside = bilinear_taps(x, y, width, height)

    compared = flow.valid & inside
    compared &= np.all(instance_t1[tap_rows, tap_cols] == instance_t[..., None], axis=-1)
    compared &= np.all(surface_t1[tap_rows, tap_cols] == surface_t[..., None], axis=-1)
    pixels = int(np.count_nonzero(compared))
    if pixels == 0:
        return None, 0

    warped = sample_bilinear(np.asarray(frame_t1, dtype=np.float64), tap_rows, tap_cols, weights)
    return psnr(warped[compared], np.asarray(frame_t, dtype=np.float64)[compared]), pixels
