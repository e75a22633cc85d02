# Ray intersection and image sampling helpers

import math

import numba
import numpy as np

# Surface ids stored in FramePacket.face
FACE_MISS = 0
FACE_SPHERE = 7
FACE_GROUND = 8

_TINY = 1e-12


@numba.njit(cache=True)
def _safe_inverse(value):
    if abs(value) < _TINY:
        return 1.0 / _TINY if value >= 0.0 else -1.0 / _TINY
    return 1.0 / value


@numba.njit(cache=True)
def ray_intersect_box(
        box_lower,
        box_upper,
        ray_origin,
        ray_direction):
    """Compute the intersection of a ray with a box.

    Parameters
    ----------
    box_lower : tuple
        The lower corner of the box.
    box_upper : tuple
        The upper corner of the box.
    ray_origin : tuple
        The origin of the ray.
    ray_direction : tuple
        The direction of the ray.

    Returns
    -------
    t0, t1 : float
        Entry and exit distances, the ray misses when t0 > t1. t0 is
        clamped to 0 when the origin lies inside the box.
    """

    inv_x = _safe_inverse(ray_direction[0])
    inv_y = _safe_inverse(ray_direction[1])
    inv_z = _safe_inverse(ray_direction[2])

    # Get tmix and tmax
    tmin_x = (box_lower[0] - ray_origin[0]) * inv_x
    tmax_x = (box_upper[0] - ray_origin[0]) * inv_x
    tmin_y = (box_lower[1] - ray_origin[1]) * inv_y
    tmax_y = (box_upper[1] - ray_origin[1]) * inv_y
    tmin_z = (box_lower[2] - ray_origin[2]) * inv_z
    tmax_z = (box_upper[2] - ray_origin[2]) * inv_z

    # Get t0 and t1
    t0 = max(0.0, max(min(tmin_x, tmax_x), max(min(tmin_y, tmax_y), min(tmin_z, tmax_z))))
    t1 = min(max(tmin_x, tmax_x), min(max(tmin_y, tmax_y), max(tmin_z, tmax_z)))
    return t0, t1


@numba.njit(cache=True)
def ray_intersect_sphere(
        center,
        radius,
        ray_origin,
        ray_direction):
    """Compute the intersection of a unit ray with a sphere.

    Returns
    -------
    t0, t1 : float
        Near and far roots, both infinite on a miss.
    """

    oc = (ray_origin[0] - center[0], ray_origin[1] - center[1], ray_origin[2] - center[2])
    b = oc[0] * ray_direction[0] + oc[1] * ray_direction[1] + oc[2] * ray_direction[2]
    c = oc[0] * oc[0] + oc[1] * oc[1] + oc[2] * oc[2] - radius * radius
    disc = b * b - c
    if disc < 0.0:
        return math.inf, math.inf
    root = math.sqrt(disc)
    return -b - root, -b + root


@numba.njit(cache=True)
def ray_intersect_ground(ray_origin, ray_direction):
    """Distance to the plane y = 0, infinite when the ray never reaches it."""

    if ray_direction[1] < 0.0 and ray_origin[1] > 0.0:
        return -ray_origin[1] / ray_direction[1]
    return math.inf


@numba.njit(cache=True)
def box_face(offset, half_extents):
    """Face of a box hit at a body local offset.

    Returns
    -------
    face : int
        1 + 2 * axis, plus 1 on the positive side.
    normal : tuple
        Outward face normal.
    """

    best_axis = 0
    best_ratio = -1.0
    for axis in range(3):
        ratio = abs(offset[axis]) / half_extents[axis]
        if ratio > best_ratio:
            best_ratio = ratio
            best_axis = axis
    side = 1.0 if offset[best_axis] >= 0.0 else -1.0
    normal = (
        side if best_axis == 0 else 0.0,
        side if best_axis == 1 else 0.0,
        side if best_axis == 2 else 0.0,
    )
    face = 1 + 2 * best_axis + (1 if side > 0.0 else 0)
    return face, normal


def bilinear_taps(x, y, width, height):
    """
    Bilinear sampling taps at image coordinates.

    Parameters
    ----------
    x, y : ndarray
        Column and row image coordinates (pixel centers sit at +0.5).
    width, height : int
        Image size.

    Returns
    -------
    rows, cols : ndarray
        (..., 4) tap indices clipped into the image.
    weights : ndarray
        (..., 4) tap weights.
    inside : ndarray
        True where the sample point lies between pixel centers.
    """

    gx = np.asarray(x, dtype=np.float64) - 0.5
    gy = np.asarray(y, dtype=np.float64) - 0.5
    j0 = np.floor(gx)
    i0 = np.floor(gy)
    dx = gx - j0
    dy = gy - i0
    inside = (gx >= 0) & (gx <= width - 1) & (gy >= 0) & (gy <= height - 1)

    j0 = np.nan_to_num(j0, nan=0.0, posinf=0.0, neginf=0.0).astype(np.int64)
    i0 = np.nan_to_num(i0, nan=0.0, posinf=0.0, neginf=0.0).astype(np.int64)
    cols = np.clip(np.stack([j0, j0 + 1, j0, j0 + 1], axis=-1), 0, width - 1)
    rows = np.clip(np.stack([i0, i0, i0 + 1, i0 + 1], axis=-1), 0, height - 1)
    weights = np.stack([(1 - dx) * (1 - dy), dx * (1 - dy), (1 - dx) * dy, dx * dy], axis=-1)
    weights = np.nan_to_num(weights)
    return rows, cols, weights, inside


def sample_bilinear(image, rows, cols, weights):
    """ Interpolate an (h, w, C) image at precomputed taps """
    taps = image[rows, cols]
    return np.sum(taps * weights[..., None], axis=-2)
