# Pinhole ray generation

import numba

from voidforge.utils.math import normalize


@numba.njit(cache=True)
def calculate_ray_direction(
        x,
        y,
        width,
        height,
        focal,
        camera_forward,
        camera_right,
        camera_up):
    """
    Calculate the direction of a ray from the camera through a pixel center.

    Parameters
    ----------
    x : int
        The column of the pixel.
    y : int
        The row of the pixel.
    width : int
        The width of the image.
    height : int
        The height of the image.
    focal : float
        The focal length in pixels.
    camera_forward : tuple
        The viewing direction of the camera.
    camera_right : tuple
        The image x axis.
    camera_up : tuple
        The image y axis, pointing up.

    Returns
    -------
    ray_direction : tuple
    """

    # Offset of the pixel center from the principal point
    s = (x + 0.5) - width / 2.0
    t = height / 2.0 - (y + 0.5)

    # Point on the image plane at distance focal
    ray_direction = (
        focal * camera_forward[0] + s * camera_right[0] + t * camera_up[0],
        focal * camera_forward[1] + s * camera_right[1] + t * camera_up[1],
        focal * camera_forward[2] + s * camera_right[2] + t * camera_up[2],
    )
    return normalize(ray_direction)
