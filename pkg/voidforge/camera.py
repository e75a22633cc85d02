# Camera class

import math

import numpy as np

from voidforge.errors import RangeError
from voidforge.scene.spec import DOLLY
from voidforge.utils.math import cross, dot, length, normalize, scale, sub

WORLD_UP = (0.0, 1.0, 0.0)
BACKGROUND_COLOR = (0.4, 0.4, 0.55)  # Paraview default


class CameraPose:
    """
    This class represents a pinhole camera at one instant.

    Parameters
    ----------
    eye : tuple
        The position of the camera in the scene.
    look_at : tuple
        The point that the camera is looking at.
    up : tuple
        The up vector of the camera.
    focal : float
        The focal length in pixels.
    resolution : tuple
        (width, height) of the camera image.
    background : tuple
        Color of rays that hit nothing.
    """

    def __init__(
            self,
            eye=(0.0, 1.6, 3.4),
            look_at=(0.0, 0.2, 0.0),
            up=WORLD_UP,
            focal=140.0,
            resolution=(128, 128),
            background=BACKGROUND_COLOR,
            ):

        self.eye = tuple(float(e) for e in eye)
        self.look_at = tuple(float(c) for c in look_at)
        self.up = tuple(float(u) for u in up)
        self.focal = float(focal)
        self.width = int(resolution[0])
        self.height = int(resolution[1])
        self.background = tuple(float(c) for c in background)

        if self.eye == self.look_at:
            raise RangeError(f"camera eye and look_at coincide at {self.eye}")
        if not self.focal > 0.0:
            raise RangeError(f"focal length must be positive, got {self.focal}")

    @property
    def resolution(self):
        return (self.width, self.height)

    def basis(self):
        """
        Orthonormal camera frame.

        Returns
        -------
        forward, right, up : tuple
            Viewing direction, image x axis and image y axis (pointing up).
        """

        forward = normalize(sub(self.look_at, self.eye))
        right = cross(forward, self.up)
        if length(right) < 1e-12:
            # Looking along the up vector, any horizontal axis works
            right = (1.0, 0.0, 0.0)
        right = normalize(right)
        up = cross(right, forward)
        return forward, right, up

    def project(self, points):
        """
        Project world points to image coordinates.

        Parameters
        ----------
        points : ndarray
            (..., 3) world coordinates.

        Returns
        -------
        u, v : ndarray
            Column and row image coordinates, pixel (i, j) has its center at
            (j + 0.5, i + 0.5).
        z : ndarray
            Depth along the viewing direction, positive in front of the camera.
        """

        forward, right, up = self.basis()
        relative = np.asarray(points, dtype=np.float64) - np.array(self.eye)
        x = relative @ np.array(right)
        y = relative @ np.array(up)
        z = relative @ np.array(forward)
        with np.errstate(divide="ignore", invalid="ignore"):
            u = 0.5 * self.width + self.focal * x / z
            v = 0.5 * self.height - self.focal * y / z
        return u, v, z

    def __repr__(self):
        return f"CameraPose(eye={self.eye}, look_at={self.look_at}, focal={self.focal})"


def _lerp(a, b, t):
    return a + (b - a) * t


def camera_at(trajectory, t_frac, resolution=(128, 128)):
    """
    Camera pose along a trajectory.

    Parameters
    ----------
    trajectory : CameraTrajectorySpec
        The camera path.
    t_frac : float
        Position along the clip in [0, 1].
    resolution : tuple
        (width, height) of the image.

    Returns
    -------
    CameraPose
    """

    if not 0.0 <= t_frac <= 1.0:
        raise RangeError(f"t_frac must lie in [0, 1], got {t_frac}")

    radius = _lerp(trajectory.radius0, trajectory.radius1, t_frac)
    focal = _lerp(trajectory.focal0, trajectory.focal1, t_frac)
    if trajectory.mode == DOLLY:
        # Slide along the initial view axis
        offset = (
            trajectory.radius0 * math.cos(trajectory.angle0),
            trajectory.height0,
            trajectory.radius0 * math.sin(trajectory.angle0),
        )
        offset = scale(offset, radius / trajectory.radius0)
    else:
        height = _lerp(trajectory.height0, trajectory.height1, t_frac)
        angle = _lerp(trajectory.angle0, trajectory.angle1, t_frac)
        offset = (radius * math.cos(angle), height, radius * math.sin(angle))

    eye = tuple(c + o for c, o in zip(trajectory.center, offset))
    return CameraPose(eye=eye, look_at=trajectory.center, up=WORLD_UP, focal=focal, resolution=resolution)


def frame_fraction(frame, frames):
    """ t_frac of a frame index in a clip of the given length """
    return frame / (frames - 1) if frames > 1 else 0.0
