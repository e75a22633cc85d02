# Functions for rendering rigid bodies over the ground plane

import math

import numba
import numpy as np

from voidforge.buffers import FramePacket
from voidforge.objects import SPHERE
from voidforge.render.camera import calculate_ray_direction
from voidforge.render.utils import (
    FACE_GROUND, FACE_SPHERE, box_face, ray_intersect_box, ray_intersect_ground, ray_intersect_sphere,
)
from voidforge.utils.math import dot, normalize

SHADOW_ATTENUATION = 0.4
SHADOW_BIAS = 1e-4


@numba.njit(cache=True)
def _nearest_body(origin, direction, kinds, centers, extents):
    """ Closest body hit along a ray, ties go to the lower index """

    best_t = math.inf
    best_k = -1
    for k in range(kinds.shape[0]):
        center = (centers[k, 0], centers[k, 1], centers[k, 2])
        if kinds[k] == SPHERE:
            t, _ = ray_intersect_sphere(center, extents[k, 0], origin, direction)
            if t <= 0.0:
                continue
        else:
            lower = (center[0] - extents[k, 0], center[1] - extents[k, 1], center[2] - extents[k, 2])
            upper = (center[0] + extents[k, 0], center[1] + extents[k, 1], center[2] + extents[k, 2])
            t, t1 = ray_intersect_box(lower, upper, origin, direction)
            if t > t1 or t <= 0.0:
                continue
        if t < best_t:
            best_t = t
            best_k = k
    return best_t, best_k


@numba.njit(cache=True)
def _occluded(origin, direction, kinds, centers, extents):
    """ Whether any body blocks a ray, including bodies that contain its origin """

    for k in range(kinds.shape[0]):
        center = (centers[k, 0], centers[k, 1], centers[k, 2])
        if kinds[k] == SPHERE:
            _, t1 = ray_intersect_sphere(center, extents[k, 0], origin, direction)
        else:
            lower = (center[0] - extents[k, 0], center[1] - extents[k, 1], center[2] - extents[k, 2])
            upper = (center[0] + extents[k, 0], center[1] + extents[k, 1], center[2] + extents[k, 2])
            t0, t1 = ray_intersect_box(lower, upper, origin, direction)
            if t0 > t1:
                continue
        if t1 > 0.0 and t1 < math.inf:
            return True
    return False


@numba.njit(cache=True)
def render_kernel(
        camera_position,
        camera_forward,
        camera_right,
        camera_up,
        focal,
        light_dir,
        background,
        ground_albedo,
        ids,
        kinds,
        centers,
        extents,
        albedos,
        rgb_buffer,
        instance_buffer,
        depth_buffer,
        shadow_buffer,
        offset_buffer,
        face_buffer):
    """
    Ray casts every pixel of a frame.

    Parameters
    ----------
    camera_position : tuple
        The position of the camera.
    camera_forward, camera_right, camera_up : tuple
        The camera basis.
    focal : float
        The focal length in pixels.
    light_dir : tuple
        Unit vector towards the light.
    background : tuple
        Color of rays that hit nothing.
    ground_albedo : tuple
        Color of the ground plane.
    ids, kinds : ndarray
        Body ids and shape kinds.
    centers, extents, albedos : ndarray
        (n, 3) body centers, half extents (radius repeated for spheres) and colors.
    rgb_buffer, instance_buffer, depth_buffer, shadow_buffer, offset_buffer, face_buffer : ndarray
        Output buffers.
    """

    height, width = instance_buffer.shape
    for y in range(height):
        for x in range(width):
            ray_direction = calculate_ray_direction(
                x, y, width, height, focal, camera_forward, camera_right, camera_up)

            # Nearest surface
            t_body, k = _nearest_body(camera_position, ray_direction, kinds, centers, extents)
            t_ground = ray_intersect_ground(camera_position, ray_direction)
            if k < 0 and t_ground == math.inf:
                rgb_buffer[y, x, 0] = background[0]
                rgb_buffer[y, x, 1] = background[1]
                rgb_buffer[y, x, 2] = background[2]
                continue

            if t_ground < t_body:
                t = t_ground
                point = (
                    camera_position[0] + ray_direction[0] * t,
                    0.0,
                    camera_position[2] + ray_direction[2] * t,
                )
                offset = point
                normal = (0.0, 1.0, 0.0)
                albedo = ground_albedo
                instance = 0
                face = FACE_GROUND
            else:
                t = t_body
                point = (
                    camera_position[0] + ray_direction[0] * t,
                    camera_position[1] + ray_direction[1] * t,
                    camera_position[2] + ray_direction[2] * t,
                )
                offset = (point[0] - centers[k, 0], point[1] - centers[k, 1], point[2] - centers[k, 2])
                if kinds[k] == SPHERE:
                    normal = normalize(offset)
                    face = FACE_SPHERE
                else:
                    face, normal = box_face(offset, (extents[k, 0], extents[k, 1], extents[k, 2]))
                albedo = (albedos[k, 0], albedos[k, 1], albedos[k, 2])
                instance = ids[k]

            # Lambert shading with a hard shadow ray
            intensity = dot(normal, light_dir)
            shadowed = False
            if intensity > 0.0:
                origin = (
                    point[0] + normal[0] * SHADOW_BIAS,
                    point[1] + normal[1] * SHADOW_BIAS,
                    point[2] + normal[2] * SHADOW_BIAS,
                )
                shadowed = _occluded(origin, light_dir, kinds, centers, extents)
                if shadowed:
                    intensity *= SHADOW_ATTENUATION
            else:
                intensity = 0.0

            rgb_buffer[y, x, 0] = albedo[0] * intensity
            rgb_buffer[y, x, 1] = albedo[1] * intensity
            rgb_buffer[y, x, 2] = albedo[2] * intensity
            instance_buffer[y, x] = instance
            depth_buffer[y, x] = t
            shadow_buffer[y, x] = shadowed
            offset_buffer[y, x, 0] = offset[0]
            offset_buffer[y, x, 1] = offset[1]
            offset_buffer[y, x, 2] = offset[2]
            face_buffer[y, x] = face


def body_arrays(states, spec, exclude_removed=True):
    """
    Pack the bodies to draw into kernel arrays, ordered by id.

    Parameters
    ----------
    states : list of BodyState
        Body states of the frame.
    spec : SceneSpec
        Scene providing shapes and colors.
    exclude_removed : bool
        Skip bodies that are not alive.

    Returns
    -------
    ids, kinds, centers, extents, albedos : ndarray
    """

    bodies = {b.id: b for b in spec.bodies}
    drawn = sorted((s for s in states if s.alive or not exclude_removed), key=lambda s: s.id)
    ids = np.array([s.id for s in drawn], dtype=np.int64)
    kinds = np.array([bodies[s.id].shape.kind for s in drawn], dtype=np.int64)
    centers = np.array([s.position for s in drawn], dtype=np.float64).reshape(-1, 3)
    extents = np.array([bodies[s.id].shape.extents for s in drawn], dtype=np.float64).reshape(-1, 3)
    albedos = np.array([bodies[s.id].albedo for s in drawn], dtype=np.float64).reshape(-1, 3)
    return ids, kinds, centers, extents, albedos


def render_frame(states, spec, camera, exclude_removed=True):
    """
    Renders one frame of a scene.

    Parameters
    ----------
    states : list of BodyState
        Body states at the frame time.
    spec : SceneSpec
        The scene.
    camera : CameraPose
        The camera to render with.
    exclude_removed : bool, optional
        Leave bodies that are not alive out of the image.

    Returns
    -------
    FramePacket
    """

    buffers = FramePacket.empty(camera.height, camera.width)
    forward, right, up = camera.basis()
    render_kernel(
        camera.eye,
        forward,
        right,
        up,
        camera.focal,
        tuple(float(c) for c in spec.light_dir),
        camera.background,
        tuple(float(c) for c in spec.ground_albedo),
        *body_arrays(states, spec, exclude_removed),
        buffers["rgb"],
        buffers["instance"],
        buffers["depth"],
        buffers["shadow"],
        buffers["hit_offset"],
        buffers["face"],
    )
    return FramePacket(**buffers)
