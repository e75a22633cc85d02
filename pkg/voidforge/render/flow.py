# Ground truth optical flow from body kinematics and camera motion

import numpy as np

from voidforge.buffers import FlowField
from voidforge.errors import ShapeMismatch


def surface_points(packet, states):
    """
    World position of every pixel's surface point given body states.

    Parameters
    ----------
    packet : FramePacket
        Frame whose hit offsets are moved.
    states : list of BodyState
        States to place the bodies at.

    Returns
    -------
    points : ndarray
        (h, w, 3) world points.
    present : ndarray
        (h, w) False on misses and on bodies that are not alive in states.
    """

    points = packet.hit_offset.copy()
    present = packet.hit.copy()
    by_id = {s.id: s for s in states}
    for body_id in np.unique(packet.instance[packet.hit]):
        if body_id == 0:
            continue
        state = by_id.get(int(body_id))
        if state is None:
            raise ShapeMismatch(f"body {body_id} is in the instance map but has no state")
        mask = packet.instance == body_id
        if state.alive:
            points[mask] += np.array(state.position)
        else:
            present[mask] = False
    return points, present


def ground_truth_flow(packet_t, states_t, states_t1, cam_t, cam_t1, spec):
    """
    Exact forward flow from frame t to frame t+1.

    Parameters
    ----------
    packet_t : FramePacket
        Render of frame t.
    states_t, states_t1 : list of BodyState
        Body states at frames t and t+1.
    cam_t, cam_t1 : CameraPose
        Cameras of frames t and t+1.
    spec : SceneSpec
        The scene.

    Returns
    -------
    FlowField
    """

    width, height = spec.resolution
    for name, camera in (("cam_t", cam_t), ("cam_t1", cam_t1)):
        if camera.resolution != (width, height):
            raise ShapeMismatch(f"{name} resolution {camera.resolution} != scene resolution {(width, height)}")
    if (packet_t.width, packet_t.height) != (width, height):
        raise ShapeMismatch(f"packet size {(packet_t.width, packet_t.height)} != scene resolution {(width, height)}")
    if sorted(s.id for s in states_t) != sorted(s.id for s in states_t1):
        raise ShapeMismatch("states at t and t+1 describe different bodies")

    # Surface points at t+1, bodies carry their hit points rigidly
    points, valid = surface_points(packet_t, states_t1)
    u, v, z = cam_t1.project(points)

    rows, cols = np.indices((height, width))
    uv = np.stack([u - (cols + 0.5), v - (rows + 0.5)], axis=-1)
    with np.errstate(invalid="ignore"):
        valid &= (z > 0.0) & np.isfinite(u) & np.isfinite(v)
        valid &= (u >= 0.0) & (u < width) & (v >= 0.0) & (v < height)
    uv[~valid] = 0.0
    return FlowField(uv.astype(np.float32), valid)
