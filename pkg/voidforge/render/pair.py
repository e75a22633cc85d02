# Rendering of counterfactual pairs

import logging
import time
from typing import NamedTuple

from voidforge.camera import camera_at, frame_fraction
from voidforge.render.flow import ground_truth_flow
from voidforge.render.geometry import render_frame

logger = logging.getLogger(__name__)


class PairRenders(NamedTuple):
    """ Rendered frames and flows of both variants of a pair """
    factual: tuple
    counterfactual: tuple
    factual_flows: tuple
    counterfactual_flows: tuple


def camera_path(spec):
    """ Camera pose of every frame of a scene """
    return [camera_at(spec.camera, frame_fraction(t, spec.frames), spec.resolution) for t in range(spec.frames)]


def render_trajectory(trajectory, spec, cameras=None):
    """
    Render every frame of a trajectory and the flow between consecutive frames.

    Parameters
    ----------
    trajectory : Trajectory
        The run to draw.
    spec : SceneSpec
        The scene.
    cameras : list of CameraPose, optional
        Poses per frame, computed from spec.camera when omitted.

    Returns
    -------
    packets : tuple
        One FramePacket per frame.
    flows : tuple
        T-1 FlowFields.
    """

    cameras = cameras or camera_path(spec)
    states = [trajectory.states(t) for t in range(trajectory.frames)]
    packets = tuple(render_frame(states[t], spec, cameras[t]) for t in range(trajectory.frames))
    flows = tuple(
        ground_truth_flow(packets[t], states[t], states[t + 1], cameras[t], cameras[t + 1], spec)
        for t in range(trajectory.frames - 1)
    )
    return packets, flows


def render_pair(pair, spec):
    """
    Render both variants of a pair under the same camera path.

    Parameters
    ----------
    pair : CounterfactualPair
        Simulated pair.
    spec : SceneSpec
        The scene.

    Returns
    -------
    PairRenders
    """

    start = time.perf_counter()
    cameras = camera_path(spec)
    factual, factual_flows = render_trajectory(pair.factual, spec, cameras)
    counterfactual, counterfactual_flows = render_trajectory(pair.counterfactual, spec, cameras)
    elapsed = time.perf_counter() - start
    logger.debug("Rendered scene %d: 2x%d frames at %dx%d in %.2fs (%.1f ms per frame)",
                 spec.scene_seed, spec.frames, *spec.resolution, elapsed, 500.0 * elapsed / spec.frames)
    return PairRenders(factual, counterfactual, factual_flows, counterfactual_flows)
