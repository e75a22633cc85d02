# Region reasoners
#
# A reasoner looks at a video and its target mask and reports which objects
# the removal affects: their factual silhouettes at pixel level, and their
# counterfactual positions as cells of a coarse G x G grid. The ground-truth
# reasoner reads this off the simulator; the remote reasoner asks an HTTP
# service speaking the "void-forge/reasoner/1" JSON protocol.

import base64
import binascii
import json
import logging
import socket
import urllib.error
import urllib.request
from dataclasses import dataclass

import numpy as np

from voidforge.config import MaskConfig
from voidforge.dataset.formats import decode_png, encode_png
from voidforge.errors import ProtocolError, ReasonerTimeout, TransportError
from voidforge.masks.compose import affected_union, compose_quadmask
from voidforge.masks.derive import shadow_difference, silhouettes
from voidforge.masks.grid import cell_lists, cells_to_flags, rasterize_cells
from voidforge.masks.sequences import BinaryMaskSeq, MaskRole

logger = logging.getLogger(__name__)

REASONER_SCHEMA = "void-forge/reasoner/1"


@dataclass(frozen=True)
class ReasonerResult:
    """
    Answer of a reasoner for one video.

    Parameters
    ----------
    affected_objects : tuple
        Descriptions of the affected objects.
    affected_orig : BinaryMaskSeq
        Affected objects at their original positions (M_a^orig).
    counterfactual_cells : tuple
        Per frame tuple of (row, col) cells covering counterfactual positions.
    needs_second_pass : bool
        Whether the removal induces significant motion.
    grid : int
        Cells per side.
    """
    affected_objects: tuple
    affected_orig: BinaryMaskSeq
    counterfactual_cells: tuple
    needs_second_pass: bool
    grid: int

    def count_mask(self):
        """ M_a^count rasterized to pixels """
        _, height, width = self.affected_orig.shape
        flags = cells_to_flags(self.counterfactual_cells, self.grid)
        return BinaryMaskSeq(rasterize_cells(flags, height, width), MaskRole.AFFECTED_COUNT)


class RegionReasoner:
    """
    Base class of reasoners.

    Parameters
    ----------
    grid : int
        Cells per side G.
    grid_orig : bool
        Gridify M_a^orig before composing M_a.
    """

    def __init__(self, grid=8, grid_orig=True):
        self.grid = grid
        self.grid_orig = grid_orig

    def analyze(self, frames, object_mask):
        """
        Run the reasoner.

        Parameters
        ----------
        frames : ndarray
            (T, h, w, 3) video frames in [0, 1].
        object_mask : BinaryMaskSeq
            Target mask M_o.

        Returns
        -------
        ReasonerResult
        """
        raise NotImplementedError

    def infer_affected(self, frames, object_mask):
        """ (M_a^orig, per frame counterfactual cell lists) """
        result = self.analyze(frames, object_mask)
        return result.affected_orig, result.counterfactual_cells

    def needs_second_pass(self, frames, object_mask):
        return self.analyze(frames, object_mask).needs_second_pass

    def compose(self, result):
        """ Affected region M_a of a result """
        return affected_union(result.affected_orig, result.count_mask(), self.grid, self.grid_orig)

    def affected_region(self, frames, object_mask):
        return self.compose(self.analyze(frames, object_mask))

    def quadmask(self, frames, object_mask):
        """ Quadmask of a video from its target mask """
        return compose_quadmask(object_mask, self.affected_region(frames, object_mask))


def second_pass_trigger(pair, spec, config=None):
    """
    Whether a removal induces significant motion.

    True when an affected body moves more than config.second_pass_factor
    times its size away from its factual path, or when it shows at least
    config.free_fall_frames consecutive frames of free-fall acceleration in
    the counterfactual run that the factual run does not show.

    Parameters
    ----------
    pair : CounterfactualPair
        Simulated pair.
    spec : SceneSpec
        The scene.
    config : MaskConfig, optional
        Trigger thresholds.

    Returns
    -------
    bool
    """

    config = config or MaskConfig()
    factual, counterfactual = pair.factual, pair.counterfactual
    for body_id in sorted(pair.affected_ids):
        i = factual.index(body_id)
        size = spec.body(body_id).shape.size
        displacement = np.linalg.norm(factual.positions[:, i] - counterfactual.positions[:, i], axis=1)
        if displacement.max() > config.second_pass_factor * size:
            logger.debug("Body %d displaced by %.3f m, second pass needed", body_id, displacement.max())
            return True

        if spec.gravity <= 0.0 or factual.frames < 2:
            continue
        fps = float(spec.fps)
        accel_f = np.diff(factual.velocities[:, i, 1]) * fps
        accel_c = np.diff(counterfactual.velocities[:, i, 1]) * fps
        tolerance = config.free_fall_tolerance * spec.gravity
        falling = (np.abs(accel_c + spec.gravity) <= tolerance) & ~(np.abs(accel_f + spec.gravity) <= tolerance)
        run = 0
        for flag in falling:
            run = run + 1 if flag else 0
            if run >= config.free_fall_frames:
                logger.debug("Body %d enters free fall, second pass needed", body_id)
                return True
    return False


class GroundTruthReasoner(RegionReasoner):
    """
    Reasoner that reads the answer off a simulated and rendered pair.

    Parameters
    ----------
    pair : CounterfactualPair
        Simulated pair.
    renders : PairRenders
        Rendered frames of both variants.
    spec : SceneSpec
        The scene.
    config : MaskConfig, optional
        Grid and trigger settings.
    """

    def __init__(self, pair, renders, spec, config=None):
        config = config or MaskConfig()
        super().__init__(config.grid, config.grid_orig)
        self.pair = pair
        self.renders = renders
        self.spec = spec
        self.config = config
        self._result = None

    def analyze(self, frames=None, object_mask=None):
        if self._result is None:
            factual, counterfactual = self.renders.factual, self.renders.counterfactual
            affected = sorted(self.pair.affected_ids)
            orig = silhouettes(factual, affected) | shadow_difference(factual, counterfactual)
            cells = cell_lists(silhouettes(counterfactual, affected), self.grid)
            self._result = ReasonerResult(
                affected_objects=tuple(f"body {body_id}" for body_id in affected),
                affected_orig=BinaryMaskSeq(orig, MaskRole.AFFECTED_ORIG),
                counterfactual_cells=tuple(tuple(tuple(c) for c in frame) for frame in cells),
                needs_second_pass=second_pass_trigger(self.pair, self.spec, self.config),
                grid=self.grid,
            )
        return self._result


def ground_truth_reasoner(pair, renders, spec, config=None):
    """ Reasoner backed by the simulator ground truth """
    return GroundTruthReasoner(pair, renders, spec, config)


# Wire protocol

def _b64_png(image):
    return base64.b64encode(encode_png(image)).decode("ascii")


def _png_b64(text, frame):
    try:
        return decode_png(base64.b64decode(text, validate=True))
    except (binascii.Error, TypeError, ValueError, OSError) as error:
        raise ProtocolError(f"undecodable mask image: {error}", frame=frame) from error


def _to_bytes(frames):
    frames = np.asarray(frames)
    if frames.dtype != np.uint8:
        frames = np.round(np.clip(frames, 0.0, 1.0) * 255.0).astype(np.uint8)
    return frames


def encode_reasoner_request(frames, object_mask, grid):
    """ JSON request body for a video and its target mask """
    return {
        "schema": REASONER_SCHEMA,
        "frames": [_b64_png(frame) for frame in _to_bytes(frames)],
        "object_mask": [_b64_png(m.astype(np.uint8) * 255) for m in object_mask.frames],
        "grid": int(grid),
    }


def encode_reasoner_response(result):
    """ JSON response body carrying a ReasonerResult """
    return {
        "schema": REASONER_SCHEMA,
        "affected_objects": list(result.affected_objects),
        "affected_orig": [_b64_png(m.astype(np.uint8) * 255) for m in result.affected_orig.frames],
        "counterfactual_cells": [[list(cell) for cell in frame] for frame in result.counterfactual_cells],
        "needs_second_pass": bool(result.needs_second_pass),
    }


def decode_reasoner_response(body, shape, grid):
    """
    Validate and decode a response body.

    Parameters
    ----------
    body : dict
        Parsed JSON response.
    shape : tuple
        (T, h, w) of the video.
    grid : int
        Cells per side the request declared.

    Returns
    -------
    ReasonerResult
    """

    count, height, width = shape
    if not isinstance(body, dict):
        raise ProtocolError(f"response must be a JSON object, got {type(body).__name__}")
    if "schema" in body and body["schema"] != REASONER_SCHEMA:
        raise ProtocolError(f"unsupported response schema {body['schema']!r}")
    for key, kind in (("affected_objects", list), ("affected_orig", list),
                      ("counterfactual_cells", list), ("needs_second_pass", bool)):
        if not isinstance(body.get(key), kind):
            raise ProtocolError(f"response field {key!r} missing or not a {kind.__name__}")

    # Original position masks
    if len(body["affected_orig"]) != count:
        raise ProtocolError(f"expected {count} affected_orig frames, got {len(body['affected_orig'])}")
    orig = np.zeros(shape, dtype=bool)
    for t, text in enumerate(body["affected_orig"]):
        mask = _png_b64(text, t)
        if mask.shape[:2] != (height, width):
            raise ProtocolError(f"affected_orig size {mask.shape[:2]} != {(height, width)}", frame=t)
        orig[t] = mask.reshape(height, width, -1).any(axis=2)

    # Counterfactual cells
    if len(body["counterfactual_cells"]) != count:
        raise ProtocolError(f"expected {count} counterfactual_cells frames, got {len(body['counterfactual_cells'])}")
    cells = []
    for t, frame_cells in enumerate(body["counterfactual_cells"]):
        if not isinstance(frame_cells, list):
            raise ProtocolError("cell list must be a list", frame=t)
        frame = []
        for cell in frame_cells:
            if not (isinstance(cell, list) and len(cell) == 2
                    and all(isinstance(c, int) and not isinstance(c, bool) for c in cell)):
                raise ProtocolError("cell must be a [row, col] pair of integers", frame=t, index=cell)
            if not (0 <= cell[0] < grid and 0 <= cell[1] < grid):
                raise ProtocolError(f"cell outside the {grid}x{grid} grid", frame=t, index=cell)
            frame.append((cell[0], cell[1]))
        cells.append(tuple(frame))

    return ReasonerResult(
        affected_objects=tuple(str(o) for o in body["affected_objects"]),
        affected_orig=BinaryMaskSeq(orig, MaskRole.AFFECTED_ORIG),
        counterfactual_cells=tuple(cells),
        needs_second_pass=body["needs_second_pass"],
        grid=grid,
    )


class RemoteReasoner(RegionReasoner):
    """
    Reasoner served over HTTP.

    Parameters
    ----------
    endpoint : str
        URL accepting POSTed JSON requests.
    grid : int
        Cells per side G.
    timeout : float
        Seconds to wait for an answer.
    grid_orig : bool
        Gridify M_a^orig before composing M_a.
    """

    def __init__(self, endpoint, grid=8, timeout=60.0, grid_orig=True):
        super().__init__(grid, grid_orig)
        self.endpoint = endpoint
        self.timeout = timeout

    def _post(self, payload):
        request = urllib.request.Request(
            self.endpoint,
            data=json.dumps(payload).encode("utf-8"),
            headers={"Content-Type": "application/json"},
            method="POST",
        )
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as response:
                return response.read()
        except urllib.error.HTTPError as error:
            raise TransportError(f"reasoner at {self.endpoint} answered HTTP {error.code}") from error
        except urllib.error.URLError as error:
            if isinstance(error.reason, (socket.timeout, TimeoutError)):
                raise ReasonerTimeout(f"reasoner at {self.endpoint} timed out after {self.timeout}s") from error
            raise TransportError(f"cannot reach reasoner at {self.endpoint}: {error.reason}") from error
        except (socket.timeout, TimeoutError) as error:
            raise ReasonerTimeout(f"reasoner at {self.endpoint} timed out after {self.timeout}s") from error
        except OSError as error:
            raise TransportError(f"connection to reasoner at {self.endpoint} failed: {error}") from error

    def analyze(self, frames, object_mask):
        logger.info("Querying reasoner at %s for %d frames", self.endpoint, len(object_mask))
        raw = self._post(encode_reasoner_request(frames, object_mask, self.grid))
        try:
            body = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as error:
            raise ProtocolError(f"response is not valid JSON: {error}") from error
        return decode_reasoner_response(body, object_mask.shape, self.grid)


def remote_reasoner(endpoint, grid=8, timeout=60.0, grid_orig=True):
    """ Reasoner backed by an HTTP service """
    return RemoteReasoner(endpoint, grid, timeout, grid_orig)
