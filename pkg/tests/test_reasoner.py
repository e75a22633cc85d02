import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest

from voidforge.config import MaskConfig
from voidforge.errors import ProtocolError, ReasonerTimeout, TransportError
from voidforge.masks import (
    REASONER_SCHEMA, BinaryMaskSeq, MaskRole, ReasonerResult, decode_reasoner_response, derive_masks,
    encode_reasoner_response, ground_truth_reasoner, remote_reasoner, second_pass_trigger,
)
from voidforge.physics import simulate_counterfactual
from voidforge.render import render_pair

GRID = 4
SHAPE = (2, 16, 16)


class _Handler(BaseHTTPRequestHandler):
    answer = {}
    status = 200
    requests = []

    def do_POST(self):
        length = int(self.headers["Content-Length"])
        type(self).requests.append(json.loads(self.rfile.read(length)))
        body = self.answer if isinstance(self.answer, bytes) else json.dumps(self.answer).encode("utf-8")
        self.send_response(self.status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, format, *args):
        pass


@pytest.fixture
def mock_reasoner():
    """ Threaded HTTP server answering every POST with a configurable body """

    handler = type("Handler", (_Handler,), {"answer": {}, "status": 200, "requests": []})
    server = HTTPServer(("127.0.0.1", 0), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield handler, f"http://127.0.0.1:{server.server_address[1]}/reason"
    server.shutdown()
    server.server_close()


def _video():
    frames = np.zeros(SHAPE + (3,))
    frames[:, 4:8, 4:8] = 0.8
    m_o = np.zeros(SHAPE, dtype=bool)
    m_o[:, 4:8, 4:8] = True
    return frames, BinaryMaskSeq(m_o, MaskRole.OBJECT)


def _answer(orig, cells, second_pass=False):
    result = ReasonerResult(
        affected_objects=("ball",),
        affected_orig=BinaryMaskSeq(orig, MaskRole.AFFECTED_ORIG),
        counterfactual_cells=cells,
        needs_second_pass=second_pass,
        grid=GRID,
    )
    return encode_reasoner_response(result)


def test_empty_cells_keep_only_returned_masks(mock_reasoner):
    handler, url = mock_reasoner
    orig = np.zeros(SHAPE, dtype=bool)
    orig[:, 8:12, 8:12] = True
    handler.answer = _answer(orig, ((), ()))
    frames, m_o = _video()

    reasoner = remote_reasoner(url, grid=GRID, grid_orig=False)
    affected = reasoner.affected_region(frames, m_o)
    assert np.array_equal(affected.frames, orig)

    request = handler.requests[0]
    assert request["schema"] == REASONER_SCHEMA
    assert request["grid"] == GRID
    assert len(request["frames"]) == len(request["object_mask"]) == SHAPE[0]


def test_top_left_cell_every_frame(mock_reasoner):
    handler, url = mock_reasoner
    handler.answer = _answer(np.zeros(SHAPE, dtype=bool), (((0, 0),), ((0, 0),)))
    frames, m_o = _video()

    result = remote_reasoner(url, grid=GRID).analyze(frames, m_o)
    count = result.count_mask().frames
    expected = np.zeros(SHAPE, dtype=bool)
    expected[:, :4, :4] = True
    assert np.array_equal(count, expected)
    assert result.affected_objects == ("ball",)
    assert result.needs_second_pass is False


def test_out_of_range_cell_names_frame_and_index(mock_reasoner):
    handler, url = mock_reasoner
    answer = _answer(np.zeros(SHAPE, dtype=bool), ((), ()))
    answer["counterfactual_cells"] = [[], [[0, GRID]]]
    handler.answer = answer
    frames, m_o = _video()

    with pytest.raises(ProtocolError) as info:
        remote_reasoner(url, grid=GRID).analyze(frames, m_o)
    assert info.value.frame == 1
    assert info.value.index == [0, GRID]


def test_malformed_json(mock_reasoner):
    handler, url = mock_reasoner
    handler.answer = b"{not json"
    frames, m_o = _video()
    with pytest.raises(ProtocolError):
        remote_reasoner(url, grid=GRID).analyze(frames, m_o)


def test_http_error_is_transport_error(mock_reasoner):
    handler, url = mock_reasoner
    handler.status = 500
    frames, m_o = _video()
    with pytest.raises(TransportError):
        remote_reasoner(url, grid=GRID).analyze(frames, m_o)


def test_unreachable_endpoint():
    frames, m_o = _video()
    with pytest.raises((TransportError, ReasonerTimeout)):
        remote_reasoner("http://127.0.0.1:9/reason", grid=GRID, timeout=2.0).analyze(frames, m_o)


@pytest.mark.parametrize("mutate", [
    lambda body: body.pop("needs_second_pass"),
    lambda body: body.update(affected_orig=body["affected_orig"][:1]),
    lambda body: body.update(affected_orig=["***", body["affected_orig"][1]]),
    lambda body: body.update(counterfactual_cells=[[[0]], []]),
    lambda body: body.update(schema="other/1"),
])
def test_decode_rejects_bad_responses(mutate):
    body = _answer(np.zeros(SHAPE, dtype=bool), ((), ()))
    mutate(body)
    with pytest.raises(ProtocolError):
        decode_reasoner_response(body, SHAPE, GRID)


def test_ground_truth_without_effects(resting_pair_spec):
    pair = simulate_counterfactual(resting_pair_spec)
    renders = render_pair(pair, resting_pair_spec)
    reasoner = ground_truth_reasoner(pair, renders, resting_pair_spec)
    orig, cells = reasoner.infer_affected(None, None)
    assert not orig.frames.any()
    assert all(frame == () for frame in cells)
    assert reasoner.needs_second_pass(None, None) is False


def test_support_removal_needs_second_pass(stack_spec):
    pair = simulate_counterfactual(stack_spec)
    assert second_pass_trigger(pair, stack_spec)
    renders = render_pair(pair, stack_spec)
    assert ground_truth_reasoner(pair, renders, stack_spec).needs_second_pass(None, None)


@pytest.mark.parametrize("grid_orig", [True, False])
def test_ground_truth_quadmask_matches_dataset(stack_spec, grid_orig):
    config = MaskConfig(grid_orig=grid_orig)
    pair = simulate_counterfactual(stack_spec)
    renders = render_pair(pair, stack_spec)
    masks = derive_masks(pair, renders, stack_spec, config)
    reasoner = ground_truth_reasoner(pair, renders, stack_spec, config)
    assert reasoner.quadmask(None, masks.object_mask) == masks.quadmask


def test_ground_truth_answer_survives_the_wire(stack_spec):
    pair = simulate_counterfactual(stack_spec)
    renders = render_pair(pair, stack_spec)
    result = ground_truth_reasoner(pair, renders, stack_spec).analyze()
    body = json.loads(json.dumps(encode_reasoner_response(result)))
    decoded = decode_reasoner_response(body, result.affected_orig.shape, result.grid)
    assert decoded == result
