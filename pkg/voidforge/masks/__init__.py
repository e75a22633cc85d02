from voidforge.masks.sequences import LABEL_VALUES, BinaryMaskSeq, Label, MaskRole, QuadMask
from voidforge.masks.grid import cell_lists, cells_to_flags, gridify, occupied_cells, rasterize_cells
from voidforge.masks.compose import affected_union, compose_quadmask, compose_trimask
from voidforge.masks.derive import (
    PairMasks, affected_pixel_region, derive_masks, object_mask, shadow_difference, silhouettes,
)
from voidforge.masks.reasoner import (
    REASONER_SCHEMA, GroundTruthReasoner, ReasonerResult, RegionReasoner, RemoteReasoner,
    decode_reasoner_response, encode_reasoner_request, encode_reasoner_response,
    ground_truth_reasoner, remote_reasoner, second_pass_trigger,
)
