from voidforge.dataset.formats import (
    decode_flow, decode_noise, decode_png, encode_flow, encode_noise, encode_png,
    read_flow, read_noise, read_png, write_flow, write_noise, write_png,
)
from voidforge.dataset.metrics import PSNR_SENTINEL, mask_iou, psnr, serialize_psnr
