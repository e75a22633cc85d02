# Binary and image file formats
#
# VFLO (flow):  "VFLO" | u32 version | u32 w | u32 h | h*w records of
#               (f32 u, f32 v, u8 valid), little endian, no padding
# VNSE (noise): "VNSE" | u32 version | u32 T | u32 w | u32 h | u32 C |
#               T*h*w*C f32, little endian, frame major
# PNG:          8-bit grey or RGB through Pillow

import io
import json
import struct

import numpy as np
from PIL import Image

from voidforge.buffers import FlowField
from voidforge.errors import BadMagic, ForgeIOError, Truncated

FLOW_MAGIC = b"VFLO"
FLOW_VERSION = 1
FLOW_HEADER = struct.Struct("<4sIII")
FLOW_RECORD = np.dtype([("u", "<f4"), ("v", "<f4"), ("valid", "u1")])

NOISE_MAGIC = b"VNSE"
NOISE_VERSION = 1
NOISE_HEADER = struct.Struct("<4sIIIII")


def _write_bytes(path, data):
    try:
        with open(path, "wb") as f:
            f.write(data)
    except OSError as error:
        raise ForgeIOError(f"cannot write file ({error.strerror})", path) from error


def _read_bytes(path):
    try:
        with open(path, "rb") as f:
            return f.read()
    except OSError as error:
        raise ForgeIOError(f"cannot read file ({error.strerror})", path) from error


def _check_magic(data, magic):
    head = bytes(data[:len(magic)])
    if len(head) < len(magic) and magic.startswith(head):
        raise Truncated(f"{magic.decode()} magic", len(head))
    if head != magic:
        raise BadMagic(f"expected magic {magic!r}, got {head!r}")


# PNG

def to_bytes(image):
    """ Quantize [0, 1] floats to uint8, uint8 and bool pass through """
    image = np.asarray(image)
    if image.dtype == bool:
        return image.astype(np.uint8) * 255
    if image.dtype == np.uint8:
        return image
    return np.round(np.clip(image, 0.0, 1.0) * 255.0).astype(np.uint8)


def encode_png(image):
    """ PNG bytes of an (h, w) or (h, w, 3) image """
    buffer = io.BytesIO()
    Image.fromarray(to_bytes(image)).save(buffer, format="PNG")
    return buffer.getvalue()


def decode_png(data):
    """ uint8 array of a PNG byte string """
    with Image.open(io.BytesIO(data)) as image:
        return np.array(image)


def write_png(path, image):
    _write_bytes(path, encode_png(image))


def read_png(path):
    data = _read_bytes(path)
    try:
        return decode_png(data)
    except (OSError, ValueError) as error:
        raise ForgeIOError(f"cannot decode PNG ({error})", path) from error


# VFLO

def encode_flow(flow):
    """
    Serialize a FlowField.

    Parameters
    ----------
    flow : FlowField
        Flow to write.

    Returns
    -------
    bytes
    """

    records = np.zeros((flow.height, flow.width), dtype=FLOW_RECORD)
    records["u"] = flow.uv[..., 0]
    records["v"] = flow.uv[..., 1]
    records["valid"] = flow.valid
    return FLOW_HEADER.pack(FLOW_MAGIC, FLOW_VERSION, flow.width, flow.height) + records.tobytes()


def decode_flow(data):
    """
    Parse VFLO bytes.

    Parameters
    ----------
    data : bytes
        File content.

    Returns
    -------
    FlowField
    """

    _check_magic(data, FLOW_MAGIC)
    if len(data) < FLOW_HEADER.size:
        raise Truncated("VFLO header", len(data))
    _, version, width, height = FLOW_HEADER.unpack_from(data)
    if version != FLOW_VERSION:
        raise BadMagic(f"unsupported VFLO version {version}")
    expected = FLOW_HEADER.size + width * height * FLOW_RECORD.itemsize
    if len(data) < expected:
        raise Truncated(f"VFLO payload of {width}x{height} records", len(data))

    records = np.frombuffer(data, dtype=FLOW_RECORD, count=width * height, offset=FLOW_HEADER.size)
    records = records.reshape(height, width)
    uv = np.stack([records["u"], records["v"]], axis=-1).astype(np.float32)
    return FlowField(uv, records["valid"] != 0)


def write_flow(path, flow):
    _write_bytes(path, encode_flow(flow))


def read_flow(path):
    return decode_flow(_read_bytes(path))


# VNSE

def encode_noise(frames):
    """ Serialize a (T, h, w, C) float32 noise volume """
    frames = np.asarray(frames, dtype="<f4")
    count, height, width, channels = frames.shape
    return NOISE_HEADER.pack(NOISE_MAGIC, NOISE_VERSION, count, width, height, channels) + frames.tobytes()


def decode_noise(data):
    """ Parse VNSE bytes into a (T, h, w, C) float32 array """

    _check_magic(data, NOISE_MAGIC)
    if len(data) < NOISE_HEADER.size:
        raise Truncated("VNSE header", len(data))
    _, version, count, width, height, channels = NOISE_HEADER.unpack_from(data)
    if version != NOISE_VERSION:
        raise BadMagic(f"unsupported VNSE version {version}")
    size = count * height * width * channels
    if len(data) < NOISE_HEADER.size + 4 * size:
        raise Truncated(f"VNSE payload of {count}x{height}x{width}x{channels} values", len(data))
    values = np.frombuffer(data, dtype="<f4", count=size, offset=NOISE_HEADER.size)
    return values.reshape(count, height, width, channels).astype(np.float32)


def write_noise(path, frames):
    _write_bytes(path, encode_noise(frames))


def read_noise(path):
    return decode_noise(_read_bytes(path))


# JSON

def dump_json(data):
    """ Stable JSON text with a trailing newline """
    return json.dumps(data, indent=2, sort_keys=False) + "\n"


def write_json(path, data):
    _write_bytes(path, dump_json(data).encode("utf-8"))


def read_json(path):
    try:
        return json.loads(_read_bytes(path).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as error:
        raise ForgeIOError(f"cannot parse JSON ({error})", path) from error
