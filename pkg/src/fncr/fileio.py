"""File formats: 16-bit binary PGM images, PBM masks, raw k-space containers.

Images map [0, 1] linearly onto 0..65535 (16-bit keeps near-perfect
reconstructions from being destroyed by quantization).  The k-space container
is ``b"FNCR"``, a little-endian uint32 grid side, then n*n little-endian
float64 (re, im) pairs in row-major order.
"""

from __future__ import annotations

import struct

import numpy as np

_PGM_MAXVAL = 65535
_KSPACE_MAGIC = b"FNCR"


class FormatError(ValueError):
    """Malformed header, bad magic, or truncated payload."""


def write_image(path, img):
    """Write a real image with values in [0, 1] as binary 16-bit PGM (P5)."""
    img = np.asarray(img, dtype=float)
    if img.ndim != 2:
        raise ValueError(f"expected a 2-D image, got shape {img.shape}")
    q = np.clip(np.round(img * _PGM_MAXVAL), 0, _PGM_MAXVAL).astype(">u2")
    with open(path, "wb") as f:
        f.write(f"P5\n{img.shape[1]} {img.shape[0]}\n{_PGM_MAXVAL}\n".encode())
        f.write(q.tobytes())


def read_image(path):
    """Read a binary PGM written by :func:`write_image` back to floats in [0, 1]."""
    with open(path, "rb") as f:
        data = f.read()
    fields, offset = _read_header_tokens(data, 4)
    if fields[0] != b"P5":
        raise FormatError(f"not a binary PGM: magic {fields[0]!r}")
    width, height, maxval = (int(t) for t in fields[1:])
    if maxval != _PGM_MAXVAL:
        raise FormatError(f"expected maxval {_PGM_MAXVAL}, got {maxval}")
    payload = data[offset:]
    if len(payload) < 2 * width * height:
        raise FormatError("truncated PGM payload")
    q = np.frombuffer(payload[: 2 * width * height], dtype=">u2")
    return q.reshape(height, width).astype(float) / _PGM_MAXVAL


def _read_header_tokens(data, count):
    """Collect `count` whitespace-separated header tokens, skipping comments."""
    tokens = []
    i = 0
    while len(tokens) < count:
        if i >= len(data):
            raise FormatError("truncated header")
        ch = data[i: i + 1]
        if ch == b"#":
            i = data.find(b"\n", i)
            if i < 0:
                raise FormatError("unterminated comment")
            i += 1
        elif ch.isspace():
            i += 1
        else:
            j = i
            while j < len(data) and not data[j: j + 1].isspace():
                j += 1
            tokens.append(data[i:j])
            i = j
    # single whitespace byte terminates the header
    return tokens, i + 1


def write_mask(path, mask):
    """Write a boolean mask as binary PBM (P4); set bits mark sampled locations."""
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2:
        raise ValueError(f"expected a 2-D mask, got shape {mask.shape}")
    with open(path, "wb") as f:
        f.write(f"P4\n{mask.shape[1]} {mask.shape[0]}\n".encode())
        f.write(np.packbits(mask, axis=1).tobytes())


def read_mask(path):
    with open(path, "rb") as f:
        data = f.read()
    fields, offset = _read_header_tokens(data, 3)
    if fields[0] != b"P4":
        raise FormatError(f"not a binary PBM: magic {fields[0]!r}")
    width, height = int(fields[1]), int(fields[2])
    row_bytes = (width + 7) // 8
    payload = data[offset:]
    if len(payload) < row_bytes * height:
        raise FormatError("truncated PBM payload")
    bits = np.unpackbits(
        np.frombuffer(payload[: row_bytes * height], dtype=np.uint8).reshape(
            height, row_bytes
        ),
        axis=1,
    )
    return bits[:, :width].astype(bool)


def write_kspace(path, z):
    """Write complex k-space data in the flat FNCR binary container."""
    z = np.asarray(z, dtype=complex)
    if z.ndim != 2 or z.shape[0] != z.shape[1]:
        raise ValueError(f"expected square k-space data, got shape {z.shape}")
    n = z.shape[0]
    pairs = np.empty((n, n, 2), dtype="<f8")
    pairs[..., 0] = z.real
    pairs[..., 1] = z.imag
    with open(path, "wb") as f:
        f.write(_KSPACE_MAGIC)
        f.write(struct.pack("<I", n))
        f.write(pairs.tobytes())


def read_kspace(path):
    with open(path, "rb") as f:
        data = f.read()
    if data[:4] != _KSPACE_MAGIC:
        raise FormatError(f"bad k-space magic {data[:4]!r}")
    if len(data) < 8:
        raise FormatError("truncated k-space header")
    (n,) = struct.unpack("<I", data[4:8])
    need = 8 + 16 * n * n
    if len(data) < need:
        raise FormatError("truncated k-space payload")
    pairs = np.frombuffer(data[8:need], dtype="<f8").reshape(n, n, 2)
    return pairs[..., 0] + 1j * pairs[..., 1]
