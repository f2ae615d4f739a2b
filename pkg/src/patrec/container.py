"""Versioned, gzip-wrapped binary container.

Layout of the uncompressed stream::

    magic    4 bytes   b"PREC"
    version  u16 BE    FORMAT_VERSION
    kind     str       what the payload holds ("training-set", "stats", ...)
    payload  value     one tagged value (see below)

Every value is a one-byte tag followed by a length-prefixed body, so the
files can be read from any language without a native object serializer.
Dict entries are written in sorted key order and gzip's mtime is pinned,
which makes a dump of equal data byte-identical.
"""

from __future__ import annotations

import gzip
import io
import struct
from pathlib import Path

import numpy as np

MAGIC = b"PREC"
FORMAT_VERSION = 1

_NONE = b"N"
_TRUE = b"T"
_FALSE = b"F"
_INT = b"I"
_FLOAT = b"D"
_STR = b"S"
_BYTES = b"B"
_LIST = b"L"
_DICT = b"M"
_ARRAY = b"A"


class ContainerError(ValueError):
    """Raised for corrupt, truncated or mismatched container files."""


def _write_str(out: io.BytesIO, s: str) -> None:
    raw = s.encode("utf-8")
    out.write(struct.pack(">I", len(raw)))
    out.write(raw)


def _sort_key(k):
    # mixed key types sort by type name first
    return (type(k).__name__, k)


def _encode(out: io.BytesIO, value) -> None:
    if value is None:
        out.write(_NONE)
    elif value is True:
        out.write(_TRUE)
    elif value is False:
        out.write(_FALSE)
    elif isinstance(value, (int, np.integer)):
        if not -2**63 <= int(value) < 2**63:
            raise ContainerError(f"integer {value} does not fit in 64 bits")
        out.write(_INT)
        out.write(struct.pack(">q", int(value)))
    elif isinstance(value, (float, np.floating)):
        out.write(_FLOAT)
        out.write(struct.pack(">d", float(value)))
    elif isinstance(value, str):
        out.write(_STR)
        _write_str(out, value)
    elif isinstance(value, (bytes, bytearray)):
        out.write(_BYTES)
        out.write(struct.pack(">I", len(value)))
        out.write(bytes(value))
    elif isinstance(value, np.ndarray):
        arr = np.ascontiguousarray(value, dtype=">f8")
        out.write(_ARRAY)
        out.write(struct.pack(">I", arr.ndim))
        for dim in arr.shape:
            out.write(struct.pack(">I", dim))
        out.write(arr.tobytes())
    elif isinstance(value, (list, tuple)):
        out.write(_LIST)
        out.write(struct.pack(">I", len(value)))
        for item in value:
            _encode(out, item)
    elif isinstance(value, dict):
        out.write(_DICT)
        out.write(struct.pack(">I", len(value)))
        for k in sorted(value, key=_sort_key):
            _encode(out, k)
            _encode(out, value[k])
    else:
        raise TypeError(f"cannot encode value of type {type(value).__name__}")


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ContainerError("unexpected end of container data")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def u32(self) -> int:
        return struct.unpack(">I", self.take(4))[0]

    def string(self) -> str:
        return self.take(self.u32()).decode("utf-8")

    def value(self):
        tag = self.take(1)
        if tag == _NONE:
            return None
        if tag == _TRUE:
            return True
        if tag == _FALSE:
            return False
        if tag == _INT:
            return struct.unpack(">q", self.take(8))[0]
        if tag == _FLOAT:
            return struct.unpack(">d", self.take(8))[0]
        if tag == _STR:
            return self.string()
        if tag == _BYTES:
            return self.take(self.u32())
        if tag == _ARRAY:
            ndim = self.u32()
            shape = tuple(self.u32() for _ in range(ndim))
            count = int(np.prod(shape)) if shape else 1
            raw = self.take(8 * count)
            return np.frombuffer(raw, dtype=">f8").astype(np.float64).reshape(shape)
        if tag == _LIST:
            return [self.value() for _ in range(self.u32())]
        if tag == _DICT:
            n = self.u32()
            out = {}
            for _ in range(n):
                k = self.value()
                out[k] = self.value()
            return out
        raise ContainerError(f"unknown value tag {tag!r}")


def encode(kind: str, payload) -> bytes:
    """Serialize ``payload`` under ``kind`` and gzip it deterministically."""
    out = io.BytesIO()
    out.write(MAGIC)
    out.write(struct.pack(">H", FORMAT_VERSION))
    _write_str(out, kind)
    _encode(out, payload)
    return gzip.compress(out.getvalue(), mtime=0)


def decode(data: bytes, kind: str):
    """Inverse of :func:`encode`; checks magic, version and kind."""
    try:
        raw = gzip.decompress(data)
    except (OSError, EOFError) as exc:
        raise ContainerError(f"not a gzip container: {exc}") from exc
    reader = _Reader(raw)
    if reader.take(4) != MAGIC:
        raise ContainerError("bad magic number")
    version = struct.unpack(">H", reader.take(2))[0]
    if version != FORMAT_VERSION:
        raise ContainerError(f"unsupported container version {version}")
    found = reader.string()
    if found != kind:
        raise ContainerError(f"expected a {kind!r} container, found {found!r}")
    payload = reader.value()
    if reader.pos != len(raw):
        raise ContainerError("trailing bytes after payload")
    return payload


def dump(path, kind: str, payload) -> None:
    Path(path).write_bytes(encode(kind, payload))


def load(path, kind: str):
    return decode(Path(path).read_bytes(), kind)
