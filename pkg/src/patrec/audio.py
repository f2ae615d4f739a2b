"""Sample loading, generation and writing.

Samples are mono amplitude arrays in [-1, 1].  16-bit PCM words map to
``v / 32768``; 8-bit (unsigned, offset binary) words map to
``(v - 128) / 128``.  Both RIFF (little-endian) and RIFX (big-endian)
WAVE containers are read; unknown chunks are skipped.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

PCM_SCALE = 32768.0
WAVE_FORMAT_PCM = 1


class AudioFormatError(ValueError):
    """The file is not a mono 8/16-bit PCM WAVE file we can read."""


@dataclass(frozen=True)
class AudioFormat:
    sample_rate: int = 8000
    bits_per_sample: int = 16
    channels: int = 1

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError(f"sample rate must be positive, got {self.sample_rate}")
        if self.bits_per_sample not in (8, 16):
            raise ValueError(f"unsupported sample size {self.bits_per_sample} bits")
        if self.channels != 1:
            raise ValueError(f"only mono samples are supported, got {self.channels} channels")


@dataclass
class Sample:
    amplitudes: np.ndarray
    format: AudioFormat = field(default_factory=AudioFormat)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.float64).reshape(-1)

    def __len__(self):
        return self.amplitudes.size

    @property
    def sample_rate(self) -> int:
        return self.format.sample_rate

    def with_amplitudes(self, amplitudes) -> "Sample":
        return Sample(amplitudes, self.format)

    def copy(self) -> "Sample":
        return Sample(self.amplitudes.copy(), self.format)


def _parse_chunks(data: bytes, endian: str):
    pos = 12
    while pos + 8 <= len(data):
        cid = data[pos:pos + 4]
        (size,) = struct.unpack(endian + "I", data[pos + 4:pos + 8])
        body_start = pos + 8
        yield cid, body_start, size
        # chunks are word aligned
        pos = body_start + size + (size & 1)


def load_wav(path) -> Sample:
    """Load a mono PCM WAVE file into unit-range amplitudes."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such sample file: {path}")
    data = path.read_bytes()
    if len(data) < 12 or data[8:12] != b"WAVE":
        raise AudioFormatError(f"{path}: not a RIFF/WAVE file")
    if data[:4] == b"RIFF":
        endian = "<"
    elif data[:4] == b"RIFX":
        endian = ">"
    else:
        raise AudioFormatError(f"{path}: unknown container id {data[:4]!r}")

    fmt = None
    pcm = None
    for cid, start, size in _parse_chunks(data, endian):
        if cid == b"fmt ":
            if size < 16 or start + 16 > len(data):
                raise AudioFormatError(f"{path}: truncated fmt chunk")
            tag, channels, rate, _, _, bits = struct.unpack(
                endian + "HHIIHH", data[start:start + 16])
            if tag != WAVE_FORMAT_PCM:
                raise AudioFormatError(f"{path}: non-PCM encoding (format tag {tag})")
            if channels != 1:
                raise AudioFormatError(f"{path}: expected mono, found {channels} channels")
            if bits not in (8, 16):
                raise AudioFormatError(f"{path}: unsupported sample size {bits} bits")
            fmt = AudioFormat(rate, bits, channels)
        elif cid == b"data":
            if fmt is None:
                raise AudioFormatError(f"{path}: data chunk precedes fmt chunk")
            if start + size > len(data):
                raise AudioFormatError(
                    f"{path}: truncated data chunk ({len(data) - start} of {size} bytes)")
            pcm = data[start:start + size]
            break
    if fmt is None:
        raise AudioFormatError(f"{path}: missing fmt chunk")
    if pcm is None:
        raise AudioFormatError(f"{path}: missing data chunk")

    if fmt.bits_per_sample == 16:
        if len(pcm) % 2:
            raise AudioFormatError(f"{path}: odd byte count in 16-bit data chunk")
        words = np.frombuffer(pcm, dtype=endian + "i2").astype(np.float64)
        amplitudes = words / PCM_SCALE
    else:
        amplitudes = (np.frombuffer(pcm, dtype=np.uint8).astype(np.float64) - 128.0) / 128.0
    if fmt.sample_rate != 8000:
        log.info("%s: sample rate %d Hz accepted without resampling", path, fmt.sample_rate)
    return Sample(amplitudes, fmt)


def to_pcm(amplitudes, bits: int = 16) -> np.ndarray:
    """Convert amplitudes to integer PCM codes, clipping to the legal range."""
    a = np.clip(np.asarray(amplitudes, dtype=np.float64), -1.0, 1.0)
    if bits == 16:
        return np.clip(np.rint(a * PCM_SCALE), -32768, 32767).astype(np.int16)
    return np.clip(np.rint(a * 128.0 + 128.0), 0, 255).astype(np.uint8)


def write_wav(sample: Sample, path, big_endian: bool = False) -> None:
    """Write ``sample`` as a PCM WAVE file (RIFX when ``big_endian``)."""
    fmt = sample.format
    endian = ">" if big_endian else "<"
    codes = to_pcm(sample.amplitudes, fmt.bits_per_sample)
    if fmt.bits_per_sample == 16:
        body = codes.astype(endian + "i2").tobytes()
    else:
        body = codes.tobytes()
    block_align = fmt.channels * fmt.bits_per_sample // 8
    fmt_chunk = struct.pack(
        endian + "4sIHHIIHH", b"fmt ", 16, WAVE_FORMAT_PCM, fmt.channels,
        fmt.sample_rate, fmt.sample_rate * block_align, block_align, fmt.bits_per_sample)
    pad = b"\x00" if len(body) & 1 else b""
    data_chunk = struct.pack(endian + "4sI", b"data", len(body)) + body + pad
    riff_id = b"RIFX" if big_endian else b"RIFF"
    header = struct.pack(endian + "4sI4s", riff_id, 4 + len(fmt_chunk) + len(data_chunk), b"WAVE")
    Path(path).write_bytes(header + fmt_chunk + data_chunk)


def generate_sine(freq: float, duration: float, format: AudioFormat | None = None,
                  amplitude: float = 1.0) -> Sample:
    fmt = format or AudioFormat()
    if not 0 < freq < fmt.sample_rate / 2:
        raise ValueError(
            f"frequency {freq} Hz outside (0, {fmt.sample_rate / 2}) for {fmt.sample_rate} Hz sampling")
    n = np.arange(int(round(duration * fmt.sample_rate)))
    return Sample(amplitude * np.sin(2.0 * np.pi * freq * n / fmt.sample_rate), fmt)


def load_text(path) -> Sample:
    """Treat the bytes of a text file as a sample: ``byte / 128 - 1``."""
    raw = Path(path).read_bytes()
    return Sample(np.frombuffer(raw, dtype=np.uint8).astype(np.float64) / 128.0 - 1.0)


def write_sample_text(sample: Sample, path) -> None:
    """One amplitude per line, shortest round-trip decimal form."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for a in sample.amplitudes:
            fh.write(repr(float(a)))
            fh.write("\n")


def read_sample_text(path, format: AudioFormat | None = None) -> Sample:
    text = Path(path).read_text(encoding="ascii")
    values = [float(line) for line in text.splitlines() if line.strip()]
    return Sample(np.array(values, dtype=np.float64), format or AudioFormat())
