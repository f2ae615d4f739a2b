"""File emitters: PPM spectrograms, tab-delimited graphs and PNG plots."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .audio import Sample  # noqa: E402
from .dsp import fft, frames, hamming_window  # noqa: E402

SPECTROGRAM_WINDOW = 128


def spectrogram_frames(s: Sample, window: int = SPECTROGRAM_WINDOW) -> np.ndarray:
    """Magnitudes of the lower half spectrum of half-overlapped Hamming frames."""
    blocks = frames(s.amplitudes, window, window // 2)
    if not len(blocks):
        return np.empty((0, window // 2))
    re, im = fft(blocks * hamming_window(window))
    return np.hypot(re[:, :window // 2], im[:, :window // 2])


def spectrogram_pixels(mags) -> np.ndarray:
    """Grey levels, one row per bin with the highest bin on top, one column per frame."""
    m = np.asarray(mags, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise ValueError("spectrogram needs at least one non-empty frame")
    peak = m.max()
    if peak <= 0:
        grey = np.full(m.shape, 255.0)
    else:
        grey = 255.0 * (1.0 - m / peak)
    return np.rint(grey.T[::-1]).astype(np.uint8)


def emit_spectrogram(mags, path) -> None:
    pixels = spectrogram_pixels(mags)
    h, w = pixels.shape
    rgb = np.repeat(pixels[:, :, None], 3, axis=2)
    Path(path).write_bytes(f"P6\n{w} {h}\n255\n".encode("ascii") + rgb.tobytes())


def read_ppm(path) -> np.ndarray:
    """Parse a P6 file as written by :func:`emit_spectrogram` into an (h, w, 3) array."""
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if len(parts) < 4 or parts[0] != b"P6":
        raise ValueError(f"{path}: not a binary PPM")
    w, h = (int(x) for x in parts[1].split())
    if int(parts[2]) != 255:
        raise ValueError(f"{path}: unsupported maximum value")
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w, 3)


def _emit_rows(values, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for i, a in enumerate(values):
            fh.write(f"{i}\t{float(a)!r}\n")


def emit_wave_graph(s: Sample, path) -> None:
    """``index<TAB>amplitude`` per line."""
    _emit_rows(s.amplitudes, path)


def emit_feature_graph(values, path) -> None:
    _emit_rows(np.asarray(values, dtype=np.float64), path)


def _save(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def plot_wave(s: Sample, path) -> None:
    fig, ax = plt.subplots(figsize=(8, 3))
    t = np.arange(len(s)) / s.sample_rate
    ax.plot(t, s.amplitudes, linewidth=0.5)
    ax.set_xlabel("time (s)")
    ax.set_ylabel("amplitude")
    _save(fig, path)


def plot_features(values, path) -> None:
    fig, ax = plt.subplots(figsize=(8, 3))
    ax.plot(np.asarray(values, dtype=np.float64), linewidth=0.8)
    ax.set_xlabel("feature index")
    ax.set_ylabel("value")
    _save(fig, path)


def plot_spectrogram(mags, path, sample_rate: int = 8000) -> None:
    m = np.asarray(mags, dtype=np.float64)
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.imshow(m.T, origin="lower", aspect="auto", cmap="gray_r",
              extent=(0, m.shape[0], 0, sample_rate / 2))
    ax.set_xlabel("frame")
    ax.set_ylabel("frequency (Hz)")
    _save(fig, path)


def plot_zipf(ranks, freqs, path, log_scale: bool = True) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ranks, freqs, marker=".", linestyle="none")
    if log_scale:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel("rank")
    ax.set_ylabel("frequency")
    _save(fig, path)
