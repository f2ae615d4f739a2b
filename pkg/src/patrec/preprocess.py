"""Amplitude-domain and frequency-domain preprocessing.

Every filter is built on :func:`fft_filter`, an overlap-add block filter:
half-overlapped windows are shaped by the square root of the Hamming
window before the forward transform and again after the inverse, so the
two passes multiply to one Hamming window whose half-overlapped copies sum
to a near constant.  That constant is divided out.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .audio import Sample
from .dsp import fft, hamming_window, ifft, is_power_of_two

log = logging.getLogger(__name__)

DEFAULT_WINDOW = 1024
DEFAULT_SILENCE_THRESHOLD = 0.01
LOW_HIGH_CUTOFF_HZ = 2853.0
BAND_LOW_HZ = 1000.0
BAND_HIGH_HZ = 2853.0
BOOST_ONSET_HZ = 1000.0
BOOST_FACTOR = 5.0 * math.pi
# peaks at or below this are treated as silence by normalize()
NEAR_ZERO = 1e-12


class Method(str, Enum):
    RAW = "raw"
    NORMALIZE = "dummy-normalize"
    LOW_PASS = "low-pass"
    HIGH_PASS = "high-pass"
    BAND_PASS = "band-pass"
    BAND_STOP = "band-stop"
    BOOST = "boost"
    HIGH_PASS_BOOST = "high-pass+boost"
    ENDPOINT = "endpoint"


@dataclass(frozen=True)
class PreprocessConfig:
    method: Method = Method.NORMALIZE
    remove_silence: bool = False
    silence_threshold: float = DEFAULT_SILENCE_THRESHOLD
    noise: bool = False
    endpoint_edges: bool = True
    endpoint_runs: bool = True
    window: int = DEFAULT_WINDOW

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if not 0.0 < self.silence_threshold < 1.0:
            raise ValueError(f"silence threshold must lie in (0, 1), got {self.silence_threshold}")

    @property
    def key(self) -> str:
        """Short identifier used in storage file names."""
        parts = [self.method.value]
        if self.remove_silence and self.method is not Method.RAW:
            parts.append("silence")
        return "+".join(parts)


def normalize(s: Sample) -> Sample:
    """Scale so the peak absolute amplitude is 1; near-silent input is returned as is."""
    a = s.amplitudes
    peak = np.max(np.abs(a)) if a.size else 0.0
    if peak <= NEAR_ZERO:
        return s.copy()
    return s.with_amplitudes(a / peak)


def remove_silence(s: Sample, threshold: float = DEFAULT_SILENCE_THRESHOLD) -> Sample:
    """Keep only points with ``|a| >= threshold``, in order."""
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"silence threshold must lie in (0, 1), got {threshold}")
    a = s.amplitudes
    return s.with_amplitudes(a[np.abs(a) >= threshold])


def endpoint(s: Sample, edges: bool = True, runs: bool = True) -> Sample:
    """Reduce a sample to its end-points.

    End-points are strict local minima and maxima, optionally the first
    and last points, and optionally every member of a run of equal values.
    """
    a = s.amplitudes
    n = a.size
    keep = []
    for i in range(n):
        if edges and (i == 0 or i == n - 1):
            keep.append(i)
            continue
        if 0 < i < n - 1:
            left, mid, right = a[i - 1], a[i], a[i + 1]
            if (mid > left and mid > right) or (mid < left and mid < right):
                keep.append(i)
                continue
        if runs and ((i > 0 and a[i] == a[i - 1]) or (i < n - 1 and a[i] == a[i + 1])):
            keep.append(i)
    return s.with_amplitudes(a[keep])


def _full_response(response: np.ndarray, window: int) -> np.ndarray:
    # mirror onto the upper half: G[N-k] = G[k]; Nyquist reuses the last given bin
    full = np.empty(window)
    half = window // 2
    full[:half] = response
    full[half] = response[-1]
    full[half + 1:] = response[1:][::-1]
    return full


def overlap_constant(window: int) -> float:
    """Mean of two half-overlapped Hamming windows (the sqrt window applied twice)."""
    w = hamming_window(window)
    half = window // 2
    return float(np.mean(w[:half] + w[half:]))


def fft_filter(s: Sample, response, window: int = DEFAULT_WINDOW) -> Sample:
    """Overlap-add filtering of ``s`` by a per-bin gain ``response``.

    ``response`` holds ``window/2`` non-negative gains for bins
    ``0 .. window/2 - 1``.  Output length equals input length.
    """
    if not is_power_of_two(window) or window < 4:
        raise ValueError(f"filter window must be a power of two >= 4, got {window}")
    response = np.asarray(response, dtype=np.float64)
    if response.shape != (window // 2,):
        raise ValueError(f"response must have {window // 2} bins, got {response.shape}")
    if np.any(response < 0):
        raise ValueError("frequency response gains must be non-negative")

    x = s.amplitudes
    n = x.size
    if n == 0:
        return s.copy()
    hop = window // 2
    # leading half window of zeros so each input point is covered by two frames
    count = -(-(n + hop) // hop)
    padded = np.zeros((count + 1) * hop)
    padded[hop:hop + n] = x

    shape = np.sqrt(hamming_window(window))
    gains = _full_response(response, window)
    starts = np.arange(count) * hop
    blocks = padded[starts[:, None] + np.arange(window)[None, :]] * shape
    re, im = fft(blocks)
    re, im = ifft(re * gains, im * gains)
    blocks = re * shape

    out = np.zeros_like(padded)
    for k, start in enumerate(starts):
        out[start:start + window] += blocks[k]
    return s.with_amplitudes(out[hop:hop + n] / overlap_constant(window))


def cutoff_bin(freq: float, window: int, sample_rate: int) -> int:
    return int(math.floor(freq * window / sample_rate))


def low_pass_response(window: int = DEFAULT_WINDOW, sample_rate: int = 8000,
                      cutoff: float = LOW_HIGH_CUTOFF_HZ) -> np.ndarray:
    r = np.zeros(window // 2)
    r[:cutoff_bin(cutoff, window, sample_rate)] = 1.0
    return r


def high_pass_response(window: int = DEFAULT_WINDOW, sample_rate: int = 8000,
                       cutoff: float = LOW_HIGH_CUTOFF_HZ) -> np.ndarray:
    return 1.0 - low_pass_response(window, sample_rate, cutoff)


def band_pass_response(window: int = DEFAULT_WINDOW, sample_rate: int = 8000,
                       low: float = BAND_LOW_HZ, high: float = BAND_HIGH_HZ) -> np.ndarray:
    r = np.zeros(window // 2)
    lo = cutoff_bin(low, window, sample_rate)
    hi = cutoff_bin(high, window, sample_rate)
    r[lo:hi + 1] = 1.0
    return r


def band_stop_response(window: int = DEFAULT_WINDOW, sample_rate: int = 8000,
                       low: float = BAND_LOW_HZ, high: float = BAND_HIGH_HZ) -> np.ndarray:
    return 1.0 - band_pass_response(window, sample_rate, low, high)


def boost_response(window: int = DEFAULT_WINDOW, sample_rate: int = 8000,
                   onset: float = BOOST_ONSET_HZ, factor: float = BOOST_FACTOR) -> np.ndarray:
    r = np.ones(window // 2)
    r[cutoff_bin(onset, window, sample_rate):] = factor
    return r


def low_pass(s: Sample, window: int = DEFAULT_WINDOW) -> Sample:
    return fft_filter(s, low_pass_response(window, s.sample_rate), window)


def high_pass(s: Sample, window: int = DEFAULT_WINDOW) -> Sample:
    return fft_filter(s, high_pass_response(window, s.sample_rate), window)


def band_pass(s: Sample, window: int = DEFAULT_WINDOW) -> Sample:
    return fft_filter(s, band_pass_response(window, s.sample_rate), window)


def band_stop(s: Sample, window: int = DEFAULT_WINDOW) -> Sample:
    return fft_filter(s, band_stop_response(window, s.sample_rate), window)


def high_freq_boost(s: Sample, window: int = DEFAULT_WINDOW, renormalize: bool = True) -> Sample:
    """Multiply bins from ~1000 Hz upward by 5*pi, then restore the input's peak level.

    For a normalized input this is the same as normalizing the boosted
    signal.  An input that is already quiet (e.g. a high-pass residue)
    stays quiet instead of being blown up to full scale.
    """
    boosted = fft_filter(s, boost_response(window, s.sample_rate), window)
    if not renormalize or len(s) == 0:
        return boosted
    in_peak = np.max(np.abs(s.amplitudes))
    out_peak = np.max(np.abs(boosted.amplitudes))
    if out_peak <= NEAR_ZERO:
        return boosted
    return boosted.with_amplitudes(boosted.amplitudes * (in_peak / out_peak))


def _apply_method(config: PreprocessConfig, s: Sample) -> Sample:
    m = config.method
    w = config.window
    if m in (Method.RAW, Method.NORMALIZE):
        return s
    if m is Method.LOW_PASS:
        return low_pass(s, w)
    if m is Method.HIGH_PASS:
        return high_pass(s, w)
    if m is Method.BAND_PASS:
        return band_pass(s, w)
    if m is Method.BAND_STOP:
        return band_stop(s, w)
    if m is Method.BOOST:
        return high_freq_boost(s, w)
    if m is Method.HIGH_PASS_BOOST:
        return high_freq_boost(high_pass(s, w), w)
    if m is Method.ENDPOINT:
        return endpoint(s, config.endpoint_edges, config.endpoint_runs)
    raise ValueError(f"unknown preprocessing method {m!r}")


def chain(first: PreprocessConfig, second: PreprocessConfig, s: Sample) -> Sample:
    """Run the transform of ``first`` and feed its output to ``second``.

    Only the configured transforms are chained; normalization is a
    transform of its own (``Method.NORMALIZE``).
    """
    def step(cfg, x):
        if cfg.method is Method.NORMALIZE:
            return normalize(x)
        return _apply_method(cfg, x)

    return step(second, step(first, s))


def preprocess(config: PreprocessConfig, s: Sample) -> Sample:
    """Normalize (unless raw), optionally drop silence, then filter or endpoint."""
    if config.method is Method.RAW:
        return s
    if config.noise:
        log.warning("noise removal is not implemented; flag ignored")
    out = normalize(s)
    if config.remove_silence:
        out = remove_silence(out, config.silence_threshold)
    return _apply_method(config, out)
