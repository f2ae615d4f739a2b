"""Feature extractors: FFT, LPC, min/max, random and aggregates of those."""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .audio import Sample
from .dsp import fft, frames, hamming_window, is_power_of_two


class Extractor(str, Enum):
    FFT = "fft"
    LPC = "lpc"
    MINMAX = "minmax"
    RANDOM = "randfe"
    AGGREGATE = "aggr"


class FeatureError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureConfig:
    extractor: Extractor = Extractor.FFT
    fft_window: int = 1024
    lpc_order: int = 20
    lpc_window: int = 128
    minmax_n_mins: int = 50
    minmax_x_maxes: int = 50
    aggregate_list: tuple = (Extractor.FFT, Extractor.LPC)
    random_window: int = 256
    seed: int = 0
    parallel: bool = False

    def __post_init__(self):
        object.__setattr__(self, "extractor", Extractor(self.extractor))
        object.__setattr__(self, "aggregate_list",
                           tuple(Extractor(e) for e in self.aggregate_list))
        if not is_power_of_two(self.fft_window) or self.fft_window < 2:
            raise ValueError(f"FFT window must be a power of two >= 2, got {self.fft_window}")
        if self.lpc_order < 1:
            raise ValueError(f"LPC order must be >= 1, got {self.lpc_order}")
        if self.lpc_order >= self.lpc_window:
            raise ValueError(
                f"LPC order {self.lpc_order} must be below the LPC window {self.lpc_window}")
        if self.minmax_n_mins < 0 or self.minmax_x_maxes < 0 \
                or self.minmax_n_mins + self.minmax_x_maxes < 1:
            raise ValueError("min/max extractor needs at least one point")
        if self.random_window < 1:
            raise ValueError("random window must be positive")
        if Extractor.AGGREGATE in self.aggregate_list:
            raise ValueError("aggregates cannot nest")
        if self.extractor is Extractor.AGGREGATE and not self.aggregate_list:
            raise ValueError("aggregate list is empty")

    @property
    def key(self) -> str:
        """Identifier used in storage file names."""
        if self.extractor is Extractor.AGGREGATE:
            return "-".join(["aggr"] + [e.value for e in self.aggregate_list])
        return self.extractor.value

    def digest(self) -> str:
        """Short token identifying the parameters that shape the output vector."""
        e = self.extractor
        if e is Extractor.FFT:
            parts = [e.value, self.fft_window]
        elif e is Extractor.LPC:
            parts = [e.value, self.lpc_order, self.lpc_window]
        elif e is Extractor.MINMAX:
            parts = [e.value, self.minmax_n_mins, self.minmax_x_maxes]
        elif e is Extractor.RANDOM:
            parts = [e.value, self.random_window, self.seed]
        else:
            parts = [self.key]
        return hashlib.sha1(repr(parts).encode()).hexdigest()[:12]


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    extractor_id: Extractor
    params_digest: str = field(default="")

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if v.size == 0:
            raise FeatureError("feature vector is empty")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size


def extract_fft_values(s: Sample, window: int = 1024) -> np.ndarray:
    a = s.amplitudes
    if a.size == 0:
        raise FeatureError("cannot extract FFT features from an empty sample")
    if a.size < window:
        a = np.concatenate((a, np.zeros(window - a.size)))
    blocks = frames(a, window, window // 2) * hamming_window(window)
    re, im = fft(blocks)
    mags = np.hypot(re[:, :window // 2], im[:, :window // 2])
    return mags.mean(axis=0)


def extract_fft(s: Sample, cfg: FeatureConfig | None = None) -> FeatureVector:
    """Average magnitude spectrum over half-overlapped Hamming frames."""
    cfg = cfg or FeatureConfig()
    return FeatureVector(extract_fft_values(s, cfg.fft_window), Extractor.FFT, cfg.digest())


def autocorrelation(x, k: int) -> float:
    """``R(k) = sum_{m=k}^{n-1} x[m] * x[m-k]``."""
    x = np.asarray(x, dtype=np.float64)
    if not 0 <= k < x.size:
        raise ValueError(f"lag {k} outside [0, {x.size})")
    return float(np.dot(x[k:], x[:x.size - k]))


def lpc_coefficients(x, p: int) -> tuple[np.ndarray, float]:
    """Levinson-Durbin recursion on the autocorrelation of ``x``.

    Returns the order-``p`` predictor ``a[1..p]`` and the final residual.
    """
    x = np.asarray(x, dtype=np.float64)
    if p < 1 or p >= x.size:
        raise ValueError(f"order {p} must satisfy 1 <= p < {x.size}")
    r = np.array([autocorrelation(x, k) for k in range(p + 1)])
    if r[0] == 0.0:
        raise FeatureError("zero-energy window (R(0) == 0)")
    a = np.zeros(p + 1)
    e = r[0]
    for m in range(1, p + 1):
        km = (r[m] - np.dot(a[1:m], r[m - 1:0:-1])) / e
        prev = a.copy()
        a[m] = km
        a[1:m] = prev[1:m] - km * prev[m - 1:0:-1]
        e = (1.0 - km * km) * e
        if e <= 0.0:
            if m < p:
                raise FeatureError(f"residual reached zero at order {m}")
            e = max(e, 0.0)
    return a[1:].copy(), float(e)


def extract_lpc(s: Sample, cfg: FeatureConfig | None = None) -> FeatureVector:
    """Mean LPC coefficient vector over half-overlapped Hamming frames.

    Frames with no energy carry no spectral shape and are left out of the
    mean; a sample made only of such frames is an error.
    """
    cfg = cfg or FeatureConfig()
    a = s.amplitudes
    w = cfg.lpc_window
    if a.size < w:
        raise FeatureError(f"sample of {a.size} points is shorter than one LPC window ({w})")
    blocks = frames(a, w, w // 2) * hamming_window(w)
    coeffs = []
    for block in blocks:
        try:
            c, _ = lpc_coefficients(block, cfg.lpc_order)
        except FeatureError:
            continue
        coeffs.append(c)
    if not coeffs:
        raise FeatureError("every LPC frame has zero energy")
    return FeatureVector(np.mean(coeffs, axis=0), Extractor.LPC, cfg.digest())


def extract_minmax_values(a, n_mins: int = 50, x_maxes: int = 50) -> np.ndarray:
    a = np.sort(np.asarray(a, dtype=np.float64))
    if a.size == 0:
        raise FeatureError("cannot extract min/max features from an empty sample")
    if n_mins < 0 or x_maxes < 0 or n_mins + x_maxes < 1:
        raise ValueError("need at least one min or max")
    want = n_mins + x_maxes
    if a.size < want:
        mid = a.size // 2
        a = np.insert(a, mid, np.full(want - a.size, a[mid]))
    return np.concatenate((a[:n_mins], a[a.size - x_maxes:]))


def extract_minmax(s: Sample, cfg: FeatureConfig | None = None) -> FeatureVector:
    cfg = cfg or FeatureConfig()
    v = extract_minmax_values(s.amplitudes, cfg.minmax_n_mins, cfg.minmax_x_maxes)
    return FeatureVector(v, Extractor.MINMAX, cfg.digest())


def _gaussians(rng: np.random.Generator, count: int) -> np.ndarray:
    # Box-Muller; 1 - u keeps the log argument in (0, 1]
    u1 = 1.0 - rng.random(count)
    u2 = rng.random(count)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * math.pi * u2)


def extract_random(s: Sample, cfg: FeatureConfig | None = None,
                   seed: int | None = None) -> FeatureVector:
    """Sum of sample windows, each scaled by its own Gaussian draw."""
    cfg = cfg or FeatureConfig()
    seed = cfg.seed if seed is None else seed
    w = cfg.random_window
    a = s.amplitudes
    count = max(1, -(-a.size // w))
    padded = np.zeros(count * w)
    padded[:a.size] = a
    g = _gaussians(np.random.default_rng(seed), count)
    v = (padded.reshape(count, w) * g[:, None]).sum(axis=0)
    return FeatureVector(v, Extractor.RANDOM, cfg.digest())


_SINGLE = {
    Extractor.FFT: extract_fft,
    Extractor.LPC: extract_lpc,
    Extractor.MINMAX: extract_minmax,
    Extractor.RANDOM: extract_random,
}


def extract_aggregate(s: Sample, cfg: FeatureConfig | None = None) -> FeatureVector:
    """Concatenate the listed extractors, each run with default settings."""
    cfg = cfg or FeatureConfig(extractor=Extractor.AGGREGATE)
    if not cfg.aggregate_list:
        raise ValueError("aggregate list is empty")

    def run(e):
        return _SINGLE[e](s.copy(), FeatureConfig(extractor=e)).values

    if cfg.parallel and len(cfg.aggregate_list) > 1:
        with ThreadPoolExecutor(max_workers=len(cfg.aggregate_list)) as pool:
            parts = list(pool.map(run, cfg.aggregate_list))
    else:
        parts = [run(e) for e in cfg.aggregate_list]
    return FeatureVector(np.concatenate(parts), Extractor.AGGREGATE, cfg.digest())


def extract(s: Sample, cfg: FeatureConfig) -> FeatureVector:
    if cfg.extractor is Extractor.AGGREGATE:
        return extract_aggregate(s, cfg)
    return _SINGLE[cfg.extractor](s, cfg)
