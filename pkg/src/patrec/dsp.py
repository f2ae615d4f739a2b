"""Windowing and the radix-2 FFT used by filters and feature extractors."""

from __future__ import annotations

import numpy as np


def hamming(n: int, length: int) -> float:
    """Value of the symmetric Hamming window at index ``n``.

    ``0.54 - 0.46 * cos(2*pi*n / (length - 1))``
    """
    if length < 2:
        raise ValueError(f"window length must be >= 2, got {length}")
    if not 0 <= n < length:
        raise ValueError(f"index {n} outside window of length {length}")
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * n / (length - 1))


def hamming_window(length: int) -> np.ndarray:
    if length < 2:
        raise ValueError(f"window length must be >= 2, got {length}")
    n = np.arange(length)
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * n / (length - 1))


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def _bit_reverse_permutation(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def _transform(re: np.ndarray, im: np.ndarray, sign: float):
    n = re.shape[-1]
    if not is_power_of_two(n):
        raise ValueError(f"FFT length must be a power of two, got {n}")
    perm = _bit_reverse_permutation(n)
    x = (re + 1j * im)[..., perm]
    half = 1
    while half < n:
        span = 2 * half
        twiddle = np.exp(sign * 2j * np.pi * np.arange(half) / span)
        blocks = x.reshape(x.shape[:-1] + (n // span, span))
        even = blocks[..., :half]
        odd = blocks[..., half:] * twiddle
        blocks = np.concatenate((even + odd, even - odd), axis=-1)
        x = blocks.reshape(x.shape)
        half = span
    return x


def fft(real, imag=None) -> tuple[np.ndarray, np.ndarray]:
    """Forward DFT ``X_k = sum_n x_n exp(-2 pi i k n / N)`` along the last axis.

    Decimation in time: inputs are shuffled into bit-reversed order, then
    combined by butterflies of doubling span.  Leading axes are treated as
    a batch of independent transforms.
    """
    re = np.asarray(real, dtype=np.float64)
    im = np.zeros_like(re) if imag is None else np.asarray(imag, dtype=np.float64)
    if re.shape != im.shape:
        raise ValueError("real and imaginary parts differ in shape")
    x = _transform(re, im, -1.0)
    return x.real.copy(), x.imag.copy()


def ifft(real, imag=None) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`fft` (conjugate twiddles, scaled by 1/N)."""
    re = np.asarray(real, dtype=np.float64)
    im = np.zeros_like(re) if imag is None else np.asarray(imag, dtype=np.float64)
    if re.shape != im.shape:
        raise ValueError("real and imaginary parts differ in shape")
    x = _transform(re, im, 1.0) / re.shape[-1]
    return x.real.copy(), x.imag.copy()


def magnitude(real, imag) -> np.ndarray:
    return np.hypot(real, imag)


def frames(x: np.ndarray, size: int, hop: int) -> np.ndarray:
    """Full frames of ``size`` starting every ``hop`` points; a partial tail is dropped."""
    if x.size < size:
        return np.empty((0, size))
    count = 1 + (x.size - size) // hop
    idx = np.arange(size)[None, :] + hop * np.arange(count)[:, None]
    return x[idx]
