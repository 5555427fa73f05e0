"""Blocked FFT convolution written as fusion-frame representations.

Overlap-add splits the input into disjoint length-``B`` slices (a fusion
orthonormal basis of coordinate slices of C^N); each slice convolved with
an ``L``-tap filter lands in an output slice of length ``B + L - 1``. These
output slices overlap and form a Bessel fusion sequence ``V`` in
``C^(N + L - 1)``. The convolution operator is ``T_V M T_W*`` with a block
diagonal ``M`` whose diagonal entries are the short convolutions.

Overlap-save reads overlapping input slices of length ``B + L - 1`` and keeps
the last ``B`` outputs of each circular convolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocks import BlockOpMatrix
from .frames import FusionSequence

__all__ = [
    "Signal",
    "BlockingScheme",
    "direct_conv",
    "circular_conv",
    "overlap_add",
    "overlap_save",
    "oa_block_matrix",
    "slice_frames",
    "toeplitz_matrix",
    "next_pow2",
    "max_overlap",
]


@dataclass(frozen=True, eq=False)
class Signal:
    samples: np.ndarray
    origin: int = 0

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(s)):
            raise ValueError("signal has non-finite samples")
        object.__setattr__(self, "samples", s)

    def __len__(self):
        return self.samples.size


def _as_signal(x) -> Signal:
    return x if isinstance(x, Signal) else Signal(x)


@dataclass(frozen=True)
class BlockingScheme:
    block_len: int
    filter_len: int
    n_blocks: int

    def __post_init__(self):
        if self.block_len < 1 or self.filter_len < 1 or self.n_blocks < 0:
            raise ValueError(f"invalid blocking scheme {self}")

    @classmethod
    def for_signal(cls, signal_len: int, block_len: int, filter_len: int) -> "BlockingScheme":
        return cls(block_len, filter_len, -(-signal_len // block_len))

    @property
    def fft_size(self) -> int:
        return next_pow2(self.block_len + self.filter_len - 1)


def next_pow2(n: int) -> int:
    return 1 << max(0, int(n - 1).bit_length())


def direct_conv(f, h) -> Signal:
    f, h = _as_signal(f), _as_signal(h)
    if len(f) == 0 or len(h) == 0:
        return Signal(np.zeros(0), f.origin + h.origin)
    return Signal(np.convolve(f.samples, h.samples), f.origin + h.origin)


def circular_conv(f, h, n: int) -> np.ndarray:
    f = np.asarray(f, dtype=complex).reshape(-1)
    h = np.asarray(h, dtype=complex).reshape(-1)
    if f.size > n or h.size > n:
        raise ValueError(f"inputs of length {f.size}, {h.size} exceed transform size {n}")
    return np.fft.ifft(np.fft.fft(f, n) * np.fft.fft(h, n))


def _check_scheme(h: Signal, scheme: BlockingScheme | int, n: int) -> BlockingScheme:
    if isinstance(scheme, int):
        scheme = BlockingScheme.for_signal(n, scheme, len(h))
    if scheme.filter_len != len(h):
        raise ValueError(f"scheme expects a {scheme.filter_len}-tap filter, got {len(h)}")
    return scheme


def overlap_add(f, h, scheme: BlockingScheme | int) -> Signal:
    f, h = _as_signal(f), _as_signal(h)
    scheme = _check_scheme(h, scheme, len(f))
    b, lh = scheme.block_len, scheme.filter_len
    nfft = scheme.fft_size
    n_out = len(f) + lh - 1
    n_blocks = max(scheme.n_blocks, -(-len(f) // b))
    out = np.zeros(n_blocks * b + lh - 1, dtype=complex)
    hf = np.fft.fft(h.samples, nfft)
    # fixed left-to-right accumulation order
    for i in range(n_blocks):
        seg = f.samples[i * b:(i + 1) * b]
        if seg.size == 0:
            continue
        y = np.fft.ifft(np.fft.fft(seg, nfft) * hf)[: b + lh - 1]
        out[i * b:i * b + b + lh - 1] += y
    return Signal(out[:n_out], f.origin + h.origin)


def overlap_save(f, h, scheme: BlockingScheme | int) -> Signal:
    f, h = _as_signal(f), _as_signal(h)
    scheme = _check_scheme(h, scheme, len(f))
    b, lh = scheme.block_len, scheme.filter_len
    nfft = scheme.fft_size
    n_out = len(f) + lh - 1
    n_blocks = -(-n_out // b)
    padded = np.concatenate(
        [np.zeros(lh - 1, complex), f.samples, np.zeros(n_blocks * b - len(f), complex)]
    )
    hf = np.fft.fft(h.samples, nfft)
    out = np.empty(n_blocks * b, dtype=complex)
    for i in range(n_blocks):
        seg = padded[i * b:i * b + b + lh - 1]
        y = np.fft.ifft(np.fft.fft(seg, nfft) * hf)
        out[i * b:(i + 1) * b] = y[lh - 1:lh - 1 + b]
    return Signal(out[:n_out], f.origin + h.origin)


def toeplitz_matrix(h, n_in: int) -> np.ndarray:
    """Dense ``(n_in + L - 1) x n_in`` matrix of full linear convolution with ``h``."""
    h = np.asarray(h, dtype=complex).reshape(-1)
    t = np.zeros((n_in + h.size - 1, n_in), dtype=complex)
    for k in range(n_in):
        t[k:k + h.size, k] = h
    return t


def slice_frames(n: int, scheme: BlockingScheme) -> tuple[FusionSequence, FusionSequence]:
    """Input slices ``W`` of C^N and overlapping output slices ``V`` of C^(N + L - 1).

    ``N`` is rounded up to a whole number of blocks; the tail of the last
    input block is zero padding.
    """
    b, lh = scheme.block_len, scheme.filter_len
    n_blocks = max(scheme.n_blocks, -(-n // b))
    n_in = n_blocks * b
    eye_in = np.eye(n_in)
    eye_out = np.eye(n_in + lh - 1)
    w = FusionSequence.from_bases([eye_in[:, i * b:(i + 1) * b] for i in range(n_blocks)])
    v = FusionSequence.from_bases([eye_out[:, i * b:i * b + b + lh - 1] for i in range(n_blocks)])
    return w, v


def oa_block_matrix(h, scheme: BlockingScheme) -> BlockOpMatrix:
    """Block-diagonal ``M^oa`` from the input-slice direct sum to the output-slice one.

    Rows are indexed by output slices ``V_i``, columns by input slices
    ``W_i``; every diagonal block is the ``(B + L - 1) x B`` convolution
    matrix of ``h`` and every off-diagonal block is zero.
    """
    h = _as_signal(h)
    if scheme.filter_len != len(h):
        raise ValueError("filter length does not match the scheme")
    local = toeplitz_matrix(h.samples, scheme.block_len)
    return BlockOpMatrix.block_diag([local] * scheme.n_blocks)


def max_overlap(n: int, scheme: BlockingScheme) -> int:
    """Largest number of output slices covering one output sample."""
    b, lh = scheme.block_len, scheme.filter_len
    n_blocks = max(scheme.n_blocks, -(-n // b))
    counts = np.zeros(n_blocks * b + lh - 1, dtype=int)
    for i in range(n_blocks):
        counts[i * b:i * b + b + lh - 1] += 1
    return int(counts.max(initial=0))
