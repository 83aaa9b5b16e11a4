"""Count sketch and compact bilinear pooling.

Hash plans come from a counter-based SplitMix64 stream so a plan is a pure
function of ``(seed, input_dim, output_dim)``::

    z  = seed + (k + 1) * 0x9E3779B97F4A7C15            (mod 2**64)
    z  = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z  = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z  =  z ^ (z >> 31)

Draw ``k = 2*i`` gives ``bucket[i] = z % output_dim`` and draw ``k = 2*i + 1``
gives ``sign[i] = +1`` if its top bit is clear, else ``-1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch

DEFAULT_DIM = 16000

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def splitmix64(seed: int, counters: np.ndarray) -> np.ndarray:
    """SplitMix64 outputs for the given draw indices (uint64 array)."""
    k = np.asarray(counters, dtype=np.uint64)
    z = np.uint64(seed & _MASK64) + (k + np.uint64(1)) * _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@dataclass(frozen=True)
class SketchPlan:
    input_dim: int
    output_dim: int
    bucket: np.ndarray
    sign: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        bucket = np.asarray(self.bucket, dtype=np.intp)
        sign = np.asarray(self.sign, dtype=np.float64)
        if bucket.shape != (self.input_dim,) or sign.shape != (self.input_dim,):
            raise DimensionMismatch("bucket and sign must have length input_dim")
        if self.output_dim < 1 or np.any(bucket < 0) or np.any(bucket >= self.output_dim):
            raise ValueError("buckets must lie in [0, output_dim)")
        if not np.all(np.abs(sign) == 1):
            raise ValueError("signs must be +1 or -1")
        object.__setattr__(self, "bucket", bucket)
        object.__setattr__(self, "sign", sign)

    @classmethod
    def from_seed(cls, input_dim: int, output_dim: int = DEFAULT_DIM, seed: int = 0) -> "SketchPlan":
        idx = np.arange(input_dim, dtype=np.uint64)
        bucket = (splitmix64(seed, 2 * idx) % np.uint64(output_dim)).astype(np.intp)
        top = splitmix64(seed, 2 * idx + np.uint64(1)) >> np.uint64(63)
        sign = 1.0 - 2.0 * top.astype(np.float64)
        return cls(input_dim, output_dim, bucket, sign, seed)


def count_sketch(x, plan: SketchPlan) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (plan.input_dim,):
        raise DimensionMismatch(f"vector length {x.size} does not match plan input_dim {plan.input_dim}")
    return np.bincount(plan.bucket, weights=plan.sign * x, minlength=plan.output_dim)


def mcb_pool(x, y, plan_x: SketchPlan, plan_y: SketchPlan) -> np.ndarray:
    """Circular convolution of the two count sketches, via the real FFT."""
    d = plan_x.output_dim
    if plan_y.output_dim != d:
        raise DimensionMismatch(f"plans disagree on output_dim: {d} vs {plan_y.output_dim}")
    fx = np.fft.rfft(count_sketch(x, plan_x), n=d)
    fy = np.fft.rfft(count_sketch(y, plan_y), n=d)
    return np.fft.irfft(fx * fy, n=d)


def concat(parts) -> np.ndarray:
    parts = [np.asarray(p, dtype=np.float64).ravel() for p in parts]
    if not parts:
        return np.zeros(0)
    return np.concatenate(parts)
