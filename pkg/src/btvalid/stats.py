"""Deterministic resampling kernel shared by the sentiment and topic analytics.

Every random draw in the toolkit goes through an :class:`RngStream`, a
``(seed, label)`` pair that maps to a numpy ``PCG64`` generator.  The label is
hashed into the ``SeedSequence`` spawn key, so two streams with different
labels are statistically independent and a stream never depends on the order
in which other streams were consumed.

Percentiles use linear interpolation between order statistics (numpy's
``method="linear"``, also known as Hyndman & Fan type 7).
"""

from __future__ import annotations

import hashlib
from dataclasses import asdict, dataclass
from typing import Any, Callable, Sequence

import numpy as np

PRNG_ID = "numpy.PCG64+SeedSequence(seed, sha256(label))"
PERCENTILE_METHOD = "linear"

# Replicate blocks are drawn this many at a time; fixed so draws never depend on memory tuning.
_BLOCK = 64


def _label_key(label: str) -> tuple[int, ...]:
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    return tuple(int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4))


@dataclass(frozen=True)
class RngStream:
    """A named, reproducible random stream."""

    seed: int
    label: str = ""

    def generator(self) -> np.random.Generator:
        if self.seed < 0 or self.seed >= 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=_label_key(self.label))
        return np.random.Generator(np.random.PCG64(seq))

    def child(self, suffix: str) -> "RngStream":
        return RngStream(self.seed, f"{self.label}/{suffix}" if self.label else suffix)


@dataclass(frozen=True)
class IntervalSummary:
    median: float
    low: float
    high: float
    level: float
    replicates: int

    @property
    def interval(self) -> tuple[float, float]:
        return (self.low, self.high)

    @property
    def width(self) -> float:
        return self.high - self.low

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def percentile(values: Sequence[float] | np.ndarray, q: float) -> float:
    """Percentile ``q`` (0-100) with linear interpolation between order statistics."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("percentile of an empty sequence")
    return float(np.percentile(arr, q, method=PERCENTILE_METHOD))


def summarize(samples: Sequence[float] | np.ndarray, level: float) -> IntervalSummary:
    """Median and central ``level`` percentile interval of replicate statistics."""
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {level}")
    arr = np.asarray(samples, dtype=float)
    tail = (1.0 - level) / 2.0
    low, med, high = np.percentile(arr, [100 * tail, 50.0, 100 * (1 - tail)], method=PERCENTILE_METHOD)
    # Interpolation can put the median one ulp outside the bounds on constant input.
    med = float(min(max(med, low), high))
    return IntervalSummary(float(med), float(low), float(high), level, int(arr.size))


def bootstrap_samples(
    items: Sequence[Any] | np.ndarray,
    statistic: Callable[..., float],
    replicates: int,
    stream: RngStream,
    vectorized: bool = False,
) -> np.ndarray:
    """Replicate statistics from resampling ``items`` with replacement.

    With ``vectorized=True`` the statistic is called once per block as
    ``statistic(block, axis=1)`` on a ``(block, n)`` array and must return one
    value per row; ``np.mean`` qualifies.
    """
    arr = np.asarray(items)
    n = len(arr)
    if n == 0:
        raise ValueError("cannot bootstrap an empty item list")
    if replicates < 1:
        raise ValueError(f"replicates must be >= 1, got {replicates}")
    rng = stream.generator()
    out = np.empty(replicates, dtype=float)
    for start in range(0, replicates, _BLOCK):
        stop = min(start + _BLOCK, replicates)
        idx = rng.integers(0, n, size=(stop - start, n))
        block = arr[idx]
        if vectorized:
            out[start:stop] = statistic(block, axis=1)
        else:
            out[start:stop] = [statistic(row) for row in block]
    return out


def bootstrap(
    items: Sequence[Any] | np.ndarray,
    statistic: Callable[..., float],
    replicates: int = 1000,
    level: float = 0.99,
    stream: RngStream | None = None,
    vectorized: bool = False,
) -> IntervalSummary:
    """Percentile bootstrap: median and central ``level`` interval of ``statistic``."""
    if stream is None:
        raise ValueError("bootstrap requires an explicit RngStream")
    samples = bootstrap_samples(items, statistic, replicates, stream, vectorized=vectorized)
    return summarize(samples, level)


def permute(items: Sequence[Any], stream: RngStream) -> list[Any]:
    """Uniform random permutation of ``items`` (Fisher-Yates via numpy)."""
    order = stream.generator().permutation(len(items))
    return [items[i] for i in order]
