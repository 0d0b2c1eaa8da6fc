"""Deterministic random streams used by every stochastic component.

The generator is pinned down here instead of delegating to a library
default: graph search, verification sampling and noise draws must be
reproducible from a single integer seed, and parallel trial schedules must
not change results (each trial derives its own stream from (seed, index)).

Algorithm (splitmix64, counter mode): the i-th state is
``seed + i * 0x9E3779B97F4A7C15 mod 2^64`` and the i-th output word is the
standard splitmix64 finalizer of that state (multipliers
0xBF58476D1CE4E5B9 and 0x94D049BB133111EB, shifts 30/27/31).

Derived values:
  * uniform double in [0, 1): top 53 bits of a word times 2**-53,
  * bounded integer below k: word mod k (bias is negligible at the sizes
    used here and keeps the stream definition trivial),
  * standard Gaussians: Box-Muller on word pairs (u1, u2) with
    r = sqrt(-2 ln(1 - u1)), angle 2 pi u2; the pair yields r cos, r sin.

``Stream`` consumes words one by one; ``gaussians`` computes the same
words in bulk with numpy. Both walk the identical counter sequence.
"""

from __future__ import annotations

import math

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(x: int) -> int:
    """splitmix64 finalizer of a 64-bit integer."""
    x &= _MASK
    x = ((x ^ (x >> 30)) * _MIX1) & _MASK
    x = ((x ^ (x >> 27)) * _MIX2) & _MASK
    return x ^ (x >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Per-trial sub-seed; trials can run in any order or in parallel."""
    return mix64((mix64(seed) + _GOLDEN * (index + 1)) & _MASK)


class Stream:
    """Scalar word stream: state_i = seed + i * GOLDEN, word_i = mix64(state_i)."""

    def __init__(self, seed: int):
        self._seed = seed & _MASK
        self._i = 0

    def next_u64(self) -> int:
        self._i += 1
        return mix64((self._seed + self._i * _GOLDEN) & _MASK)

    def uniform(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * 2.0**-53

    def below(self, k: int) -> int:
        """Integer in [0, k)."""
        if k <= 0:
            raise ValueError("k must be positive")
        return self.next_u64() % k

    def sign(self) -> int:
        """+1 or -1 from the top bit of one word."""
        return 1 if (self.next_u64() >> 63) == 0 else -1

    def signed_uniform(self, lo: float, hi: float) -> float:
        """Random sign times a uniform magnitude in [lo, hi). Two words."""
        s = self.sign()
        return s * (lo + (hi - lo) * self.uniform())

    def gaussian_pair(self) -> tuple[float, float]:
        u1 = self.uniform()
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log1p(-u1))
        a = 2.0 * math.pi * u2
        return r * math.cos(a), r * math.sin(a)

    def sample_without_replacement(self, n: int, k: int) -> list[int]:
        """Sorted k distinct integers from [0, n), partial Fisher-Yates."""
        if not 0 <= k <= n:
            raise ValueError(f"cannot draw {k} from {n}")
        arr = list(range(n))
        for i in range(k):
            j = i + self.below(n - i)
            arr[i], arr[j] = arr[j], arr[i]
        return sorted(arr[:k])


def _words(seed: int, start: int, count: int) -> np.ndarray:
    """Vectorized words for counter positions start+1 .. start+count."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    x = (np.uint64(seed & _MASK) + idx * np.uint64(_GOLDEN))
    x = (x ^ (x >> np.uint64(30))) * np.uint64(_MIX1)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(_MIX2)
    return x ^ (x >> np.uint64(31))


def uniforms(seed: int, count: int, start: int = 0) -> np.ndarray:
    """Vector of uniforms in [0, 1); identical to Stream word for word."""
    return (_words(seed, start, count) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def gaussians(seed: int, count: int) -> np.ndarray:
    """Vector of standard Gaussians, same stream as Stream.gaussian_pair."""
    pairs = (count + 1) // 2
    u = uniforms(seed, 2 * pairs)
    u1, u2 = u[0::2], u[1::2]
    r = np.sqrt(-2.0 * np.log1p(-u1))
    a = 2.0 * np.pi * u2
    out = np.empty(2 * pairs)
    out[0::2] = r * np.cos(a)
    out[1::2] = r * np.sin(a)
    return out[:count]
