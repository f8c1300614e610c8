"""Deterministic 64-bit RNG (xoshiro256**) with stable seed derivation.

Results must reproduce bit-for-bit across runs, platforms, and worker
counts, so gameplay never touches ``random``'s process-global state.
Every game owns one `GameRng`, seeded via `derive_seed`, which is a pure
function of (master seed, index): per-game streams depend only on their
position in the run, never on scheduling order.
"""

from __future__ import annotations

from typing import MutableSequence, Sequence, TypeVar

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15  # splitmix64 increment

T = TypeVar("T")


def _mix64(x: int) -> int:
    # splitmix64 output finalizer (Steele et al.)
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(master_seed: int, index: int) -> int:
    """Seed for the ``index``-th independent stream under ``master_seed``.

    Counter-based (splitmix64 evaluated at position ``index``), so
    deriving seed N is O(1) and reordering derivations changes nothing.
    """
    if index < 0:
        raise ValueError(f"stream index must be >= 0, got {index}")
    return _mix64((master_seed + (index + 1) * _GOLDEN) & _MASK64)


class GameRng:
    """xoshiro256** generator with the small sampling API games need."""

    __slots__ = ("_s0", "_s1", "_s2", "_s3")

    def __init__(self, seed: int):
        seed &= _MASK64
        self._s0 = _mix64((seed + _GOLDEN) & _MASK64)
        self._s1 = _mix64((seed + 2 * _GOLDEN) & _MASK64)
        self._s2 = _mix64((seed + 3 * _GOLDEN) & _MASK64)
        self._s3 = _mix64((seed + 4 * _GOLDEN) & _MASK64)
        if self._s0 == self._s1 == self._s2 == self._s3 == 0:
            self._s0 = _GOLDEN  # all-zero state is the one forbidden seed

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s0, self._s1, self._s2, self._s3
        r = (s1 * 5) & _MASK64
        r = ((r << 7) | (r >> 57)) & _MASK64
        result = (r * 9) & _MASK64

        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & _MASK64

        self._s0, self._s1, self._s2, self._s3 = s0, s1, s2, s3
        return result

    def randbelow(self, n: int) -> int:
        """Unbiased integer in [0, n), by rejection sampling."""
        if n <= 0:
            raise ValueError(f"randbelow needs n >= 1, got {n}")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def choice(self, seq: Sequence[T]) -> T:
        if not seq:
            raise ValueError("cannot choose from an empty sequence")
        return seq[self.randbelow(len(seq))]

    def shuffle(self, seq: MutableSequence) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(seq) - 1, 0, -1):
            j = self.randbelow(i + 1)
            seq[i], seq[j] = seq[j], seq[i]
