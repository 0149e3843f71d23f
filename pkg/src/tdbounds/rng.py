"""Deterministic random streams.

All randomness in this package flows through :class:`RngStream`, a
counter-based generator built on the SplitMix64 finalizer.  A draw is a
pure function of ``(seed, stream_id, position)``, so every stream can be
reproduced bit for bit on any platform, and independent replicates can
be generated in any order or in parallel without coordination.

The construction, stated fully so results can be reproduced outside this
package:

* ``mix64`` is the SplitMix64 finalizer: ``z ^= z >> 30``,
  ``z *= 0xBF58476D1CE4E5B9``, ``z ^= z >> 27``,
  ``z *= 0x94D049BB133111EB``, ``z ^= z >> 31`` (all mod 2**64).
* A stream's base state is ``mix64(mix64(seed) + stream_id * GOLDEN)``
  where ``GOLDEN = 0x9E3779B97F4A7C15``.
* Output word ``n`` (counting from 0) is ``mix64(base + (n + 1) * GOLDEN)``.
* A uniform draw keeps the top 53 bits: ``(word >> 11) * 2.0**-53``,
  a double in ``[0, 1)``.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB


def _mix64(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & _MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    # same arithmetic as _mix64 on a uint64 array; numpy wraps mod 2**64
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX_A)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX_B)
    return z ^ (z >> np.uint64(31))


class RngStream:
    """One named deterministic stream of uniforms.

    Instances are cheap; state is a single counter.  Use
    :func:`derive_stream` rather than constructing directly.
    """

    __slots__ = ("seed", "stream_id", "_base", "_position")

    def __init__(self, seed: int, stream_id: int, base: int, position: int = 0):
        self.seed = seed
        self.stream_id = stream_id
        self._base = base
        self._position = position

    @property
    def position(self) -> int:
        """Number of words drawn so far."""
        return self._position

    def uniform(self) -> float:
        """Draw one double in [0, 1)."""
        self._position += 1
        word = _mix64(self._base + self._position * _GOLDEN)
        return (word >> 11) * 2.0**-53

    def uniforms(self, n: int) -> np.ndarray:
        """Draw ``n`` doubles in [0, 1) as a float64 array."""
        if n < 0:
            raise ValueError("n must be >= 0")
        idx = np.arange(self._position + 1, self._position + n + 1, dtype=np.uint64)
        self._position += n
        words = _mix64_array(np.uint64(self._base) + idx * np.uint64(_GOLDEN))
        return (words >> np.uint64(11)) * 2.0**-53

    def __repr__(self) -> str:
        return (
            f"RngStream(seed={self.seed}, stream_id={self.stream_id}, "
            f"position={self._position})"
        )


def derive_stream(seed: int, stream_id: int = 0) -> RngStream:
    """Derive an independent stream from a seed and a stream id.

    Identical arguments always yield the identical sequence; distinct
    ``stream_id`` values give streams with unrelated contents, which is
    how per-replicate randomness is split in the experiment drivers.
    """
    base = _mix64(_mix64(seed & _MASK64) + (stream_id & _MASK64) * _GOLDEN)
    return RngStream(seed, stream_id, base)
