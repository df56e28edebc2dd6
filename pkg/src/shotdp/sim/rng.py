"""
Counter-based, splittable random streams
"""

from typing import Tuple

import numpy as np


class RngStream:
    """
    Immutable handle to a reproducible random stream

    A stream is identified by a root seed and a key path. ``child`` derives
    a new stream by extending the key path, so the numbers a task receives
    depend only on its key and never on the order in which tasks run.
    ``generator`` always returns a fresh Philox generator positioned at the
    start of the stream, so repeated calls replay the same sequence.

    Example:
    >>> from shotdp.sim import RngStream

    >>> root = RngStream(seed=7)
    >>> step_stream = root.child(3)          # step 3
    >>> plus_shots = step_stream.child(0)    # positive-shift outcomes
    >>> rng = plus_shots.generator()
    >>> rng.random()
    """

    def __init__(self, seed: int, key: Tuple[int, ...] = ()):
        """
        Initialize a random stream

        Args:
            seed: Non-negative root seed
            key: Key path below the root seed
        """
        if int(seed) < 0:
            raise ValueError(f"Seed must be non-negative, got {seed}")
        if any(int(k) < 0 for k in key):
            raise ValueError(f"Stream keys must be non-negative, got {key}")
        self._seed = int(seed)
        self._key = tuple(int(k) for k in key)

    @property
    def seed(self) -> int:
        """Root seed"""
        return self._seed

    @property
    def key(self) -> Tuple[int, ...]:
        """Key path below the root seed"""
        return self._key

    def child(self, *keys: int) -> "RngStream":
        """
        Derive an independent child stream

        Args:
            *keys: Integer keys appended to this stream's key path

        Returns:
            Child stream
        """
        return RngStream(self._seed, self._key + tuple(keys))

    def spawn(self, n: int) -> Tuple["RngStream", ...]:
        """Return children keyed ``0 .. n-1``"""
        return tuple(self.child(i) for i in range(n))

    def seed_sequence(self) -> np.random.SeedSequence:
        """SeedSequence addressing this stream"""
        return np.random.SeedSequence(entropy=self._seed, spawn_key=self._key)

    def generator(self) -> np.random.Generator:
        """
        Create a generator positioned at the start of this stream

        Returns:
            numpy Generator backed by the Philox counter-based bit generator
        """
        return np.random.Generator(np.random.Philox(self.seed_sequence()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RngStream):
            return NotImplemented
        return self._seed == other._seed and self._key == other._key

    def __hash__(self) -> int:
        return hash((self._seed, self._key))

    def __repr__(self) -> str:
        return f"RngStream(seed={self._seed}, key={self._key})"
